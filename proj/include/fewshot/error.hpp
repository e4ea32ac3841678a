// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fewshot {

enum class ErrorCode {
  load_error,           // malformed dataset line, unreadable file
  duplicate_id,         // two records declare the same id
  parameter_error,      // argument outside its contract
  configuration_error,  // invalid combination of settings
  template_error,       // prompt template missing a placeholder
  evaluation_error,     // prediction/gold mismatch
  transport_error,      // retryable: timeout, connection failure
  backend_error,        // non-2xx response from an LLM backend
  protocol_error,       // unparseable backend payload
  io_error,             // filesystem failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fewshot
