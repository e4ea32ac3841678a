// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fewshot/error.hpp"
#include "fewshot/prompt.hpp"

namespace fewshot {

enum class BackendKind { http_openai_compatible, mock_nearest_label, mock_echo };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& name);

struct CompletionResult {
  std::string text;
  int input_tokens = 0;
  int output_tokens = 0;
  double latency_seconds = 0.0;
  bool tokens_estimated = false;  // usage missing, counts came from estimate_tokens
  std::optional<std::string> error;
  std::optional<ErrorCode> error_code;

  bool ok() const { return !error.has_value(); }
};

struct BackendConfig {
  BackendKind kind = BackendKind::mock_nearest_label;
  std::string endpoint = "http://127.0.0.1:8000";
  std::string model_name = "default";
  double temperature = 0.0;
  int max_output_tokens = 256;
  double request_timeout_seconds = 30.0;
  int max_concurrency = 4;
  std::string api_key_env;  // name of the env var holding the bearer token

  void validate() const;
  bool operator==(const BackendConfig&) const = default;
};

// One completion provider. Implementations must be safe for concurrent
// complete() calls; failures come back in the result, not as exceptions.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual CompletionResult complete(const AssembledPrompt& prompt) = 0;

  // True when reported latencies are synthetic and reproducible (mocks).
  virtual bool deterministic_timing() const = 0;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

CompletionResult complete(const AssembledPrompt& prompt, const BackendConfig& config);

// Results in input order; at most config.max_concurrency requests in flight.
// Per-item failures land in their slots without aborting the rest.
std::vector<CompletionResult> complete_batch(const std::vector<AssembledPrompt>& prompts,
                                             const BackendConfig& config);
std::vector<CompletionResult> complete_batch(const std::vector<AssembledPrompt>& prompts,
                                             Backend& backend, int max_concurrency);

}  // namespace fewshot
