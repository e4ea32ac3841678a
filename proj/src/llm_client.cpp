// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/llm_client.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fewshot/similarity.hpp"

namespace fewshot {

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::http_openai_compatible: return "http_openai_compatible";
    case BackendKind::mock_nearest_label: return "mock_nearest_label";
    case BackendKind::mock_echo: return "mock_echo";
  }
  throw_error(ErrorCode::parameter_error, "unknown backend kind");
}

BackendKind backend_kind_from_string(const std::string& name) {
  if (name == "http_openai_compatible") return BackendKind::http_openai_compatible;
  if (name == "mock_nearest_label") return BackendKind::mock_nearest_label;
  if (name == "mock_echo") return BackendKind::mock_echo;
  throw_error(ErrorCode::parameter_error, "unknown backend kind: " + name);
}

void BackendConfig::validate() const {
  if (temperature < 0.0) {
    throw_error(ErrorCode::configuration_error, "temperature must be non-negative");
  }
  if (max_concurrency < 1) {
    throw_error(ErrorCode::configuration_error, "max_concurrency must be at least 1");
  }
  if (max_output_tokens < 1) {
    throw_error(ErrorCode::configuration_error, "max_output_tokens must be at least 1");
  }
  if (!(request_timeout_seconds > 0.0)) {
    throw_error(ErrorCode::configuration_error, "request_timeout must be positive");
  }
  if (kind == BackendKind::http_openai_compatible && endpoint.empty()) {
    throw_error(ErrorCode::configuration_error, "http backend needs an endpoint");
  }
}

namespace {

// Mocks report a reproducible latency proportional to the token volume so
// throughput comparisons behave like a real serving stack without the noise.
double synthetic_latency(int input_tokens, int output_tokens) {
  return 1e-4 + 5e-5 * static_cast<double>(input_tokens + output_tokens);
}

class MockNearestLabelBackend final : public Backend {
 public:
  CompletionResult complete(const AssembledPrompt& prompt) override {
    auto parsed = parse_prompt(prompt.text);
    std::string best_output;
    double best_score = -1.0;
    for (const auto& [input, output] : parsed.blocks) {
      double score = fuzzy_ratio(parsed.query, input);
      if (score > best_score) {
        best_score = score;
        best_output = output;
      }
    }
    CompletionResult result;
    result.text = best_output;
    result.input_tokens = prompt.token_estimate;
    result.output_tokens = estimate_tokens(result.text);
    result.tokens_estimated = true;
    result.latency_seconds = synthetic_latency(result.input_tokens, result.output_tokens);
    return result;
  }

  bool deterministic_timing() const override { return true; }
};

class MockEchoBackend final : public Backend {
 public:
  CompletionResult complete(const AssembledPrompt& prompt) override {
    auto parsed = parse_prompt(prompt.text);
    CompletionResult result;
    result.text = parsed.query.empty() ? prompt.text : parsed.query;
    result.input_tokens = prompt.token_estimate;
    result.output_tokens = estimate_tokens(result.text);
    result.tokens_estimated = true;
    result.latency_seconds = synthetic_latency(result.input_tokens, result.output_tokens);
    return result;
  }

  bool deterministic_timing() const override { return true; }
};

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {}

  CompletionResult complete(const AssembledPrompt& prompt) override {
    auto started = std::chrono::steady_clock::now();
    CompletionResult result = post_with_retries(prompt);
    auto elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    result.latency_seconds = std::max(elapsed, 1e-9);
    return result;
  }

  bool deterministic_timing() const override { return false; }

 private:
  nlohmann::json build_body(const AssembledPrompt& prompt) const {
    nlohmann::json messages = nlohmann::json::array();
    std::size_t cut = prompt.query_offset;
    if (cut > 0 && cut < prompt.text.size()) {
      messages.push_back({{"role", "system"}, {"content", prompt.text.substr(0, cut)}});
      messages.push_back({{"role", "user"}, {"content", prompt.text.substr(cut)}});
    } else {
      messages.push_back({{"role", "user"}, {"content", prompt.text}});
    }
    return {{"model", config_.model_name},
            {"temperature", config_.temperature},
            {"max_tokens", config_.max_output_tokens},
            {"messages", std::move(messages)}};
  }

  CompletionResult post_with_retries(const AssembledPrompt& prompt) const {
    const std::string body = build_body(prompt).dump();
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
      if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
      }
    }

    std::string last_transport_error;
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(100 * (1 << (attempt - 1))));
      }
      httplib::Client client(config_.endpoint);
      auto timeout = std::chrono::duration<double>(config_.request_timeout_seconds);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);

      auto res = client.Post("/v1/chat/completions", headers, body, "application/json");
      if (!res) {
        last_transport_error = httplib::to_string(res.error());
        continue;  // transport failure, retryable
      }
      if (res->status < 200 || res->status >= 300) {
        return fail(ErrorCode::backend_error,
                    "backend returned status " + std::to_string(res->status) +
                        ": " + res->body, prompt);
      }
      return parse_response(res->body, prompt);
    }
    return fail(ErrorCode::transport_error,
                "transport failure after " + std::to_string(kMaxRetries + 1) +
                    " attempts: " + last_transport_error, prompt);
  }

  CompletionResult parse_response(const std::string& body,
                                  const AssembledPrompt& prompt) const {
    nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded()) {
      return fail(ErrorCode::protocol_error, "response is not valid JSON", prompt);
    }
    if (!doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty()) {
      return fail(ErrorCode::protocol_error, "response has no choices", prompt);
    }
    const auto& first = doc["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
      return fail(ErrorCode::protocol_error, "response has no message content", prompt);
    }
    CompletionResult result;
    result.text = first["message"]["content"].get<std::string>();
    if (doc.contains("usage") && doc["usage"].contains("prompt_tokens") &&
        doc["usage"].contains("completion_tokens")) {
      result.input_tokens = doc["usage"]["prompt_tokens"].get<int>();
      result.output_tokens = doc["usage"]["completion_tokens"].get<int>();
    } else {
      result.input_tokens = prompt.token_estimate;
      result.output_tokens = estimate_tokens(result.text);
      result.tokens_estimated = true;
    }
    return result;
  }

  CompletionResult fail(ErrorCode code, const std::string& message,
                        const AssembledPrompt& prompt) const {
    CompletionResult result;
    result.error = message;
    result.error_code = code;
    result.input_tokens = prompt.token_estimate;
    result.tokens_estimated = true;
    return result;
  }

  static constexpr int kMaxRetries = 2;
  BackendConfig config_;
};

}  // namespace

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  config.validate();
  switch (config.kind) {
    case BackendKind::http_openai_compatible:
      return std::make_unique<HttpBackend>(config);
    case BackendKind::mock_nearest_label:
      return std::make_unique<MockNearestLabelBackend>();
    case BackendKind::mock_echo:
      return std::make_unique<MockEchoBackend>();
  }
  throw_error(ErrorCode::configuration_error, "unknown backend kind");
}

CompletionResult complete(const AssembledPrompt& prompt, const BackendConfig& config) {
  return make_backend(config)->complete(prompt);
}

std::vector<CompletionResult> complete_batch(const std::vector<AssembledPrompt>& prompts,
                                             Backend& backend, int max_concurrency) {
  if (max_concurrency < 1) {
    throw_error(ErrorCode::configuration_error, "max_concurrency must be at least 1");
  }
  std::vector<CompletionResult> results(prompts.size());
  if (prompts.empty()) return results;

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= prompts.size()) break;
      try {
        results[i] = backend.complete(prompts[i]);
      } catch (const std::exception& e) {
        results[i].error = e.what();
        results[i].error_code = ErrorCode::backend_error;
      }
    }
  };

  std::size_t threads = std::min<std::size_t>(max_concurrency, prompts.size());
  if (threads == 1) {
    worker();
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

std::vector<CompletionResult> complete_batch(const std::vector<AssembledPrompt>& prompts,
                                             const BackendConfig& config) {
  auto backend = make_backend(config);
  return complete_batch(prompts, *backend, config.max_concurrency);
}

}  // namespace fewshot
