// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fewshot/llm_client.hpp"

namespace fewshot {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  int support = 0;  // gold occurrences of the class

  bool operator==(const ClassMetrics&) const = default;
};

// Per-class precision/recall over equal prediction and gold id sets. Classes
// absent from both sides are excluded. When a class is never predicted,
// precision is 1.0 if it also has no support, otherwise 0.0.
std::map<std::string, ClassMetrics> precision_recall(
    const std::map<std::string, std::string>& predictions,
    const std::map<std::string, std::string>& gold);

double accuracy(const std::map<std::string, std::string>& predictions,
                const std::map<std::string, std::string>& gold);

struct BleuScore {
  double value = 0.0;
  bool degenerate_input = false;  // an empty hypothesis was scored

  bool operator==(const BleuScore&) const = default;
};

// Modified (clipped) n-gram precision of the hypothesis against the
// references, over whitespace tokens.
double modified_ngram_precision(const std::string& hypothesis,
                                const std::vector<std::string>& references, int n);

// Geometric mean of clipped n-gram precisions for n up to
// min(max_n, hypothesis length), times the brevity penalty exp(1 - r/c) when
// c < r with r the closest reference length. No smoothing, so bleu(x, [x]) = 1.
BleuScore bleu(const std::string& hypothesis,
               const std::vector<std::string>& references, int max_n = 4);

// Corpus-level BLEU: n-gram counts and length totals are pooled across items
// before the ratios.
BleuScore corpus_bleu(const std::vector<std::string>& hypotheses,
                      const std::vector<std::vector<std::string>>& references,
                      int max_n = 4);

// F1 over the token-level longest common subsequence.
double rouge_l(const std::string& hypothesis, const std::string& reference);

struct Throughput {
  double items_per_second = 0.0;
  double output_tokens_per_second = 0.0;

  bool operator==(const Throughput&) const = default;
};

Throughput throughput(const std::vector<CompletionResult>& results,
                      double wall_time_seconds);

// First non-empty line of a completion, trimmed and case-folded, matched
// against the task's label set. Returns the canonical label or nothing.
std::optional<std::string> parse_label(const std::string& completion,
                                       const std::vector<std::string>& label_set);

struct EvalReport {
  std::map<std::string, ClassMetrics> per_class;
  double accuracy = 0.0;
  std::optional<double> bleu;
  std::optional<double> rouge_l;
  double items_per_second = 0.0;
  double output_tokens_per_second = 0.0;
  nlohmann::json run_metadata;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

EvalReport build_classification_report(
    const std::map<std::string, std::string>& predictions,
    const std::map<std::string, std::string>& gold,
    const std::vector<CompletionResult>& results, double wall_time_seconds,
    nlohmann::json run_metadata);

EvalReport build_generation_report(const std::vector<std::string>& hypotheses,
                                   const std::vector<std::string>& references,
                                   const std::vector<CompletionResult>& results,
                                   double wall_time_seconds,
                                   nlohmann::json run_metadata);

}  // namespace fewshot
