// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fewshot/dataset.hpp"

namespace fewshot {

enum class TokenScheme { word, char_ngram };

struct TokenizerScheme {
  TokenScheme kind = TokenScheme::word;
  int ngram = 3;  // window length for char_ngram

  bool operator==(const TokenizerScheme&) const = default;
};

// word: lowercases and splits on Unicode word boundaries (ICU), keeping
// letter/number tokens only. char_ngram(k): emits every k-codepoint window
// of the lowercased text, whitespace included.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerScheme& scheme);

// Term dictionary fitted over a store's inputs. Term ids are dense and
// assigned by first occurrence, so refitting the same store reproduces the
// same vocabulary. Remembers the tokenizer it was fitted with; immutable
// after fit.
class Vocabulary {
 public:
  explicit Vocabulary(const TokenizerScheme& scheme = {}) : scheme_(scheme) {}

  // Registers one document's tokens; distinct terms bump document frequency.
  void add_document(const std::vector<std::string>& tokens);

  std::int32_t id_of(const std::string& term) const;  // -1 when absent
  std::int64_t df(const std::string& term) const;     // 0 when absent
  std::int64_t df_by_id(std::int32_t id) const { return dfs_.at(id); }
  std::int64_t total_documents() const { return total_documents_; }
  std::size_t size() const { return terms_.size(); }
  const std::string& term(std::int32_t id) const { return terms_.at(id); }
  const TokenizerScheme& scheme() const { return scheme_; }

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const {
    return terms_ == other.terms_ && dfs_ == other.dfs_ &&
           total_documents_ == other.total_documents_ &&
           scheme_ == other.scheme_;
  }

 private:
  TokenizerScheme scheme_;
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<std::string> terms_;      // id -> term
  std::vector<std::int64_t> dfs_;       // id -> document frequency
  std::int64_t total_documents_ = 0;
};

enum class Weighting { bow, tfidf };

// Sparse term-weight vector: entries sorted by strictly increasing term id,
// all weights positive, Euclidean norm cached.
struct FeatureVector {
  std::vector<std::pair<std::int32_t, double>> entries;
  double norm = 0.0;

  // Sorts, merges duplicate ids, drops zero weights, rejects negatives,
  // caches the norm.
  static FeatureVector from_entries(
      std::vector<std::pair<std::int32_t, double>> raw);

  bool empty() const { return entries.empty(); }
  std::size_t nnz() const { return entries.size(); }
};

struct FeaturizerConfig {
  TokenizerScheme scheme;
  Weighting weighting = Weighting::tfidf;

  bool operator==(const FeaturizerConfig&) const = default;
};

// Smoothed inverse document frequency: ln((1 + N) / (1 + df)) + 1. Never
// zero, never divides by zero, non-increasing in df.
double idf(std::int64_t df, std::int64_t total_documents);

Vocabulary fit_vocabulary(const ExampleStore& store,
                          const TokenizerScheme& scheme);

// bow: raw term count. tfidf: count * idf(df, N). Terms missing from the
// vocabulary are dropped. Pure function.
FeatureVector vectorize(std::string_view text, const Vocabulary& vocab,
                        Weighting weighting);

}  // namespace fewshot
