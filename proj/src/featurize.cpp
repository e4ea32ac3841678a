// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <locale>
#include <map>

#include <boost/locale.hpp>

#include "fewshot/error.hpp"

namespace fewshot {

namespace {

const std::locale& utf8_locale() {
  static const std::locale loc = boost::locale::generator()("en_US.UTF-8");
  return loc;
}

// Byte offsets of each codepoint start, plus one past-the-end sentinel.
std::vector<std::size_t> codepoint_starts(std::string_view text) {
  std::vector<std::size_t> starts;
  std::size_t i = 0;
  while (i < text.size()) {
    starts.push_back(i);
    unsigned char c = text[i];
    std::size_t len = 1;
    if ((c & 0x80) == 0x00) len = 1;
    else if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    i += len;
  }
  starts.push_back(text.size());
  return starts;
}

std::vector<std::string> tokenize_words(const std::string& lowered) {
  namespace bl = boost::locale::boundary;
  bl::ssegment_index words(bl::word, lowered.begin(), lowered.end(),
                           utf8_locale());
  words.rule(bl::word_any);  // skip pure punctuation/whitespace segments
  std::vector<std::string> out;
  for (const auto& seg : words) out.push_back(seg.str());
  return out;
}

std::vector<std::string> tokenize_char_ngrams(const std::string& lowered,
                                              int k) {
  std::vector<std::string> out;
  auto starts = codepoint_starts(lowered);
  std::size_t n_codepoints = starts.size() - 1;
  if (n_codepoints < static_cast<std::size_t>(k)) return out;
  for (std::size_t i = 0; i + k <= n_codepoints; ++i) {
    out.push_back(lowered.substr(starts[i], starts[i + k] - starts[i]));
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerScheme& scheme) {
  if (scheme.kind == TokenScheme::char_ngram && scheme.ngram < 1) {
    throw_error(ErrorCode::parameter_error, "char n-gram length must be >= 1");
  }
  if (text.empty()) return {};
  std::string lowered =
      boost::locale::to_lower(std::string(text), utf8_locale());
  if (scheme.kind == TokenScheme::word) return tokenize_words(lowered);
  return tokenize_char_ngrams(lowered, scheme.ngram);
}

void Vocabulary::add_document(const std::vector<std::string>& tokens) {
  ++total_documents_;
  // Distinct terms only: df is a document count, not a term count.
  std::vector<std::string_view> seen;
  seen.reserve(tokens.size());
  for (const auto& tok : tokens) {
    auto [it, inserted] =
        ids_.try_emplace(tok, static_cast<std::int32_t>(terms_.size()));
    if (inserted) {
      terms_.push_back(tok);
      dfs_.push_back(0);
    }
    if (std::find(seen.begin(), seen.end(), std::string_view(tok)) ==
        seen.end()) {
      seen.push_back(tok);
      ++dfs_[it->second];
    }
  }
}

std::int32_t Vocabulary::id_of(const std::string& term) const {
  auto it = ids_.find(term);
  return it == ids_.end() ? -1 : it->second;
}

std::int64_t Vocabulary::df(const std::string& term) const {
  auto it = ids_.find(term);
  return it == ids_.end() ? 0 : dfs_[it->second];
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json j;
  j["scheme"] = scheme_.kind == TokenScheme::word ? "word" : "char_ngram";
  j["ngram"] = scheme_.ngram;
  j["total_documents"] = total_documents_;
  j["terms"] = terms_;
  j["document_frequencies"] = dfs_;
  return j;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  Vocabulary vocab;
  try {
    vocab.scheme_.kind = j.at("scheme").get<std::string>() == "word"
                             ? TokenScheme::word
                             : TokenScheme::char_ngram;
    vocab.scheme_.ngram = j.at("ngram").get<int>();
    vocab.total_documents_ = j.at("total_documents").get<std::int64_t>();
    vocab.terms_ = j.at("terms").get<std::vector<std::string>>();
    vocab.dfs_ = j.at("document_frequencies").get<std::vector<std::int64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorCode::load_error,
                std::string("bad vocabulary payload: ") + e.what());
  }
  if (vocab.terms_.size() != vocab.dfs_.size()) {
    throw_error(ErrorCode::load_error,
                "vocabulary terms and frequencies disagree in length");
  }
  for (std::size_t i = 0; i < vocab.terms_.size(); ++i) {
    vocab.ids_.emplace(vocab.terms_[i], static_cast<std::int32_t>(i));
  }
  return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw_error(ErrorCode::io_error, "cannot write vocabulary " + path.string());
  }
  out << to_json().dump(2) << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_error(ErrorCode::io_error, "cannot open vocabulary " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorCode::load_error,
                std::string("bad vocabulary file: ") + e.what());
  }
  return from_json(j);
}

FeatureVector FeatureVector::from_entries(
    std::vector<std::pair<std::int32_t, double>> raw) {
  std::sort(raw.begin(), raw.end());
  FeatureVector vec;
  vec.entries.reserve(raw.size());
  for (const auto& [id, weight] : raw) {
    if (weight < 0.0) {
      throw_error(ErrorCode::parameter_error,
                  "feature weights must be non-negative");
    }
    if (weight == 0.0) continue;
    if (!vec.entries.empty() && vec.entries.back().first == id) {
      vec.entries.back().second += weight;
    } else {
      vec.entries.emplace_back(id, weight);
    }
  }
  double sq = 0.0;
  for (const auto& [id, weight] : vec.entries) sq += weight * weight;
  vec.norm = std::sqrt(sq);
  return vec;
}

double idf(std::int64_t df, std::int64_t total_documents) {
  return std::log((1.0 + static_cast<double>(total_documents)) /
                  (1.0 + static_cast<double>(df))) +
         1.0;
}

Vocabulary fit_vocabulary(const ExampleStore& store,
                          const TokenizerScheme& scheme) {
  if (store.empty()) {
    throw_error(ErrorCode::parameter_error,
                "cannot fit a vocabulary on an empty store");
  }
  Vocabulary vocab(scheme);
  for (const auto& ex : store.examples()) {
    vocab.add_document(tokenize(ex.input, scheme));
  }
  return vocab;
}

FeatureVector vectorize(std::string_view text, const Vocabulary& vocab,
                        Weighting weighting) {
  std::map<std::int32_t, double> counts;
  for (const auto& tok : tokenize(text, vocab.scheme())) {
    std::int32_t id = vocab.id_of(tok);
    if (id >= 0) counts[id] += 1.0;
  }
  std::vector<std::pair<std::int32_t, double>> entries;
  entries.reserve(counts.size());
  for (const auto& [id, count] : counts) {
    double weight = count;
    if (weighting == Weighting::tfidf) {
      weight *= idf(vocab.df_by_id(id), vocab.total_documents());
    }
    entries.emplace_back(id, weight);
  }
  return FeatureVector::from_entries(std::move(entries));
}

}  // namespace fewshot
