// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fewshot/dataset.hpp"
#include "fewshot/featurize.hpp"

namespace fewshot {

enum class Metric { cosine, euclidean, jaccard, fuzzy };
enum class IndexBackend { exact, ann };

std::string to_string(Metric metric);
std::string to_string(IndexBackend backend);
Metric metric_from_string(const std::string& name);
IndexBackend backend_from_string(const std::string& name);

// One retrieval result. Hits are sorted by descending score with ties broken
// by ascending id; ranks are consecutive from 1.
struct NeighborHit {
  std::string id;
  double score = 0.0;
  int rank = 0;

  bool operator==(const NeighborHit&) const = default;
};

double dot(const FeatureVector& a, const FeatureVector& b);

// dot(a, b) / (|a| |b|); 0 when either norm is 0.
double cosine_similarity(const FeatureVector& a, const FeatureVector& b);

double euclidean_distance(const FeatureVector& a, const FeatureVector& b);

// Maps a distance into the shared "higher is better" score space.
inline double distance_to_similarity(double distance) {
  return 1.0 / (1.0 + distance);
}

// |a ∩ b| / |a ∪ b| over term sets; 1.0 when both are empty.
double jaccard_similarity(const std::vector<std::string>& a,
                          const std::vector<std::string>& b);
double jaccard_similarity(const FeatureVector& a, const FeatureVector& b);

// Edit distance restricted to insertions and deletions (a substitution costs
// 2), computed over codepoints.
std::size_t indel_distance(std::string_view a, std::string_view b);

// Normalized indel similarity: 1 - indel(a, b) / (|a| + |b|); 1.0 when both
// strings are empty.
double fuzzy_ratio(std::string_view a, std::string_view b);

struct AnnParams {
  int degree = 16;         // graph out-degree target at build time
  int search_breadth = 64; // beam width during queries

  bool operator==(const AnnParams&) const = default;
};

// Retrieval structure over a store's examples. Exact backend scans every
// entry; ann backend navigates a small-world graph (cosine/euclidean only).
// Immutable after build; concurrent queries are safe.
class SearchIndex {
 public:
  SearchIndex() = default;

  static SearchIndex build(const ExampleStore& store, Metric metric,
                           IndexBackend backend,
                           const FeaturizerConfig& featurizer,
                           const AnnParams& ann = {});

  // Lower-level entry point used by build and by tests that work on raw
  // vectors. Not valid for the fuzzy metric, which needs raw strings.
  static SearchIndex from_vectors(std::vector<std::string> ids,
                                  std::vector<FeatureVector> vectors,
                                  Metric metric, IndexBackend backend,
                                  const AnnParams& ann = {});

  // Top-k hits for a text query, excluding `exclude` ids. Fewer than k come
  // back only when the candidate pool is smaller.
  std::vector<NeighborHit> knn(const std::string& query, int k,
                               const std::vector<std::string>& exclude = {}) const;
  std::vector<NeighborHit> knn(const FeatureVector& query, int k,
                               const std::vector<std::string>& exclude = {}) const;

  // Ids whose stored input equals `input` byte-for-byte (leave-one-out).
  std::vector<std::string> ids_with_input(const std::string& input) const;

  std::size_t size() const { return ids_.size(); }
  Metric metric() const { return metric_; }
  IndexBackend backend() const { return backend_; }
  const AnnParams& ann_params() const { return ann_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const FeaturizerConfig& featurizer() const { return featurizer_; }

  // Binary persistence with an embedded format-version header.
  void save(const std::filesystem::path& path) const;
  static SearchIndex load(const std::filesystem::path& path);

 private:
  double score_entry(std::size_t i, const FeatureVector& query_vec,
                     const std::string& query_raw) const;
  std::vector<NeighborHit> scan_all(const FeatureVector& query_vec,
                                    const std::string& query_raw, int k,
                                    const std::vector<std::string>& exclude) const;
  std::vector<std::pair<double, std::int32_t>> graph_search(
      const FeatureVector& query, int breadth) const;
  std::vector<NeighborHit> search_graph(const FeatureVector& query, int k,
                                        const std::vector<std::string>& exclude) const;
  void build_graph();
  void insert_node(std::int32_t node);
  void prune_neighbors(std::int32_t node);

  Metric metric_ = Metric::cosine;
  IndexBackend backend_ = IndexBackend::exact;
  AnnParams ann_;
  FeaturizerConfig featurizer_;
  Vocabulary vocab_;
  std::vector<std::string> ids_;
  std::vector<FeatureVector> vectors_;
  std::vector<std::string> raw_inputs_;  // fuzzy scoring + leave-one-out
  std::vector<std::vector<std::int32_t>> adjacency_;  // ann backend only
};

}  // namespace fewshot
