// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fewshot/dataset.hpp"
#include "fewshot/featurize.hpp"

namespace fewshot {

enum class GlobalKind { random, kmeans_medoid, balanced_kmeans_medoid };

std::string to_string(GlobalKind kind);
GlobalKind global_kind_from_string(const std::string& name);

struct GlobalStrategy {
  GlobalKind kind = GlobalKind::kmeans_medoid;
  std::uint64_t seed = 0;
  int max_iter = 100;
  double tol = 1e-4;

  void validate() const;
  bool operator==(const GlobalStrategy&) const = default;
};

struct KMeansResult {
  std::vector<int> assignments;  // parallel to the input vectors
  Eigen::MatrixXd centroids;     // k rows, one per cluster
  int iterations = 0;
};

// Lloyd's algorithm over sparse inputs with k-means++ seeding. Empty clusters
// are re-seeded from the farthest member of the largest cluster. Deterministic
// for a given seed.
KMeansResult kmeans(const std::vector<FeatureVector>& vectors, int k,
                    std::uint64_t seed, int max_iter = 100, double tol = 1e-4);

// Index (into `vectors`) of the member closest to its centroid, per cluster.
// Ties go to the lower member index.
std::vector<std::size_t> cluster_medoids(const std::vector<FeatureVector>& vectors,
                                         const KMeansResult& result);

// Pick g corpus-representative example ids. random samples uniformly without
// replacement; kmeans_medoid returns one medoid per cluster (k = g); the
// balanced variant splits g into per-class quotas first (remainder to larger
// classes, name as tie-break) and clusters within each class.
std::vector<std::string> select_global(const ExampleStore& store, int g,
                                       const GlobalStrategy& strategy,
                                       const FeaturizerConfig& featurizer = {});

}  // namespace fewshot
