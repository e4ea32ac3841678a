// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/global_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "fewshot/error.hpp"
#include "fewshot/rng.hpp"

namespace fewshot {

std::string to_string(GlobalKind kind) {
  switch (kind) {
    case GlobalKind::random: return "random";
    case GlobalKind::kmeans_medoid: return "kmeans_medoid";
    case GlobalKind::balanced_kmeans_medoid: return "balanced_kmeans_medoid";
  }
  throw_error(ErrorCode::parameter_error, "unknown global strategy");
}

GlobalKind global_kind_from_string(const std::string& name) {
  if (name == "random") return GlobalKind::random;
  if (name == "kmeans_medoid") return GlobalKind::kmeans_medoid;
  if (name == "balanced_kmeans_medoid") return GlobalKind::balanced_kmeans_medoid;
  throw_error(ErrorCode::parameter_error, "unknown global strategy: " + name);
}

void GlobalStrategy::validate() const {
  if (max_iter < 1) {
    throw_error(ErrorCode::parameter_error, "max_iter must be at least 1");
  }
  if (!(tol > 0.0)) {
    throw_error(ErrorCode::parameter_error, "tol must be positive");
  }
}

namespace {

int dense_dimension(const std::vector<FeatureVector>& vectors) {
  std::int32_t max_id = -1;
  for (const auto& vec : vectors) {
    if (!vec.entries.empty()) max_id = std::max(max_id, vec.entries.back().first);
  }
  return static_cast<int>(max_id + 1);
}

// ||x - c||^2 for sparse x against dense row c, given ||c||^2.
double sq_distance_to_row(const FeatureVector& x, const Eigen::MatrixXd& rows,
                          int row, double row_sq_norm) {
  double acc = row_sq_norm;
  for (const auto& [term, weight] : x.entries) {
    double c = rows(row, term);
    acc += weight * weight - 2.0 * weight * c;
  }
  return std::max(acc, 0.0);
}

}  // namespace

KMeansResult kmeans(const std::vector<FeatureVector>& vectors, int k,
                    std::uint64_t seed, int max_iter, double tol) {
  const std::size_t n = vectors.size();
  if (k < 1) throw_error(ErrorCode::parameter_error, "k must be at least 1");
  if (static_cast<std::size_t>(k) > n) {
    throw_error(ErrorCode::parameter_error,
                "k exceeds the number of vectors (" + std::to_string(k) + " > " +
                    std::to_string(n) + ")");
  }
  if (max_iter < 1) throw_error(ErrorCode::parameter_error, "max_iter must be at least 1");
  if (!(tol > 0.0)) throw_error(ErrorCode::parameter_error, "tol must be positive");

  const int dim = dense_dimension(vectors);
  std::mt19937_64 rng(seed);

  KMeansResult result;
  result.centroids = Eigen::MatrixXd::Zero(k, dim);
  result.assignments.assign(n, 0);

  auto set_row = [&](int row, const FeatureVector& vec) {
    result.centroids.row(row).setZero();
    for (const auto& [term, weight] : vec.entries) result.centroids(row, term) = weight;
  };

  // k-means++ seeding: first center uniform, the rest proportional to the
  // squared distance to the nearest chosen center.
  std::vector<double> nearest_sq(n, std::numeric_limits<double>::infinity());
  std::size_t first = uniform_index(rng, n);
  set_row(0, vectors[first]);
  for (int c = 1; c < k; ++c) {
    double prev_sq_norm = result.centroids.row(c - 1).squaredNorm();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = sq_distance_to_row(vectors[i], result.centroids, c - 1, prev_sq_norm);
      nearest_sq[i] = std::min(nearest_sq[i], d);
      total += nearest_sq[i];
    }
    std::size_t pick;
    if (total <= 0.0) {
      pick = uniform_index(rng, n);
    } else {
      double target = uniform_unit(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest_sq[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    set_row(c, vectors[pick]);
  }

  std::vector<double> centroid_sq_norms(k, 0.0);
  std::vector<double> distance_to_own(n, 0.0);
  std::vector<int> cluster_sizes(k, 0);
  Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, dim);

  for (int iter = 1; iter <= max_iter; ++iter) {
    result.iterations = iter;
    for (int c = 0; c < k; ++c) centroid_sq_norms[c] = result.centroids.row(c).squaredNorm();

    // Assignment step; ties go to the lower cluster index.
    std::fill(cluster_sizes.begin(), cluster_sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_distance_to_row(vectors[i], result.centroids, 0, centroid_sq_norms[0]);
      for (int c = 1; c < k; ++c) {
        double d = sq_distance_to_row(vectors[i], result.centroids, c, centroid_sq_norms[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      result.assignments[i] = best;
      distance_to_own[i] = best_d;
      ++cluster_sizes[best];
    }

    // Re-seed empty clusters from the farthest member of the largest cluster.
    for (int c = 0; c < k; ++c) {
      if (cluster_sizes[c] > 0) continue;
      int largest = static_cast<int>(std::max_element(cluster_sizes.begin(), cluster_sizes.end()) -
                                     cluster_sizes.begin());
      std::size_t farthest = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (result.assignments[i] != largest) continue;
        if (distance_to_own[i] > far_d) {
          far_d = distance_to_own[i];
          farthest = i;
        }
      }
      result.assignments[farthest] = c;
      distance_to_own[farthest] = 0.0;
      --cluster_sizes[largest];
      ++cluster_sizes[c];
    }

    // Update step.
    next.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      int c = result.assignments[i];
      for (const auto& [term, weight] : vectors[i].entries) next(c, term) += weight;
    }
    for (int c = 0; c < k; ++c) {
      if (cluster_sizes[c] > 0) next.row(c) /= static_cast<double>(cluster_sizes[c]);
    }

    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      shift = std::max(shift, (next.row(c) - result.centroids.row(c)).norm());
    }
    result.centroids = next;
    if (shift < tol) break;
  }

  // Final assignment against the converged centroids.
  for (int c = 0; c < k; ++c) centroid_sq_norms[c] = result.centroids.row(c).squaredNorm();
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double best_d = sq_distance_to_row(vectors[i], result.centroids, 0, centroid_sq_norms[0]);
    for (int c = 1; c < k; ++c) {
      double d = sq_distance_to_row(vectors[i], result.centroids, c, centroid_sq_norms[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    result.assignments[i] = best;
  }

  return result;
}

std::vector<std::size_t> cluster_medoids(const std::vector<FeatureVector>& vectors,
                                         const KMeansResult& result) {
  const int k = static_cast<int>(result.centroids.rows());
  std::vector<std::size_t> medoids(k, vectors.size());
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  for (int c = 0; c < k; ++c) {
    double sq_norm = result.centroids.row(c).squaredNorm();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (result.assignments[i] != c) continue;
      double d = sq_distance_to_row(vectors[i], result.centroids, c, sq_norm);
      if (d < best[c]) {
        best[c] = d;
        medoids[c] = i;
      }
    }
  }
  return medoids;
}

namespace {

std::vector<std::string> medoid_ids(const ExampleStore& store,
                                    const std::vector<std::string>& member_ids,
                                    int g, const GlobalStrategy& strategy,
                                    const FeaturizerConfig& featurizer,
                                    std::uint64_t seed) {
  ExampleStore members;
  for (const auto& id : member_ids) members.add(store.at(id));
  Vocabulary vocab = fit_vocabulary(members, featurizer.scheme);
  std::vector<FeatureVector> vectors;
  vectors.reserve(member_ids.size());
  for (const auto& id : member_ids) {
    vectors.push_back(vectorize(store.at(id).input, vocab, featurizer.weighting));
  }
  auto result = kmeans(vectors, g, seed, strategy.max_iter, strategy.tol);
  auto medoids = cluster_medoids(vectors, result);
  std::vector<std::string> out;
  out.reserve(medoids.size());
  for (std::size_t m : medoids) out.push_back(member_ids[m]);
  return out;
}

}  // namespace

std::vector<std::string> select_global(const ExampleStore& store, int g,
                                       const GlobalStrategy& strategy,
                                       const FeaturizerConfig& featurizer) {
  strategy.validate();
  if (g < 0) throw_error(ErrorCode::parameter_error, "g must be non-negative");
  if (static_cast<std::size_t>(g) > store.size()) {
    throw_error(ErrorCode::parameter_error,
                "g exceeds store size (" + std::to_string(g) + " > " +
                    std::to_string(store.size()) + ")");
  }
  if (g == 0) return {};

  if (strategy.kind == GlobalKind::random) {
    std::vector<std::string> ids;
    ids.reserve(store.size());
    for (const auto& ex : store.examples()) ids.push_back(ex.id);
    std::mt19937_64 rng(strategy.seed);
    // Partial Fisher-Yates: only the first g slots matter.
    for (int i = 0; i < g; ++i) {
      std::size_t j = i + uniform_index(rng, ids.size() - i);
      std::swap(ids[i], ids[j]);
    }
    ids.resize(g);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  if (strategy.kind == GlobalKind::kmeans_medoid) {
    std::vector<std::string> ids;
    ids.reserve(store.size());
    for (const auto& ex : store.examples()) ids.push_back(ex.id);
    return medoid_ids(store, ids, g, strategy, featurizer, strategy.seed);
  }

  // balanced_kmeans_medoid
  const auto& by_class = store.class_index();
  if (by_class.empty()) {
    throw_error(ErrorCode::configuration_error,
                "balanced selection needs class labels");
  }

  // Quota order: larger classes first, class name as tie-break.
  std::vector<std::pair<std::string, std::size_t>> classes;
  classes.reserve(by_class.size());
  std::size_t labeled_total = 0;
  for (const auto& [name, members] : by_class) {
    classes.emplace_back(name, members.size());
    labeled_total += members.size();
  }
  if (static_cast<std::size_t>(g) > labeled_total) {
    throw_error(ErrorCode::parameter_error,
                "g exceeds the number of labeled examples");
  }
  std::sort(classes.begin(), classes.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  const int num_classes = static_cast<int>(classes.size());
  std::vector<int> quota(num_classes, g / num_classes);
  for (int i = 0; i < g % num_classes; ++i) ++quota[i];

  // Cap quotas at class size and push the overflow down the order.
  int overflow = 0;
  for (int i = 0; i < num_classes; ++i) {
    int cap = static_cast<int>(classes[i].second);
    if (quota[i] > cap) {
      overflow += quota[i] - cap;
      quota[i] = cap;
    }
  }
  while (overflow > 0) {
    bool placed = false;
    for (int i = 0; i < num_classes && overflow > 0; ++i) {
      if (quota[i] < static_cast<int>(classes[i].second)) {
        ++quota[i];
        --overflow;
        placed = true;
      }
    }
    if (!placed) break;
  }

  std::vector<std::string> out;
  out.reserve(g);
  for (int i = 0; i < num_classes; ++i) {
    if (quota[i] == 0) continue;
    const auto& members = by_class.at(classes[i].first);
    auto picked = medoid_ids(store, members, quota[i], strategy, featurizer,
                             strategy.seed + static_cast<std::uint64_t>(i));
    out.insert(out.end(), picked.begin(), picked.end());
  }
  return out;
}

}  // namespace fewshot
