// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "fewshot/error.hpp"
#include "fewshot/similarity.hpp"
#include "test_util.hpp"

using namespace fewshot;

namespace {

std::vector<std::uint32_t> decode_utf8(std::string_view s) {
  std::vector<std::uint32_t> cps;
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
    std::uint32_t cp = c & (0xFF >> (len + 1));
    if (len == 1) cp = c;
    for (std::size_t j = 1; j < len && i + j < s.size(); ++j) {
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + j]) & 0x3F);
    }
    cps.push_back(cp);
    i += len;
  }
  return cps;
}

// Reference LCS: the classic full-matrix recurrence, no shortcuts.
std::size_t lcs_reference(std::string_view a, std::string_view b) {
  auto ca = decode_utf8(a);
  auto cb = decode_utf8(b);
  std::vector<std::vector<std::size_t>> dp(ca.size() + 1,
                                           std::vector<std::size_t>(cb.size() + 1, 0));
  for (std::size_t i = 1; i <= ca.size(); ++i) {
    for (std::size_t j = 1; j <= cb.size(); ++j) {
      dp[i][j] = ca[i - 1] == cb[j - 1] ? dp[i - 1][j - 1] + 1
                                        : std::max(dp[i - 1][j], dp[i][j - 1]);
    }
  }
  return dp[ca.size()][cb.size()];
}

double fuzzy_reference(std::string_view a, std::string_view b) {
  std::size_t la = decode_utf8(a).size();
  std::size_t lb = decode_utf8(b).size();
  if (la + lb == 0) return 1.0;
  std::size_t indel = la + lb - 2 * lcs_reference(a, b);
  return 1.0 - static_cast<double>(indel) / static_cast<double>(la + lb);
}

FeatureVector vec_of(std::vector<std::pair<std::int32_t, double>> entries) {
  return FeatureVector::from_entries(std::move(entries));
}

std::string random_ascii(std::mt19937_64& rng, std::size_t max_len,
                         int alphabet = 6) {
  std::size_t len = rng() % (max_len + 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) {
    s += static_cast<char>('a' + rng() % alphabet);
  }
  return s;
}

// Reference top-k: score every candidate, sort by (-score, id), cut at k.
std::vector<NeighborHit> brute_force_knn(
    const std::vector<std::string>& ids,
    const std::vector<FeatureVector>& vectors, const FeatureVector& query,
    Metric metric, int k, const std::vector<std::string>& exclude = {}) {
  std::vector<NeighborHit> all;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (std::find(exclude.begin(), exclude.end(), ids[i]) != exclude.end()) {
      continue;
    }
    double score = 0.0;
    switch (metric) {
      case Metric::cosine:
        score = cosine_similarity(query, vectors[i]);
        break;
      case Metric::euclidean:
        score = distance_to_similarity(euclidean_distance(query, vectors[i]));
        break;
      case Metric::jaccard:
        score = jaccard_similarity(query, vectors[i]);
        break;
      case Metric::fuzzy:
        break;
    }
    all.push_back({ids[i], score, 0});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (all.size() > static_cast<std::size_t>(k)) all.resize(k);
  for (std::size_t i = 0; i < all.size(); ++i) all[i].rank = static_cast<int>(i) + 1;
  return all;
}

std::vector<FeatureVector> random_vectors(std::mt19937_64& rng, std::size_t n,
                                          int dim, int nnz) {
  std::vector<FeatureVector> out;
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::int32_t, double>> entries;
    for (int j = 0; j < nnz; ++j) {
      entries.emplace_back(static_cast<std::int32_t>(rng() % dim), weight(rng));
    }
    out.push_back(FeatureVector::from_entries(std::move(entries)));
  }
  return out;
}

}  // namespace

TEST_SUITE("similarity") {

TEST_CASE("cosine of perpendicular-ish unit vectors") {
  auto a = vec_of({{0, 1.0}});
  auto b = vec_of({{0, 1.0}, {1, 1.0}});
  CHECK(cosine_similarity(a, b) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  auto c = vec_of({{2, 3.0}});
  CHECK(cosine_similarity(a, c) == doctest::Approx(0.0));
}

TEST_CASE("cosine with a zero vector is zero, not NaN") {
  FeatureVector zero;
  auto a = vec_of({{0, 1.0}});
  CHECK(cosine_similarity(zero, a) == 0.0);
  CHECK(cosine_similarity(a, zero) == 0.0);
  CHECK(cosine_similarity(zero, zero) == 0.0);
}

TEST_CASE("euclidean distance matches the hypotenuse") {
  auto a = vec_of({{0, 3.0}});
  auto b = vec_of({{1, 4.0}});
  CHECK(euclidean_distance(a, b) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(distance_to_similarity(5.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(euclidean_distance(a, a) == doctest::Approx(0.0));
}

TEST_CASE("jaccard over token sets") {
  std::vector<std::string> a = {"a", "b", "c"};
  std::vector<std::string> b = {"b", "c", "d"};
  const std::vector<std::string> none;
  CHECK(jaccard_similarity(a, b) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(jaccard_similarity(none, none) == doctest::Approx(1.0));
  CHECK(jaccard_similarity(a, none) == doctest::Approx(0.0));
  // Duplicates collapse: {a, a, b} is the set {a, b}.
  std::vector<std::string> dup = {"a", "a", "b"};
  std::vector<std::string> ab = {"a", "b"};
  CHECK(jaccard_similarity(dup, ab) == doctest::Approx(1.0));
}

TEST_CASE("jaccard over feature vectors uses nonzero ids as the set") {
  auto a = vec_of({{0, 2.0}, {1, 5.0}, {2, 1.0}});
  auto b = vec_of({{1, 9.0}, {2, 9.0}, {3, 9.0}});
  CHECK(jaccard_similarity(a, b) == doctest::Approx(0.5).epsilon(1e-12));
  FeatureVector zero;
  CHECK(jaccard_similarity(zero, zero) == doctest::Approx(1.0));
}

TEST_CASE("fuzzy ratio on the classic edit-distance pair") {
  // kitten/sitting share the subsequence "ittn": indel cost 5 over 13 chars.
  CHECK(lcs_reference("kitten", "sitting") == 4);
  CHECK(indel_distance("kitten", "sitting") == 5);
  CHECK(fuzzy_ratio("kitten", "sitting") == doctest::Approx(0.61538).epsilon(1e-5));
  CHECK(fuzzy_ratio("kitten", "sitting") ==
        doctest::Approx(fuzzy_reference("kitten", "sitting")).epsilon(1e-12));
}

TEST_CASE("fuzzy ratio edge cases") {
  CHECK(fuzzy_ratio("abc", "xyz") == doctest::Approx(0.0));
  CHECK(fuzzy_ratio("", "") == doctest::Approx(1.0));
  CHECK(fuzzy_ratio("abc", "") == doctest::Approx(0.0));
  CHECK(fuzzy_ratio("same", "same") == doctest::Approx(1.0));
}

TEST_CASE("fuzzy ratio counts codepoints, not bytes") {
  // Two-byte characters: 3 codepoints each, 1 shared subsequence codepoint.
  std::string a = "\xC3\xA9\xC3\xA8\xC3\xAA";  // eacute egrave ecirc
  std::string b = "\xC3\xA9\xC3\xB4\xC3\xBB";  // eacute ocirc ucirc
  CHECK(fuzzy_ratio(a, b) == doctest::Approx(fuzzy_reference(a, b)).epsilon(1e-12));
  CHECK(fuzzy_ratio(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("fuzzy ratio agrees with the reference recurrence on random strings") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    // Lengths past 64 exercise the long-string fallback path as well.
    auto a = random_ascii(rng, 120);
    auto b = random_ascii(rng, 120);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(fuzzy_ratio(a, b) == doctest::Approx(fuzzy_reference(a, b)).epsilon(1e-12));
    CHECK(fuzzy_ratio(a, b) == doctest::Approx(fuzzy_ratio(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("fuzzy ratio is bounded and maximal only on equal strings") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_ascii(rng, 40);
    auto b = random_ascii(rng, 40);
    double r = fuzzy_ratio(a, b);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    if (a == b) CHECK(r == doctest::Approx(1.0));
    if (r == 1.0) CHECK(a == b);
  }
}

TEST_CASE("exact knn equals a brute-force scan for every metric") {
  std::mt19937_64 rng(7);
  const std::size_t n = 400;
  auto vectors = random_vectors(rng, n, 50, 8);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));

  for (Metric metric : {Metric::cosine, Metric::euclidean, Metric::jaccard}) {
    CAPTURE(to_string(metric));
    auto index = SearchIndex::from_vectors(ids, vectors, metric,
                                           IndexBackend::exact);
    for (int q = 0; q < 10; ++q) {
      auto query = random_vectors(rng, 1, 50, 8)[0];
      auto got = index.knn(query, 15);
      auto want = brute_force_knn(ids, vectors, query, metric, 15);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].id == want[i].id);
        CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-12));
        CHECK(got[i].rank == static_cast<int>(i) + 1);
      }
    }
  }
}

TEST_CASE("ties break on ascending id") {
  std::vector<std::string> ids = {"zeta", "alpha", "mid"};
  auto same = vec_of({{0, 1.0}});
  auto index = SearchIndex::from_vectors(ids, {same, same, same},
                                         Metric::cosine, IndexBackend::exact);
  auto hits = index.knn(same, 3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].id == "alpha");
  CHECK(hits[1].id == "mid");
  CHECK(hits[2].id == "zeta");
  CHECK(hits[0].rank == 1);
  CHECK(hits[1].rank == 2);
  CHECK(hits[2].rank == 3);
}

TEST_CASE("excluded ids never appear and ranks stay consecutive") {
  std::mt19937_64 rng(11);
  auto vectors = random_vectors(rng, 50, 20, 5);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < 50; ++i) ids.push_back("v" + std::to_string(i));
  auto index = SearchIndex::from_vectors(ids, vectors, Metric::cosine,
                                         IndexBackend::exact);

  auto query = vectors[3];
  auto baseline = index.knn(query, 5);
  REQUIRE(baseline[0].id == "v3");  // self-match dominates

  std::vector<std::string> exclude = {"v3", baseline[1].id};
  auto filtered = index.knn(query, 5, exclude);
  REQUIRE(filtered.size() == 5);
  for (const auto& hit : filtered) {
    CHECK(hit.id != exclude[0]);
    CHECK(hit.id != exclude[1]);
  }
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    CHECK(filtered[i].rank == static_cast<int>(i) + 1);
  }
  auto want = brute_force_knn(ids, vectors, query, Metric::cosine, 5, exclude);
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    CHECK(filtered[i].id == want[i].id);
  }
}

TEST_CASE("k edge cases") {
  auto a = vec_of({{0, 1.0}});
  auto index = SearchIndex::from_vectors({"only"}, {a}, Metric::cosine,
                                         IndexBackend::exact);
  CHECK(index.knn(a, 0).empty());
  CHECK(index.knn(a, 10).size() == 1);  // pool smaller than k
  CHECK_THROWS_AS(index.knn(a, -1), Error);
}

TEST_CASE("fuzzy index retrieves by raw text and rejects vector queries") {
  ExampleStore store;
  store.add({"a", "the red shoe", "1", std::nullopt, {}});
  store.add({"b", "a blue sock", "2", std::nullopt, {}});
  store.add({"c", "the red shoes", "3", std::nullopt, {}});
  auto index = SearchIndex::build(store, Metric::fuzzy, IndexBackend::exact,
                                  FeaturizerConfig{});
  auto hits = index.knn(std::string("the red shoe"), 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].id == "a");
  CHECK(hits[0].score == doctest::Approx(1.0));
  CHECK(hits[1].id == "c");

  CHECK_THROWS_AS(index.knn(vec_of({{0, 1.0}}), 1), Error);
  try {
    index.knn(vec_of({{0, 1.0}}), 1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::configuration_error);
  }
}

TEST_CASE("invalid metric and backend combinations are rejected") {
  ExampleStore store;
  store.add({"a", "x", "y", std::nullopt, {}});
  CHECK_THROWS_AS(SearchIndex::build(store, Metric::jaccard, IndexBackend::ann,
                                     FeaturizerConfig{}),
                  Error);
  CHECK_THROWS_AS(SearchIndex::build(store, Metric::fuzzy, IndexBackend::ann,
                                     FeaturizerConfig{}),
                  Error);
  auto v = vec_of({{0, 1.0}});
  CHECK_THROWS_AS(SearchIndex::from_vectors({"a"}, {v}, Metric::fuzzy,
                                            IndexBackend::exact),
                  Error);
  CHECK_THROWS_AS(SearchIndex::from_vectors({"a", "a"}, {v, v}, Metric::cosine,
                                            IndexBackend::exact),
                  Error);
  ExampleStore empty;
  CHECK_THROWS_AS(SearchIndex::build(empty, Metric::cosine, IndexBackend::exact,
                                     FeaturizerConfig{}),
                  Error);
}

TEST_CASE("metric and backend names round-trip") {
  for (Metric m : {Metric::cosine, Metric::euclidean, Metric::jaccard,
                   Metric::fuzzy}) {
    CHECK(metric_from_string(to_string(m)) == m);
  }
  for (IndexBackend b : {IndexBackend::exact, IndexBackend::ann}) {
    CHECK(backend_from_string(to_string(b)) == b);
  }
  CHECK_THROWS_AS(metric_from_string("manhattan"), Error);
  CHECK_THROWS_AS(backend_from_string("hnsw2"), Error);
}

TEST_CASE("ids_with_input matches stored inputs byte for byte") {
  ExampleStore store;
  store.add({"a", "same text", "1", std::nullopt, {}});
  store.add({"b", "same text", "2", std::nullopt, {}});
  store.add({"c", "other", "3", std::nullopt, {}});
  auto index = SearchIndex::build(store, Metric::cosine, IndexBackend::exact,
                                  FeaturizerConfig{});
  auto matches = index.ids_with_input("same text");
  std::sort(matches.begin(), matches.end());
  CHECK(matches == std::vector<std::string>{"a", "b"});
  CHECK(index.ids_with_input("Same text").empty());
  CHECK(index.ids_with_input("absent").empty());
}

TEST_CASE("ann graph answers a single-vector corpus and self queries") {
  auto a = vec_of({{0, 1.0}});
  auto solo = SearchIndex::from_vectors({"only"}, {a}, Metric::cosine,
                                        IndexBackend::ann);
  auto hits = solo.knn(a, 3);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].id == "only");
  CHECK(hits[0].rank == 1);

  std::mt19937_64 rng(5);
  auto vectors = random_vectors(rng, 200, 30, 6);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < 200; ++i) ids.push_back("v" + std::to_string(i));
  auto index = SearchIndex::from_vectors(ids, vectors, Metric::cosine,
                                         IndexBackend::ann);
  for (int i = 0; i < 20; ++i) {
    auto self = index.knn(vectors[i * 7], 1);
    REQUIRE(self.size() == 1);
    CHECK(self[0].score == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("ann recall against brute force stays high on random data") {
  std::mt19937_64 rng(17);
  const std::size_t n = 600;
  auto vectors = random_vectors(rng, n, 40, 8);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
  auto index = SearchIndex::from_vectors(ids, vectors, Metric::euclidean,
                                         IndexBackend::ann);

  std::size_t hits_found = 0, hits_total = 0;
  for (int q = 0; q < 25; ++q) {
    auto query = random_vectors(rng, 1, 40, 8)[0];
    auto approx = index.knn(query, 10);
    auto exact = brute_force_knn(ids, vectors, query, Metric::euclidean, 10);
    hits_total += exact.size();
    for (const auto& want : exact) {
      for (const auto& got : approx) {
        if (got.id == want.id) {
          ++hits_found;
          break;
        }
      }
    }
  }
  double recall = static_cast<double>(hits_found) / hits_total;
  CHECK(recall >= 0.9);
}

TEST_CASE("index save and load round-trips queries and configuration") {
  ExampleStore store;
  for (int i = 0; i < 30; ++i) {
    store.add({"e" + std::to_string(i),
               "item number " + std::to_string(i) + " spare words", "label",
               std::nullopt, {}});
  }
  auto dir = testutil::temp_dir("index_io");

  for (IndexBackend backend : {IndexBackend::exact, IndexBackend::ann}) {
    CAPTURE(to_string(backend));
    AnnParams params{8, 32};
    auto index = SearchIndex::build(store, Metric::cosine, backend,
                                    FeaturizerConfig{}, params);
    auto path = dir / ("idx_" + to_string(backend) + ".bin");
    index.save(path);
    auto loaded = SearchIndex::load(path);
    CHECK(loaded.size() == index.size());
    CHECK(loaded.metric() == index.metric());
    CHECK(loaded.backend() == index.backend());
    CHECK(loaded.ann_params() == params);
    CHECK(loaded.vocabulary() == index.vocabulary());

    auto before = index.knn(std::string("item number 7 spare words"), 5);
    auto after = loaded.knn(std::string("item number 7 spare words"), 5);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
      CHECK(before[i].id == after[i].id);
      CHECK(before[i].score == doctest::Approx(after[i].score).epsilon(1e-12));
    }
    CHECK(loaded.ids_with_input("item number 7 spare words") ==
          std::vector<std::string>{"e7"});
  }

  CHECK_THROWS_AS(SearchIndex::load(dir / "missing.bin"), Error);
}

}  // TEST_SUITE
