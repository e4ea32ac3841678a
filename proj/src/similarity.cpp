// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <queue>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "fewshot/error.hpp"

namespace fewshot {

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::cosine: return "cosine";
    case Metric::euclidean: return "euclidean";
    case Metric::jaccard: return "jaccard";
    case Metric::fuzzy: return "fuzzy";
  }
  throw_error(ErrorCode::parameter_error, "unknown metric");
}

std::string to_string(IndexBackend backend) {
  switch (backend) {
    case IndexBackend::exact: return "exact";
    case IndexBackend::ann: return "ann";
  }
  throw_error(ErrorCode::parameter_error, "unknown backend");
}

Metric metric_from_string(const std::string& name) {
  if (name == "cosine") return Metric::cosine;
  if (name == "euclidean") return Metric::euclidean;
  if (name == "jaccard") return Metric::jaccard;
  if (name == "fuzzy") return Metric::fuzzy;
  throw_error(ErrorCode::parameter_error, "unknown metric: " + name);
}

IndexBackend backend_from_string(const std::string& name) {
  if (name == "exact") return IndexBackend::exact;
  if (name == "ann") return IndexBackend::ann;
  throw_error(ErrorCode::parameter_error, "unknown index backend: " + name);
}

double dot(const FeatureVector& a, const FeatureVector& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    std::int32_t ai = a.entries[i].first;
    std::int32_t bj = b.entries[j].first;
    if (ai == bj) {
      sum += a.entries[i].second * b.entries[j].second;
      ++i;
      ++j;
    } else if (ai < bj) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

double cosine_similarity(const FeatureVector& a, const FeatureVector& b) {
  if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
  return dot(a, b) / (a.norm * b.norm);
}

double euclidean_distance(const FeatureVector& a, const FeatureVector& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j == b.entries.size() ||
        (i < a.entries.size() && a.entries[i].first < b.entries[j].first)) {
      sum += a.entries[i].second * a.entries[i].second;
      ++i;
    } else if (i == a.entries.size() || b.entries[j].first < a.entries[i].first) {
      sum += b.entries[j].second * b.entries[j].second;
      ++j;
    } else {
      double d = a.entries[i].second - b.entries[j].second;
      sum += d * d;
      ++i;
      ++j;
    }
  }
  return std::sqrt(sum);
}

double jaccard_similarity(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end());
  std::set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& term : sa) inter += sb.count(term);
  std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard_similarity(const FeatureVector& a, const FeatureVector& b) {
  if (a.entries.empty() && b.entries.empty()) return 1.0;
  std::size_t inter = 0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    if (a.entries[i].first == b.entries[j].first) {
      ++inter;
      ++i;
      ++j;
    } else if (a.entries[i].first < b.entries[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  std::size_t uni = a.entries.size() + b.entries.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    std::size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1f;
      len = 2;
    } else if ((c >> 4) == 0xe) {
      cp = c & 0x0f;
      len = 3;
    } else if ((c >> 3) == 0x1e) {
      cp = c & 0x07;
      len = 4;
    } else {
      cp = 0xfffd;  // stray continuation byte
    }
    for (std::size_t k = 1; k < len && i + k < text.size(); ++k) {
      cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3f);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

template <typename Seq>
std::size_t lcs_rowwise(const Seq& shorter, const Seq& longer) {
  std::vector<std::size_t> prev(shorter.size() + 1, 0);
  std::vector<std::size_t> cur(shorter.size() + 1, 0);
  for (std::size_t i = 1; i <= longer.size(); ++i) {
    for (std::size_t j = 1; j <= shorter.size(); ++j) {
      if (longer[i - 1] == shorter[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  return prev[shorter.size()];
}

// Bit-parallel LCS for sequences up to 64 symbols: zero bits of S mark DP row
// increments, so the answer is the count of cleared low bits.
std::size_t lcs_bitparallel(std::string_view shorter, std::string_view longer) {
  std::uint64_t masks[256] = {};
  for (std::size_t i = 0; i < shorter.size(); ++i) {
    masks[static_cast<unsigned char>(shorter[i])] |= 1ull << i;
  }
  std::uint64_t s = ~0ull;
  for (char c : longer) {
    std::uint64_t m = masks[static_cast<unsigned char>(c)];
    s = (s + (s & m)) | (s & ~m);
  }
  std::uint64_t low = shorter.size() == 64 ? ~0ull : (1ull << shorter.size()) - 1;
  return shorter.size() -
         static_cast<std::size_t>(std::popcount(s & low));
}

bool is_ascii(std::string_view text) {
  for (unsigned char c : text) {
    if (c >= 0x80) return false;
  }
  return true;
}

std::size_t lcs_length(const std::vector<char32_t>& a,
                       const std::vector<char32_t>& b) {
  if (a.empty() || b.empty()) return 0;
  const auto& shorter = a.size() <= b.size() ? a : b;
  const auto& longer = a.size() <= b.size() ? b : a;
  return lcs_rowwise(shorter, longer);
}

// Length pair plus LCS, picking the cheapest path for the inputs.
struct LcsResult {
  std::size_t len_a = 0;
  std::size_t len_b = 0;
  std::size_t lcs = 0;
};

LcsResult lcs_of(std::string_view a, std::string_view b) {
  LcsResult r;
  if (is_ascii(a) && is_ascii(b)) {
    r.len_a = a.size();
    r.len_b = b.size();
    if (a.empty() || b.empty()) return r;
    std::string_view shorter = a.size() <= b.size() ? a : b;
    std::string_view longer = a.size() <= b.size() ? b : a;
    if (shorter.size() <= 64) {
      r.lcs = lcs_bitparallel(shorter, longer);
    } else {
      r.lcs = lcs_rowwise(shorter, longer);
    }
    return r;
  }
  auto ca = decode_utf8(a);
  auto cb = decode_utf8(b);
  r.len_a = ca.size();
  r.len_b = cb.size();
  r.lcs = lcs_length(ca, cb);
  return r;
}

}  // namespace

std::size_t indel_distance(std::string_view a, std::string_view b) {
  auto r = lcs_of(a, b);
  return r.len_a + r.len_b - 2 * r.lcs;
}

double fuzzy_ratio(std::string_view a, std::string_view b) {
  auto r = lcs_of(a, b);
  std::size_t total = r.len_a + r.len_b;
  if (total == 0) return 1.0;
  std::size_t dist = total - 2 * r.lcs;
  return 1.0 - static_cast<double>(dist) / static_cast<double>(total);
}

namespace {

void require_valid_combination(Metric metric, IndexBackend backend) {
  if (backend == IndexBackend::ann && metric != Metric::cosine &&
      metric != Metric::euclidean) {
    throw_error(ErrorCode::configuration_error,
                "ann backend supports only cosine and euclidean metrics");
  }
}

}  // namespace

SearchIndex SearchIndex::build(const ExampleStore& store, Metric metric,
                               IndexBackend backend,
                               const FeaturizerConfig& featurizer,
                               const AnnParams& ann) {
  if (store.empty()) {
    throw_error(ErrorCode::parameter_error, "cannot index an empty store");
  }
  require_valid_combination(metric, backend);
  SearchIndex index;
  index.metric_ = metric;
  index.backend_ = backend;
  index.ann_ = ann;
  index.featurizer_ = featurizer;
  index.vocab_ = fit_vocabulary(store, featurizer.scheme);
  index.ids_.reserve(store.size());
  index.vectors_.reserve(store.size());
  index.raw_inputs_.reserve(store.size());
  for (const auto& ex : store.examples()) {
    index.ids_.push_back(ex.id);
    index.raw_inputs_.push_back(ex.input);
    index.vectors_.push_back(
        vectorize(ex.input, index.vocab_, featurizer.weighting));
  }
  if (backend == IndexBackend::ann) index.build_graph();
  return index;
}

SearchIndex SearchIndex::from_vectors(std::vector<std::string> ids,
                                      std::vector<FeatureVector> vectors,
                                      Metric metric, IndexBackend backend,
                                      const AnnParams& ann) {
  if (metric == Metric::fuzzy) {
    throw_error(ErrorCode::configuration_error,
                "fuzzy metric needs raw strings, not vectors");
  }
  require_valid_combination(metric, backend);
  if (ids.size() != vectors.size()) {
    throw_error(ErrorCode::parameter_error, "ids and vectors differ in length");
  }
  if (ids.empty()) {
    throw_error(ErrorCode::parameter_error, "cannot index an empty vector set");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw_error(ErrorCode::duplicate_id, "duplicate id in index: " + id);
    }
  }
  SearchIndex index;
  index.metric_ = metric;
  index.backend_ = backend;
  index.ann_ = ann;
  index.ids_ = std::move(ids);
  index.vectors_ = std::move(vectors);
  if (backend == IndexBackend::ann) index.build_graph();
  return index;
}

double SearchIndex::score_entry(std::size_t i, const FeatureVector& query_vec,
                                const std::string& query_raw) const {
  switch (metric_) {
    case Metric::cosine:
      return cosine_similarity(vectors_[i], query_vec);
    case Metric::euclidean:
      return distance_to_similarity(euclidean_distance(vectors_[i], query_vec));
    case Metric::jaccard:
      return jaccard_similarity(vectors_[i], query_vec);
    case Metric::fuzzy:
      return fuzzy_ratio(query_raw, raw_inputs_[i]);
  }
  throw_error(ErrorCode::parameter_error, "unknown metric");
}

std::vector<NeighborHit> SearchIndex::scan_all(
    const FeatureVector& query_vec, const std::string& query_raw, int k,
    const std::vector<std::string>& exclude) const {
  std::unordered_set<std::string> excluded(exclude.begin(), exclude.end());
  std::vector<std::size_t> candidates;
  candidates.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!excluded.count(ids_[i])) candidates.push_back(i);
  }
  std::vector<double> scores(ids_.size(), 0.0);
  for (std::size_t i : candidates) scores[i] = score_entry(i, query_vec, query_raw);
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids_[a] < ids_[b];
  };
  std::size_t keep = std::min<std::size_t>(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep,
                    candidates.end(), better);
  std::vector<NeighborHit> hits;
  hits.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) {
    std::size_t i = candidates[r];
    hits.push_back({ids_[i], scores[i], static_cast<int>(r + 1)});
  }
  return hits;
}

// Greedy best-first search over the small-world graph starting from the first
// inserted node. Returns up to `breadth` (score, node) pairs, best first.
std::vector<std::pair<double, std::int32_t>> SearchIndex::graph_search(
    const FeatureVector& query, int breadth) const {
  std::vector<std::pair<double, std::int32_t>> result;
  if (ids_.empty() || breadth <= 0) return result;

  auto score_of = [&](std::int32_t node) {
    return score_entry(static_cast<std::size_t>(node), query, std::string());
  };

  // Lexicographic order: higher score first, lower node index on ties.
  auto better = [](const std::pair<double, std::int32_t>& a,
                   const std::pair<double, std::int32_t>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  auto worse = [&](const std::pair<double, std::int32_t>& a,
                   const std::pair<double, std::int32_t>& b) {
    return better(b, a);
  };

  // Expansion frontier keyed best-first; kept set keyed worst-first so the
  // weakest survivor is cheap to evict.
  std::priority_queue<std::pair<double, std::int32_t>,
                      std::vector<std::pair<double, std::int32_t>>,
                      decltype(worse)>
      frontier(worse);
  std::priority_queue<std::pair<double, std::int32_t>,
                      std::vector<std::pair<double, std::int32_t>>,
                      decltype(better)>
      kept(better);
  std::vector<char> visited(ids_.size(), 0);

  std::int32_t entry = 0;
  visited[entry] = 1;
  double entry_score = score_of(entry);
  frontier.push({entry_score, entry});
  kept.push({entry_score, entry});

  while (!frontier.empty()) {
    auto current = frontier.top();
    frontier.pop();
    if (static_cast<int>(kept.size()) >= breadth &&
        better(kept.top(), current)) {
      break;
    }
    for (std::int32_t next : adjacency_[current.second]) {
      if (visited[next]) continue;
      visited[next] = 1;
      double s = score_of(next);
      if (static_cast<int>(kept.size()) < breadth || better({s, next}, kept.top())) {
        frontier.push({s, next});
        kept.push({s, next});
        if (static_cast<int>(kept.size()) > breadth) kept.pop();
      }
    }
  }

  result.reserve(kept.size());
  while (!kept.empty()) {
    result.push_back(kept.top());
    kept.pop();
  }
  std::sort(result.begin(), result.end(), better);
  return result;
}

std::vector<NeighborHit> SearchIndex::search_graph(
    const FeatureVector& query, int k,
    const std::vector<std::string>& exclude) const {
  std::unordered_set<std::string> excluded(exclude.begin(), exclude.end());
  int breadth = std::max(ann_.search_breadth,
                         k + static_cast<int>(excluded.size()));
  auto found = graph_search(query, breadth);
  std::vector<NeighborHit> hits;
  for (const auto& [score, node] : found) {
    if (static_cast<int>(hits.size()) >= k) break;
    const std::string& id = ids_[node];
    if (excluded.count(id)) continue;
    hits.push_back({id, score, static_cast<int>(hits.size() + 1)});
  }
  return hits;
}

std::vector<NeighborHit> SearchIndex::knn(
    const std::string& query, int k,
    const std::vector<std::string>& exclude) const {
  if (k < 0) throw_error(ErrorCode::parameter_error, "k must be non-negative");
  if (k == 0) return {};
  FeatureVector query_vec;
  if (metric_ != Metric::fuzzy) {
    query_vec = vectorize(query, vocab_, featurizer_.weighting);
  }
  if (backend_ == IndexBackend::ann) return search_graph(query_vec, k, exclude);
  return scan_all(query_vec, query, k, exclude);
}

std::vector<NeighborHit> SearchIndex::knn(
    const FeatureVector& query, int k,
    const std::vector<std::string>& exclude) const {
  if (k < 0) throw_error(ErrorCode::parameter_error, "k must be non-negative");
  if (metric_ == Metric::fuzzy) {
    throw_error(ErrorCode::configuration_error,
                "fuzzy metric queries need raw text");
  }
  if (k == 0) return {};
  if (backend_ == IndexBackend::ann) return search_graph(query, k, exclude);
  return scan_all(query, std::string(), k, exclude);
}

std::vector<std::string> SearchIndex::ids_with_input(
    const std::string& input) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < raw_inputs_.size(); ++i) {
    if (raw_inputs_[i] == input) out.push_back(ids_[i]);
  }
  return out;
}

void SearchIndex::build_graph() {
  adjacency_.assign(ids_.size(), {});
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    insert_node(static_cast<std::int32_t>(i));
  }
}

void SearchIndex::insert_node(std::int32_t node) {
  if (node == 0) return;

  // Search the graph built so far; restrict expansion to nodes < node by
  // temporarily scoring against the partial adjacency (nodes are inserted in
  // order, so adjacency_ only references earlier nodes).
  int ef = std::max(ann_.search_breadth, 100);
  auto candidates = graph_search(vectors_[node], ef);
  int links = std::min<int>(ann_.degree, static_cast<int>(candidates.size()));
  for (int i = 0; i < links; ++i) {
    std::int32_t peer = candidates[i].second;
    adjacency_[node].push_back(peer);
    adjacency_[peer].push_back(node);
    prune_neighbors(peer);
  }
  prune_neighbors(node);
}

void SearchIndex::prune_neighbors(std::int32_t node) {
  auto& edges = adjacency_[node];
  std::size_t cap = static_cast<std::size_t>(2 * ann_.degree);
  if (edges.size() <= cap) return;
  std::vector<std::pair<double, std::int32_t>> scored;
  scored.reserve(edges.size());
  for (std::int32_t peer : edges) {
    double s = metric_ == Metric::cosine
                   ? cosine_similarity(vectors_[node], vectors_[peer])
                   : distance_to_similarity(
                         euclidean_distance(vectors_[node], vectors_[peer]));
    scored.push_back({s, peer});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  edges.clear();
  for (std::size_t i = 0; i < cap; ++i) edges.push_back(scored[i].second);
}

namespace {

constexpr char kIndexMagic[8] = {'F', 'S', 'I', 'D', 'X', '\0', '\0', '\0'};
constexpr std::uint32_t kIndexVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  if (!in) throw_error(ErrorCode::io_error, "truncated index file");
  return value;
}

void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  auto len = read_pod<std::uint64_t>(in);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw_error(ErrorCode::io_error, "truncated index file");
  return s;
}

}  // namespace

void SearchIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw_error(ErrorCode::io_error, "cannot open for writing: " + path.string());
  }
  out.write(kIndexMagic, sizeof(kIndexMagic));
  write_pod(out, kIndexVersion);
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(metric_));
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(backend_));
  write_pod<std::int32_t>(out, ann_.degree);
  write_pod<std::int32_t>(out, ann_.search_breadth);
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(featurizer_.scheme.kind));
  write_pod<std::int32_t>(out, featurizer_.scheme.ngram);
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(featurizer_.weighting));
  write_string(out, vocab_.to_json().dump());
  write_pod<std::uint64_t>(out, ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    write_string(out, ids_[i]);
    write_string(out, i < raw_inputs_.size() ? raw_inputs_[i] : std::string());
    const auto& vec = vectors_[i];
    write_pod<std::uint64_t>(out, vec.entries.size());
    for (const auto& [term, weight] : vec.entries) {
      write_pod(out, term);
      write_pod(out, weight);
    }
  }
  write_pod<std::uint64_t>(out, adjacency_.size());
  for (const auto& edges : adjacency_) {
    write_pod<std::uint64_t>(out, edges.size());
    for (std::int32_t peer : edges) write_pod(out, peer);
  }
  if (!out) throw_error(ErrorCode::io_error, "write failed: " + path.string());
}

SearchIndex SearchIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(ErrorCode::io_error, "cannot open for reading: " + path.string());
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0) {
    throw_error(ErrorCode::io_error, "not an index file: " + path.string());
  }
  auto version = read_pod<std::uint32_t>(in);
  if (version != kIndexVersion) {
    throw_error(ErrorCode::io_error,
                "unsupported index version " + std::to_string(version));
  }
  SearchIndex index;
  index.metric_ = static_cast<Metric>(read_pod<std::uint8_t>(in));
  index.backend_ = static_cast<IndexBackend>(read_pod<std::uint8_t>(in));
  index.ann_.degree = read_pod<std::int32_t>(in);
  index.ann_.search_breadth = read_pod<std::int32_t>(in);
  index.featurizer_.scheme.kind =
      static_cast<TokenScheme>(read_pod<std::uint8_t>(in));
  index.featurizer_.scheme.ngram = read_pod<std::int32_t>(in);
  index.featurizer_.weighting = static_cast<Weighting>(read_pod<std::uint8_t>(in));
  index.vocab_ = Vocabulary::from_json(nlohmann::json::parse(read_string(in)));
  auto count = read_pod<std::uint64_t>(in);
  index.ids_.reserve(count);
  index.vectors_.reserve(count);
  index.raw_inputs_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    index.ids_.push_back(read_string(in));
    index.raw_inputs_.push_back(read_string(in));
    auto nnz = read_pod<std::uint64_t>(in);
    std::vector<std::pair<std::int32_t, double>> entries;
    entries.reserve(nnz);
    for (std::uint64_t e = 0; e < nnz; ++e) {
      auto term = read_pod<std::int32_t>(in);
      auto weight = read_pod<double>(in);
      entries.emplace_back(term, weight);
    }
    index.vectors_.push_back(FeatureVector::from_entries(std::move(entries)));
  }
  auto nodes = read_pod<std::uint64_t>(in);
  index.adjacency_.resize(nodes);
  for (std::uint64_t i = 0; i < nodes; ++i) {
    auto degree = read_pod<std::uint64_t>(in);
    index.adjacency_[i].reserve(degree);
    for (std::uint64_t e = 0; e < degree; ++e) {
      index.adjacency_[i].push_back(read_pod<std::int32_t>(in));
    }
  }
  return index;
}

}  // namespace fewshot
