// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/local_select.hpp"

#include <algorithm>

#include "fewshot/error.hpp"

namespace fewshot {

std::string to_string(LocalOrder order) {
  switch (order) {
    case LocalOrder::most_similar_last: return "most_similar_last";
    case LocalOrder::most_similar_first: return "most_similar_first";
  }
  throw_error(ErrorCode::parameter_error, "unknown local order");
}

LocalOrder local_order_from_string(const std::string& name) {
  if (name == "most_similar_last") return LocalOrder::most_similar_last;
  if (name == "most_similar_first") return LocalOrder::most_similar_first;
  throw_error(ErrorCode::parameter_error, "unknown local order: " + name);
}

void SelectionConfig::validate() const {
  if (global_count < 0 || local_count < 0) {
    throw_error(ErrorCode::parameter_error, "example counts must be non-negative");
  }
  if (total_budget != global_count + local_count) {
    throw_error(ErrorCode::parameter_error,
                "total_budget must equal global_count + local_count");
  }
  global_strategy.validate();
  if (backend == IndexBackend::ann && metric != Metric::cosine &&
      metric != Metric::euclidean) {
    throw_error(ErrorCode::configuration_error,
                "ann backend supports only cosine and euclidean metrics");
  }
}

std::vector<std::string> Selection::ids() const {
  std::vector<std::string> out;
  out.reserve(global_ids.size() + local_ids.size());
  out.insert(out.end(), global_ids.begin(), global_ids.end());
  out.insert(out.end(), local_ids.begin(), local_ids.end());
  return out;
}

std::vector<std::string> select_local(const SearchIndex& index,
                                      const std::string& query, int l,
                                      const std::vector<std::string>& exclude,
                                      bool leave_one_out) {
  if (l < 0) throw_error(ErrorCode::parameter_error, "l must be non-negative");
  if (l == 0) return {};
  std::vector<std::string> excluded = exclude;
  if (leave_one_out) {
    auto self_ids = index.ids_with_input(query);
    excluded.insert(excluded.end(), self_ids.begin(), self_ids.end());
  }
  auto hits = index.knn(query, l, excluded);
  std::vector<std::string> out;
  out.reserve(hits.size());
  for (const auto& hit : hits) out.push_back(hit.id);
  return out;
}

Selection select_examples(const std::vector<std::string>& global_ids,
                          const SearchIndex& index, const std::string& query,
                          const SelectionConfig& config) {
  config.validate();
  Selection sel;
  sel.global_ids = global_ids;
  sel.local_ids = select_local(index, query, config.local_count, global_ids,
                               config.leave_one_out);
  // knn returns most similar first; flip so the best sits next to the query.
  if (config.local_order == LocalOrder::most_similar_last) {
    std::reverse(sel.local_ids.begin(), sel.local_ids.end());
  }
  return sel;
}

Selection select_examples(const ExampleStore& store, const SearchIndex& index,
                          const std::string& query, const SelectionConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(config.total_budget) > store.size()) {
    throw_error(ErrorCode::parameter_error,
                "budget exceeds store size (" + std::to_string(config.total_budget) +
                    " > " + std::to_string(store.size()) + ")");
  }
  auto globals = select_global(store, config.global_count, config.global_strategy,
                               config.featurizer);
  return select_examples(globals, index, query, config);
}

}  // namespace fewshot
