// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "fewshot/dataset.hpp"
#include "fewshot/global_select.hpp"
#include "fewshot/similarity.hpp"

namespace fewshot {

enum class LocalOrder { most_similar_last, most_similar_first };

std::string to_string(LocalOrder order);
LocalOrder local_order_from_string(const std::string& name);

// Budget n = global_count + local_count and everything needed to spend it.
struct SelectionConfig {
  int total_budget = 0;
  int global_count = 0;
  int local_count = 0;
  GlobalStrategy global_strategy;
  Metric metric = Metric::fuzzy;
  IndexBackend backend = IndexBackend::exact;
  FeaturizerConfig featurizer;
  bool leave_one_out = true;
  LocalOrder local_order = LocalOrder::most_similar_last;

  void validate() const;
  bool operator==(const SelectionConfig&) const = default;
};

struct Selection {
  std::vector<std::string> global_ids;
  std::vector<std::string> local_ids;  // prompt order, see LocalOrder

  std::vector<std::string> ids() const;
  bool operator==(const Selection&) const = default;
};

// Top-l neighbors of `query`, skipping `exclude`. With leave_one_out, entries
// whose stored input equals the query byte-for-byte are skipped too.
std::vector<std::string> select_local(const SearchIndex& index,
                                      const std::string& query, int l,
                                      const std::vector<std::string>& exclude = {},
                                      bool leave_one_out = false);

// Full budget spend: globals chosen once per config, locals per query with
// globals excluded. Shorter than n only when the store runs out.
Selection select_examples(const ExampleStore& store, const SearchIndex& index,
                          const std::string& query, const SelectionConfig& config);

// Variant for callers that cache the global prefix across queries.
Selection select_examples(const std::vector<std::string>& global_ids,
                          const SearchIndex& index, const std::string& query,
                          const SelectionConfig& config);

}  // namespace fewshot
