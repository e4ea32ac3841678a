// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fewshot {

// One labeled record: the input a model will be queried with and the output
// it is expected to produce. `class_label` is present for classification
// corpora and drives class balancing and per-class metrics.
struct LabeledExample {
  std::string id;
  std::string input;
  std::string output;
  std::optional<std::string> class_label;
  std::map<std::string, std::string> metadata;

  bool operator==(const LabeledExample&) const = default;
};

// Summary emitted when a dataset is loaded. Exact-duplicate (input, output)
// pairs are kept in the store and surfaced here instead of being dropped.
struct LoadReport {
  std::size_t total = 0;
  std::size_t synthesized_ids = 0;
  std::size_t unlabeled = 0;
  std::map<std::string, std::size_t> per_class;
  std::vector<std::vector<std::string>> duplicate_groups;

  nlohmann::json to_json() const;
};

// Ordered, id-indexed collection of labeled examples. Immutable by
// convention once loaded; all readers may share it concurrently.
class ExampleStore {
 public:
  // Normalizes text fields, validates invariants (unique id, non-empty
  // input/output after trimming) and appends. Throws Error on violation.
  void add(LabeledExample example);

  const std::vector<LabeledExample>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  const LabeledExample* find(const std::string& id) const;
  const LabeledExample& at(const std::string& id) const;  // throws if absent
  bool contains(const std::string& id) const { return find(id) != nullptr; }

  // class label -> ids carrying it, in ingestion order. Covers exactly the
  // labeled examples.
  const std::map<std::string, std::vector<std::string>>& class_index() const {
    return class_index_;
  }
  bool has_class_labels() const { return !class_index_.empty(); }

  bool operator==(const ExampleStore& other) const {
    return examples_ == other.examples_;
  }

 private:
  std::vector<LabeledExample> examples_;
  std::unordered_map<std::string, std::size_t> position_;
  std::map<std::string, std::vector<std::string>> class_index_;
};

// NFC-normalizes (via ICU) and trims surrounding whitespace. Applied to all
// inputs and outputs on ingest; un-normalized near-duplicates would otherwise
// poison similarity search.
std::string normalize_text(const std::string& text);

// Reads a JSON-lines dataset: one object per line with fields `input`,
// `output` and optional `id`, `class_label`, `metadata`. Missing ids are
// synthesized as zero-padded line ordinals. Malformed lines and duplicate
// ids raise Error with the offending line number.
ExampleStore load_dataset(const std::filesystem::path& path,
                          LoadReport* report = nullptr);

void save_dataset(const ExampleStore& store, const std::filesystem::path& path);

// Deterministic seeded split into (first, second) where the first part holds
// round(fraction * n) examples. Stratified per class when labels exist; both
// parts preserve ingestion order.
std::pair<ExampleStore, ExampleStore> split_dataset(const ExampleStore& store,
                                                    double fraction,
                                                    std::uint64_t seed);

}  // namespace fewshot
