// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <locale>
#include <random>
#include <sstream>

#include <boost/locale.hpp>

#include "fewshot/error.hpp"
#include "fewshot/rng.hpp"

namespace fewshot {

namespace {

const std::locale& utf8_locale() {
  static const std::locale loc = boost::locale::generator()("en_US.UTF-8");
  return loc;
}

std::string trim(const std::string& s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return s.substr(begin, end - begin);
}

}  // namespace

std::string normalize_text(const std::string& text) {
  return trim(boost::locale::normalize(text, boost::locale::norm_nfc,
                                       utf8_locale()));
}

nlohmann::json LoadReport::to_json() const {
  nlohmann::json j;
  j["total"] = total;
  j["synthesized_ids"] = synthesized_ids;
  j["unlabeled"] = unlabeled;
  j["per_class"] = per_class;
  j["duplicate_groups"] = duplicate_groups;
  return j;
}

void ExampleStore::add(LabeledExample example) {
  example.id = trim(example.id);
  example.input = normalize_text(example.input);
  example.output = normalize_text(example.output);
  if (example.class_label) {
    example.class_label = trim(*example.class_label);
  }
  if (example.id.empty()) {
    throw_error(ErrorCode::parameter_error, "example id must be non-empty");
  }
  if (example.input.empty()) {
    throw_error(ErrorCode::load_error,
                "example '" + example.id + "' has an empty input");
  }
  if (example.output.empty()) {
    throw_error(ErrorCode::load_error,
                "example '" + example.id + "' has an empty output");
  }
  if (position_.contains(example.id)) {
    throw_error(ErrorCode::duplicate_id, "duplicate id '" + example.id + "'");
  }
  position_.emplace(example.id, examples_.size());
  if (example.class_label && !example.class_label->empty()) {
    class_index_[*example.class_label].push_back(example.id);
  }
  examples_.push_back(std::move(example));
}

const LabeledExample* ExampleStore::find(const std::string& id) const {
  auto it = position_.find(id);
  return it == position_.end() ? nullptr : &examples_[it->second];
}

const LabeledExample& ExampleStore::at(const std::string& id) const {
  const LabeledExample* ex = find(id);
  if (ex == nullptr) {
    throw_error(ErrorCode::parameter_error, "unknown example id '" + id + "'");
  }
  return *ex;
}

ExampleStore load_dataset(const std::filesystem::path& path,
                          LoadReport* report) {
  std::ifstream in(path);
  if (!in) {
    throw_error(ErrorCode::io_error, "cannot open dataset " + path.string());
  }

  ExampleStore store;
  LoadReport local;
  std::map<std::string, std::vector<std::string>> by_pair;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw_error(ErrorCode::load_error,
                  "line " + std::to_string(line_number) + ": " + e.what());
    }
    if (!record.is_object() || !record.contains("input") ||
        !record.contains("output")) {
      throw_error(ErrorCode::load_error,
                  "line " + std::to_string(line_number) +
                      ": record must carry `input` and `output`");
    }

    LabeledExample ex;
    try {
      ex.input = record.at("input").get<std::string>();
      ex.output = record.at("output").get<std::string>();
      if (record.contains("id")) ex.id = record.at("id").get<std::string>();
      if (record.contains("class_label") && !record["class_label"].is_null()) {
        ex.class_label = record.at("class_label").get<std::string>();
      }
      if (record.contains("metadata") && !record["metadata"].is_null()) {
        ex.metadata =
            record.at("metadata").get<std::map<std::string, std::string>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw_error(ErrorCode::load_error,
                  "line " + std::to_string(line_number) + ": " + e.what());
    }
    if (ex.id.empty()) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%06zu", line_number);
      ex.id = buf;
      ++local.synthesized_ids;
    }

    try {
      store.add(std::move(ex));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::duplicate_id) throw;
      throw_error(e.code(),
                  "line " + std::to_string(line_number) + ": " + e.what());
    }
    const LabeledExample& added = store.examples().back();
    by_pair[added.input + '\x1f' + added.output].push_back(added.id);
  }

  if (store.empty()) {
    throw_error(ErrorCode::load_error, "dataset " + path.string() + " is empty");
  }

  local.total = store.size();
  for (const auto& [label, ids] : store.class_index()) {
    local.per_class[label] = ids.size();
  }
  for (const auto& ex : store.examples()) {
    if (!ex.class_label) ++local.unlabeled;
  }
  for (auto& [key, ids] : by_pair) {
    if (ids.size() > 1) local.duplicate_groups.push_back(std::move(ids));
  }
  if (report != nullptr) *report = std::move(local);
  return store;
}

void save_dataset(const ExampleStore& store,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw_error(ErrorCode::io_error, "cannot write dataset " + path.string());
  }
  for (const auto& ex : store.examples()) {
    nlohmann::json record;
    record["id"] = ex.id;
    record["input"] = ex.input;
    record["output"] = ex.output;
    if (ex.class_label) record["class_label"] = *ex.class_label;
    if (!ex.metadata.empty()) record["metadata"] = ex.metadata;
    out << record.dump() << '\n';
  }
}

std::pair<ExampleStore, ExampleStore> split_dataset(const ExampleStore& store,
                                                    double fraction,
                                                    std::uint64_t seed) {
  if (store.empty()) {
    throw_error(ErrorCode::parameter_error, "cannot split an empty store");
  }
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw_error(ErrorCode::parameter_error,
                "split fraction must lie in (0, 1)");
  }

  // Strata: one per class (sorted by label), plus one for unlabeled
  // examples. Shuffles consume a single seeded stream in that fixed order.
  std::vector<std::vector<std::size_t>> strata;
  std::unordered_map<std::string, std::size_t> stratum_of_class;
  for (const auto& [label, ids] : store.class_index()) {
    stratum_of_class.emplace(label, strata.size());
    strata.emplace_back();
  }
  std::vector<std::size_t> unlabeled;
  const auto& examples = store.examples();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].class_label &&
        stratum_of_class.contains(*examples[i].class_label)) {
      strata[stratum_of_class[*examples[i].class_label]].push_back(i);
    } else {
      unlabeled.push_back(i);
    }
  }
  if (!unlabeled.empty()) strata.push_back(std::move(unlabeled));

  std::mt19937_64 rng(seed);
  std::vector<bool> in_first(examples.size(), false);
  for (auto& stratum : strata) {
    shuffle_deterministic(stratum, rng);
    auto take = static_cast<std::size_t>(
        std::lround(fraction * static_cast<double>(stratum.size())));
    for (std::size_t j = 0; j < take; ++j) in_first[stratum[j]] = true;
  }

  ExampleStore first;
  ExampleStore second;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    (in_first[i] ? first : second).add(examples[i]);
  }
  return {std::move(first), std::move(second)};
}

}  // namespace fewshot
