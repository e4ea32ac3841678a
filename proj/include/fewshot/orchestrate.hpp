// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fewshot/dataset.hpp"
#include "fewshot/eval.hpp"
#include "fewshot/llm_client.hpp"
#include "fewshot/local_select.hpp"
#include "fewshot/prompt.hpp"
#include "fewshot/similarity.hpp"

namespace fewshot {

enum class TaskKind { classification, generation };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& name);

// Everything one experiment needs: data, template, selection, backend.
struct TaskSpec {
  std::string name = "task";
  TaskKind kind = TaskKind::classification;
  std::vector<std::string> label_set;
  std::filesystem::path dataset_path;
  std::filesystem::path template_path;  // empty uses the built-in template
  PromptMode prompt_mode = PromptMode::full;
  SelectionConfig selection;
  BackendConfig backend;
  double split_fraction = 0.5;  // validation share (the labeled source E)
  std::uint64_t seed = 0;
  std::filesystem::path trace_path;  // empty disables the per-item trace
  int max_items = 0;                 // cap on evaluated test items, 0 = all

  void validate() const;
};

// Prepared, immutable run state shared by the drivers.
struct TaskContext {
  TaskSpec spec;
  ExampleStore validation;  // the labeled source E
  ExampleStore test;
  SearchIndex index;  // over validation inputs
  PromptTemplate tmpl;
  std::vector<std::string> global_ids;
};

TaskContext prepare_task(const TaskSpec& spec);
TaskContext prepare_task(const TaskSpec& spec, const ExampleStore& dataset);

// Select, assemble, complete, and score every test item. Wall time covers the
// completion phase only; deterministic backends report the serial-equivalent
// sum of their synthetic latencies so repeated runs byte-match.
EvalReport run_prepared(const TaskContext& ctx);
EvalReport run_task(const TaskSpec& spec);

struct SweepRow {
  int global_count = 0;
  int local_count = 0;
  PromptMode mode = PromptMode::full;
  EvalReport report;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

// One run per (g, l) split of the fixed budget, g from n down to 0.
SweepTable sweep_split(const TaskSpec& spec, int total_budget);
SweepTable sweep_split(const TaskSpec& spec, int total_budget,
                       const ExampleStore& dataset);

// Lite-mode run per budget plus a full-mode baseline at the spec's own
// configured budget.
SweepTable sweep_lite(const TaskSpec& spec,
                      const std::vector<std::pair<int, int>>& budgets);
SweepTable sweep_lite(const TaskSpec& spec,
                      const std::vector<std::pair<int, int>>& budgets,
                      const ExampleStore& dataset);

// (1,2) through (19,20): local count leads the global count by one.
std::vector<std::pair<int, int>> default_lite_budgets();

struct LabelSummary {
  long processed = 0;
  long written = 0;
  long failed = 0;
  double wall_time_seconds = 0.0;
  double items_per_second = 0.0;
  double output_tokens_per_second = 0.0;

  nlohmann::json to_json() const;
};

// Label every input in `unlabeled_path` (JSONL with an `input` field) using
// the whole dataset as the example source. Progress survives interruption via
// `<output>.ckpt`; rerunning continues after the last written record.
LabelSummary label_dataset(const TaskSpec& spec,
                           const std::filesystem::path& unlabeled_path,
                           const std::filesystem::path& output_path,
                           int max_items = 0);

// Re-derive each traced prompt from its recorded example ids and query, and
// check the hash. Returns the number of verified lines; mismatches throw.
long replay_trace(const TaskSpec& spec, const std::filesystem::path& trace_path);
long replay_trace(const TaskContext& ctx, const std::filesystem::path& trace_path);

}  // namespace fewshot
