// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/orchestrate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "fewshot/error.hpp"
#include "fewshot/global_select.hpp"

namespace fewshot {

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification: return "classification";
    case TaskKind::generation: return "generation";
  }
  throw_error(ErrorCode::parameter_error, "unknown task kind");
}

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "classification") return TaskKind::classification;
  if (name == "generation") return TaskKind::generation;
  throw_error(ErrorCode::parameter_error, "unknown task kind: " + name);
}

void TaskSpec::validate() const {
  if (kind == TaskKind::classification && label_set.empty()) {
    throw_error(ErrorCode::configuration_error,
                "classification tasks need a label_set");
  }
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw_error(ErrorCode::parameter_error, "split_fraction must lie in (0, 1)");
  }
  if (max_items < 0) {
    throw_error(ErrorCode::parameter_error, "max_items must be non-negative");
  }
  selection.validate();
  backend.validate();
}

namespace {

std::string hash_hex(std::uint64_t value) {
  std::ostringstream out;
  out << "0x" << std::hex << std::setfill('0') << std::setw(16) << value;
  return out.str();
}

constexpr const char* kInvalidLabel = "__invalid__";

// Deterministic backends report synthetic latencies, so their wall time is
// the serial-equivalent latency sum; real backends get the measured clock.
double effective_wall(const std::vector<CompletionResult>& results,
                      bool deterministic, double measured_seconds) {
  if (!deterministic) return std::max(measured_seconds, 1e-9);
  double total = 0.0;
  for (const auto& r : results) total += r.latency_seconds;
  return std::max(total, 1e-9);
}

struct PreparedItem {
  const LabeledExample* example = nullptr;
  Selection selection;
  AssembledPrompt prompt;
};

// Selection and assembly are CPU-bound and per-item independent; fan them out
// over a small pool. Results land by index, so the outcome is thread-count
// independent.
std::vector<PreparedItem> prepare_items(const TaskContext& ctx,
                                        const std::vector<const LabeledExample*>& items) {
  std::vector<PreparedItem> prepared(items.size());
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_lock;

  auto worker = [&]() {
    while (!failed.load()) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= items.size()) break;
      try {
        PreparedItem& slot = prepared[i];
        slot.example = items[i];
        slot.selection = select_examples(ctx.global_ids, ctx.index,
                                         items[i]->input, ctx.spec.selection);
        std::vector<LabeledExample> examples;
        for (const auto& id : slot.selection.ids()) {
          examples.push_back(ctx.validation.at(id));
        }
        slot.prompt = assemble(ctx.tmpl, examples, items[i]->input);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_lock);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };

  std::size_t threads = std::min<std::size_t>(
      {items.size(), std::max(1u, std::thread::hardware_concurrency()), 8});
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return prepared;
}

void write_trace(const TaskContext& ctx, const std::vector<PreparedItem>& prepared,
                 const std::vector<CompletionResult>& results) {
  if (ctx.spec.trace_path.empty()) return;
  std::ofstream out(ctx.spec.trace_path, std::ios::trunc);
  if (!out) {
    throw_error(ErrorCode::io_error,
                "cannot write trace: " + ctx.spec.trace_path.string());
  }
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const auto& item = prepared[i];
    const auto& result = results[i];
    nlohmann::json line;
    line["id"] = item.example->id;
    line["query"] = item.example->input;
    line["gold"] = item.example->output;
    line["example_ids"] = item.prompt.example_ids;
    line["mode"] = to_string(item.prompt.mode);
    line["prompt_hash"] = hash_hex(prompt_hash(item.prompt));
    line["input_tokens"] = result.input_tokens;
    line["output_tokens"] = result.output_tokens;
    line["latency_seconds"] = result.latency_seconds;
    line["completion"] = result.text;
    if (result.error) line["error"] = *result.error;
    out << line.dump() << '\n';
  }
}

nlohmann::json run_metadata_json(const TaskContext& ctx, std::size_t items,
                                 long errors, long invalid, double wall_seconds) {
  const auto& spec = ctx.spec;
  nlohmann::json meta;
  meta["task"] = spec.name;
  meta["kind"] = to_string(spec.kind);
  meta["prompt_mode"] = to_string(ctx.tmpl.mode);
  meta["global_count"] = spec.selection.global_count;
  meta["local_count"] = spec.selection.local_count;
  meta["global_strategy"] = to_string(spec.selection.global_strategy.kind);
  meta["metric"] = to_string(spec.selection.metric);
  meta["index_backend"] = to_string(spec.selection.backend);
  meta["leave_one_out"] = spec.selection.leave_one_out;
  meta["backend"] = to_string(spec.backend.kind);
  meta["model"] = spec.backend.model_name;
  meta["seed"] = spec.seed;
  meta["validation_size"] = ctx.validation.size();
  meta["test_size"] = ctx.test.size();
  meta["evaluated_items"] = items;
  meta["errors"] = errors;
  meta["invalid_predictions"] = invalid;
  meta["wall_time_seconds"] = wall_seconds;
  return meta;
}

}  // namespace

TaskContext prepare_task(const TaskSpec& spec, const ExampleStore& dataset) {
  spec.validate();
  TaskContext ctx;
  ctx.spec = spec;
  auto parts = split_dataset(dataset, spec.split_fraction, spec.seed);
  ctx.validation = std::move(parts.first);
  ctx.test = std::move(parts.second);
  if (ctx.validation.empty()) {
    throw_error(ErrorCode::configuration_error, "validation split is empty");
  }
  if (static_cast<std::size_t>(spec.selection.total_budget) > ctx.validation.size()) {
    throw_error(ErrorCode::parameter_error,
                "example budget exceeds the validation set");
  }
  if (spec.template_path.empty()) {
    ctx.tmpl.mode = spec.prompt_mode;
  } else {
    ctx.tmpl = PromptTemplate::load_file(spec.template_path, spec.prompt_mode);
  }
  ctx.index = SearchIndex::build(ctx.validation, spec.selection.metric,
                                 spec.selection.backend, spec.selection.featurizer);
  ctx.global_ids = select_global(ctx.validation, spec.selection.global_count,
                                 spec.selection.global_strategy,
                                 spec.selection.featurizer);
  return ctx;
}

TaskContext prepare_task(const TaskSpec& spec) {
  if (spec.dataset_path.empty()) {
    throw_error(ErrorCode::configuration_error, "dataset_path is required");
  }
  return prepare_task(spec, load_dataset(spec.dataset_path));
}

EvalReport run_prepared(const TaskContext& ctx) {
  const auto& spec = ctx.spec;
  std::vector<const LabeledExample*> items;
  for (const auto& ex : ctx.test.examples()) {
    if (spec.max_items > 0 && items.size() >= static_cast<std::size_t>(spec.max_items)) break;
    items.push_back(&ex);
  }
  if (items.empty()) {
    throw_error(ErrorCode::configuration_error, "no test items to evaluate");
  }

  auto prepared = prepare_items(ctx, items);
  std::vector<AssembledPrompt> prompts;
  prompts.reserve(prepared.size());
  for (const auto& p : prepared) prompts.push_back(p.prompt);

  auto backend = make_backend(spec.backend);
  auto started = std::chrono::steady_clock::now();
  auto results = complete_batch(prompts, *backend, spec.backend.max_concurrency);
  double measured = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - started)
                        .count();
  double wall = effective_wall(results, backend->deterministic_timing(), measured);

  write_trace(ctx, prepared, results);

  long errors = 0;
  for (const auto& r : results) {
    if (!r.ok()) ++errors;
  }

  if (spec.kind == TaskKind::classification) {
    std::map<std::string, std::string> predictions, gold;
    long invalid = 0;
    for (std::size_t i = 0; i < prepared.size(); ++i) {
      const auto& ex = *prepared[i].example;
      gold[ex.id] = ex.class_label ? *ex.class_label : ex.output;
      std::optional<std::string> label;
      if (results[i].ok()) label = parse_label(results[i].text, spec.label_set);
      if (!label) ++invalid;
      predictions[ex.id] = label ? *label : kInvalidLabel;
    }
    auto meta = run_metadata_json(ctx, items.size(), errors, invalid, wall);
    return build_classification_report(predictions, gold, results, wall, std::move(meta));
  }

  std::vector<std::string> hypotheses, references;
  hypotheses.reserve(prepared.size());
  references.reserve(prepared.size());
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    hypotheses.push_back(results[i].ok() ? results[i].text : std::string());
    references.push_back(prepared[i].example->output);
  }
  auto meta = run_metadata_json(ctx, items.size(), errors, 0, wall);
  return build_generation_report(hypotheses, references, results, wall, std::move(meta));
}

EvalReport run_task(const TaskSpec& spec) { return run_prepared(prepare_task(spec)); }

namespace {

// One sweep row: same prepared data, different budget split and mode.
SweepRow run_budget_row(const TaskContext& base, int g, int l, PromptMode mode) {
  TaskContext ctx = base;
  ctx.spec.selection.global_count = g;
  ctx.spec.selection.local_count = l;
  ctx.spec.selection.total_budget = g + l;
  ctx.spec.prompt_mode = mode;
  ctx.tmpl.mode = mode;
  ctx.spec.trace_path.clear();  // per-row traces would clobber each other
  if (static_cast<std::size_t>(g + l) > ctx.validation.size()) {
    throw_error(ErrorCode::parameter_error, "example budget exceeds the validation set");
  }
  ctx.global_ids = select_global(ctx.validation, g, ctx.spec.selection.global_strategy,
                                 ctx.spec.selection.featurizer);
  SweepRow row;
  row.global_count = g;
  row.local_count = l;
  row.mode = mode;
  row.report = run_prepared(ctx);
  return row;
}

}  // namespace

nlohmann::json SweepTable::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["global_count"] = row.global_count;
    r["local_count"] = row.local_count;
    r["mode"] = to_string(row.mode);
    r["report"] = row.report.to_json();
    rows_json.push_back(std::move(r));
  }
  return {{"rows", std::move(rows_json)}};
}

std::string SweepTable::to_table() const {
  // Union of class names across rows drives the per-class columns.
  std::vector<std::string> classes;
  bool generation = false;
  for (const auto& row : rows) {
    if (row.report.bleu || row.report.rouge_l) generation = true;
    for (const auto& [label, m] : row.report.per_class) {
      (void)m;
      if (std::find(classes.begin(), classes.end(), label) == classes.end()) {
        classes.push_back(label);
      }
    }
  }
  std::sort(classes.begin(), classes.end());

  std::vector<int> widths;
  widths.reserve(classes.size());
  for (const auto& label : classes) {
    widths.push_back(std::max<int>(10, static_cast<int>(label.size()) + 4));
  }

  std::ostringstream out;
  out << std::left << std::setw(6) << "g" << std::setw(6) << "l" << std::setw(6)
      << "mode" << std::right << std::setw(10) << "acc";
  for (std::size_t c = 0; c < classes.size(); ++c) {
    out << std::setw(widths[c]) << ("P:" + classes[c]) << std::setw(widths[c])
        << ("R:" + classes[c]);
  }
  if (generation) out << std::setw(10) << "bleu" << std::setw(10) << "rougeL";
  out << std::setw(12) << "it/s" << std::setw(12) << "toks/s" << '\n';

  out << std::fixed << std::setprecision(4);
  for (const auto& row : rows) {
    out << std::left << std::setw(6) << row.global_count << std::setw(6)
        << row.local_count << std::setw(6) << to_string(row.mode) << std::right
        << std::setw(10) << row.report.accuracy;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      auto it = row.report.per_class.find(classes[c]);
      if (it == row.report.per_class.end()) {
        out << std::setw(widths[c]) << "-" << std::setw(widths[c]) << "-";
      } else {
        out << std::setw(widths[c]) << it->second.precision << std::setw(widths[c])
            << it->second.recall;
      }
    }
    if (generation) {
      out << std::setw(10) << row.report.bleu.value_or(0.0) << std::setw(10)
          << row.report.rouge_l.value_or(0.0);
    }
    out << std::setw(12) << row.report.items_per_second << std::setw(12)
        << row.report.output_tokens_per_second << '\n';
  }
  return out.str();
}

SweepTable sweep_split(const TaskSpec& spec, int total_budget,
                       const ExampleStore& dataset) {
  if (total_budget < 0) {
    throw_error(ErrorCode::parameter_error, "total_budget must be non-negative");
  }
  TaskSpec base_spec = spec;
  base_spec.selection.global_count = total_budget;
  base_spec.selection.local_count = 0;
  base_spec.selection.total_budget = total_budget;
  TaskContext ctx = prepare_task(base_spec, dataset);
  SweepTable table;
  table.rows.reserve(total_budget + 1);
  for (int g = total_budget; g >= 0; --g) {
    table.rows.push_back(run_budget_row(ctx, g, total_budget - g, spec.prompt_mode));
  }
  return table;
}

SweepTable sweep_split(const TaskSpec& spec, int total_budget) {
  if (spec.dataset_path.empty()) {
    throw_error(ErrorCode::configuration_error, "dataset_path is required");
  }
  return sweep_split(spec, total_budget, load_dataset(spec.dataset_path));
}

SweepTable sweep_lite(const TaskSpec& spec,
                      const std::vector<std::pair<int, int>>& budgets,
                      const ExampleStore& dataset) {
  TaskContext ctx = prepare_task(spec, dataset);
  SweepTable table;
  table.rows.reserve(budgets.size() + 1);
  // Full-mode baseline at the spec's own production budget.
  table.rows.push_back(run_budget_row(ctx, spec.selection.global_count,
                                      spec.selection.local_count, PromptMode::full));
  for (const auto& [g, l] : budgets) {
    table.rows.push_back(run_budget_row(ctx, g, l, PromptMode::lite));
  }
  return table;
}

SweepTable sweep_lite(const TaskSpec& spec,
                      const std::vector<std::pair<int, int>>& budgets) {
  if (spec.dataset_path.empty()) {
    throw_error(ErrorCode::configuration_error, "dataset_path is required");
  }
  return sweep_lite(spec, budgets, load_dataset(spec.dataset_path));
}

std::vector<std::pair<int, int>> default_lite_budgets() {
  std::vector<std::pair<int, int>> budgets;
  budgets.reserve(19);
  for (int g = 1; g <= 19; ++g) budgets.emplace_back(g, g + 1);
  return budgets;
}

nlohmann::json LabelSummary::to_json() const {
  return {{"processed", processed},
          {"written", written},
          {"failed", failed},
          {"wall_time_seconds", wall_time_seconds},
          {"items_per_second", items_per_second},
          {"output_tokens_per_second", output_tokens_per_second}};
}

namespace {

struct UnlabeledItem {
  std::string id;
  std::string input;
};

std::vector<UnlabeledItem> load_unlabeled(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_error(ErrorCode::load_error, "cannot open: " + path.string());
  }
  std::vector<UnlabeledItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.contains("input") || !doc["input"].is_string()) {
      throw_error(ErrorCode::load_error,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected an object with an `input` string");
    }
    UnlabeledItem item;
    item.input = normalize_text(doc["input"].get<std::string>());
    if (item.input.empty()) {
      throw_error(ErrorCode::load_error,
                  path.string() + ":" + std::to_string(line_no) + ": empty input");
    }
    if (doc.contains("id") && doc["id"].is_string()) {
      item.id = doc["id"].get<std::string>();
    } else {
      std::ostringstream id;
      id << std::setfill('0') << std::setw(6) << line_no;
      item.id = id.str();
    }
    items.push_back(std::move(item));
  }
  if (items.empty()) {
    throw_error(ErrorCode::load_error, "no inputs in " + path.string());
  }
  return items;
}

struct Checkpoint {
  long processed = 0;
  long written = 0;
};

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  Checkpoint ckpt;
  std::ifstream in(path);
  if (!in) return ckpt;
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.contains("processed") || !doc.contains("written")) {
    throw_error(ErrorCode::io_error, "corrupt checkpoint: " + path.string());
  }
  ckpt.processed = doc["processed"].get<long>();
  ckpt.written = doc["written"].get<long>();
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::trunc);
  out << nlohmann::json{{"processed", ckpt.processed}, {"written", ckpt.written}}.dump()
      << '\n';
}

// Keep only the first `count` lines; anything after them is a partial write
// from an interrupted run.
void truncate_output(const std::filesystem::path& path, long count) {
  std::vector<std::string> lines;
  {
    std::ifstream in(path);
    std::string line;
    while (in && std::getline(in, line) &&
           lines.size() < static_cast<std::size_t>(count)) {
      lines.push_back(line);
    }
  }
  if (lines.size() < static_cast<std::size_t>(count)) {
    throw_error(ErrorCode::io_error,
                "output file is shorter than the checkpoint claims: " + path.string());
  }
  std::ofstream out(path, std::ios::trunc);
  for (const auto& line : lines) out << line << '\n';
}

}  // namespace

LabelSummary label_dataset(const TaskSpec& spec,
                           const std::filesystem::path& unlabeled_path,
                           const std::filesystem::path& output_path,
                           int max_items) {
  TaskSpec labeling = spec;
  labeling.selection.leave_one_out = false;  // production path, no held-out answers
  labeling.validate();
  if (labeling.dataset_path.empty()) {
    throw_error(ErrorCode::configuration_error, "dataset_path is required");
  }

  // The whole labeled file serves as the example source; nothing is held out.
  ExampleStore source = load_dataset(labeling.dataset_path);
  if (static_cast<std::size_t>(labeling.selection.total_budget) > source.size()) {
    throw_error(ErrorCode::parameter_error, "example budget exceeds the dataset");
  }
  PromptTemplate tmpl;
  if (labeling.template_path.empty()) {
    tmpl.mode = labeling.prompt_mode;
  } else {
    tmpl = PromptTemplate::load_file(labeling.template_path, labeling.prompt_mode);
  }
  SearchIndex index = SearchIndex::build(source, labeling.selection.metric,
                                         labeling.selection.backend,
                                         labeling.selection.featurizer);
  auto global_ids = select_global(source, labeling.selection.global_count,
                                  labeling.selection.global_strategy,
                                  labeling.selection.featurizer);

  auto inputs = load_unlabeled(unlabeled_path);
  std::filesystem::path ckpt_path = output_path;
  ckpt_path += ".ckpt";
  Checkpoint ckpt;
  if (std::filesystem::exists(ckpt_path)) {
    ckpt = read_checkpoint(ckpt_path);
    if (ckpt.processed > static_cast<long>(inputs.size())) {
      throw_error(ErrorCode::io_error, "checkpoint exceeds the input count");
    }
    truncate_output(output_path, ckpt.written);
  } else {
    std::ofstream reset(output_path, std::ios::trunc);
    if (!reset) {
      throw_error(ErrorCode::io_error, "cannot write: " + output_path.string());
    }
  }

  std::ofstream out(output_path, std::ios::app);
  if (!out) {
    throw_error(ErrorCode::io_error, "cannot write: " + output_path.string());
  }

  auto backend = make_backend(labeling.backend);
  LabelSummary summary;
  summary.processed = ckpt.processed;
  summary.written = ckpt.written;
  long done_this_run = 0;
  long tokens_this_run = 0;
  double latency_sum = 0.0;
  auto started = std::chrono::steady_clock::now();

  std::size_t at = static_cast<std::size_t>(ckpt.processed);
  const std::size_t chunk = static_cast<std::size_t>(labeling.backend.max_concurrency);
  while (at < inputs.size()) {
    if (max_items > 0 && done_this_run >= max_items) break;
    std::size_t take = std::min(chunk, inputs.size() - at);
    if (max_items > 0) {
      take = std::min<std::size_t>(take, max_items - done_this_run);
    }

    std::vector<AssembledPrompt> prompts;
    std::vector<Selection> selections;
    prompts.reserve(take);
    selections.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
      const auto& item = inputs[at + i];
      auto sel = select_examples(global_ids, index, item.input, labeling.selection);
      std::vector<LabeledExample> examples;
      for (const auto& id : sel.ids()) examples.push_back(source.at(id));
      prompts.push_back(assemble(tmpl, examples, item.input));
      selections.push_back(std::move(sel));
    }
    auto results = complete_batch(prompts, *backend, labeling.backend.max_concurrency);

    for (std::size_t i = 0; i < take; ++i) {
      const auto& item = inputs[at + i];
      const auto& result = results[i];
      if (result.ok()) {
        nlohmann::json record;
        record["id"] = item.id;
        record["input"] = item.input;
        record["output"] = result.text;
        record["example_ids"] = prompts[i].example_ids;
        record["prompt_hash"] = hash_hex(prompt_hash(prompts[i]));
        out << record.dump() << '\n';
        out.flush();
        ++summary.written;
        ++ckpt.written;
        tokens_this_run += result.output_tokens;
      } else {
        ++summary.failed;
      }
      latency_sum += result.latency_seconds;
      ++summary.processed;
      ++ckpt.processed;
      ++done_this_run;
      write_checkpoint(ckpt_path, ckpt);
    }
    at += take;
  }

  double measured = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - started)
                        .count();
  summary.wall_time_seconds = backend->deterministic_timing()
                                  ? std::max(latency_sum, 1e-9)
                                  : std::max(measured, 1e-9);
  if (done_this_run > 0) {
    summary.items_per_second =
        static_cast<double>(done_this_run) / summary.wall_time_seconds;
    summary.output_tokens_per_second =
        static_cast<double>(tokens_this_run) / summary.wall_time_seconds;
  }
  return summary;
}

long replay_trace(const TaskContext& ctx, const std::filesystem::path& trace_path) {
  std::ifstream in(trace_path);
  if (!in) {
    throw_error(ErrorCode::io_error, "cannot open trace: " + trace_path.string());
  }
  long verified = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      throw_error(ErrorCode::io_error,
                  "trace line " + std::to_string(line_no) + " is not JSON");
    }
    std::vector<LabeledExample> examples;
    for (const auto& id : doc.at("example_ids")) {
      examples.push_back(ctx.validation.at(id.get<std::string>()));
    }
    auto prompt = assemble(ctx.tmpl, examples, doc.at("query").get<std::string>());
    std::string expected = doc.at("prompt_hash").get<std::string>();
    if (hash_hex(prompt_hash(prompt)) != expected) {
      throw_error(ErrorCode::evaluation_error,
                  "prompt hash mismatch at trace line " + std::to_string(line_no));
    }
    ++verified;
  }
  return verified;
}

long replay_trace(const TaskSpec& spec, const std::filesystem::path& trace_path) {
  return replay_trace(prepare_task(spec), trace_path);
}

}  // namespace fewshot
