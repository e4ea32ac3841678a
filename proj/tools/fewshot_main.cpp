// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: dataset validation, synthetic corpus generation,
// index building and querying, example selection, prompt rendering, full
// evaluation runs, budget sweeps, bulk labeling, and trace replay.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fewshot/error.hpp"
#include "fewshot/eval.hpp"
#include "fewshot/global_select.hpp"
#include "fewshot/llm_client.hpp"
#include "fewshot/local_select.hpp"
#include "fewshot/orchestrate.hpp"
#include "fewshot/prompt.hpp"
#include "fewshot/similarity.hpp"
#include "fewshot/synthetic.hpp"

namespace {

using nlohmann::json;

// Flat mirror of TaskSpec so every field can come from flags or the TOML
// config that --config points at (flags win).
struct TaskOptions {
  std::string name = "task";
  std::string kind = "classification";
  std::vector<std::string> labels;
  std::string dataset;
  std::string template_path;
  std::string mode = "full";
  std::string metric = "fuzzy";
  std::string index_backend = "exact";
  std::string strategy = "kmeans_medoid";
  std::string scheme = "word";
  int ngram = 3;
  std::string weighting = "tfidf";
  int global_count = 0;
  int local_count = 0;
  bool no_leave_one_out = false;
  std::string local_order = "most_similar_last";
  std::uint64_t seed = 0;
  double split_fraction = 0.5;
  int max_items = 0;
  std::string trace;
  std::string backend = "mock_nearest_label";
  std::string endpoint = "http://127.0.0.1:8000";
  std::string model = "default";
  double temperature = 0.0;
  int max_output_tokens = 256;
  double timeout = 30.0;
  int concurrency = 4;
  std::string api_key_env;
};

void add_task_options(CLI::App* cmd, TaskOptions& opt) {
  cmd->set_config("--config", "", "TOML task file; flags override its values");
  cmd->add_option("--name", opt.name, "task name for reports");
  cmd->add_option("--kind", opt.kind, "classification or generation");
  cmd->add_option("--labels", opt.labels, "label set for classification")
      ->delimiter(',');
  cmd->add_option("--dataset", opt.dataset, "labeled JSONL dataset");
  cmd->add_option("--template", opt.template_path, "prompt template file");
  cmd->add_option("--mode", opt.mode, "prompt mode: full or lite");
  cmd->add_option("--metric", opt.metric, "cosine, euclidean, jaccard, fuzzy");
  cmd->add_option("--index-backend", opt.index_backend, "exact or ann");
  cmd->add_option("--strategy", opt.strategy,
                  "random, kmeans_medoid, balanced_kmeans_medoid");
  cmd->add_option("--scheme", opt.scheme, "tokenizer: word or char_ngram");
  cmd->add_option("--ngram", opt.ngram, "char n-gram width");
  cmd->add_option("--weighting", opt.weighting, "bow or tfidf");
  cmd->add_option("-g,--global-count", opt.global_count, "global example budget");
  cmd->add_option("-l,--local-count", opt.local_count, "local example budget");
  cmd->add_flag("--no-leave-one-out", opt.no_leave_one_out,
                "keep exact query matches during retrieval");
  cmd->add_option("--local-order", opt.local_order,
                  "most_similar_last or most_similar_first");
  cmd->add_option("--seed", opt.seed, "run seed");
  cmd->add_option("--split", opt.split_fraction, "validation fraction");
  cmd->add_option("--max-items", opt.max_items, "cap evaluated test items");
  cmd->add_option("--trace", opt.trace, "per-item trace output (JSONL)");
  cmd->add_option("--backend", opt.backend,
                  "http_openai_compatible, mock_nearest_label, mock_echo");
  cmd->add_option("--endpoint", opt.endpoint, "http backend base URL");
  cmd->add_option("--model", opt.model, "model name sent to the backend");
  cmd->add_option("--temperature", opt.temperature, "sampling temperature");
  cmd->add_option("--max-output-tokens", opt.max_output_tokens,
                  "completion token cap");
  cmd->add_option("--timeout", opt.timeout, "request timeout in seconds");
  cmd->add_option("--concurrency", opt.concurrency, "max in-flight requests");
  cmd->add_option("--api-key-env", opt.api_key_env,
                  "env var holding the bearer token");
}

fewshot::TaskSpec to_spec(const TaskOptions& opt) {
  fewshot::TaskSpec spec;
  spec.name = opt.name;
  spec.kind = fewshot::task_kind_from_string(opt.kind);
  spec.label_set = opt.labels;
  spec.dataset_path = opt.dataset;
  spec.template_path = opt.template_path;
  spec.prompt_mode = fewshot::prompt_mode_from_string(opt.mode);
  spec.selection.global_count = opt.global_count;
  spec.selection.local_count = opt.local_count;
  spec.selection.total_budget = opt.global_count + opt.local_count;
  spec.selection.global_strategy.kind = fewshot::global_kind_from_string(opt.strategy);
  spec.selection.global_strategy.seed = opt.seed;
  spec.selection.metric = fewshot::metric_from_string(opt.metric);
  spec.selection.backend = fewshot::backend_from_string(opt.index_backend);
  spec.selection.featurizer.scheme.kind =
      opt.scheme == "char_ngram" ? fewshot::TokenScheme::char_ngram
                                 : fewshot::TokenScheme::word;
  spec.selection.featurizer.scheme.ngram = opt.ngram;
  spec.selection.featurizer.weighting = opt.weighting == "bow"
                                            ? fewshot::Weighting::bow
                                            : fewshot::Weighting::tfidf;
  spec.selection.leave_one_out = !opt.no_leave_one_out;
  spec.selection.local_order = fewshot::local_order_from_string(opt.local_order);
  spec.backend.kind = fewshot::backend_kind_from_string(opt.backend);
  spec.backend.endpoint = opt.endpoint;
  spec.backend.model_name = opt.model;
  spec.backend.temperature = opt.temperature;
  spec.backend.max_output_tokens = opt.max_output_tokens;
  spec.backend.request_timeout_seconds = opt.timeout;
  spec.backend.max_concurrency = opt.concurrency;
  spec.backend.api_key_env = opt.api_key_env;
  spec.split_fraction = opt.split_fraction;
  spec.seed = opt.seed;
  spec.trace_path = opt.trace;
  spec.max_items = opt.max_items;
  return spec;
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    fewshot::throw_error(fewshot::ErrorCode::io_error, "cannot write: " + path);
  }
  out << doc.dump(2) << '\n';
}

std::vector<std::pair<int, int>> parse_budgets(const std::string& text) {
  std::vector<std::pair<int, int>> budgets;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos) {
      fewshot::throw_error(fewshot::ErrorCode::parameter_error,
                           "budgets look like g:l,g:l,...");
    }
    budgets.emplace_back(std::stoi(part.substr(0, colon)),
                         std::stoi(part.substr(colon + 1)));
  }
  return budgets;
}

// Every verb gets its own top-level parser. CLI11 only reads --config files
// for the root App, so nesting the verbs as subcommands would leave the TOML
// values unapplied.
std::optional<int> parse_args(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return std::nullopt;
}

void print_usage(std::ostream& out) {
  out << "usage: fewshot <command> [options]\n"
         "\n"
         "commands:\n"
         "  validate       load a dataset and print its report\n"
         "  gen-synthetic  write a synthetic corpus\n"
         "  index build    build and save a search index\n"
         "  index query    query a saved index\n"
         "  select         choose globals (and locals when --query is given)\n"
         "  prompt render  print the assembled prompt\n"
         "  run            run a task end to end\n"
         "  sweep split    vary the global/local split at a fixed budget\n"
         "  sweep lite     lite-mode budget ladder with a full baseline\n"
         "  label          bulk-label an unlabeled file\n"
         "  replay         verify a run trace\n"
         "\n"
         "run `fewshot <command> --help` for options\n";
}

int cmd_validate(std::vector<std::string> args) {
  CLI::App app{"load a dataset and print its report", "fewshot validate"};
  std::string dataset;
  app.add_option("--dataset", dataset, "JSONL dataset")->required();
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  fewshot::LoadReport report;
  fewshot::load_dataset(dataset, &report);
  std::cout << report.to_json().dump(2) << '\n';
  return 0;
}

int cmd_gen_synthetic(std::vector<std::string> args) {
  CLI::App app{"write a synthetic corpus", "fewshot gen-synthetic"};
  std::string kind = "classification";
  std::string out_path;
  fewshot::ClassificationSpec cls_spec;
  fewshot::RewriteSpec rw_spec;
  int size = 0;
  std::uint64_t seed = 0;
  app.add_option("--kind", kind, "classification or rewrites");
  app.add_option("--out", out_path, "output JSONL path")->required();
  app.add_option("--size", size, "number of examples");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--family-size", cls_spec.family_size, "variants per family");
  app.add_option("--boundary-overlap", cls_spec.boundary_overlap,
                 "shared-filler rate");
  app.add_option("--corner-fraction", cls_spec.corner_fraction,
                 "filler-heavy family share");
  app.add_option("--class-ratio", cls_spec.class_ratio, "first-class share");
  app.add_option("--labels", cls_spec.labels, "class labels")->delimiter(',');
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  fewshot::ExampleStore store;
  if (kind == "classification") {
    if (size > 0) cls_spec.size = size;
    cls_spec.seed = seed;
    store = fewshot::synthesize_classification(cls_spec);
  } else if (kind == "rewrites") {
    if (size > 0) rw_spec.size = size;
    rw_spec.seed = seed;
    store = fewshot::synthesize_rewrites(rw_spec);
  } else {
    fewshot::throw_error(fewshot::ErrorCode::parameter_error,
                         "unknown corpus kind: " + kind);
  }
  fewshot::save_dataset(store, out_path);
  std::cout << json{{"written", store.size()}, {"path", out_path}}.dump() << '\n';
  return 0;
}

int cmd_index_build(std::vector<std::string> args) {
  CLI::App app{"build and save an index", "fewshot index build"};
  std::string dataset, out_path, metric = "cosine", backend = "exact";
  std::string scheme = "word", weighting = "tfidf";
  int ngram = 3;
  fewshot::AnnParams ann;
  app.add_option("--dataset", dataset)->required();
  app.add_option("--out", out_path)->required();
  app.add_option("--metric", metric);
  app.add_option("--backend", backend);
  app.add_option("--scheme", scheme);
  app.add_option("--ngram", ngram);
  app.add_option("--weighting", weighting);
  app.add_option("--degree", ann.degree, "ann graph degree");
  app.add_option("--breadth", ann.search_breadth, "ann search breadth");
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  fewshot::FeaturizerConfig feat;
  feat.scheme.kind = scheme == "char_ngram" ? fewshot::TokenScheme::char_ngram
                                            : fewshot::TokenScheme::word;
  feat.scheme.ngram = ngram;
  feat.weighting = weighting == "bow" ? fewshot::Weighting::bow
                                      : fewshot::Weighting::tfidf;
  auto store = fewshot::load_dataset(dataset);
  auto index = fewshot::SearchIndex::build(
      store, fewshot::metric_from_string(metric),
      fewshot::backend_from_string(backend), feat, ann);
  index.save(out_path);
  std::cout << json{{"size", index.size()}, {"path", out_path}}.dump() << '\n';
  return 0;
}

int cmd_index_query(std::vector<std::string> args) {
  CLI::App app{"query a saved index", "fewshot index query"};
  std::string index_path, query;
  int k = 5;
  std::vector<std::string> exclude;
  app.add_option("--index", index_path)->required();
  app.add_option("--query", query)->required();
  app.add_option("-k", k, "neighbors to return");
  app.add_option("--exclude", exclude)->delimiter(',');
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  auto index = fewshot::SearchIndex::load(index_path);
  auto hits = index.knn(query, k, exclude);
  json out = json::array();
  for (const auto& hit : hits) {
    out.push_back({{"id", hit.id}, {"score", hit.score}, {"rank", hit.rank}});
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_select(std::vector<std::string> args) {
  CLI::App app{"choose globals (and locals when --query is given)",
               "fewshot select"};
  TaskOptions opt;
  add_task_options(&app, opt);
  std::string query, globals_cache;
  bool whole = false;
  app.add_option("--query", query, "input to select locals for");
  app.add_option("--globals-cache", globals_cache,
                 "reuse globals from this file when it exists");
  app.add_flag("--whole-dataset", whole,
               "select over the whole file instead of the validation split");
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  auto spec = to_spec(opt);
  spec.validate();
  if (spec.dataset_path.empty()) {
    fewshot::throw_error(fewshot::ErrorCode::configuration_error,
                         "--dataset is required");
  }
  auto dataset = fewshot::load_dataset(spec.dataset_path);
  fewshot::ExampleStore source;
  if (whole) {
    source = std::move(dataset);
  } else {
    source = fewshot::split_dataset(dataset, spec.split_fraction, spec.seed).first;
  }
  std::vector<std::string> globals;
  bool cache_hit = false;
  if (!globals_cache.empty() && std::filesystem::exists(globals_cache)) {
    std::ifstream in(globals_cache);
    json doc = json::parse(in);
    globals = doc.at("global_ids").get<std::vector<std::string>>();
    cache_hit = true;
  } else {
    globals = fewshot::select_global(source, spec.selection.global_count,
                                     spec.selection.global_strategy,
                                     spec.selection.featurizer);
    if (!globals_cache.empty()) {
      write_json_file(globals_cache, json{{"global_ids", globals}});
    }
  }
  json out;
  out["global_ids"] = globals;
  out["globals_from_cache"] = cache_hit;
  if (!query.empty()) {
    auto index = fewshot::SearchIndex::build(source, spec.selection.metric,
                                             spec.selection.backend,
                                             spec.selection.featurizer);
    auto excluded = globals;
    if (spec.selection.leave_one_out) {
      auto self_ids = index.ids_with_input(query);
      excluded.insert(excluded.end(), self_ids.begin(), self_ids.end());
    }
    auto hits = index.knn(query, spec.selection.local_count, excluded);
    json locals = json::array();
    for (const auto& hit : hits) {
      locals.push_back({{"id", hit.id}, {"score", hit.score}, {"rank", hit.rank}});
    }
    out["locals"] = std::move(locals);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_prompt_render(std::vector<std::string> args) {
  CLI::App app{"print the assembled prompt", "fewshot prompt render"};
  TaskOptions opt;
  add_task_options(&app, opt);
  std::string query;
  bool as_json = false;
  app.add_option("--query", query)->required();
  app.add_flag("--json", as_json, "print metadata JSON instead of raw text");
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  auto spec = to_spec(opt);
  auto ctx = fewshot::prepare_task(spec);
  auto sel = fewshot::select_examples(ctx.global_ids, ctx.index, query,
                                      spec.selection);
  std::vector<fewshot::LabeledExample> examples;
  for (const auto& id : sel.ids()) examples.push_back(ctx.validation.at(id));
  auto prompt = fewshot::assemble(ctx.tmpl, examples, query);
  if (as_json) {
    json out;
    out["text"] = prompt.text;
    out["example_ids"] = prompt.example_ids;
    out["token_estimate"] = prompt.token_estimate;
    out["mode"] = fewshot::to_string(prompt.mode);
    out["prompt_hash"] = prompt_hash(prompt);
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << prompt.text;
  }
  return 0;
}

int cmd_run(std::vector<std::string> args) {
  CLI::App app{"run a task end to end", "fewshot run"};
  TaskOptions opt;
  add_task_options(&app, opt);
  bool as_json = false;
  std::string report_out;
  app.add_flag("--json", as_json, "print the report as JSON");
  app.add_option("--report-out", report_out, "also write the JSON report here");
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  auto spec = to_spec(opt);
  auto report = fewshot::run_task(spec);
  if (!report_out.empty()) write_json_file(report_out, report.to_json());
  if (as_json) {
    std::cout << report.to_json().dump(2) << '\n';
  } else {
    std::cout << report.to_table();
  }
  return 0;
}

int cmd_sweep_split(std::vector<std::string> args) {
  CLI::App app{"vary the global/local split at a fixed budget",
               "fewshot sweep split"};
  TaskOptions opt;
  add_task_options(&app, opt);
  int budget = 11;
  std::string json_out;
  app.add_option("--budget", budget, "total example budget");
  app.add_option("--json-out", json_out, "write rows as JSON");
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  auto spec = to_spec(opt);
  auto table = fewshot::sweep_split(spec, budget);
  if (!json_out.empty()) write_json_file(json_out, table.to_json());
  std::cout << table.to_table();
  return 0;
}

int cmd_sweep_lite(std::vector<std::string> args) {
  CLI::App app{"lite-mode budget ladder with a full baseline",
               "fewshot sweep lite"};
  TaskOptions opt;
  add_task_options(&app, opt);
  std::string budgets_text, json_out;
  app.add_option("--budgets", budgets_text, "comma list of g:l pairs");
  app.add_option("--json-out", json_out, "write rows as JSON");
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  auto spec = to_spec(opt);
  auto budgets = budgets_text.empty() ? fewshot::default_lite_budgets()
                                      : parse_budgets(budgets_text);
  auto table = fewshot::sweep_lite(spec, budgets);
  if (!json_out.empty()) write_json_file(json_out, table.to_json());
  std::cout << table.to_table();
  return 0;
}

int cmd_label(std::vector<std::string> args) {
  CLI::App app{"bulk-label an unlabeled file", "fewshot label"};
  TaskOptions opt;
  add_task_options(&app, opt);
  std::string in_path, out_path;
  int stop_after = 0;
  app.add_option("--unlabeled", in_path, "JSONL with `input` fields")->required();
  app.add_option("--out", out_path, "labeled JSONL output")->required();
  app.add_option("--stop-after", stop_after,
                 "process at most this many items, then checkpoint");
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  auto spec = to_spec(opt);
  auto summary = fewshot::label_dataset(spec, in_path, out_path, stop_after);
  std::cout << summary.to_json().dump(2) << '\n';
  return 0;
}

int cmd_replay(std::vector<std::string> args) {
  CLI::App app{"verify a run trace", "fewshot replay"};
  TaskOptions opt;
  add_task_options(&app, opt);
  std::string trace_path;
  app.add_option("--trace-file", trace_path)->required();
  if (auto rc = parse_args(app, std::move(args))) return *rc;

  auto spec = to_spec(opt);
  long verified = fewshot::replay_trace(spec, trace_path);
  std::cout << json{{"verified", verified}}.dump() << '\n';
  return 0;
}

int dispatch_group(const std::string& group,
                   const std::vector<std::pair<std::string, int (*)(std::vector<std::string>)>>& verbs,
                   std::vector<std::string> args) {
  if (!args.empty()) {
    for (const auto& [name, handler] : verbs) {
      if (args.front() == name) {
        return handler({args.begin() + 1, args.end()});
      }
    }
  }
  std::cerr << "usage: fewshot " << group << " <";
  for (std::size_t i = 0; i < verbs.size(); ++i) {
    std::cerr << (i ? "|" : "") << verbs[i].first;
  }
  std::cerr << "> [options]\n";
  return 1;
}

int dispatch(std::vector<std::string> args) {
  if (args.empty()) {
    print_usage(std::cerr);
    return 1;
  }
  const std::string verb = args.front();
  std::vector<std::string> rest(args.begin() + 1, args.end());
  if (verb == "-h" || verb == "--help" || verb == "help") {
    print_usage(std::cout);
    return 0;
  }
  if (verb == "validate") return cmd_validate(std::move(rest));
  if (verb == "gen-synthetic") return cmd_gen_synthetic(std::move(rest));
  if (verb == "index") {
    return dispatch_group("index",
                          {{"build", cmd_index_build}, {"query", cmd_index_query}},
                          std::move(rest));
  }
  if (verb == "select") return cmd_select(std::move(rest));
  if (verb == "prompt") {
    return dispatch_group("prompt", {{"render", cmd_prompt_render}},
                          std::move(rest));
  }
  if (verb == "run") return cmd_run(std::move(rest));
  if (verb == "sweep") {
    return dispatch_group("sweep",
                          {{"split", cmd_sweep_split}, {"lite", cmd_sweep_lite}},
                          std::move(rest));
  }
  if (verb == "label") return cmd_label(std::move(rest));
  if (verb == "replay") return cmd_replay(std::move(rest));
  std::cerr << "error: unknown command: " << verb << '\n';
  print_usage(std::cerr);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch({argv + 1, argv + argc});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
