// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "fewshot/error.hpp"
#include "fewshot/orchestrate.hpp"
#include "fewshot/synthetic.hpp"
#include "test_util.hpp"

using namespace fewshot;
using nlohmann::json;

namespace {

ClassificationSpec small_corpus_spec(std::uint64_t seed = 0) {
  ClassificationSpec spec;
  spec.size = 200;
  spec.seed = seed;
  return spec;
}

TaskSpec classification_task(int g, int l) {
  TaskSpec spec;
  spec.name = "clf";
  spec.kind = TaskKind::classification;
  spec.label_set = ClassificationSpec{}.labels;
  spec.selection.global_count = g;
  spec.selection.local_count = l;
  spec.selection.total_budget = g + l;
  spec.selection.global_strategy = {GlobalKind::balanced_kmeans_medoid, 1};
  spec.backend.kind = BackendKind::mock_nearest_label;
  spec.max_items = 60;
  return spec;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_SUITE("orchestrate") {

TEST_CASE("a nearest-label run on family data is highly accurate") {
  auto dataset = synthesize_classification(small_corpus_spec());
  auto spec = classification_task(5, 6);
  auto report = run_prepared(prepare_task(spec, dataset));
  CHECK(report.accuracy >= 0.95);
  CHECK(report.items_per_second > 0.0);
  CHECK(report.output_tokens_per_second > 0.0);
  CHECK(report.run_metadata["evaluated_items"] == 60);
  CHECK(report.run_metadata["errors"] == 0);
  CHECK(report.run_metadata["kind"] == "classification");
  CHECK(report.run_metadata["task"] == "clf");
}

TEST_CASE("repeated runs serialize byte for byte") {
  auto dataset = synthesize_classification(small_corpus_spec(4));
  auto spec = classification_task(3, 4);
  spec.max_items = 40;
  auto first = run_prepared(prepare_task(spec, dataset));
  auto second = run_prepared(prepare_task(spec, dataset));
  CHECK(first.to_json().dump() == second.to_json().dump());
  // Wall time is a latency sum for mocks, so even the rates reproduce.
  CHECK(first.run_metadata["wall_time_seconds"] ==
        second.run_metadata["wall_time_seconds"]);
}

TEST_CASE("pure-global and pure-local budgets both run") {
  auto dataset = synthesize_classification(small_corpus_spec(9));
  for (auto [g, l] : {std::pair{6, 0}, std::pair{0, 6}}) {
    auto spec = classification_task(g, l);
    spec.max_items = 25;
    auto report = run_prepared(prepare_task(spec, dataset));
    CHECK(report.accuracy >= 0.0);
    CHECK(report.run_metadata["global_count"] == g);
    CHECK(report.run_metadata["local_count"] == l);
  }
}

TEST_CASE("identical queries in validation and test still complete with l>0") {
  // With leave-one-out on, the self-match is skipped instead of starving
  // the local pool.
  ExampleStore dataset;
  for (int i = 0; i < 20; ++i) {
    std::string text = "repeated question " + std::to_string(i % 5);
    dataset.add({"r" + std::to_string(i), text + " variant " + std::to_string(i),
                 i % 2 ? "order_status" : "product_question",
                 i % 2 ? "order_status" : "product_question",
                 {}});
  }
  auto spec = classification_task(2, 3);
  spec.max_items = 0;
  auto report = run_prepared(prepare_task(spec, dataset));
  CHECK(report.run_metadata["errors"] == 0);
}

TEST_CASE("unparseable completions become invalid predictions, not crashes") {
  auto dataset = synthesize_classification(small_corpus_spec(6));
  auto spec = classification_task(2, 2);
  spec.backend.kind = BackendKind::mock_echo;  // echoes the query, never a label
  spec.max_items = 20;
  auto report = run_prepared(prepare_task(spec, dataset));
  CHECK(report.accuracy == 0.0);
  CHECK(report.run_metadata["invalid_predictions"] == 20);
  CHECK(report.run_metadata["errors"] == 0);
}

TEST_CASE("generation tasks report bleu and rouge") {
  RewriteSpec corpus;
  corpus.size = 120;
  corpus.seed = 21;
  auto dataset = synthesize_rewrites(corpus);

  TaskSpec spec;
  spec.name = "rewrite";
  spec.kind = TaskKind::generation;
  spec.selection.global_count = 2;
  spec.selection.local_count = 4;
  spec.selection.total_budget = 6;
  spec.selection.global_strategy = {GlobalKind::kmeans_medoid, 2};
  spec.backend.kind = BackendKind::mock_nearest_label;
  spec.max_items = 30;

  auto report = run_prepared(prepare_task(spec, dataset));
  REQUIRE(report.bleu.has_value());
  REQUIRE(report.rouge_l.has_value());
  CHECK(*report.bleu > 0.5);  // neighbors share the canonical rewrite
  CHECK(*report.rouge_l > 0.5);
  CHECK(report.run_metadata["kind"] == "generation");
}

TEST_CASE("traces record one line per item and replay to the same hashes") {
  auto dataset = synthesize_classification(small_corpus_spec(15));
  auto dir = testutil::temp_dir("trace");
  auto spec = classification_task(3, 3);
  spec.max_items = 15;
  spec.trace_path = dir / "run_trace.jsonl";

  auto ctx = prepare_task(spec, dataset);
  auto report = run_prepared(ctx);
  (void)report;

  auto lines = read_lines(spec.trace_path);
  REQUIRE(lines.size() == 15);
  std::set<std::string> ids;
  for (const auto& line : lines) {
    auto doc = json::parse(line);
    CHECK(doc.contains("id"));
    CHECK(doc.contains("query"));
    CHECK(doc.contains("example_ids"));
    CHECK(doc.contains("prompt_hash"));
    CHECK(doc.contains("completion"));
    CHECK(doc.contains("latency_seconds"));
    CHECK(doc["example_ids"].size() == 6);
    ids.insert(doc["id"].get<std::string>());
  }
  CHECK(ids.size() == 15);

  CHECK(replay_trace(ctx, spec.trace_path) == 15);

  // Tampering with a recorded hash must be caught.
  auto tampered = dir / "tampered.jsonl";
  {
    std::ofstream out(tampered);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      auto doc = json::parse(lines[i]);
      if (i == 7) doc["prompt_hash"] = "0x0000000000000000";
      out << doc.dump() << '\n';
    }
  }
  CHECK_THROWS_AS(replay_trace(ctx, tampered), Error);
  CHECK_THROWS_AS(replay_trace(ctx, dir / "missing.jsonl"), Error);
}

TEST_CASE("budget sweeps cover every split of the total") {
  auto dataset = synthesize_classification(small_corpus_spec(33));
  auto spec = classification_task(0, 0);
  spec.selection.global_strategy = {GlobalKind::balanced_kmeans_medoid, 3};
  spec.max_items = 20;

  auto table = sweep_split(spec, 5, dataset);
  REQUIRE(table.rows.size() == 6);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    CHECK(row.global_count == 5 - static_cast<int>(i));
    CHECK(row.global_count + row.local_count == 5);
    CHECK(row.mode == PromptMode::full);
    CHECK(row.report.run_metadata["global_count"] == row.global_count);
  }

  auto j = table.to_json();
  REQUIRE(j["rows"].size() == 6);
  CHECK(j["rows"][0]["global_count"] == 5);
  CHECK(j["rows"][5]["local_count"] == 5);

  auto text = table.to_table();
  CHECK(text.find("g") != std::string::npos);
  CHECK(text.find("it/s") != std::string::npos);

  // Determinism of the whole table.
  auto again = sweep_split(spec, 5, dataset);
  CHECK(again.to_json().dump() == j.dump());
}

TEST_CASE("lite sweeps prepend a full-mode baseline at the spec budget") {
  auto dataset = synthesize_classification(small_corpus_spec(44));
  auto spec = classification_task(4, 4);
  spec.max_items = 15;

  std::vector<std::pair<int, int>> budgets = {{1, 2}, {3, 4}};
  auto table = sweep_lite(spec, budgets, dataset);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].mode == PromptMode::full);
  CHECK(table.rows[0].global_count == 4);
  CHECK(table.rows[0].local_count == 4);
  CHECK(table.rows[1].mode == PromptMode::lite);
  CHECK(table.rows[1].global_count == 1);
  CHECK(table.rows[1].local_count == 2);
  CHECK(table.rows[2].global_count == 3);
  CHECK(table.rows[2].local_count == 4);
}

TEST_CASE("the default lite ladder runs from (1,2) to (19,20)") {
  auto budgets = default_lite_budgets();
  REQUIRE(budgets.size() == 19);
  CHECK(budgets.front() == std::pair{1, 2});
  CHECK(budgets.back() == std::pair{19, 20});
  for (const auto& [g, l] : budgets) CHECK(l == g + 1);
}

TEST_CASE("bulk labeling writes records and survives interruption") {
  auto dir = testutil::temp_dir("label");
  auto dataset = synthesize_classification(small_corpus_spec(55));
  auto dataset_path = dir / "dataset.jsonl";
  save_dataset(dataset, dataset_path);

  auto unlabeled_path = dir / "unlabeled.jsonl";
  {
    std::ofstream out(unlabeled_path);
    for (int i = 0; i < 10; ++i) {
      json doc = {{"id", "u" + std::to_string(i)},
                  {"input", dataset.examples()[i * 3].input + " tweak"}};
      out << doc.dump() << '\n';
    }
  }

  auto spec = classification_task(3, 3);
  spec.dataset_path = dataset_path;
  auto output_path = dir / "labeled.jsonl";

  // First pass stops after four items, as an interrupt would.
  auto partial = label_dataset(spec, unlabeled_path, output_path, 4);
  CHECK(partial.processed == 4);
  CHECK(partial.written == 4);
  CHECK(partial.failed == 0);
  CHECK(read_lines(output_path).size() == 4);

  auto ckpt = json::parse(read_lines(dir / "labeled.jsonl.ckpt").at(0));
  CHECK(ckpt["processed"] == 4);
  CHECK(ckpt["written"] == 4);

  // Simulate a torn write after the checkpoint; resume must discard it.
  {
    std::ofstream out(output_path, std::ios::app);
    out << "{\"id\": \"torn";
  }

  auto resumed = label_dataset(spec, unlabeled_path, output_path, 0);
  CHECK(resumed.processed == 10);
  CHECK(resumed.written == 10);
  CHECK(resumed.items_per_second > 0.0);

  auto lines = read_lines(output_path);
  REQUIRE(lines.size() == 10);
  std::set<std::string> seen;
  for (const auto& line : lines) {
    auto doc = json::parse(line);
    seen.insert(doc["id"].get<std::string>());
    CHECK(doc.contains("output"));
    CHECK(doc.contains("example_ids"));
    CHECK(doc.contains("prompt_hash"));
  }
  CHECK(seen.size() == 10);  // no duplicates across the two passes

  // A third call finds nothing left to do.
  auto done = label_dataset(spec, unlabeled_path, output_path, 0);
  CHECK(done.processed == 10);
  CHECK(done.written == 10);
  CHECK(read_lines(output_path).size() == 10);
}

TEST_CASE("labeling outputs feed straight back into the loader") {
  auto dir = testutil::temp_dir("label_roundtrip");
  auto dataset = synthesize_classification(small_corpus_spec(66));
  auto dataset_path = dir / "dataset.jsonl";
  save_dataset(dataset, dataset_path);

  auto unlabeled_path = dir / "unlabeled.jsonl";
  {
    std::ofstream out(unlabeled_path);
    for (int i = 0; i < 5; ++i) {
      out << json{{"input", dataset.examples()[i * 5].input + " redux"}}.dump()
          << '\n';
    }
  }
  auto spec = classification_task(2, 3);
  spec.dataset_path = dataset_path;
  auto output_path = dir / "labeled.jsonl";
  auto summary = label_dataset(spec, unlabeled_path, output_path, 0);
  REQUIRE(summary.written == 5);

  auto reloaded = load_dataset(output_path);
  CHECK(reloaded.size() == 5);
  for (const auto& ex : reloaded.examples()) {
    CHECK(std::find(spec.label_set.begin(), spec.label_set.end(), ex.output) !=
          spec.label_set.end());
  }
}

TEST_CASE("task validation rejects inconsistent specs") {
  TaskSpec spec;
  spec.kind = TaskKind::classification;
  spec.label_set.clear();
  CHECK_THROWS_AS(spec.validate(), Error);

  spec.label_set = {"a", "b"};
  spec.split_fraction = 1.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.split_fraction = 0.5;
  spec.max_items = -1;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.max_items = 0;
  CHECK_NOTHROW(spec.validate());

  CHECK_THROWS_AS(prepare_task(spec), Error);  // no dataset path
}

TEST_CASE("budgets beyond the validation split are rejected up front") {
  ExampleStore tiny;
  for (int i = 0; i < 6; ++i) {
    tiny.add({"t" + std::to_string(i), "input " + std::to_string(i), "a", "a", {}});
  }
  auto spec = classification_task(4, 4);
  spec.label_set = {"a"};
  CHECK_THROWS_AS(prepare_task(spec, tiny), Error);  // 8 > 3 validation rows
}

TEST_CASE("task kind names round-trip") {
  CHECK(task_kind_from_string("classification") == TaskKind::classification);
  CHECK(task_kind_from_string("generation") == TaskKind::generation);
  CHECK(to_string(TaskKind::generation) == "generation");
  CHECK_THROWS_AS(task_kind_from_string("ranking"), Error);
}

}  // TEST_SUITE
