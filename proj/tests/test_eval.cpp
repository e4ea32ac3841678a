// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "fewshot/error.hpp"
#include "fewshot/eval.hpp"

using namespace fewshot;

namespace {

std::vector<std::string> split_ws(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Reference token-LCS for the rouge oracle.
std::size_t token_lcs(const std::string& a, const std::string& b) {
  auto ta = split_ws(a);
  auto tb = split_ws(b);
  std::vector<std::vector<std::size_t>> dp(ta.size() + 1,
                                           std::vector<std::size_t>(tb.size() + 1, 0));
  for (std::size_t i = 1; i <= ta.size(); ++i) {
    for (std::size_t j = 1; j <= tb.size(); ++j) {
      dp[i][j] = ta[i - 1] == tb[j - 1] ? dp[i - 1][j - 1] + 1
                                        : std::max(dp[i - 1][j], dp[i][j - 1]);
    }
  }
  return dp[ta.size()][tb.size()];
}

CompletionResult result_with_tokens(int output_tokens) {
  CompletionResult r;
  r.text = "x";
  r.output_tokens = output_tokens;
  return r;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("per-class precision and recall on a tiny confusion matrix") {
  // gold: a=P b=P c=N; predicted: a=P b=N c=N.
  std::map<std::string, std::string> gold = {{"a", "P"}, {"b", "P"}, {"c", "N"}};
  std::map<std::string, std::string> pred = {{"a", "P"}, {"b", "N"}, {"c", "N"}};
  auto metrics = precision_recall(pred, gold);
  REQUIRE(metrics.size() == 2);
  CHECK(metrics.at("P").precision == doctest::Approx(1.0));
  CHECK(metrics.at("P").recall == doctest::Approx(0.5));
  CHECK(metrics.at("P").support == 2);
  CHECK(metrics.at("N").precision == doctest::Approx(0.5));
  CHECK(metrics.at("N").recall == doctest::Approx(1.0));
  CHECK(metrics.at("N").support == 1);
  CHECK(accuracy(pred, gold) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("precision and recall agree with a direct confusion-matrix count") {
  std::mt19937_64 rng(29);
  std::vector<std::string> labels = {"A", "B", "C", "D"};
  for (int trial = 0; trial < 20; ++trial) {
    std::map<std::string, std::string> gold, pred;
    int n = 5 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      std::string id = "q" + std::to_string(i);
      gold[id] = labels[rng() % labels.size()];
      pred[id] = labels[rng() % labels.size()];
    }
    auto metrics = precision_recall(pred, gold);
    // Oracle: raw tp/fp/fn tallies per label.
    for (const auto& label : labels) {
      long tp = 0, fp = 0, fn = 0;
      for (const auto& [id, g] : gold) {
        const auto& p = pred.at(id);
        if (p == label && g == label) ++tp;
        if (p == label && g != label) ++fp;
        if (p != label && g == label) ++fn;
      }
      if (tp + fp + fn == 0) {
        CHECK(metrics.count(label) == 0);  // absent classes are excluded
        continue;
      }
      const auto& m = metrics.at(label);
      double want_p = tp + fp == 0 ? (tp + fn == 0 ? 1.0 : 0.0)
                                   : static_cast<double>(tp) / (tp + fp);
      double want_r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
      CHECK(m.precision == doctest::Approx(want_p).epsilon(1e-12));
      CHECK(m.recall == doctest::Approx(want_r).epsilon(1e-12));
      CHECK(m.support == tp + fn);
    }
  }
}

TEST_CASE("a class with support but no predictions scores zero precision") {
  std::map<std::string, std::string> gold = {{"a", "P"}, {"b", "N"}};
  std::map<std::string, std::string> pred = {{"a", "N"}, {"b", "N"}};
  auto metrics = precision_recall(pred, gold);
  CHECK(metrics.at("P").precision == doctest::Approx(0.0));
  CHECK(metrics.at("P").recall == doctest::Approx(0.0));
}

TEST_CASE("mismatched id sets are an error") {
  std::map<std::string, std::string> gold = {{"a", "P"}, {"b", "N"}};
  std::map<std::string, std::string> pred = {{"a", "P"}};
  CHECK_THROWS_AS(precision_recall(pred, gold), Error);
  CHECK_THROWS_AS(accuracy(pred, gold), Error);
  std::map<std::string, std::string> wrong_ids = {{"a", "P"}, {"z", "N"}};
  CHECK_THROWS_AS(precision_recall(wrong_ids, gold), Error);
  std::map<std::string, std::string> empty;
  CHECK(accuracy(empty, empty) == 0.0);
}

TEST_CASE("a hypothesis identical to its reference scores bleu one") {
  for (const std::string text : {"single", "two words", "a b c d e f g h"}) {
    auto score = bleu(text, {text});
    CHECK(score.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(score.degenerate_input);
  }
}

TEST_CASE("clipped unigram precision caps repeats at the reference count") {
  double p = modified_ngram_precision("the the the the the the the",
                                      {"the cat is on the mat"}, 1);
  CHECK(p == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("hypotheses shorter than max_n cap the n-gram order") {
  // Two matching tokens: without the cap the 3- and 4-gram terms would
  // zero the geometric mean.
  auto score = bleu("red shoe", {"red shoe"});
  CHECK(score.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a zero clipped count collapses the score to zero") {
  auto score = bleu("alpha beta gamma", {"delta epsilon zeta"});
  CHECK(score.value == 0.0);
  // Matching unigrams but no matching bigram also zeroes the product.
  auto bigramless = bleu("a c", {"a b c"});
  CHECK(bigramless.value == 0.0);
}

TEST_CASE("brevity penalty matches the closed form") {
  // All precisions are 1, so bleu equals exp(1 - r/c) with c=2, r=4.
  auto score = bleu("the cat", {"the cat is here"});
  CHECK(score.value == doctest::Approx(std::exp(1.0 - 4.0 / 2.0)).epsilon(1e-12));
}

TEST_CASE("reference length ties resolve to the shorter reference") {
  // Hypothesis length 3 sits between lengths 2 and 4; the shorter wins and
  // no brevity penalty applies.
  auto score = bleu("a b c", {"a b", "a b c d"});
  CHECK(score.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty hypotheses are flagged, not crashed on") {
  auto score = bleu("", {"something"});
  CHECK(score.value == 0.0);
  CHECK(score.degenerate_input);
  CHECK_THROWS_AS(bleu("x", {}), Error);
  CHECK_THROWS_AS(bleu("x", {"y"}, 0), Error);
}

TEST_CASE("corpus bleu pools counts instead of averaging sentence scores") {
  std::vector<std::string> hyps = {"a b", "x y"};
  std::vector<std::vector<std::string>> refs = {{"a b"}, {"x z"}};
  // Pooled: p1 = (2+1)/4, p2 = (1+0)/2, lengths equal so no penalty.
  double want = std::sqrt((3.0 / 4.0) * (1.0 / 2.0));
  auto corpus = corpus_bleu(hyps, refs);
  CHECK(corpus.value == doctest::Approx(want).epsilon(1e-12));

  double mean_of_sentences =
      (bleu("a b", {"a b"}).value + bleu("x y", {"x z"}).value) / 2.0;
  CHECK(corpus.value != doctest::Approx(mean_of_sentences));
}

TEST_CASE("corpus bleu skips n-gram orders with no mass") {
  auto score = corpus_bleu({"a"}, {{"a"}});
  CHECK(score.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(corpus_bleu({}, {}), Error);
  CHECK_THROWS_AS(corpus_bleu({"a"}, {{"a"}, {"b"}}), Error);
}

TEST_CASE("rouge_l is the f1 over the token lcs") {
  // LCS "the cat" of length 2: p=2/3, r=1, f1=0.8.
  CHECK(rouge_l("the cat sat", "the cat") == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(rouge_l("same words here", "same words here") == doctest::Approx(1.0));
  CHECK(rouge_l("aaa bbb", "ccc ddd") == doctest::Approx(0.0));
  CHECK_THROWS_AS(rouge_l("", "ref"), Error);
  CHECK_THROWS_AS(rouge_l("hyp", ""), Error);
}

TEST_CASE("rouge_l agrees with an independent lcs computation") {
  std::mt19937_64 rng(31);
  std::vector<std::string> words = {"red", "blue", "shoe", "hat", "buy", "now"};
  for (int trial = 0; trial < 50; ++trial) {
    auto make = [&]() {
      int n = 1 + static_cast<int>(rng() % 10);
      std::string s;
      for (int i = 0; i < n; ++i) {
        if (!s.empty()) s += ' ';
        s += words[rng() % words.size()];
      }
      return s;
    };
    std::string hyp = make(), ref = make();
    double lcs = static_cast<double>(token_lcs(hyp, ref));
    double nh = static_cast<double>(split_ws(hyp).size());
    double nr = static_cast<double>(split_ws(ref).size());
    double want = lcs == 0.0 ? 0.0 : 2.0 * lcs / (nh + nr);
    CHECK(rouge_l(hyp, ref) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("throughput is plain division over one shared wall") {
  std::vector<CompletionResult> results;
  for (int i = 0; i < 10; ++i) results.push_back(result_with_tokens(3));
  auto t = throughput(results, 2.0);
  CHECK(t.items_per_second == doctest::Approx(5.0));
  CHECK(t.output_tokens_per_second == doctest::Approx(15.0));
  // The ratio of the two rates is the mean output tokens per item.
  CHECK(t.output_tokens_per_second / t.items_per_second == doctest::Approx(3.0));
  CHECK_THROWS_AS(throughput(results, 0.0), Error);
  CHECK_THROWS_AS(throughput(results, -1.0), Error);
}

TEST_CASE("label parsing folds case and skips leading blank lines") {
  std::vector<std::string> labels = {"Positive", "Negative"};
  CHECK(parse_label("POSITIVE", labels) == "Positive");
  CHECK(parse_label("  negative  \n", labels) == "Negative");
  CHECK(parse_label("\n\n  Positive\nextra prose", labels) == "Positive");
  CHECK(parse_label("maybe", labels) == std::nullopt);
  CHECK(parse_label("", labels) == std::nullopt);
  CHECK(parse_label("\n \t\n", labels) == std::nullopt);
  // Only the first non-empty line counts.
  CHECK(parse_label("unrelated\nPositive", labels) == std::nullopt);
}

TEST_CASE("classification reports carry metrics, rates and metadata") {
  std::map<std::string, std::string> gold = {{"a", "P"}, {"b", "N"}};
  std::map<std::string, std::string> pred = {{"a", "P"}, {"b", "N"}};
  std::vector<CompletionResult> results = {result_with_tokens(2),
                                           result_with_tokens(4)};
  auto report = build_classification_report(pred, gold, results, 0.5,
                                            {{"task", "demo"}});
  CHECK(report.accuracy == doctest::Approx(1.0));
  CHECK(report.items_per_second == doctest::Approx(4.0));
  CHECK(report.output_tokens_per_second == doctest::Approx(12.0));
  CHECK_FALSE(report.bleu.has_value());

  auto j = report.to_json();
  CHECK(j["accuracy"] == 1.0);
  CHECK(j["run_metadata"]["task"] == "demo");
  CHECK(j["per_class"]["P"]["support"] == 1);
  CHECK(j.dump() == report.to_json().dump());  // stable serialization

  auto table = report.to_table();
  CHECK(table.find("class") != std::string::npos);
  CHECK(table.find("accuracy") != std::string::npos);
  CHECK(table.find("toks/s") != std::string::npos);
}

TEST_CASE("generation reports score bleu, rouge and exact matches") {
  std::vector<std::string> hyps = {"the red shoe", "wrong answer"};
  std::vector<std::string> refs = {"the red shoe", "expected reply"};
  std::vector<CompletionResult> results = {result_with_tokens(3),
                                           result_with_tokens(2)};
  auto report = build_generation_report(hyps, refs, results, 1.0, {});
  CHECK(report.accuracy == doctest::Approx(0.5));
  REQUIRE(report.bleu.has_value());
  REQUIRE(report.rouge_l.has_value());
  CHECK(*report.rouge_l ==
        doctest::Approx((rouge_l("the red shoe", "the red shoe") +
                         rouge_l("wrong answer", "expected reply")) /
                        2.0));
  auto j = report.to_json();
  CHECK(j.contains("bleu"));
  CHECK(j.contains("rouge_l"));

  CHECK_THROWS_AS(build_generation_report({"a"}, {}, results, 1.0, {}), Error);
}

}  // TEST_SUITE
