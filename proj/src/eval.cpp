// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>

#include <boost/locale.hpp>

#include "fewshot/error.hpp"

namespace fewshot {

namespace {

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

using NgramCounts = std::map<std::vector<std::string>, long>;

NgramCounts ngram_counts(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  if (n < 1 || tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string> gram(tokens.begin() + i, tokens.begin() + i + n);
    ++counts[std::move(gram)];
  }
  return counts;
}

// Clipped matches and hypothesis n-gram total for one item.
std::pair<long, long> clipped_counts(const std::vector<std::string>& hyp,
                                     const std::vector<std::vector<std::string>>& refs,
                                     int n) {
  auto hyp_counts = ngram_counts(hyp, n);
  long total = 0;
  for (const auto& [gram, count] : hyp_counts) total += count;
  NgramCounts max_ref;
  for (const auto& ref : refs) {
    for (const auto& [gram, count] : ngram_counts(ref, n)) {
      auto& slot = max_ref[gram];
      slot = std::max(slot, count);
    }
  }
  long clipped = 0;
  for (const auto& [gram, count] : hyp_counts) {
    auto it = max_ref.find(gram);
    if (it != max_ref.end()) clipped += std::min(count, it->second);
  }
  return {clipped, total};
}

// Reference length closest to the hypothesis length; ties pick the shorter.
long closest_ref_length(long hyp_len, const std::vector<std::vector<std::string>>& refs) {
  long best = static_cast<long>(refs.front().size());
  for (const auto& ref : refs) {
    long len = static_cast<long>(ref.size());
    long d = std::labs(len - hyp_len);
    long best_d = std::labs(best - hyp_len);
    if (d < best_d || (d == best_d && len < best)) best = len;
  }
  return best;
}

std::vector<std::vector<std::string>> tokenize_refs(const std::vector<std::string>& refs) {
  std::vector<std::vector<std::string>> out;
  out.reserve(refs.size());
  for (const auto& ref : refs) out.push_back(whitespace_tokens(ref));
  return out;
}

BleuScore bleu_from_counts(const std::vector<long>& clipped,
                           const std::vector<long>& totals, long hyp_len,
                           long ref_len, bool degenerate) {
  BleuScore score;
  score.degenerate_input = degenerate;
  double log_sum = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    if (totals[i] == 0) continue;
    if (clipped[i] == 0) return score;  // an unsmoothed zero kills the product
    log_sum += std::log(static_cast<double>(clipped[i]) / static_cast<double>(totals[i]));
    ++used;
  }
  if (used == 0 || hyp_len == 0) return score;
  double bp = hyp_len < ref_len
                  ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len))
                  : 1.0;
  score.value = bp * std::exp(log_sum / used);
  return score;
}

}  // namespace

std::map<std::string, ClassMetrics> precision_recall(
    const std::map<std::string, std::string>& predictions,
    const std::map<std::string, std::string>& gold) {
  if (predictions.size() != gold.size()) {
    throw_error(ErrorCode::evaluation_error, "prediction and gold id sets differ");
  }
  for (const auto& [id, label] : gold) {
    (void)label;
    if (!predictions.count(id)) {
      throw_error(ErrorCode::evaluation_error, "missing prediction for id " + id);
    }
  }

  std::map<std::string, long> tp, fp, support;
  for (const auto& [id, gold_label] : gold) {
    const auto& pred_label = predictions.at(id);
    ++support[gold_label];
    if (pred_label == gold_label) {
      ++tp[pred_label];
    } else {
      ++fp[pred_label];
    }
  }

  std::map<std::string, ClassMetrics> out;
  std::map<std::string, bool> classes;
  for (const auto& [label, count] : support) classes[label] = true;
  for (const auto& [label, count] : tp) classes[label] = true;
  for (const auto& [label, count] : fp) classes[label] = true;
  for (const auto& [label, seen] : classes) {
    (void)seen;
    long t = tp.count(label) ? tp.at(label) : 0;
    long f = fp.count(label) ? fp.at(label) : 0;
    long s = support.count(label) ? support.at(label) : 0;
    ClassMetrics m;
    m.support = static_cast<int>(s);
    if (t + f == 0) {
      m.precision = s == 0 ? 1.0 : 0.0;
    } else {
      m.precision = static_cast<double>(t) / static_cast<double>(t + f);
    }
    m.recall = s > 0 ? static_cast<double>(t) / static_cast<double>(s) : 0.0;
    out[label] = m;
  }
  return out;
}

double accuracy(const std::map<std::string, std::string>& predictions,
                const std::map<std::string, std::string>& gold) {
  if (predictions.size() != gold.size()) {
    throw_error(ErrorCode::evaluation_error, "prediction and gold id sets differ");
  }
  if (gold.empty()) return 0.0;
  long correct = 0;
  for (const auto& [id, gold_label] : gold) {
    auto it = predictions.find(id);
    if (it == predictions.end()) {
      throw_error(ErrorCode::evaluation_error, "missing prediction for id " + id);
    }
    if (it->second == gold_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double modified_ngram_precision(const std::string& hypothesis,
                                const std::vector<std::string>& references, int n) {
  if (n < 1) throw_error(ErrorCode::parameter_error, "n must be at least 1");
  if (references.empty()) {
    throw_error(ErrorCode::evaluation_error, "references must be non-empty");
  }
  auto hyp = whitespace_tokens(hypothesis);
  auto [clipped, total] = clipped_counts(hyp, tokenize_refs(references), n);
  if (total == 0) return 0.0;
  return static_cast<double>(clipped) / static_cast<double>(total);
}

BleuScore bleu(const std::string& hypothesis,
               const std::vector<std::string>& references, int max_n) {
  if (max_n < 1) throw_error(ErrorCode::parameter_error, "max_n must be at least 1");
  if (references.empty()) {
    throw_error(ErrorCode::evaluation_error, "references must be non-empty");
  }
  auto hyp = whitespace_tokens(hypothesis);
  auto refs = tokenize_refs(references);
  long hyp_len = static_cast<long>(hyp.size());
  if (hyp_len == 0) return {0.0, true};

  int cap = std::min<long>(max_n, hyp_len);
  std::vector<long> clipped(cap, 0), totals(cap, 0);
  for (int n = 1; n <= cap; ++n) {
    auto [c, t] = clipped_counts(hyp, refs, n);
    clipped[n - 1] = c;
    totals[n - 1] = t;
  }
  return bleu_from_counts(clipped, totals, hyp_len, closest_ref_length(hyp_len, refs), false);
}

BleuScore corpus_bleu(const std::vector<std::string>& hypotheses,
                      const std::vector<std::vector<std::string>>& references,
                      int max_n) {
  if (max_n < 1) throw_error(ErrorCode::parameter_error, "max_n must be at least 1");
  if (hypotheses.size() != references.size()) {
    throw_error(ErrorCode::evaluation_error,
                "hypothesis and reference counts differ");
  }
  if (hypotheses.empty()) {
    throw_error(ErrorCode::evaluation_error, "nothing to score");
  }
  std::vector<long> clipped(max_n, 0), totals(max_n, 0);
  long hyp_len = 0, ref_len = 0;
  bool degenerate = false;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    if (references[i].empty()) {
      throw_error(ErrorCode::evaluation_error, "references must be non-empty");
    }
    auto hyp = whitespace_tokens(hypotheses[i]);
    auto refs = tokenize_refs(references[i]);
    if (hyp.empty()) degenerate = true;
    hyp_len += static_cast<long>(hyp.size());
    ref_len += closest_ref_length(static_cast<long>(hyp.size()), refs);
    int cap = std::min<long>(max_n, static_cast<long>(hyp.size()));
    for (int n = 1; n <= cap; ++n) {
      auto [c, t] = clipped_counts(hyp, refs, n);
      clipped[n - 1] += c;
      totals[n - 1] += t;
    }
  }
  return bleu_from_counts(clipped, totals, hyp_len, ref_len, degenerate);
}

double rouge_l(const std::string& hypothesis, const std::string& reference) {
  auto hyp = whitespace_tokens(hypothesis);
  auto ref = whitespace_tokens(reference);
  if (hyp.empty() || ref.empty()) {
    throw_error(ErrorCode::evaluation_error,
                "rouge_l needs non-empty hypothesis and reference");
  }
  std::vector<std::size_t> prev(ref.size() + 1, 0), cur(ref.size() + 1, 0);
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      if (hyp[i - 1] == ref[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  double lcs = static_cast<double>(prev[ref.size()]);
  if (lcs == 0.0) return 0.0;
  double p = lcs / static_cast<double>(hyp.size());
  double r = lcs / static_cast<double>(ref.size());
  return 2.0 * p * r / (p + r);
}

Throughput throughput(const std::vector<CompletionResult>& results,
                      double wall_time_seconds) {
  if (!(wall_time_seconds > 0.0)) {
    throw_error(ErrorCode::parameter_error, "wall time must be positive");
  }
  long tokens = 0;
  for (const auto& r : results) tokens += r.output_tokens;
  Throughput t;
  t.items_per_second = static_cast<double>(results.size()) / wall_time_seconds;
  t.output_tokens_per_second = static_cast<double>(tokens) / wall_time_seconds;
  return t;
}

std::optional<std::string> parse_label(const std::string& completion,
                                       const std::vector<std::string>& label_set) {
  static const std::locale loc = boost::locale::generator()("en_US.UTF-8");
  std::istringstream lines(completion);
  std::string line;
  std::string candidate;
  while (std::getline(lines, line)) {
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t\r");
    candidate = line.substr(begin, end - begin + 1);
    break;
  }
  if (candidate.empty()) return std::nullopt;
  std::string folded = boost::locale::fold_case(candidate, loc);
  for (const auto& label : label_set) {
    if (boost::locale::fold_case(label, loc) == folded) return label;
  }
  return std::nullopt;
}

namespace {

nlohmann::json metrics_json(const std::map<std::string, ClassMetrics>& per_class) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [label, m] : per_class) {
    out[label] = {{"precision", m.precision}, {"recall", m.recall}, {"support", m.support}};
  }
  return out;
}

// toks/s over it/s must equal the mean output tokens per item; anything else
// means the two rates were computed against different walls.
void check_rate_identity(const Throughput& t, const std::vector<CompletionResult>& results) {
  if (results.empty() || t.items_per_second <= 0.0) return;
  long tokens = 0;
  for (const auto& r : results) tokens += r.output_tokens;
  double mean = static_cast<double>(tokens) / static_cast<double>(results.size());
  double ratio = t.output_tokens_per_second / t.items_per_second;
  if (std::fabs(ratio - mean) > 1e-9 * std::max(1.0, mean)) {
    throw_error(ErrorCode::evaluation_error, "throughput rates are inconsistent");
  }
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
  nlohmann::json out;
  out["accuracy"] = accuracy;
  out["per_class"] = metrics_json(per_class);
  if (bleu) out["bleu"] = *bleu;
  if (rouge_l) out["rouge_l"] = *rouge_l;
  out["items_per_second"] = items_per_second;
  out["output_tokens_per_second"] = output_tokens_per_second;
  out["run_metadata"] = run_metadata;
  return out;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  if (!per_class.empty()) {
    std::size_t width = 5;
    for (const auto& [label, m] : per_class) width = std::max(width, label.size());
    out << std::left << std::setw(static_cast<int>(width + 2)) << "class"
        << std::right << std::setw(10) << "prec" << std::setw(10) << "recall"
        << std::setw(10) << "support" << '\n';
    for (const auto& [label, m] : per_class) {
      out << std::left << std::setw(static_cast<int>(width + 2)) << label
          << std::right << std::setw(10) << m.precision << std::setw(10) << m.recall
          << std::setw(10) << m.support << '\n';
    }
  }
  out << "accuracy " << accuracy << '\n';
  if (bleu) out << "bleu " << *bleu << '\n';
  if (rouge_l) out << "rouge_l " << *rouge_l << '\n';
  out << "it/s " << items_per_second << '\n';
  out << "toks/s " << output_tokens_per_second << '\n';
  return out.str();
}

EvalReport build_classification_report(
    const std::map<std::string, std::string>& predictions,
    const std::map<std::string, std::string>& gold,
    const std::vector<CompletionResult>& results, double wall_time_seconds,
    nlohmann::json run_metadata) {
  EvalReport report;
  report.per_class = precision_recall(predictions, gold);
  report.accuracy = accuracy(predictions, gold);
  auto t = throughput(results, wall_time_seconds);
  check_rate_identity(t, results);
  report.items_per_second = t.items_per_second;
  report.output_tokens_per_second = t.output_tokens_per_second;
  report.run_metadata = std::move(run_metadata);
  return report;
}

EvalReport build_generation_report(const std::vector<std::string>& hypotheses,
                                   const std::vector<std::string>& references,
                                   const std::vector<CompletionResult>& results,
                                   double wall_time_seconds,
                                   nlohmann::json run_metadata) {
  if (hypotheses.size() != references.size()) {
    throw_error(ErrorCode::evaluation_error,
                "hypothesis and reference counts differ");
  }
  EvalReport report;
  std::vector<std::vector<std::string>> refs;
  refs.reserve(references.size());
  for (const auto& ref : references) refs.push_back({ref});
  report.bleu = corpus_bleu(hypotheses, refs).value;
  double rouge_sum = 0.0;
  long exact = 0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    if (!hypotheses[i].empty() && !references[i].empty()) {
      rouge_sum += rouge_l(hypotheses[i], references[i]);
    }
    if (hypotheses[i] == references[i]) ++exact;
  }
  report.rouge_l = hypotheses.empty() ? 0.0 : rouge_sum / static_cast<double>(hypotheses.size());
  report.accuracy = hypotheses.empty() ? 0.0 : static_cast<double>(exact) / static_cast<double>(hypotheses.size());
  auto t = throughput(results, wall_time_seconds);
  check_rate_identity(t, results);
  report.items_per_second = t.items_per_second;
  report.output_tokens_per_second = t.output_tokens_per_second;
  report.run_metadata = std::move(run_metadata);
  return report;
}

}  // namespace fewshot
