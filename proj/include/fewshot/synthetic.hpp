// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fewshot/dataset.hpp"

namespace fewshot {

// Labeled classification corpus built from families of near-duplicate
// phrasings. Every family belongs to one class and draws most of its words
// from that class's private pool; boundary_overlap mixes in shared filler
// words, and a slice of "corner" families is filler-heavy on purpose so that
// corpus-level representatives alone misread them.
struct ClassificationSpec {
  int size = 800;
  int family_size = 8;
  double boundary_overlap = 0.3;
  double corner_fraction = 0.15;
  double class_ratio = 0.6;  // share of families for the first label
  std::uint64_t seed = 0;
  std::vector<std::string> labels = {"order_status", "product_question"};
};

ExampleStore synthesize_classification(const ClassificationSpec& spec);

// Question-to-rewrite corpus: families share a canonical rewrite while their
// inputs vary in filler phrasing.
struct RewriteSpec {
  int size = 400;
  int family_size = 8;
  std::uint64_t seed = 0;
};

ExampleStore synthesize_rewrites(const RewriteSpec& spec);

}  // namespace fewshot
