// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/synthetic.hpp"

#include <algorithm>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "fewshot/error.hpp"
#include "fewshot/rng.hpp"

namespace fewshot {

namespace {

const char* const kSyllables[] = {
    "ba", "be", "bi", "bo", "bu", "da", "de", "di", "do", "du", "ka", "ke",
    "ki", "ko", "ku", "la", "le", "li", "lo", "lu", "ma", "me", "mi", "mo",
    "mu", "na", "ne", "ni", "no", "nu", "ra", "re", "ri", "ro", "ru", "sa",
    "se", "si", "so", "su", "ta", "te", "ti", "to", "tu", "va", "ve", "vi",
    "vo", "vu", "za", "ze", "zi", "zo", "zu"};
constexpr std::size_t kSyllableCount = sizeof(kSyllables) / sizeof(kSyllables[0]);

std::string make_word(std::mt19937_64& rng) {
  std::size_t syllables = 2 + uniform_index(rng, 2);
  std::string word;
  for (std::size_t s = 0; s < syllables; ++s) {
    word += kSyllables[uniform_index(rng, kSyllableCount)];
  }
  return word;
}

// Pools of pronounceable nonsense words, unique across all pools so that
// class vocabularies never collide with each other or with the fillers.
std::vector<std::vector<std::string>> make_pools(std::mt19937_64& rng,
                                                 const std::vector<std::size_t>& sizes) {
  std::set<std::string> taken;
  std::vector<std::vector<std::string>> pools;
  pools.reserve(sizes.size());
  for (std::size_t want : sizes) {
    std::vector<std::string> pool;
    pool.reserve(want);
    while (pool.size() < want) {
      std::string word = make_word(rng);
      if (taken.insert(word).second) pool.push_back(word);
    }
    pools.push_back(std::move(pool));
  }
  return pools;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
  return pool[uniform_index(rng, pool.size())];
}

// Base phrase for a family: 6 to 9 slots, each drawn from the class pool or,
// with probability `filler_rate`, from the shared filler pool.
std::vector<std::string> family_base(std::mt19937_64& rng,
                                     const std::vector<std::string>& class_pool,
                                     const std::vector<std::string>& fillers,
                                     double filler_rate) {
  std::size_t len = 6 + uniform_index(rng, 4);
  std::vector<std::string> words;
  words.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    bool filler = uniform_unit(rng) < filler_rate;
    // Keep at least one anchor word from the class pool per phrase.
    if (i == 0) filler = false;
    words.push_back(filler ? pick(rng, fillers) : pick(rng, class_pool));
  }
  return words;
}

// Variant of a base phrase: one or two light edits that keep most words
// intact, so family members stay each other's nearest neighbors.
std::vector<std::string> family_variant(std::mt19937_64& rng,
                                        const std::vector<std::string>& base,
                                        const std::vector<std::string>& fillers) {
  std::vector<std::string> words = base;
  std::size_t edits = 1 + uniform_index(rng, 2);
  for (std::size_t e = 0; e < edits; ++e) {
    switch (uniform_index(rng, 3)) {
      case 0: {  // replace one word with a filler
        std::size_t at = uniform_index(rng, words.size());
        words[at] = pick(rng, fillers);
        break;
      }
      case 1: {  // insert a filler
        std::size_t at = uniform_index(rng, words.size() + 1);
        words.insert(words.begin() + at, pick(rng, fillers));
        break;
      }
      default: {  // swap adjacent words
        if (words.size() > 1) {
          std::size_t at = uniform_index(rng, words.size() - 1);
          std::swap(words[at], words[at + 1]);
        }
        break;
      }
    }
  }
  return words;
}

std::string unique_phrase(std::mt19937_64& rng, const std::vector<std::string>& base,
                          const std::vector<std::string>& fillers,
                          std::set<std::string>& seen) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::string text = join_words(family_variant(rng, base, fillers));
    if (seen.insert(text).second) return text;
  }
  // Degenerate pools; force uniqueness with an extra filler suffix.
  std::vector<std::string> words = base;
  do {
    words.push_back(pick(rng, fillers));
  } while (!seen.insert(join_words(words)).second);
  return join_words(words);
}

}  // namespace

ExampleStore synthesize_classification(const ClassificationSpec& spec) {
  if (spec.size < 1) throw_error(ErrorCode::parameter_error, "size must be positive");
  if (spec.family_size < 1) {
    throw_error(ErrorCode::parameter_error, "family_size must be positive");
  }
  if (spec.labels.size() < 2) {
    throw_error(ErrorCode::parameter_error, "need at least two labels");
  }
  if (spec.boundary_overlap < 0.0 || spec.boundary_overlap > 1.0 ||
      spec.corner_fraction < 0.0 || spec.corner_fraction > 1.0 ||
      spec.class_ratio <= 0.0 || spec.class_ratio >= 1.0) {
    throw_error(ErrorCode::parameter_error, "rates must lie in [0, 1]");
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> pool_sizes(spec.labels.size(), 24);
  pool_sizes.push_back(16);  // shared fillers last
  auto pools = make_pools(rng, pool_sizes);
  const auto& fillers = pools.back();

  int families = (spec.size + spec.family_size - 1) / spec.family_size;
  // First label takes class_ratio of the families, the rest split evenly.
  std::vector<int> family_quota(spec.labels.size(), 0);
  family_quota[0] = std::max(1, static_cast<int>(spec.class_ratio * families));
  int rest = families - family_quota[0];
  int others = static_cast<int>(spec.labels.size()) - 1;
  for (int i = 1; i <= others; ++i) {
    family_quota[i] = rest / others + (i <= rest % others ? 1 : 0);
  }

  ExampleStore store;
  std::set<std::string> seen;
  int emitted = 0;
  int family_index = 0;
  for (std::size_t c = 0; c < spec.labels.size(); ++c) {
    for (int f = 0; f < family_quota[c] && emitted < spec.size; ++f, ++family_index) {
      bool corner = uniform_unit(rng) < spec.corner_fraction;
      double filler_rate = corner ? std::min(0.85, spec.boundary_overlap + 0.5)
                                  : spec.boundary_overlap;
      auto base = family_base(rng, pools[c], fillers, filler_rate);
      std::string base_text = join_words(base);
      if (!seen.insert(base_text).second) {
        base_text = unique_phrase(rng, base, fillers, seen);
      }
      for (int v = 0; v < spec.family_size && emitted < spec.size; ++v) {
        LabeledExample ex;
        std::ostringstream id;
        id << "c" << std::setfill('0') << std::setw(5) << emitted;
        ex.id = id.str();
        ex.input = v == 0 ? base_text : unique_phrase(rng, base, fillers, seen);
        ex.output = spec.labels[c];
        ex.class_label = spec.labels[c];
        ex.metadata["family"] = std::to_string(family_index);
        if (corner) ex.metadata["corner"] = "1";
        store.add(ex);
        ++emitted;
      }
    }
  }
  return store;
}

ExampleStore synthesize_rewrites(const RewriteSpec& spec) {
  if (spec.size < 1) throw_error(ErrorCode::parameter_error, "size must be positive");
  if (spec.family_size < 1) {
    throw_error(ErrorCode::parameter_error, "family_size must be positive");
  }

  std::mt19937_64 rng(spec.seed);
  auto pools = make_pools(rng, {40, 24, 12});
  const auto& objects = pools[0];
  const auto& actions = pools[1];
  const auto& fillers = pools[2];

  const char* const kLeads[] = {"how do i", "can you tell me how to",
                                "i would like to", "what is the way to",
                                "please help me"};
  constexpr std::size_t kLeadCount = sizeof(kLeads) / sizeof(kLeads[0]);

  ExampleStore store;
  std::set<std::string> seen;
  int families = (spec.size + spec.family_size - 1) / spec.family_size;
  int emitted = 0;
  for (int f = 0; f < families && emitted < spec.size; ++f) {
    const std::string& action = pick(rng, actions);
    const std::string& object = pick(rng, objects);
    std::string rewrite = action + " " + object;
    for (int v = 0; v < spec.family_size && emitted < spec.size; ++v) {
      std::string input;
      for (int attempt = 0; attempt < 64; ++attempt) {
        std::ostringstream q;
        q << kLeads[uniform_index(rng, kLeadCount)] << ' ' << action;
        if (uniform_unit(rng) < 0.5) q << ' ' << pick(rng, fillers);
        q << ' ' << object;
        if (uniform_unit(rng) < 0.3) q << ' ' << pick(rng, fillers);
        if (seen.insert(q.str()).second) {
          input = q.str();
          break;
        }
      }
      if (input.empty()) continue;
      LabeledExample ex;
      std::ostringstream id;
      id << "q" << std::setfill('0') << std::setw(5) << emitted;
      ex.id = id.str();
      ex.input = input;
      ex.output = rewrite;
      ex.metadata["family"] = std::to_string(f);
      store.add(ex);
      ++emitted;
    }
  }
  return store;
}

}  // namespace fewshot
