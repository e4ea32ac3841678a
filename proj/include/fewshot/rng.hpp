// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fewshot {

// Seeded sampling helpers. std::shuffle, std::sample and the standard
// distributions are implementation-defined, so the same seed could produce
// different selections under a different standard library. Everything here
// consumes raw mt19937_64 output, which is fully pinned by the standard.

inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  // Multiply-shift scaling; residual bias is far below anything observable
  // at the corpus sizes this library handles.
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

template <typename T>
void shuffle_deterministic(std::vector<T>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_index(rng, i)]);
  }
}

}  // namespace fewshot
