// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fewshot/dataset.hpp"

namespace fewshot {

enum class PromptMode { full, lite };

std::string to_string(PromptMode mode);
PromptMode prompt_mode_from_string(const std::string& name);

inline constexpr std::string_view kExamplesMarker = "{{examples}}";
inline constexpr std::string_view kQueryMarker = "{{query}}";

// The single instruction line that replaces the system text in lite mode.
inline constexpr std::string_view kLiteInstruction =
    "Here are some examples of expected input and output:";

struct PromptTemplate {
  std::string system_text = "{{examples}}\n{{query}}\n";
  std::string example_format = "Input: {input}\nOutput: {output}\n";
  PromptMode mode = PromptMode::full;

  void validate() const;
  static PromptTemplate load_file(const std::filesystem::path& path,
                                  PromptMode mode = PromptMode::full);
  bool operator==(const PromptTemplate&) const = default;
};

struct AssembledPrompt {
  std::string text;
  std::vector<std::string> example_ids;
  int token_estimate = 0;
  PromptMode mode = PromptMode::full;
  std::size_t query_offset = 0;  // byte offset of the query block in text

  bool operator==(const AssembledPrompt&) const = default;
};

std::string render_example_block(const PromptTemplate& tmpl,
                                 const LabeledExample& example);

AssembledPrompt assemble(const PromptTemplate& tmpl,
                         const std::vector<LabeledExample>& examples,
                         const std::string& query);

// Whitespace-word count plus ASCII punctuation count. A heuristic only;
// backend usage reports are authoritative when present.
int estimate_tokens(std::string_view text);

// Inverse of assemble for the default block shape: "Input:" / "Output:"
// line pairs, with the trailing output-less block treated as the query.
struct ParsedPrompt {
  std::vector<std::pair<std::string, std::string>> blocks;
  std::string query;
};

ParsedPrompt parse_prompt(const std::string& text);

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t prompt_hash(const AssembledPrompt& prompt);

}  // namespace fewshot
