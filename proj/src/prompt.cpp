// Copyright (C) 2026 The fewshot authors
// SPDX-License-Identifier: Apache-2.0

#include "fewshot/prompt.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "fewshot/error.hpp"

namespace fewshot {

std::string to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::full: return "full";
    case PromptMode::lite: return "lite";
  }
  throw_error(ErrorCode::parameter_error, "unknown prompt mode");
}

PromptMode prompt_mode_from_string(const std::string& name) {
  if (name == "full") return PromptMode::full;
  if (name == "lite") return PromptMode::lite;
  throw_error(ErrorCode::parameter_error, "unknown prompt mode: " + name);
}

namespace {

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string_view::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::string replace_once(std::string text, std::string_view marker,
                         std::string_view value, std::size_t* where = nullptr) {
  std::size_t pos = text.find(marker);
  if (pos == std::string::npos) {
    throw_error(ErrorCode::template_error,
                "template is missing marker " + std::string(marker));
  }
  text.replace(pos, marker.size(), value);
  if (where) *where = pos;
  return text;
}

}  // namespace

void PromptTemplate::validate() const {
  if (mode == PromptMode::full) {
    if (count_occurrences(system_text, kExamplesMarker) != 1) {
      throw_error(ErrorCode::template_error,
                  "system text needs exactly one " + std::string(kExamplesMarker));
    }
    if (count_occurrences(system_text, kQueryMarker) != 1) {
      throw_error(ErrorCode::template_error,
                  "system text needs exactly one " + std::string(kQueryMarker));
    }
  }
  if (count_occurrences(example_format, "{input}") != 1 ||
      count_occurrences(example_format, "{output}") != 1) {
    throw_error(ErrorCode::template_error,
                "example format needs exactly one {input} and one {output}");
  }
}

PromptTemplate PromptTemplate::load_file(const std::filesystem::path& path,
                                         PromptMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(ErrorCode::io_error, "cannot open template: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  PromptTemplate tmpl;
  tmpl.system_text = buf.str();
  tmpl.mode = mode;
  tmpl.validate();
  return tmpl;
}

std::string render_example_block(const PromptTemplate& tmpl,
                                 const LabeledExample& example) {
  std::string block = tmpl.example_format;
  block = replace_once(std::move(block), "{input}", example.input);
  block = replace_once(std::move(block), "{output}", example.output);
  return block;
}

namespace {

// "Input: {q}\nOutput:" for the default format: everything before the
// {output} slot with the query substituted and trailing spaces dropped.
std::string render_query_block(const PromptTemplate& tmpl, const std::string& query) {
  std::size_t cut = tmpl.example_format.find("{output}");
  std::string block = tmpl.example_format.substr(0, cut);
  block = replace_once(std::move(block), "{input}", query);
  while (!block.empty() && block.back() == ' ') block.pop_back();
  return block;
}

}  // namespace

AssembledPrompt assemble(const PromptTemplate& tmpl,
                         const std::vector<LabeledExample>& examples,
                         const std::string& query) {
  tmpl.validate();
  if (query.empty()) {
    throw_error(ErrorCode::parameter_error, "query must be non-empty");
  }

  std::string region;
  AssembledPrompt out;
  out.mode = tmpl.mode;
  out.example_ids.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (i > 0) region += '\n';
    region += render_example_block(tmpl, examples[i]);
    out.example_ids.push_back(examples[i].id);
  }
  std::string query_block = render_query_block(tmpl, query);

  if (tmpl.mode == PromptMode::lite) {
    std::string text(kLiteInstruction);
    text += '\n';
    if (!region.empty()) {
      text += region;
      text += '\n';
    }
    out.query_offset = text.size();
    text += query_block;
    out.text = std::move(text);
  } else {
    std::string text = replace_once(tmpl.system_text, kExamplesMarker, region);
    std::size_t query_pos = 0;
    text = replace_once(std::move(text), kQueryMarker, query_block, &query_pos);
    out.query_offset = query_pos;
    out.text = std::move(text);
  }
  out.token_estimate = estimate_tokens(out.text);
  return out;
}

int estimate_tokens(std::string_view text) {
  int words = 0;
  int punct = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_word = false;
      continue;
    }
    if (!in_word) {
      ++words;
      in_word = true;
    }
    if (c < 0x80 && std::ispunct(c)) ++punct;
  }
  return words + punct;
}

ParsedPrompt parse_prompt(const std::string& text) {
  ParsedPrompt parsed;
  std::string input, output;
  bool have_block = false, in_output = false;

  auto rtrim = [](std::string& s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  };
  auto flush = [&]() {
    if (!have_block) return;
    rtrim(input);
    rtrim(output);
    if (output.empty()) {
      parsed.query = input;
    } else {
      parsed.blocks.emplace_back(input, output);
    }
    input.clear();
    output.clear();
    have_block = false;
    in_output = false;
  };

  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("Input: ", 0) == 0) {
      flush();
      have_block = true;
      input = line.substr(7);
    } else if (have_block && line.rfind("Output:", 0) == 0) {
      in_output = true;
      output = line.size() > 7 && line[7] == ' ' ? line.substr(8) : line.substr(7);
    } else if (have_block) {
      auto& target = in_output ? output : input;
      target += '\n';
      target += line;
    }
  }
  flush();
  return parsed;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t prompt_hash(const AssembledPrompt& prompt) {
  return fnv1a64(prompt.text);
}

}  // namespace fewshot
