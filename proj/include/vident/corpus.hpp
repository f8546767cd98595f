#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "vident/errors.hpp"
#include "vident/hashing.hpp"
#include "vident/io.hpp"
#include "vident/numlex.hpp"
#include "vident/rational.hpp"

// Data model for prompts, value slots, and double-scored responses, plus
// deterministic splits and missing-value audits.

namespace vident {

enum class ClassLabel { kZero = 0, kOne = 1, kOther = 2 };

inline const char* class_name(ClassLabel c) {
  switch (c) {
    case ClassLabel::kZero: return "Zero";
    case ClassLabel::kOne: return "One";
    default: return "Other";
  }
}

// Absent is modeled as an empty optional; raters leave the value blank when
// the response does not address the slot.
using ValueLabel = std::optional<Rational>;

// Absent counts as zero (the implicit-zero convention).
inline ClassLabel derive_class_label(const ValueLabel& label) {
  if (!label.has_value() || *label == Rational(0)) return ClassLabel::kZero;
  if (*label == Rational(1)) return ClassLabel::kOne;
  return ClassLabel::kOther;
}

struct SlotSpec {
  std::string slot_id;
  std::string name;      // human-readable, e.g. "bags of chocolates"
  std::string question;  // expected-quantity question text
};

struct PromptConstraint {
  std::vector<Rational> coefficients;  // unit prices, aligned with slots
  Rational total;
};

struct Prompt {
  std::string prompt_id;
  std::string question_text;
  std::vector<SlotSpec> slots;
  std::optional<PromptConstraint> constraint;
};

struct SlotLabels {
  ValueLabel rater1;
  ValueLabel rater2;
  ValueLabel resolved;  // authoritative for training and evaluation
};

struct ResponseRecord {
  std::string response_id;
  std::string prompt_id;
  std::string text;
  std::vector<SlotLabels> labels;  // one per slot of the prompt
};

struct Corpus {
  std::vector<Prompt> prompts;
  std::vector<ResponseRecord> responses;

  const Prompt& prompt(const std::string& prompt_id) const {
    for (const auto& p : prompts)
      if (p.prompt_id == prompt_id) return p;
    throw DataError("unknown prompt id: " + prompt_id);
  }
};

enum class Partition { kTrain = 0, kDev = 1, kTest = 2 };

inline const char* partition_name(Partition p) {
  switch (p) {
    case Partition::kTrain: return "train";
    case Partition::kDev: return "dev";
    default: return "test";
  }
}

struct SplitAssignment {
  uint64_t seed = 0;
  std::unordered_map<std::string, Partition> by_response;

  Partition at(const std::string& response_id) const {
    auto it = by_response.find(response_id);
    if (it == by_response.end()) throw DataError("response missing from split: " + response_id);
    return it->second;
  }
};

namespace detail {

// Exact 70/15/15 sizes by largest remainder; ties resolved in partition
// order so the result is deterministic.
inline std::array<size_t, 3> split_sizes(size_t n) {
  const int weights[3] = {70, 15, 15};
  std::array<size_t, 3> base{};
  std::array<size_t, 3> rem{};
  size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    base[i] = n * weights[i] / 100;
    rem[i] = n * weights[i] % 100;
    assigned += base[i];
  }
  size_t leftover = n - assigned;
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (size_t k = 0; k < leftover; ++k) ++base[order[k % 3]];
  return base;
}

}  // namespace detail

// Deterministic per-prompt split: responses are ordered by a seeded stable
// hash of their id, then cut at exact 70/15/15 boundaries. File order never
// matters.
inline SplitAssignment split_corpus(const Corpus& corpus, uint64_t seed) {
  if (corpus.responses.empty()) throw DataError("cannot split an empty corpus");
  SplitAssignment out;
  out.seed = seed;

  std::unordered_map<std::string, std::vector<const ResponseRecord*>> by_prompt;
  for (const auto& r : corpus.responses) by_prompt[r.prompt_id].push_back(&r);

  for (const auto& p : corpus.prompts) {
    auto it = by_prompt.find(p.prompt_id);
    if (it == by_prompt.end()) continue;
    auto& group = it->second;
    if (group.size() < 7)
      throw DataError("prompt " + p.prompt_id + " has fewer than 7 responses; cannot split");
    std::sort(group.begin(), group.end(), [&](const ResponseRecord* a, const ResponseRecord* b) {
      uint64_t ha = mix64(seed ^ fnv1a64(a->response_id));
      uint64_t hb = mix64(seed ^ fnv1a64(b->response_id));
      if (ha != hb) return ha < hb;
      return a->response_id < b->response_id;
    });
    auto sizes = detail::split_sizes(group.size());
    size_t idx = 0;
    for (int part = 0; part < 3; ++part)
      for (size_t k = 0; k < sizes[part]; ++k)
        out.by_response[group[idx++]->response_id] = static_cast<Partition>(part);
  }
  if (out.by_response.size() != corpus.responses.size())
    throw DataError("corpus contains responses for prompts not in the prompt list");
  return out;
}

struct ClassMix {
  double zero = 0.0;  // percentages over N x V slot cases
  double one = 0.0;
  double other = 0.0;
};

// Per-prompt class percentages over resolved labels, in prompt order.
inline std::vector<std::pair<std::string, ClassMix>> class_distribution(const Corpus& corpus) {
  if (corpus.responses.empty()) throw DataError("class_distribution on empty corpus");
  std::vector<std::pair<std::string, ClassMix>> out;
  for (const auto& p : corpus.prompts) {
    size_t counts[3] = {0, 0, 0};
    size_t cases = 0;
    for (const auto& r : corpus.responses) {
      if (r.prompt_id != p.prompt_id) continue;
      for (const auto& sl : r.labels) {
        ++counts[static_cast<int>(derive_class_label(sl.resolved))];
        ++cases;
      }
    }
    if (cases == 0) continue;
    ClassMix mix;
    mix.zero = 100.0 * static_cast<double>(counts[0]) / static_cast<double>(cases);
    mix.one = 100.0 * static_cast<double>(counts[1]) / static_cast<double>(cases);
    mix.other = 100.0 * static_cast<double>(counts[2]) / static_cast<double>(cases);
    out.emplace_back(p.prompt_id, mix);
  }
  return out;
}

// Content hash used to stamp trained models with the corpus they came from.
inline uint64_t corpus_fingerprint(const Corpus& corpus) {
  uint64_t h = fnv1a64("vident-corpus-fingerprint");
  auto mix_str = [&h](const std::string& s) {
    h = mix64(h ^ fnv1a64(s));
    h = mix64(h ^ s.size());
  };
  for (const auto& p : corpus.prompts) {
    mix_str(p.prompt_id);
    mix_str(p.question_text);
    for (const auto& s : p.slots) {
      mix_str(s.slot_id);
      mix_str(s.name);
      mix_str(s.question);
    }
  }
  for (const auto& r : corpus.responses) {
    mix_str(r.response_id);
    mix_str(r.prompt_id);
    mix_str(r.text);
    auto mix_label = [&](const ValueLabel& v) {
      mix_str(v.has_value() ? v->canonical() : std::string());
    };
    for (const auto& sl : r.labels) {
      mix_label(sl.rater1);
      mix_label(sl.rater2);
      mix_label(sl.resolved);
    }
  }
  return h;
}

struct SlotAudit {
  std::string prompt_id;
  std::string slot_id;
  size_t n_other = 0;           // resolved Other-class cases
  size_t missing = 0;           // resolved value absent from the masked text
  std::optional<double> bound;  // (n_other - missing) / n_other; empty when n_other == 0
};

// Per-slot ceiling on identification accuracy: a value that never appears
// in the masked response can never be chosen.
inline std::vector<SlotAudit> audit_missing_values(const Corpus& corpus) {
  std::vector<SlotAudit> out;
  std::unordered_map<std::string, size_t> row;  // prompt|slot -> index
  for (const auto& p : corpus.prompts)
    for (const auto& s : p.slots) {
      row[p.prompt_id + "|" + s.slot_id] = out.size();
      out.push_back({p.prompt_id, s.slot_id, 0, 0, std::nullopt});
    }

  for (const auto& r : corpus.responses) {
    const Prompt& p = corpus.prompt(r.prompt_id);
    MaskedText masked = mask_values(scan_numbers(r.text));
    for (size_t s = 0; s < r.labels.size(); ++s) {
      const ValueLabel& resolved = r.labels[s].resolved;
      if (derive_class_label(resolved) != ClassLabel::kOther) continue;
      SlotAudit& audit = out[row.at(r.prompt_id + "|" + p.slots[s].slot_id)];
      ++audit.n_other;
      bool present = false;
      for (const auto& v : masked.values)
        if (v == *resolved) {
          present = true;
          break;
        }
      if (!present) ++audit.missing;
    }
  }
  for (auto& a : out)
    if (a.n_other > 0)
      a.bound = static_cast<double>(a.n_other - a.missing) / static_cast<double>(a.n_other);
  return out;
}

// ---------------------------------------------------------------------------
// File formats. Both files are JSON-lines with a versioned header line.

inline constexpr std::string_view kPromptsFormat = "vident-prompts";
inline constexpr std::string_view kCorpusFormat = "vident-corpus";
inline constexpr int kFormatVersion = 1;

namespace detail {

inline nlohmann::json parse_json_line(const std::string& line, const std::string& path,
                                      size_t line_no) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ":" + std::to_string(line_no) + ": bad JSON: " + e.what());
  }
}

inline void check_header(const nlohmann::json& header, std::string_view format,
                         const std::string& path) {
  if (!header.is_object() || header.value("format", "") != format ||
      header.value("version", 0) != kFormatVersion)
    throw DataError(path + ":1: expected header {\"format\":\"" + std::string(format) +
                    "\",\"version\":" + std::to_string(kFormatVersion) + "}");
}

inline std::string require_string(const nlohmann::json& j, const char* field,
                                  const std::string& path, size_t line_no) {
  if (!j.contains(field) || !j[field].is_string())
    throw DataError(path + ":" + std::to_string(line_no) + ": missing string field '" + field +
                    "'");
  return j[field].get<std::string>();
}

// "" means Absent; anything else must parse as a rational.
inline ValueLabel parse_label(const nlohmann::json& j, const char* field, const std::string& path,
                              size_t line_no) {
  std::string text = require_string(j, field, path, line_no);
  if (text.empty()) return std::nullopt;
  auto value = parse_rational(text);
  if (!value)
    throw DataError(path + ":" + std::to_string(line_no) + ": field '" + field +
                    "' is not a rational: " + text);
  return *value;
}

inline std::string label_text(const ValueLabel& label) {
  return label ? label->canonical() : std::string();
}

}  // namespace detail

inline std::vector<Prompt> load_prompts(const std::string& path) {
  auto lines = split_lines(read_file(path));
  if (lines.empty()) throw DataError(path + ": empty prompt file");
  detail::check_header(detail::parse_json_line(lines[0], path, 1), kPromptsFormat, path);

  std::vector<Prompt> prompts;
  std::unordered_set<std::string> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const size_t line_no = i + 1;
    nlohmann::json j = detail::parse_json_line(lines[i], path, line_no);
    Prompt p;
    p.prompt_id = detail::require_string(j, "prompt_id", path, line_no);
    if (!seen.insert(p.prompt_id).second)
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate prompt id " +
                      p.prompt_id);
    p.question_text = detail::require_string(j, "question", path, line_no);
    if (!j.contains("slots") || !j["slots"].is_array() || j["slots"].empty())
      throw DataError(path + ":" + std::to_string(line_no) + ": prompt needs a non-empty 'slots'");
    std::unordered_set<std::string> slot_ids;
    for (const auto& sj : j["slots"]) {
      SlotSpec s;
      s.slot_id = detail::require_string(sj, "slot_id", path, line_no);
      s.name = detail::require_string(sj, "name", path, line_no);
      s.question = detail::require_string(sj, "question", path, line_no);
      if (!slot_ids.insert(s.slot_id).second)
        throw DataError(path + ":" + std::to_string(line_no) + ": duplicate slot id " + s.slot_id);
      p.slots.push_back(std::move(s));
    }
    if (j.contains("constraint")) {
      const auto& cj = j["constraint"];
      PromptConstraint c;
      if (!cj.contains("coefficients") || !cj["coefficients"].is_array() ||
          !cj.contains("total") || !cj["total"].is_string())
        throw DataError(path + ":" + std::to_string(line_no) + ": bad constraint block");
      for (const auto& co : cj["coefficients"]) {
        auto v = parse_rational(co.get<std::string>());
        if (!v)
          throw DataError(path + ":" + std::to_string(line_no) + ": bad constraint coefficient");
        c.coefficients.push_back(*v);
      }
      auto t = parse_rational(cj["total"].get<std::string>());
      if (!t) throw DataError(path + ":" + std::to_string(line_no) + ": bad constraint total");
      c.total = *t;
      if (c.coefficients.size() != p.slots.size())
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": constraint coefficient count differs from slot count");
      p.constraint = std::move(c);
    }
    prompts.push_back(std::move(p));
  }
  if (prompts.empty()) throw DataError(path + ": no prompts");
  return prompts;
}

inline void save_prompts(const std::vector<Prompt>& prompts, const std::string& path) {
  std::string out;
  out += nlohmann::json{{"format", kPromptsFormat}, {"version", kFormatVersion}}.dump();
  out += '\n';
  for (const auto& p : prompts) {
    nlohmann::json j;
    j["prompt_id"] = p.prompt_id;
    j["question"] = p.question_text;
    auto slots = nlohmann::json::array();
    for (const auto& s : p.slots)
      slots.push_back({{"slot_id", s.slot_id}, {"name", s.name}, {"question", s.question}});
    j["slots"] = std::move(slots);
    if (p.constraint) {
      auto coeffs = nlohmann::json::array();
      for (const auto& c : p.constraint->coefficients) coeffs.push_back(c.canonical());
      j["constraint"] = {{"coefficients", std::move(coeffs)},
                         {"total", p.constraint->total.canonical()}};
    }
    out += j.dump();
    out += '\n';
  }
  write_file(path, out);
}

inline Corpus load_corpus(const std::string& prompts_path, const std::string& corpus_path) {
  Corpus corpus;
  corpus.prompts = load_prompts(prompts_path);
  std::unordered_map<std::string, const Prompt*> prompt_index;
  for (const auto& p : corpus.prompts) prompt_index[p.prompt_id] = &p;

  auto lines = split_lines(read_file(corpus_path));
  if (lines.empty()) throw DataError(corpus_path + ": empty corpus file");
  detail::check_header(detail::parse_json_line(lines[0], corpus_path, 1), kCorpusFormat,
                       corpus_path);

  std::unordered_set<std::string> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const size_t line_no = i + 1;
    nlohmann::json j = detail::parse_json_line(lines[i], corpus_path, line_no);
    ResponseRecord r;
    r.response_id = detail::require_string(j, "response_id", corpus_path, line_no);
    if (!seen.insert(r.response_id).second)
      throw DataError(corpus_path + ":" + std::to_string(line_no) + ": duplicate response id " +
                      r.response_id);
    r.prompt_id = detail::require_string(j, "prompt_id", corpus_path, line_no);
    auto pit = prompt_index.find(r.prompt_id);
    if (pit == prompt_index.end())
      throw DataError(corpus_path + ":" + std::to_string(line_no) + ": unknown prompt id " +
                      r.prompt_id);
    r.text = detail::require_string(j, "text", corpus_path, line_no);
    if (!j.contains("labels") || !j["labels"].is_array())
      throw DataError(corpus_path + ":" + std::to_string(line_no) + ": missing 'labels' array");
    if (j["labels"].size() != pit->second->slots.size())
      throw DataError(corpus_path + ":" + std::to_string(line_no) + ": got " +
                      std::to_string(j["labels"].size()) + " labels for " +
                      std::to_string(pit->second->slots.size()) + " slots");
    for (const auto& lj : j["labels"]) {
      SlotLabels sl;
      sl.rater1 = detail::parse_label(lj, "rater1", corpus_path, line_no);
      sl.rater2 = detail::parse_label(lj, "rater2", corpus_path, line_no);
      sl.resolved = detail::parse_label(lj, "resolved", corpus_path, line_no);
      r.labels.push_back(std::move(sl));
    }
    corpus.responses.push_back(std::move(r));
  }
  return corpus;
}

inline void save_corpus(const Corpus& corpus, const std::string& prompts_path,
                        const std::string& corpus_path) {
  save_prompts(corpus.prompts, prompts_path);
  std::string out;
  out += nlohmann::json{{"format", kCorpusFormat}, {"version", kFormatVersion}}.dump();
  out += '\n';
  for (const auto& r : corpus.responses) {
    nlohmann::json j;
    j["response_id"] = r.response_id;
    j["prompt_id"] = r.prompt_id;
    j["text"] = r.text;
    auto labels = nlohmann::json::array();
    for (const auto& sl : r.labels)
      labels.push_back({{"rater1", detail::label_text(sl.rater1)},
                        {"rater2", detail::label_text(sl.rater2)},
                        {"resolved", detail::label_text(sl.resolved)}});
    j["labels"] = std::move(labels);
    out += j.dump();
    out += '\n';
  }
  write_file(corpus_path, out);
}

// Split files are one-line-per-response CSV with a versioned header.
inline constexpr std::string_view kSplitsHeader = "#vident-splits v1";

inline void save_split(const SplitAssignment& split, const Corpus& corpus,
                       const std::string& path) {
  std::string out;
  out += kSplitsHeader;
  out += '\n';
  out += "seed,";
  out += std::to_string(split.seed);
  out += '\n';
  for (const auto& r : corpus.responses) {
    out += r.response_id;
    out += ',';
    out += partition_name(split.at(r.response_id));
    out += '\n';
  }
  write_file(path, out);
}

inline SplitAssignment load_split(const std::string& path) {
  auto lines = split_lines(read_file(path));
  if (lines.size() < 2 || lines[0] != kSplitsHeader)
    throw DataError(path + ": not a split file (missing header)");
  SplitAssignment out;
  if (lines[1].rfind("seed,", 0) != 0) throw DataError(path + ":2: expected seed line");
  out.seed = std::strtoull(lines[1].c_str() + 5, nullptr, 10);
  for (size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    size_t comma = lines[i].rfind(',');
    if (comma == std::string::npos)
      throw DataError(path + ":" + std::to_string(i + 1) + ": expected id,partition");
    std::string id = lines[i].substr(0, comma);
    std::string part = lines[i].substr(comma + 1);
    Partition p;
    if (part == "train")
      p = Partition::kTrain;
    else if (part == "dev")
      p = Partition::kDev;
    else if (part == "test")
      p = Partition::kTest;
    else
      throw DataError(path + ":" + std::to_string(i + 1) + ": unknown partition " + part);
    if (!out.by_response.emplace(std::move(id), p).second)
      throw DataError(path + ":" + std::to_string(i + 1) + ": duplicate response id");
  }
  return out;
}

}  // namespace vident
