#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "vident/corpus.hpp"
#include "vident/errors.hpp"
#include "vident/linear_model.hpp"
#include "vident/numlex.hpp"
#include "vident/rational.hpp"

// Per-placeholder value identification: given a masked response and a slot
// question, score each placeholder as the answer to that slot.

namespace vident {

struct TokenScores {
  std::vector<double> probs;  // aligned with MaskedText::values
};

// Every placeholder holding the resolved value is a positive; coincidental
// matches stay positive rather than being hand-disambiguated. Returns
// nullopt when the value appears nowhere (the record is skipped upstream).
inline std::optional<std::vector<char>> make_training_targets(const MaskedText& masked,
                                                              const Rational& resolved) {
  std::vector<char> targets(masked.values.size(), 0);
  bool any = false;
  for (size_t i = 0; i < masked.values.size(); ++i) {
    if (masked.values[i] == resolved) {
      targets[i] = 1;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return targets;
}

namespace detail {

struct TemplateTokens {
  std::vector<std::string> tokens;      // placeholders rendered as "#ph"
  std::vector<size_t> placeholder_pos;  // token index per placeholder, in order
};

// Tokenizes a masked template, separating placeholder markers from escaped
// literal <mask> pairs with the same greedy pairing unmask uses.
inline TemplateTokens tokenize_template(const std::string& template_text) {
  TemplateTokens out;
  size_t pos = 0;
  auto flush = [&](size_t end) {
    if (end > pos) {
      for (auto& w : tokenize_words(template_text.substr(pos, end - pos)))
        out.tokens.push_back(std::move(w));
    }
  };
  size_t i = 0;
  while (i < template_text.size()) {
    if (template_text.compare(i, kMaskToken.size(), kMaskToken) == 0) {
      flush(i);
      size_t run = 0;
      while (template_text.compare(i + run * kMaskToken.size(), kMaskToken.size(), kMaskToken) ==
             0)
        ++run;
      for (size_t k = 0; k + 1 < run; k += 2) out.tokens.emplace_back(kMaskToken);
      if (run % 2 == 1) {
        out.placeholder_pos.push_back(out.tokens.size());
        out.tokens.emplace_back("#ph");
      }
      i += run * kMaskToken.size();
      pos = i;
    } else {
      ++i;
    }
  }
  flush(template_text.size());
  return out;
}

inline const std::vector<std::string>& identifier_stopwords() {
  static const std::vector<std::string> kStop = {
      "how", "many", "much", "did",  "the", "a",  "an", "of",  "what", "was",
      "were", "is",  "are",  "to",   "in",  "for", "and", "with", "buy",  "does"};
  return kStop;
}

inline std::vector<std::string> question_keywords(const std::string& question) {
  std::vector<std::string> out;
  const auto& stop = identifier_stopwords();
  for (auto& w : tokenize_words(question)) {
    if (std::find(stop.begin(), stop.end(), w) != stop.end()) continue;
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(std::move(w));
  }
  return out;
}

inline std::string magnitude_bucket(const Rational& v) {
  if (!v.is_integer()) return v.numerator() < 0 ? "negfrac" : "frac";
  int64_t n = v.floor();
  if (n < 0) return "neg";
  if (n == 0) return "zero";
  if (n == 1) return "one";
  if (n <= 9) return "small";
  if (n <= 99) return "ten";
  return "big";
}

// Feature configuration "context": window tokens around the placeholder and
// their overlap with the slot question.
inline FeatureVec context_features(const FeatureSpace& space, const TemplateTokens& tt,
                                   size_t token_pos, const std::vector<std::string>& qkeys) {
  FeatureVec x;
  const auto& toks = tt.tokens;
  int overlap = 0;
  for (int off = -5; off <= 5; ++off) {
    if (off == 0) continue;
    long j = static_cast<long>(token_pos) + off;
    if (j < 0 || j >= static_cast<long>(toks.size())) continue;
    add_feature(x, space, "c" + std::to_string(off) + ":" + toks[j]);
    if (std::find(qkeys.begin(), qkeys.end(), toks[j]) != qkeys.end()) {
      add_feature(x, space, "o" + std::to_string(off));
      ++overlap;
    }
  }
  if (token_pos > 0 && token_pos + 1 < toks.size())
    add_feature(x, space, "cb:" + toks[token_pos - 1] + "|" + toks[token_pos + 1]);
  add_feature(x, space, "oc:" + std::to_string(std::min(overlap, 5)));
  return x;
}

// Feature configuration "structure": position, value magnitude, and keyword
// distance, with no raw window lexemes.
inline FeatureVec structure_features(const FeatureSpace& space, const TemplateTokens& tt,
                                     size_t placeholder_index, const Rational& value,
                                     const std::vector<std::string>& qkeys) {
  FeatureVec x;
  const size_t n = tt.placeholder_pos.size();
  const size_t token_pos = tt.placeholder_pos[placeholder_index];
  add_feature(x, space, "ord:" + std::to_string(std::min<size_t>(placeholder_index, 11)));
  add_feature(x, space,
              "rord:" + std::to_string(std::min<size_t>(n - 1 - placeholder_index, 11)));
  add_feature(x, space, "n:" + std::to_string(std::min<size_t>(n, 12)));
  std::string mag = magnitude_bucket(value);
  add_feature(x, space, "mag:" + mag);
  for (const auto& q : qkeys) add_feature(x, space, "qv:" + q + "|" + mag);

  int best_before = -1, best_after = -1;
  for (size_t j = 0; j < tt.tokens.size(); ++j) {
    if (std::find(qkeys.begin(), qkeys.end(), tt.tokens[j]) == qkeys.end()) continue;
    int d = static_cast<int>(j > token_pos ? j - token_pos : token_pos - j);
    if (j < token_pos) {
      if (best_before < 0 || d < best_before) best_before = d;
    } else if (j > token_pos) {
      if (best_after < 0 || d < best_after) best_after = d;
    }
  }
  auto bucket = [](int d) { return std::to_string(std::min(d, 6)); };
  if (best_before >= 0) add_feature(x, space, "kdb:" + bucket(best_before));
  if (best_after >= 0) add_feature(x, space, "kda:" + bucket(best_after));
  int best = best_before < 0 ? best_after
             : best_after < 0 ? best_before
                              : std::min(best_before, best_after);
  add_feature(x, space, "kd:" + (best < 0 ? std::string("none") : bucket(best)));
  return x;
}

inline FeatureVec identifier_features(const std::string& model_id, const FeatureSpace& space,
                                      const TemplateTokens& tt, const MaskedText& masked,
                                      size_t placeholder_index,
                                      const std::vector<std::string>& qkeys) {
  if (model_id == "context")
    return context_features(space, tt, tt.placeholder_pos[placeholder_index], qkeys);
  if (model_id == "structure")
    return structure_features(space, tt, placeholder_index, masked.values[placeholder_index],
                              qkeys);
  throw DataError("unknown identifier configuration: " + model_id);
}

}  // namespace detail

struct IdentifierModel {
  std::string model_id;  // "context" or "structure"
  LinearModel linear;
  uint64_t corpus_id = 0;
  uint64_t seed = 0;
};

struct IdentifierTrainOptions {
  uint32_t bits = 18;
  int epochs = 12;
  double learning_rate = 0.2;
};

// Trains one identifier configuration on resolved Other-class train cases.
// Records whose resolved value never appears among the masked values are
// skipped (the audit's M cases).
inline IdentifierModel train_baseline_identifier(const Corpus& corpus,
                                                 const SplitAssignment& split,
                                                 const std::string& model_id, uint64_t seed,
                                                 const IdentifierTrainOptions& opt = {}) {
  if (model_id != "context" && model_id != "structure")
    throw DataError("unknown identifier configuration: " + model_id);
  FeatureSpace space(opt.bits);
  std::vector<FeatureVec> xs;
  std::vector<int> ys;
  size_t pos = 0, neg = 0;
  for (const auto& r : corpus.responses) {
    if (split.at(r.response_id) != Partition::kTrain) continue;
    const Prompt& p = corpus.prompt(r.prompt_id);
    MaskedText masked = mask_values(r.text);
    if (masked.values.empty()) continue;
    detail::TemplateTokens tt = detail::tokenize_template(masked.template_text);
    for (size_t s = 0; s < p.slots.size(); ++s) {
      const ValueLabel& resolved = r.labels[s].resolved;
      if (derive_class_label(resolved) != ClassLabel::kOther) continue;
      auto targets = make_training_targets(masked, *resolved);
      if (!targets) continue;
      auto qkeys = detail::question_keywords(p.slots[s].question);
      for (size_t j = 0; j < masked.values.size(); ++j) {
        xs.push_back(detail::identifier_features(model_id, space, tt, masked, j, qkeys));
        ys.push_back((*targets)[j] ? 1 : 0);
        ((*targets)[j] ? pos : neg) += 1;
      }
    }
  }
  if (xs.empty()) throw DataError("identifier training: no usable examples in train split");
  if (pos == 0 || neg == 0)
    throw DataError("identifier training: only one label present in train split");

  TrainOptions topt;
  topt.bits = opt.bits;
  topt.epochs = opt.epochs;
  topt.learning_rate = opt.learning_rate;
  topt.seed = seed;
  topt.class_weights = {static_cast<double>(xs.size()) / (2.0 * static_cast<double>(neg)),
                        static_cast<double>(xs.size()) / (2.0 * static_cast<double>(pos))};

  IdentifierModel model;
  model.model_id = model_id;
  model.linear = train_logistic(xs, ys, 2, topt);
  model.corpus_id = corpus_fingerprint(corpus);
  model.seed = seed;
  return model;
}

inline TokenScores score_tokens(const IdentifierModel& model, const std::string& slot_question,
                                const MaskedText& masked) {
  TokenScores out;
  out.probs.resize(masked.values.size());
  if (masked.values.empty()) return out;
  FeatureSpace space(model.linear.bits);
  detail::TemplateTokens tt = detail::tokenize_template(masked.template_text);
  if (tt.placeholder_pos.size() != masked.values.size())
    throw InternalError("masked template does not match its value list");
  auto qkeys = detail::question_keywords(slot_question);
  for (size_t j = 0; j < masked.values.size(); ++j) {
    FeatureVec x = detail::identifier_features(model.model_id, space, tt, masked, j, qkeys);
    out.probs[j] = model.linear.probabilities(x)[1];
  }
  return out;
}

struct ValueChoice {
  size_t index = 0;
  Rational value;
  double score = 0.0;
};

// Argmax with smallest-index ties; invariant under positive rescaling of
// the score vector. Empty score lists yield no choice.
inline std::optional<ValueChoice> select_value(const MaskedText& masked,
                                               const TokenScores& scores) {
  if (scores.probs.size() != masked.values.size())
    throw InternalError("score vector does not match placeholder count");
  if (scores.probs.empty()) return std::nullopt;
  size_t best = 0;
  for (size_t j = 1; j < scores.probs.size(); ++j)
    if (scores.probs[j] > scores.probs[best]) best = j;
  return ValueChoice{best, masked.values[best], scores.probs[best]};
}

inline void save_identifier(const IdentifierModel& model, const std::string& path) {
  std::string out = "#vident-identifier v1\n";
  out += "model_id," + model.model_id + '\n';
  out += "corpus_id," + std::to_string(model.corpus_id) + '\n';
  out += "seed," + std::to_string(model.seed) + '\n';
  out += serialize_linear_model(model.linear);
  write_file(path, out);
}

inline IdentifierModel load_identifier(const std::string& path) {
  std::string text = read_file(path);
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "#vident-identifier v1")
    throw DataError(path + ": not an identifier file");
  IdentifierModel model;
  size_t body = 1;
  for (; body < lines.size(); ++body) {
    const std::string& line = lines[body];
    if (line.rfind("model_id,", 0) == 0)
      model.model_id = line.substr(9);
    else if (line.rfind("corpus_id,", 0) == 0)
      model.corpus_id = std::stoull(line.substr(10));
    else if (line.rfind("seed,", 0) == 0)
      model.seed = std::stoull(line.substr(5));
    else
      break;
  }
  if (model.model_id.empty()) throw DataError(path + ": identifier file missing model_id");
  std::string rest;
  for (size_t i = body; i < lines.size(); ++i) {
    rest += lines[i];
    rest += '\n';
  }
  model.linear = deserialize_linear_model(rest, path);
  return model;
}

// External score files: header line, then one row per (response, slot,
// model) with probabilities aligned to placeholder order.
inline constexpr std::string_view kScoresHeader = "#vident-scores v1";

struct ExternalScores {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> rows;

  const std::vector<double>* find(const std::string& response_id, const std::string& slot_id,
                                  const std::string& model_id) const {
    auto it = rows.find(std::make_tuple(response_id, slot_id, model_id));
    return it == rows.end() ? nullptr : &it->second;
  }
};

inline std::string serialize_scores(const ExternalScores& scores) {
  std::string out(kScoresHeader);
  out += '\n';
  for (const auto& [key, probs] : scores.rows) {
    out += std::get<0>(key) + ',' + std::get<1>(key) + ',' + std::get<2>(key);
    for (double p : probs) out += ',' + detail::double_text(p);
    out += '\n';
  }
  return out;
}

// Parses and validates a score file against the corpus: every row must name
// a known response and slot, carry probabilities in [0, 1], and match the
// response's placeholder count exactly.
inline ExternalScores import_external_scores(const std::string& text, const Corpus& corpus,
                                             const std::string& path) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != kScoresHeader)
    throw DataError(path + ": missing score file header");
  std::map<std::string, size_t> placeholder_count;
  std::map<std::string, const ResponseRecord*> by_id;
  for (const auto& r : corpus.responses) by_id[r.response_id] = &r;

  ExternalScores out;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path + ":" + std::to_string(i + 1);
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t comma = lines[i].find(',', start);
      fields.push_back(lines[i].substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 3) throw DataError(where + ": expected response_id,slot_id,model_id,...");
    const std::string& response_id = fields[0];
    auto rit = by_id.find(response_id);
    if (rit == by_id.end()) throw DataError(where + ": unknown response '" + response_id + "'");
    const Prompt& prompt = corpus.prompt(rit->second->prompt_id);
    bool slot_ok = false;
    for (const auto& s : prompt.slots) slot_ok = slot_ok || s.slot_id == fields[1];
    if (!slot_ok)
      throw DataError(where + ": response '" + response_id + "' has no slot '" + fields[1] + "'");

    auto cit = placeholder_count.find(response_id);
    if (cit == placeholder_count.end())
      cit = placeholder_count.emplace(response_id, mask_values(rit->second->text).values.size())
                .first;
    if (fields.size() - 3 != cit->second)
      throw DataError(where + ": response '" + response_id + "' has " +
                      std::to_string(cit->second) + " placeholders, row carries " +
                      std::to_string(fields.size() - 3));

    std::vector<double> probs;
    probs.reserve(fields.size() - 3);
    for (size_t f = 3; f < fields.size(); ++f) {
      double p = detail::parse_double(fields[f], where);
      if (!(p >= 0.0 && p <= 1.0))
        throw DataError(where + ": probability out of range for response '" + response_id + "'");
      probs.push_back(p);
    }
    auto key = std::make_tuple(fields[0], fields[1], fields[2]);
    if (!out.rows.emplace(key, std::move(probs)).second)
      throw DataError(where + ": duplicate row for response '" + response_id + "'");
  }
  return out;
}

}  // namespace vident
