#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "vident/corpus.hpp"
#include "vident/errors.hpp"
#include "vident/linear_model.hpp"
#include "vident/numlex.hpp"
#include "vident/rational.hpp"

// Three-way value-class classification (Zero / One / Other). One generic
// model serves every slot; the slot question rides along in the input.

namespace vident {

inline constexpr std::string_view kClsToken = "<cls>";
inline constexpr std::string_view kSepToken = "<sep>";

namespace detail {

// Doubling escape for the two marker tokens, same scheme as mask escaping.
inline void append_marker_escaped(std::string& out, std::string_view text) {
  size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, kClsToken.size(), kClsToken) == 0) {
      out += kClsToken;
      out += kClsToken;
      i += kClsToken.size();
    } else if (text.compare(i, kSepToken.size(), kSepToken) == 0) {
      out += kSepToken;
      out += kSepToken;
      i += kSepToken.size();
    } else {
      out += text[i++];
    }
  }
}

// Greedy unescape: doubled markers collapse back to literals.
inline std::string marker_unescape(std::string_view text) {
  std::string out;
  size_t i = 0;
  while (i < text.size()) {
    for (std::string_view m : {kClsToken, kSepToken}) {
      if (text.compare(i, m.size(), m) == 0 && text.compare(i + m.size(), m.size(), m) == 0) {
        out += m;
        i += 2 * m.size();
        goto next;
      }
    }
    out += text[i++];
  next:;
  }
  return out;
}

}  // namespace detail

struct ClassifierInput {
  std::string formatted;  // <cls>question<sep>response<sep>
};

inline ClassifierInput format_classifier_input(std::string_view slot_question,
                                               std::string_view response_text) {
  ClassifierInput in;
  in.formatted.reserve(slot_question.size() + response_text.size() + 32);
  in.formatted += kClsToken;
  detail::append_marker_escaped(in.formatted, slot_question);
  in.formatted += kSepToken;
  detail::append_marker_escaped(in.formatted, response_text);
  in.formatted += kSepToken;
  return in;
}

// Inverse of format_classifier_input for well-formed inputs. Splits on the
// first undoubled <sep>; doubled markers inside fields are collapsed.
inline std::pair<std::string, std::string> decode_classifier_input(const ClassifierInput& input) {
  std::string_view text = input.formatted;
  if (text.substr(0, kClsToken.size()) != kClsToken)
    throw DataError("classifier input does not start with <cls>");
  text.remove_prefix(kClsToken.size());
  if (text.size() < kSepToken.size() ||
      text.substr(text.size() - kSepToken.size()) != kSepToken)
    throw DataError("classifier input does not end with <sep>");
  text.remove_suffix(kSepToken.size());

  // Find the field boundary: the first <sep> occurrence with an even number
  // of consecutive markers before it is a literal pair's tail, so walk runs.
  size_t i = 0;
  size_t split = std::string_view::npos;
  while (i < text.size()) {
    if (text.compare(i, kSepToken.size(), kSepToken) == 0) {
      size_t run = 0;
      size_t j = i;
      while (j < text.size() && text.compare(j, kSepToken.size(), kSepToken) == 0) {
        ++run;
        j += kSepToken.size();
      }
      if (run % 2 == 1) {
        // Escaped pairs first, then the lone separator.
        split = i + (run - 1) * kSepToken.size();
        break;
      }
      i = j;
    } else {
      ++i;
    }
  }
  if (split == std::string_view::npos) throw DataError("classifier input missing field separator");
  std::string question = detail::marker_unescape(text.substr(0, split));
  std::string response = detail::marker_unescape(text.substr(split + kSepToken.size()));
  return {question, response};
}

struct ClassDistribution {
  std::array<double, 3> p{};  // indexed by ClassLabel

  double zero() const { return p[0]; }
  double one() const { return p[1]; }
  double other() const { return p[2]; }

  // Ties break toward the smaller class index (Zero < One < Other).
  ClassLabel predicted() const {
    int best = 0;
    for (int c = 1; c < 3; ++c)
      if (p[c] > p[best]) best = c;
    return static_cast<ClassLabel>(best);
  }
};

namespace detail {

// Response tokens with scanned number spans replaced by class markers, so
// n-grams generalize across surface values.
inline std::vector<std::string> class_token_stream(const std::string& response) {
  AnnotatedText scan = scan_numbers(response);
  std::vector<std::string> out;
  size_t pos = 0;
  auto flush_words = [&](size_t end) {
    if (end > pos) {
      for (auto& w : tokenize_words(response.substr(pos, end - pos))) out.push_back(std::move(w));
    }
  };
  for (const auto& tok : scan.tokens) {
    flush_words(tok.begin);
    if (tok.value == Rational(0))
      out.push_back("#num0");
    else if (tok.value == Rational(1))
      out.push_back("#num1");
    else
      out.push_back("#numv");
    pos = tok.end;
  }
  flush_words(response.size());
  return out;
}

// Strips one trailing plural 's' so "bags"/"bag" and "lollipops"/"lollipop"
// compare equal. Deliberately crude; it only has to be consistent.
inline std::string light_stem(const std::string& tok) {
  if (tok.size() >= 3 && tok.back() == 's' && tok[tok.size() - 2] != 's')
    return tok.substr(0, tok.size() - 1);
  return tok;
}

// Function words that appear in any slot question and carry no slot identity.
inline bool generic_question_word(const std::string& tok) {
  static const std::unordered_set<std::string> kStop = {
      "how",   "many",  "much",  "do",    "does",  "did",   "the",   "a",     "an",
      "and",   "or",    "of",    "to",    "in",    "on",    "at",    "for",   "with",
      "by",    "is",    "are",   "was",   "were",  "be",    "would", "will",  "can",
      "could", "buy",   "buys",  "bought", "spend", "spent", "get",   "gets",  "got",
      "student", "students", "you",  "your",  "i",     "we",    "they",  "what",
      "which", "there", "this",  "that",  "if",    "each",  "per",   "total", "cost",
      "costs", "have",  "has",   "had"};
  return kStop.count(tok) > 0;
}

inline FeatureVec classifier_features(const FeatureSpace& space, const std::string& question,
                                      const std::string& response) {
  FeatureVec x;
  std::vector<std::string> toks = class_token_stream(response);
  for (size_t i = 0; i < toks.size(); ++i) {
    add_feature(x, space, "u:" + toks[i]);
    if (i + 1 < toks.size()) add_feature(x, space, "b:" + toks[i] + "|" + toks[i + 1]);
    if (i + 2 < toks.size())
      add_feature(x, space, "t:" + toks[i] + "|" + toks[i + 1] + "|" + toks[i + 2]);
  }
  std::vector<std::string> qtoks = tokenize_words(question);
  for (size_t i = 0; i < qtoks.size(); ++i) {
    add_feature(x, space, "q:" + qtoks[i]);
    if (i + 1 < qtoks.size()) add_feature(x, space, "qb:" + qtoks[i] + "|" + qtoks[i + 1]);
  }

  // The subject phrase of the question (e.g. the item being counted) tends to
  // reappear in the response right after its number, so align it against the
  // response and describe the best match: how much of the phrase shows up,
  // whether it is singularized, and what immediately precedes it. These carry
  // the per-slot signal; bare n-grams cannot tell one slot's number from
  // another's in a multi-slot response.
  std::vector<std::string> rstems(toks.size());
  for (size_t i = 0; i < toks.size(); ++i) rstems[i] = light_stem(toks[i]);

  // Maximal runs of non-generic question tokens, with "of" allowed as glue.
  std::vector<std::vector<size_t>> stretches;
  for (size_t i = 0; i < qtoks.size();) {
    if (generic_question_word(qtoks[i])) {
      ++i;
      continue;
    }
    std::vector<size_t> idx = {i};
    size_t j = i + 1;
    while (j < qtoks.size()) {
      if (!generic_question_word(qtoks[j])) {
        idx.push_back(j);
        ++j;
      } else if (qtoks[j] == "of" && j + 1 < qtoks.size() &&
                 !generic_question_word(qtoks[j + 1])) {
        idx.push_back(j);
        idx.push_back(j + 1);
        j += 2;
      } else {
        break;
      }
    }
    stretches.push_back(std::move(idx));
    i = j;
  }

  struct Match {
    size_t len = 0;
    size_t begin = 0;
    bool sg = false;
    bool marker_adj = false;
    bool full = false;
  } best;
  size_t content_total = 0, content_hit = 0;
  {
    std::unordered_set<std::string> rset(rstems.begin(), rstems.end());
    std::unordered_set<std::string> seen;
    for (size_t i = 0; i < qtoks.size(); ++i) {
      if (generic_question_word(qtoks[i])) continue;
      std::string st = light_stem(qtoks[i]);
      if (!seen.insert(st).second) continue;
      ++content_total;
      if (rset.count(st)) ++content_hit;
    }
  }
  for (const auto& idx : stretches) {
    std::vector<std::string> qs(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) qs[k] = light_stem(qtoks[idx[k]]);
    for (size_t a = 0; a < rstems.size(); ++a) {
      for (size_t b = 0; b < qs.size(); ++b) {
        if (rstems[a] != qs[b]) continue;
        if (a > 0 && b > 0 && rstems[a - 1] == qs[b - 1]) continue;  // not maximal
        size_t len = 0;
        bool sg = false, content = false;
        while (a + len < rstems.size() && b + len < qs.size() && rstems[a + len] == qs[b + len]) {
          if (toks[a + len] != qtoks[idx[b + len]]) sg = true;
          if (!generic_question_word(qtoks[idx[b + len]])) content = true;
          ++len;
        }
        if (!content) continue;
        bool madj = a > 0 && toks[a - 1].rfind("#num", 0) == 0;
        if (len > best.len || (len == best.len && madj && !best.marker_adj))
          best = {len, a, sg, madj, b == 0 && len == qs.size()};
      }
    }
  }
  std::string lenb = best.len >= 4 ? "4p" : std::to_string(best.len);
  add_feature(x, space, "alen:" + lenb);
  if (content_total == 0)
    add_feature(x, space, "aq:none");
  else if (content_hit == 0)
    add_feature(x, space, "acov:0");
  else if (content_hit == content_total)
    add_feature(x, space, "acov:all");
  else if (2 * content_hit <= content_total)
    add_feature(x, space, "acov:lo");
  else
    add_feature(x, space, "acov:hi");
  if (best.len > 0) {
    if (best.full) add_feature(x, space, "afull");
    if (best.sg) add_feature(x, space, "asg");
    std::string mark = "none";
    for (size_t k = 1; k <= 2 && best.begin >= k; ++k) {
      const std::string& t = toks[best.begin - k];
      add_feature(x, space, "apre" + std::to_string(k) + ":" + t);
      if (mark == "none" && t.rfind("#num", 0) == 0) mark = t;
    }
    if (best.begin + best.len < toks.size())
      add_feature(x, space, "apost:" + toks[best.begin + best.len]);
    add_feature(x, space, "amark:" + mark);
    add_feature(x, space, "aA:" + lenb + "|" + mark);
    if (best.sg) add_feature(x, space, "aS:" + mark);
  }

  AnnotatedText scan = scan_numbers(response);
  size_t count = scan.tokens.size();
  add_feature(x, space, "nc:" + std::to_string(std::min<size_t>(count, 5)));
  bool has0 = false, has1 = false;
  for (const auto& tok : scan.tokens) {
    if (tok.value == Rational(0)) has0 = true;
    if (tok.value == Rational(1)) has1 = true;
  }
  if (has0) add_feature(x, space, "h0");
  if (has1) add_feature(x, space, "h1");
  if (count == 0) add_feature(x, space, "nonum");
  return x;
}

}  // namespace detail

struct ClassifierModel {
  LinearModel linear;
  uint64_t corpus_id = 0;  // corpus_fingerprint of the training corpus
  uint64_t seed = 0;
};

struct ClassifierTrainOptions {
  uint32_t bits = 18;
  int epochs = 12;
  double learning_rate = 0.2;
};

// Trains the single generic classifier on the train partition: one example
// per (response, slot), labeled by the resolved value's class. Class weights
// are inverse frequency so the skewed mix does not drown One/Other.
inline ClassifierModel train_baseline_classifier(const Corpus& corpus,
                                                 const SplitAssignment& split, uint64_t seed,
                                                 const ClassifierTrainOptions& opt = {}) {
  FeatureSpace space(opt.bits);
  std::vector<FeatureVec> xs;
  std::vector<int> ys;
  size_t counts[3] = {0, 0, 0};
  for (const auto& r : corpus.responses) {
    if (split.at(r.response_id) != Partition::kTrain) continue;
    const Prompt& p = corpus.prompt(r.prompt_id);
    for (size_t s = 0; s < p.slots.size(); ++s) {
      ClassLabel y = derive_class_label(r.labels[s].resolved);
      ClassifierInput in = format_classifier_input(p.slots[s].question, r.text);
      auto [q, resp] = decode_classifier_input(in);
      xs.push_back(detail::classifier_features(space, q, resp));
      ys.push_back(static_cast<int>(y));
      ++counts[static_cast<int>(y)];
    }
  }
  if (xs.empty()) throw DataError("classifier training: no examples in train split");
  int present = (counts[0] > 0) + (counts[1] > 0) + (counts[2] > 0);
  if (present < 2) throw DataError("classifier training: only one class present in train split");

  TrainOptions topt;
  topt.bits = opt.bits;
  topt.epochs = opt.epochs;
  topt.learning_rate = opt.learning_rate;
  topt.seed = seed;
  topt.class_weights.assign(3, 1.0);
  for (int c = 0; c < 3; ++c)
    if (counts[c] > 0)
      topt.class_weights[c] =
          static_cast<double>(xs.size()) / (3.0 * static_cast<double>(counts[c]));

  ClassifierModel model;
  model.linear = train_logistic(xs, ys, 3, topt);
  model.corpus_id = corpus_fingerprint(corpus);
  model.seed = seed;
  return model;
}

// Pure function of (model, input); probabilities sum to 1.
inline ClassDistribution predict_class(const ClassifierModel& model, const ClassifierInput& input) {
  auto [question, response] = decode_classifier_input(input);
  FeatureSpace space(model.linear.bits);
  FeatureVec x = detail::classifier_features(space, question, response);
  std::vector<double> p = model.linear.probabilities(x);
  ClassDistribution dist;
  dist.p = {p[0], p[1], p[2]};
  return dist;
}

inline void save_classifier(const ClassifierModel& model, const std::string& path) {
  std::string out = "#vident-classifier v1\n";
  out += "corpus_id," + std::to_string(model.corpus_id) + '\n';
  out += "seed," + std::to_string(model.seed) + '\n';
  out += serialize_linear_model(model.linear);
  write_file(path, out);
}

inline ClassifierModel load_classifier(const std::string& path) {
  std::string text = read_file(path);
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "#vident-classifier v1")
    throw DataError(path + ": not a classifier file");
  ClassifierModel model;
  size_t body = 1;
  for (; body < lines.size(); ++body) {
    const std::string& line = lines[body];
    if (line.rfind("corpus_id,", 0) == 0)
      model.corpus_id = std::stoull(line.substr(10));
    else if (line.rfind("seed,", 0) == 0)
      model.seed = std::stoull(line.substr(5));
    else
      break;
  }
  std::string rest;
  for (size_t i = body; i < lines.size(); ++i) {
    rest += lines[i];
    rest += '\n';
  }
  model.linear = deserialize_linear_model(rest, path);
  return model;
}

}  // namespace vident
