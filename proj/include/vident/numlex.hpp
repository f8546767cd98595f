#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vident/errors.hpp"
#include "vident/rational.hpp"

// Number detection and normalization for free text. Recognized shapes:
// decimal literals (optional sign, thousands separators, decimal point),
// fraction literals "a/b", mixed numbers "1 1/2", and written-number
// phrases ("sixty-four", "one hundred and five"). Detected numbers can be
// annotated in place with their canonical form, or replaced by <mask>
// placeholders with the value list kept aside.

namespace vident {

enum class NumberForm { kDecimal, kFraction, kWritten, kMixed };

struct NumberToken {
  size_t begin = 0;  // [begin, end) offsets into the source text
  size_t end = 0;
  std::string surface;
  Rational value;
  NumberForm form = NumberForm::kDecimal;
};

struct ScanDiagnostic {
  size_t begin = 0;
  size_t end = 0;
  std::string reason;  // "zero denominator" or "overflow"
};

struct AnnotatedText {
  std::string source;
  std::vector<NumberToken> tokens;        // strictly increasing by begin
  std::vector<ScanDiagnostic> diagnostics;
};

struct MaskedText {
  std::string template_text;
  std::vector<Rational> values;  // one per placeholder, in template order
};

// Fixed wire tokens; they appear verbatim in downstream training data.
inline constexpr std::string_view kMaskToken = "<mask>";
inline constexpr std::string_view kAnnotationOpen = "[=";
inline constexpr std::string_view kAnnotationClose = "]";

namespace numword {

inline int unit_value(std::string_view w) {
  static const std::unordered_map<std::string_view, int> m = {
      {"one", 1}, {"two", 2},   {"three", 3}, {"four", 4}, {"five", 5},
      {"six", 6}, {"seven", 7}, {"eight", 8}, {"nine", 9}};
  auto it = m.find(w);
  return it == m.end() ? 0 : it->second;
}

inline int teen_value(std::string_view w) {
  static const std::unordered_map<std::string_view, int> m = {
      {"ten", 10},      {"eleven", 11},  {"twelve", 12},    {"thirteen", 13},
      {"fourteen", 14}, {"fifteen", 15}, {"sixteen", 16},   {"seventeen", 17},
      {"eighteen", 18}, {"nineteen", 19}};
  auto it = m.find(w);
  return it == m.end() ? 0 : it->second;
}

inline int tens_value(std::string_view w) {
  static const std::unordered_map<std::string_view, int> m = {
      {"twenty", 20}, {"thirty", 30}, {"forty", 40},  {"fifty", 50},
      {"sixty", 60},  {"seventy", 70}, {"eighty", 80}, {"ninety", 90}};
  auto it = m.find(w);
  return it == m.end() ? 0 : it->second;
}

inline int digit_value(std::string_view w) {
  if (w == "zero") return 0;
  int u = unit_value(w);
  return u > 0 ? u : -1;
}

inline bool is_number_word(std::string_view w) {
  return w == "zero" || w == "hundred" || w == "thousand" || w == "million" ||
         w == "point" || unit_value(w) > 0 || teen_value(w) > 0 || tens_value(w) > 0;
}

}  // namespace numword

// Recognizer for written-number phrases. Tokens must be lowercase with
// hyphenated compounds already split. Grammar: integers 0..999,999,999
// built from units/teens/tens, "hundred", "thousand", "million", with an
// optional "and" after a magnitude word, plus decimals as "point" followed
// by digit words. Anything else yields an empty result; never throws.
inline std::optional<Rational> parse_written(std::span<const std::string> words) {
  if (words.empty()) return std::nullopt;
  size_t i = 0;
  const size_t n = words.size();

  // small := teen | tens [unit] | unit        (1..99)
  auto parse_small = [&]() -> int {
    if (i >= n) return 0;
    if (int t = numword::teen_value(words[i]); t > 0) {
      ++i;
      return t;
    }
    if (int t = numword::tens_value(words[i]); t > 0) {
      ++i;
      if (i < n) {
        if (int u = numword::unit_value(words[i]); u > 0) {
          ++i;
          return t + u;
        }
      }
      return t;
    }
    if (int u = numword::unit_value(words[i]); u > 0) {
      ++i;
      return u;
    }
    return 0;
  };

  // group := unit "hundred" ["and"] [small] | small        (1..999)
  auto parse_group = [&]() -> int {
    if (i >= n) return 0;
    int u = numword::unit_value(words[i]);
    if (u > 0 && i + 1 < n && words[i + 1] == "hundred") {
      i += 2;
      int value = u * 100;
      size_t before_and = i;
      if (i < n && words[i] == "and") ++i;
      int s = parse_small();
      if (s > 0) return value + s;
      i = before_and;  // bare trailing "and" stays unconsumed
      return value;
    }
    return parse_small();
  };

  // Optional ["and"] group after a magnitude word; restores position when
  // no group follows.
  auto parse_tail_group = [&]() -> int {
    size_t save = i;
    if (i < n && words[i] == "and") ++i;
    int g = parse_group();
    if (g == 0) {
      i = save;
      return 0;
    }
    return g;
  };

  int64_t integer_part = 0;
  if (words[0] == "zero") {
    i = 1;
  } else {
    int g = parse_group();
    if (g == 0) return std::nullopt;
    if (i < n && words[i] == "million") {
      ++i;
      integer_part = static_cast<int64_t>(g) * 1000000;
      size_t save = i;
      if (i < n && words[i] == "and") ++i;
      int g2 = parse_group();
      if (g2 == 0) {
        i = save;
      } else if (i < n && words[i] == "thousand") {
        ++i;
        integer_part += static_cast<int64_t>(g2) * 1000;
        integer_part += parse_tail_group();
      } else {
        integer_part += g2;
      }
    } else if (i < n && words[i] == "thousand") {
      ++i;
      integer_part = static_cast<int64_t>(g) * 1000;
      integer_part += parse_tail_group();
    } else {
      integer_part = g;
    }
  }

  if (i == n) return Rational(integer_part);

  // decimal := "point" digitword+
  if (words[i] != "point") return std::nullopt;
  ++i;
  int64_t frac_num = 0;
  int64_t frac_den = 1;
  size_t digits = 0;
  while (i < n) {
    int d = numword::digit_value(words[i]);
    if (d < 0) return std::nullopt;
    if (digits >= 15) return std::nullopt;
    frac_num = frac_num * 10 + d;
    frac_den *= 10;
    ++digits;
    ++i;
  }
  if (digits == 0) return std::nullopt;
  return Rational(integer_part) + Rational(frac_num, frac_den);
}

namespace detail {

struct Candidate {
  size_t begin = 0;
  size_t end = 0;
  std::optional<Rational> value;  // empty = rejected, see reason
  NumberForm form = NumberForm::kDecimal;
  std::string reason;
};

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline bool is_word_char(char c) { return is_digit(c) || is_letter(c); }

// Reads a digit run with an overflow flag instead of throwing.
inline size_t read_int(std::string_view s, size_t pos, int64_t& out, bool& overflow) {
  size_t i = pos;
  int64_t v = 0;
  overflow = false;
  while (i < s.size() && is_digit(s[i])) {
    if (v > (INT64_MAX - (s[i] - '0')) / 10) overflow = true;
    if (!overflow) v = v * 10 + (s[i] - '0');
    ++i;
  }
  out = v;
  return i - pos;
}

// Digit-shaped candidate at `pos`: currency mark, sign, grouped or plain
// integer, then the longest of {mixed number, fraction, decimal}. The '$'
// stays in the span but never reaches the value.
inline std::optional<Candidate> match_digit_candidate(std::string_view s, size_t pos) {
  size_t i = pos;
  const size_t n = s.size();
  bool overflow = false;

  if (i < n && s[i] == '$') ++i;
  bool negative = false;
  if (i < n && (s[i] == '-' || s[i] == '+')) {
    char before = i == 0 ? '\0' : s[i - 1];
    if (before != '\0' && before != '$' && is_word_char(before)) return std::nullopt;
    negative = s[i] == '-';
    ++i;
  }
  if (i >= n || (!is_digit(s[i]) && s[i] != '.')) return std::nullopt;
  if (s[i] == '.' && (i + 1 >= n || !is_digit(s[i + 1]))) return std::nullopt;

  int64_t whole = 0;
  size_t whole_len = read_int(s, i, whole, overflow);
  i += whole_len;

  // Thousands separators: 1-3 leading digits, then ",ddd" groups.
  bool grouped = false;
  if (whole_len >= 1 && whole_len <= 3) {
    size_t j = i;
    int64_t value = whole;
    bool group_overflow = overflow;
    while (j + 3 < n && s[j] == ',' && is_digit(s[j + 1]) && is_digit(s[j + 2]) &&
           is_digit(s[j + 3]) && (j + 4 >= n || !is_digit(s[j + 4]))) {
      int64_t group = (s[j + 1] - '0') * 100 + (s[j + 2] - '0') * 10 + (s[j + 3] - '0');
      if (value > (INT64_MAX - group) / 1000) group_overflow = true;
      if (!group_overflow) value = value * 1000 + group;
      j += 4;
      grouped = true;
    }
    if (grouped) {
      whole = value;
      overflow = group_overflow;
      i = j;
    }
  }

  Candidate cand;
  cand.begin = pos;
  cand.form = NumberForm::kDecimal;

  auto finish = [&](size_t end, std::optional<Rational> value, NumberForm form,
                    std::string reason) {
    cand.end = end;
    cand.value = std::move(value);
    cand.form = form;
    cand.reason = std::move(reason);
    return cand;
  };

  // Mixed number: "W N/D" with a single space, plain integer parts.
  if (!grouped && i < n && s[i] == ' ' && i + 1 < n && is_digit(s[i + 1])) {
    size_t j = i + 1;
    int64_t num = 0;
    bool of_num = false;
    size_t num_len = read_int(s, j, num, of_num);
    j += num_len;
    if (num_len > 0 && j < n && s[j] == '/' && j + 1 < n && is_digit(s[j + 1])) {
      int64_t den = 0;
      bool of_den = false;
      size_t den_len = read_int(s, j + 1, den, of_den);
      size_t end = j + 1 + den_len;
      if (den == 0 && !of_den)
        return finish(end, std::nullopt, NumberForm::kMixed, "zero denominator");
      if (overflow || of_num || of_den)
        return finish(end, std::nullopt, NumberForm::kMixed, "overflow");
      Rational v = Rational(whole) + Rational(num, den);
      if (negative) v = Rational(0) - v;
      return finish(end, v, NumberForm::kMixed, "");
    }
  }

  // Fraction: plain integer, '/', plain integer.
  if (!grouped && i < n && s[i] == '/' && i + 1 < n && is_digit(s[i + 1])) {
    int64_t den = 0;
    bool of_den = false;
    size_t den_len = read_int(s, i + 1, den, of_den);
    size_t end = i + 1 + den_len;
    if (den == 0 && !of_den)
      return finish(end, std::nullopt, NumberForm::kFraction, "zero denominator");
    if (overflow || of_den) return finish(end, std::nullopt, NumberForm::kFraction, "overflow");
    return finish(end, Rational(negative ? -whole : whole, den), NumberForm::kFraction, "");
  }

  // Decimal point with at least one digit after it.
  if (i < n && s[i] == '.' && i + 1 < n && is_digit(s[i + 1])) {
    int64_t frac = 0;
    bool of_frac = false;
    size_t frac_len = read_int(s, i + 1, frac, of_frac);
    size_t end = i + 1 + frac_len;
    if (overflow || of_frac || frac_len > 15)
      return finish(end, std::nullopt, NumberForm::kDecimal, "overflow");
    int64_t scale = 1;
    for (size_t k = 0; k < frac_len; ++k) scale *= 10;
    if (whole > (INT64_MAX - frac) / scale)
      return finish(end, std::nullopt, NumberForm::kDecimal, "overflow");
    int64_t numv = whole * scale + frac;
    return finish(end, Rational(negative ? -numv : numv, scale), NumberForm::kDecimal, "");
  }

  if (overflow) return finish(i, std::nullopt, NumberForm::kDecimal, "overflow");
  return finish(i, Rational(negative ? -whole : whole), NumberForm::kDecimal, "");
}

struct WordPos {
  size_t begin = 0;
  size_t end = 0;
  std::string lower;
};

inline std::vector<WordPos> split_words(std::string_view s) {
  std::vector<WordPos> words;
  size_t i = 0;
  while (i < s.size()) {
    if (is_letter(s[i])) {
      size_t j = i;
      while (j < s.size() && is_letter(s[j])) ++j;
      WordPos w{i, j, {}};
      w.lower.reserve(j - i);
      for (size_t k = i; k < j; ++k)
        w.lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[k]))));
      words.push_back(std::move(w));
      i = j;
    } else {
      ++i;
    }
  }
  return words;
}

}  // namespace detail

// Finds all maximal non-overlapping numbers in `text`. Longest match wins
// at each position and earlier matches take priority. Malformed shapes
// (zero-denominator fractions, digit runs past int64) are recorded in the
// diagnostics list and their spans are skipped. Content of existing
// "[=...]" annotation blocks is never re-detected.
inline AnnotatedText scan_numbers(std::string_view text) {
  AnnotatedText out;
  out.source.assign(text);
  const size_t n = text.size();

  // Annotation block spans, in order.
  std::vector<std::pair<size_t, size_t>> blocks;
  for (size_t i = 0; i + 1 < n; ++i) {
    if (text[i] == '[' && text[i + 1] == '=') {
      size_t close = text.find(']', i + 2);
      if (close == std::string_view::npos) break;
      blocks.emplace_back(i, close + 1);
      i = close;
    }
  }

  const auto words = detail::split_words(text);
  // Word k chains to k+1 when separated by exactly one space or hyphen.
  auto chains = [&](size_t k) {
    return k + 1 < words.size() && words[k + 1].begin == words[k].end + 1 &&
           (text[words[k].end] == ' ' || text[words[k].end] == '-');
  };

  size_t block_idx = 0;
  size_t word_idx = 0;
  size_t pos = 0;
  while (pos < n) {
    while (block_idx < blocks.size() && blocks[block_idx].second <= pos) ++block_idx;
    if (block_idx < blocks.size() && pos >= blocks[block_idx].first) {
      pos = blocks[block_idx].second;
      continue;
    }
    while (word_idx < words.size() && words[word_idx].begin < pos) ++word_idx;

    std::optional<detail::Candidate> cand;
    if (detail::is_letter(text[pos])) {
      if (word_idx < words.size() && words[word_idx].begin == pos &&
          numword::is_number_word(words[word_idx].lower)) {
        // Longest chained word sequence accepted by the grammar.
        std::vector<std::string> phrase;
        size_t limit = std::min<size_t>(words.size(), word_idx + 15);
        size_t last = word_idx;
        std::optional<Rational> best;
        size_t best_len = 0;
        for (size_t k = word_idx; k < limit; ++k) {
          if (k > word_idx && !chains(k - 1)) break;
          if (block_idx < blocks.size() && words[k].end > blocks[block_idx].first) break;
          phrase.push_back(words[k].lower);
          if (auto v = parse_written(phrase)) {
            best = v;
            best_len = phrase.size();
          }
          last = k;
        }
        (void)last;
        // A lone "one" is left to the classification stage, like "a"/"an":
        // it is usually a determiner, not a stated quantity.
        if (best && !(best_len == 1 && words[word_idx].lower == "one")) {
          detail::Candidate c;
          c.begin = words[word_idx].begin;
          c.end = words[word_idx + best_len - 1].end;
          c.value = best;
          c.form = NumberForm::kWritten;
          cand = c;
        }
      }
    } else if (text[pos] == '$' || text[pos] == '-' || text[pos] == '+' ||
               text[pos] == '.' || detail::is_digit(text[pos])) {
      cand = detail::match_digit_candidate(text, pos);
      // Keep candidates inside the current line only; clip at annotation.
      if (cand && block_idx < blocks.size() && cand->end > blocks[block_idx].first)
        cand.reset();
    }

    if (!cand) {
      ++pos;
      continue;
    }
    if (cand->value) {
      NumberToken tok;
      tok.begin = cand->begin;
      tok.end = cand->end;
      tok.surface.assign(text.substr(cand->begin, cand->end - cand->begin));
      tok.value = *cand->value;
      tok.form = cand->form;
      out.tokens.push_back(std::move(tok));
    } else {
      out.diagnostics.push_back({cand->begin, cand->end, cand->reason});
    }
    pos = cand->end;
  }
  return out;
}

namespace detail {

// Length of the annotation block for `canonical` right after `end`
// (optionally preceded by one space), or 0 when absent.
inline size_t annotation_suffix_len(std::string_view source, size_t end,
                                    const std::string& canonical) {
  std::string expected;
  expected.reserve(canonical.size() + 3);
  expected += kAnnotationOpen;
  expected += canonical;
  expected += kAnnotationClose;
  size_t at = end;
  size_t extra = 0;
  if (at < source.size() && source[at] == ' ') {
    ++at;
    extra = 1;
  }
  if (source.compare(at, expected.size(), expected) == 0) return extra + expected.size();
  return 0;
}

}  // namespace detail

// Inserts " [=canonical]" after every detected number. Numbers already
// carrying their annotation are left alone, which makes the operation
// idempotent under rescanning.
inline std::string annotate(const AnnotatedText& annotated) {
  std::string out;
  out.reserve(annotated.source.size() + annotated.tokens.size() * 8);
  size_t pos = 0;
  for (const auto& tok : annotated.tokens) {
    out.append(annotated.source, pos, tok.end - pos);
    pos = tok.end;
    const std::string canonical = tok.value.canonical();
    if (detail::annotation_suffix_len(annotated.source, tok.end, canonical) == 0) {
      out += ' ';
      out += kAnnotationOpen;
      out += canonical;
      out += kAnnotationClose;
    }
  }
  out.append(annotated.source, pos, annotated.source.size() - pos);
  return out;
}

// Replaces each number (surface plus its annotation, when present) with the
// <mask> placeholder and stores the values in template order. Literal
// occurrences of the placeholder in surrounding text are escaped by
// doubling so the placeholder count always equals the value count.
inline MaskedText mask_values(const AnnotatedText& annotated) {
  MaskedText out;
  const std::string& src = annotated.source;
  auto append_escaped = [&](size_t from, size_t to) {
    size_t pos = from;
    while (pos < to) {
      size_t hit = src.find(kMaskToken, pos);
      if (hit == std::string::npos || hit + kMaskToken.size() > to) {
        out.template_text.append(src, pos, to - pos);
        break;
      }
      out.template_text.append(src, pos, hit - pos);
      out.template_text += kMaskToken;
      out.template_text += kMaskToken;
      pos = hit + kMaskToken.size();
    }
  };

  size_t pos = 0;
  for (const auto& tok : annotated.tokens) {
    append_escaped(pos, tok.begin);
    size_t end = tok.end + detail::annotation_suffix_len(src, tok.end, tok.value.canonical());
    out.template_text += kMaskToken;
    out.values.push_back(tok.value);
    pos = end;
  }
  append_escaped(pos, src.size());
  return out;
}

inline MaskedText mask_values(std::string_view text) { return mask_values(scan_numbers(text)); }

// Placeholder count under the doubling escape: within a run of consecutive
// placeholder literals, pairs decode as escaped text and a leftover single
// decodes as one placeholder.
inline size_t count_placeholders(std::string_view template_text) {
  size_t count = 0;
  size_t pos = 0;
  while (true) {
    size_t hit = template_text.find(kMaskToken, pos);
    if (hit == std::string_view::npos) break;
    size_t run = 0;
    size_t at = hit;
    while (template_text.compare(at, kMaskToken.size(), kMaskToken) == 0) {
      ++run;
      at += kMaskToken.size();
    }
    count += run % 2;
    pos = at;
  }
  return count;
}

// Substitutes canonical renderings back into the template.
inline std::string unmask(const MaskedText& masked) {
  if (count_placeholders(masked.template_text) != masked.values.size())
    throw DataError("masked text has " + std::to_string(count_placeholders(masked.template_text)) +
                    " placeholders for " + std::to_string(masked.values.size()) + " values");
  std::string out;
  out.reserve(masked.template_text.size());
  size_t pos = 0;
  size_t next_value = 0;
  const std::string_view tmpl = masked.template_text;
  while (pos < tmpl.size()) {
    size_t hit = tmpl.find(kMaskToken, pos);
    if (hit == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, hit - pos));
    size_t run = 0;
    size_t at = hit;
    while (tmpl.compare(at, kMaskToken.size(), kMaskToken) == 0) {
      ++run;
      at += kMaskToken.size();
    }
    for (size_t k = 0; k + 1 < run; k += 2) out.append(kMaskToken);
    if (run % 2 == 1) out.append(masked.values[next_value++].canonical());
    pos = at;
  }
  return out;
}

// Lowercased word/number tokens for feature extraction: runs of letters or
// digits, with "<mask>" kept as a single token.
inline std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, kMaskToken.size(), kMaskToken) == 0) {
      tokens.emplace_back(kMaskToken);
      i += kMaskToken.size();
      continue;
    }
    if (detail::is_word_char(text[i])) {
      size_t j = i;
      std::string tok;
      while (j < text.size() && detail::is_word_char(text[j])) {
        tok.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[j]))));
        ++j;
      }
      tokens.push_back(std::move(tok));
      i = j;
    } else {
      ++i;
    }
  }
  return tokens;
}

}  // namespace vident
