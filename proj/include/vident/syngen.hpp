#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vident/corpus.hpp"
#include "vident/errors.hpp"
#include "vident/io.hpp"
#include "vident/numlex.hpp"
#include "vident/rational.hpp"
#include "vident/rng.hpp"

// Synthetic candy-store corpora with known gold values: prompts with linear
// price constraints, templated responses, and simulated rater noise. Desk-
// scale stand-in for the assessment data the pipeline was built around.

namespace vident {

struct GeneratorConfig {
  uint64_t seed = 1;
  size_t prompts = 1;
  size_t responses_per_prompt = 200;
  size_t min_slots = 1;
  size_t max_slots = 3;
  double mix_zero = 0.52;  // class mix targets over slot cases
  double mix_one = 0.21;
  double mix_other = 0.27;
  double surface_digit = 0.6;  // surface forms for Other-class values
  double surface_written = 0.3;
  double surface_fraction = 0.1;
  double rater_disagreement = 0.0;
  double misspelling = 0.0;
  double distractor_arithmetic = 0.0;
  double value_omission = 0.0;
};

inline void validate_config(const GeneratorConfig& c) {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw DataError(std::string(name) + " must be in [0, 1]");
  };
  prob(c.mix_zero, "mix_zero");
  prob(c.mix_one, "mix_one");
  prob(c.mix_other, "mix_other");
  prob(c.surface_digit, "surface_digit");
  prob(c.surface_written, "surface_written");
  prob(c.surface_fraction, "surface_fraction");
  prob(c.misspelling, "misspelling");
  prob(c.distractor_arithmetic, "distractor_arithmetic");
  prob(c.value_omission, "value_omission");
  if (!(c.rater_disagreement >= 0.0 && c.rater_disagreement < 1.0))
    throw DataError("rater_disagreement must be in [0, 1)");
  if (std::abs(c.mix_zero + c.mix_one + c.mix_other - 1.0) > 1e-9)
    throw DataError("class mix must sum to 1");
  if (std::abs(c.surface_digit + c.surface_written + c.surface_fraction - 1.0) > 1e-9)
    throw DataError("surface mix must sum to 1");
  if (c.prompts == 0) throw DataError("prompts must be positive");
  if (c.responses_per_prompt == 0) throw DataError("responses_per_prompt must be positive");
  if (c.min_slots < 1 || c.max_slots > 12 || c.min_slots > c.max_slots)
    throw DataError("slot range must satisfy 1 <= min_slots <= max_slots <= 12");
}

// Plain-text key=value config; '#' starts a comment.
inline GeneratorConfig parse_generator_config(const std::string& text, const std::string& path) {
  GeneratorConfig c;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string& s) {
      size_t b = s.find_first_not_of(" \t");
      size_t e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ":" + std::to_string(i + 1) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    trim(key);
    trim(value);
    const std::string where = path + ":" + std::to_string(i + 1);
    auto as_u64 = [&]() -> uint64_t {
      try {
        return std::stoull(value);
      } catch (const std::exception&) {
        throw DataError(where + ": bad integer '" + value + "'");
      }
    };
    auto as_double = [&]() -> double {
      try {
        size_t used = 0;
        double d = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return d;
      } catch (const std::exception&) {
        throw DataError(where + ": bad number '" + value + "'");
      }
    };
    if (key == "seed") c.seed = as_u64();
    else if (key == "prompts") c.prompts = as_u64();
    else if (key == "responses_per_prompt") c.responses_per_prompt = as_u64();
    else if (key == "min_slots") c.min_slots = as_u64();
    else if (key == "max_slots") c.max_slots = as_u64();
    else if (key == "mix_zero") c.mix_zero = as_double();
    else if (key == "mix_one") c.mix_one = as_double();
    else if (key == "mix_other") c.mix_other = as_double();
    else if (key == "surface_digit") c.surface_digit = as_double();
    else if (key == "surface_written") c.surface_written = as_double();
    else if (key == "surface_fraction") c.surface_fraction = as_double();
    else if (key == "rater_disagreement") c.rater_disagreement = as_double();
    else if (key == "misspelling") c.misspelling = as_double();
    else if (key == "distractor_arithmetic") c.distractor_arithmetic = as_double();
    else if (key == "value_omission") c.value_omission = as_double();
    else throw DataError(where + ": unknown key '" + key + "'");
  }
  validate_config(c);
  return c;
}

namespace detail {

inline const std::array<const char*, 20>& number_units() {
  static const std::array<const char*, 20> kUnits = {
      "zero", "one", "two",  "three", "four",  "five",  "six",     "seven",    "eight",
      "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
      "seventeen", "eighteen", "nineteen"};
  return kUnits;
}

inline const std::array<const char*, 10>& number_tens() {
  static const std::array<const char*, 10> kTens = {"",      "",      "twenty", "thirty",
                                                    "forty", "fifty", "sixty",  "seventy",
                                                    "eighty", "ninety"};
  return kTens;
}

}  // namespace detail

// Canonical English rendering within the lexer grammar (no "and"); the
// inverse direction of parse_written.
inline std::vector<std::string> render_words(int64_t n) {
  if (n < 0 || n > 999999) throw DataError("render_words: value out of range");
  std::vector<std::string> out;
  auto render_small = [&](int64_t v) {  // [1, 99]
    if (v < 20) {
      out.emplace_back(detail::number_units()[v]);
    } else {
      out.emplace_back(detail::number_tens()[v / 10]);
      if (v % 10 != 0) out.emplace_back(detail::number_units()[v % 10]);
    }
  };
  auto render_group = [&](int64_t v) {  // [1, 999]
    if (v >= 100) {
      out.emplace_back(detail::number_units()[v / 100]);
      out.emplace_back("hundred");
      v %= 100;
    }
    if (v > 0) render_small(v);
  };
  if (n == 0) {
    out.emplace_back("zero");
    return out;
  }
  if (n >= 1000) {
    render_group(n / 1000);
    out.emplace_back("thousand");
    n %= 1000;
  }
  if (n > 0) render_group(n);
  return out;
}

// Text form: hyphenated tens-unit pairs, otherwise space separated.
inline std::string render_number_text(int64_t n) {
  std::vector<std::string> words = render_words(n);
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) {
      bool tens_unit = std::find(detail::number_tens().begin() + 2, detail::number_tens().end(),
                                 words[i - 1]) != detail::number_tens().end() &&
                       words[i] != "hundred" && words[i] != "thousand";
      out += tens_unit ? '-' : ' ';
    }
    out += words[i];
  }
  return out;
}

struct GoldSlot {
  ValueLabel gold;       // always equals the resolved label
  int placeholder = -1;  // index into the masked value list; -1 when absent
  bool omitted = false;  // value-omission noise fired (expected audit miss)
};

struct GeneratedCorpus {
  Corpus corpus;
  std::vector<std::vector<GoldSlot>> gold;  // parallel to corpus.responses
  size_t expected_missing = 0;              // omission events on Other cases
};

namespace detail {

struct CandyItem {
  const char* plural;
  const char* singular;
};

inline const std::vector<CandyItem>& candy_items() {
  static const std::vector<CandyItem> kItems = {
      {"bags of chocolates", "bag of chocolates"},
      {"giant gummy bears", "giant gummy bear"},
      {"bags of gum sticks", "bag of gum sticks"},
      {"lollipops", "lollipop"},
      {"candy necklaces", "candy necklace"},
      {"chocolate coins", "chocolate coin"},
      {"boxes of jelly beans", "box of jelly beans"},
      {"licorice ropes", "licorice rope"},
      {"peppermint sticks", "peppermint stick"},
      {"caramel cubes", "caramel cube"},
      {"rock candy crystals", "rock candy crystal"},
      {"sour apple rings", "sour apple ring"},
      {"marshmallow twists", "marshmallow twist"},
      {"fudge squares", "fudge square"},
  };
  return kItems;
}

// Largest-remainder apportionment of n cases to the class mix.
inline std::array<size_t, 3> class_counts(size_t n, const GeneratorConfig& c) {
  const double frac[3] = {c.mix_zero, c.mix_one, c.mix_other};
  std::array<size_t, 3> base{};
  std::array<double, 3> rem{};
  size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = static_cast<double>(n) * frac[i];
    base[i] = static_cast<size_t>(exact);
    rem[i] = exact - static_cast<double>(base[i]);
    assigned += base[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (size_t k = 0; assigned < n; ++k, ++assigned) ++base[order[k % 3]];
  return base;
}

// Swaps two adjacent letters; never called on number words.
inline std::string misspell(const std::string& word, Rng& rng) {
  if (word.size() < 4) return word;
  size_t k = 1 + rng.next_below(word.size() - 2);
  std::string out = word;
  std::swap(out[k], out[k + 1]);
  return out;
}

inline std::string maybe_misspell_phrase(const std::string& phrase, double rate, Rng& rng) {
  if (rate <= 0.0) return phrase;
  std::string out;
  size_t start = 0;
  while (start <= phrase.size()) {
    size_t space = phrase.find(' ', start);
    std::string word = phrase.substr(start, space - start);
    if (!word.empty() && rng.next_bool(rate)) word = misspell(word, rng);
    out += word;
    if (space == std::string::npos) break;
    out += ' ';
    start = space + 1;
  }
  return out;
}

}  // namespace detail

// Deterministic corpus generation. Class labels are assigned per slot with
// exact largest-remainder counts, then shuffled, so the achieved mix always
// matches the targets as closely as integer counts allow.
inline GeneratedCorpus generate_corpus(const GeneratorConfig& config) {
  validate_config(config);
  GeneratedCorpus out;
  Rng structure_rng = stage_rng(config.seed, "syngen-prompts");

  const auto& items = detail::candy_items();
  for (size_t pi = 0; pi < config.prompts; ++pi) {
    Prompt prompt;
    prompt.prompt_id = "p" + std::to_string(pi + 1);
    size_t n_slots = static_cast<size_t>(
        structure_rng.next_in(static_cast<int64_t>(config.min_slots),
                              static_cast<int64_t>(config.max_slots)));
    std::vector<size_t> pick(items.size());
    for (size_t i = 0; i < pick.size(); ++i) pick[i] = i;
    structure_rng.shuffle(pick);

    PromptConstraint constraint;
    std::string price_text;
    Rational total(0);
    for (size_t s = 0; s < n_slots; ++s) {
      const auto& item = items[pick[s]];
      SlotSpec slot;
      slot.slot_id = "s" + std::to_string(s + 1);
      slot.name = item.plural;
      slot.question = "How many " + std::string(item.plural) + " did the student buy?";
      prompt.slots.push_back(slot);

      Rational price(structure_rng.next_in(2, 9));
      constraint.coefficients.push_back(price);
      // Budget built from a feasible basket so the constraint always has
      // at least one solution.
      total = total + price * Rational(structure_rng.next_in(1, 5));
      if (!price_text.empty()) price_text += ", ";
      price_text += std::string(item.plural) + " cost $" + price.canonical() + " each";
    }
    constraint.total = total;
    prompt.constraint = constraint;
    prompt.question_text = "You have $" + total.canonical() +
                           " to spend at the candy store. Prices: " + price_text +
                           ". How would you spend exactly $" + total.canonical() + "?";
    out.corpus.prompts.push_back(std::move(prompt));
  }

  for (size_t pi = 0; pi < config.prompts; ++pi) {
    const Prompt& prompt = out.corpus.prompts[pi];
    Rng rng = stage_rng(config.seed, "syngen-responses-" + prompt.prompt_id);
    const size_t n = config.responses_per_prompt;

    // Per-slot class assignment with exact counts.
    std::vector<std::vector<int>> slot_class(prompt.slots.size());
    for (size_t s = 0; s < prompt.slots.size(); ++s) {
      auto counts = detail::class_counts(n, config);
      auto& classes = slot_class[s];
      classes.reserve(n);
      for (int c = 0; c < 3; ++c) classes.insert(classes.end(), counts[c], c);
      rng.shuffle(classes);
    }

    for (size_t ri = 0; ri < n; ++ri) {
      ResponseRecord record;
      record.response_id = prompt.prompt_id + "-r" + std::to_string(ri + 1);
      record.prompt_id = prompt.prompt_id;
      std::vector<GoldSlot> gold(prompt.slots.size());

      static const char* kLeads[] = {"I would buy", "I'd get", "My plan is to buy",
                                     "The student buys"};
      std::string text = kLeads[rng.next_below(4)];
      text += ' ';
      Rational spent(0);
      // Misspelling noise applies to the tail (item words) only; number
      // words and arithmetic stay untouched by construction.
      std::vector<std::string> phrases;
      auto push_phrase = [&](const std::string& number_part, const std::string& tail,
                             const std::string& suffix) {
        std::string p = number_part;
        if (!p.empty()) p += ' ';
        p += detail::maybe_misspell_phrase(tail, config.misspelling, rng);
        p += suffix;
        phrases.push_back(std::move(p));
      };
      for (size_t s = 0; s < prompt.slots.size(); ++s) {
        const auto& item_name = prompt.slots[s].name;
        std::string singular;
        for (const auto& it : detail::candy_items())
          if (item_name == it.plural) singular = it.singular;
        int cls = slot_class[s][ri];
        GoldSlot& g = gold[s];
        if (cls == 0) {
          if (rng.next_bool(0.5)) {
            g.gold = std::nullopt;  // slot simply unmentioned
            continue;
          }
          g.gold = Rational(0);
          switch (rng.next_below(3)) {
            case 0: push_phrase("0", item_name, ""); break;
            case 1: push_phrase("zero", item_name, ""); break;
            default: push_phrase("", "no " + item_name, ""); break;
          }
        } else if (cls == 1) {
          g.gold = Rational(1);
          spent = spent + prompt.constraint->coefficients[s];
          switch (rng.next_below(4)) {
            case 0: push_phrase("1", singular, ""); break;
            case 1: push_phrase("one", singular, ""); break;
            case 2: push_phrase("", "a " + singular, ""); break;
            default: push_phrase("", "a single " + singular, ""); break;
          }
        } else {
          int64_t v = rng.next_bool(0.8) ? rng.next_in(2, 9) : rng.next_in(10, 99);
          g.gold = Rational(v);
          spent = spent + prompt.constraint->coefficients[s] * Rational(v);
          if (config.value_omission > 0.0 && rng.next_bool(config.value_omission)) {
            g.omitted = true;
            push_phrase("", "some " + item_name, "");
          } else {
            std::string number_part;
            size_t surface = rng.next_categorical(
                {config.surface_digit, config.surface_written, config.surface_fraction});
            if (surface == 0) {
              number_part = std::to_string(v);
            } else if (surface == 1) {
              number_part = render_number_text(v);
            } else {
              int64_t k = rng.next_in(2, 4);
              number_part = std::to_string(v * k) + "/" + std::to_string(k);
            }
            std::string suffix;
            if (config.distractor_arithmetic > 0.0 &&
                rng.next_bool(config.distractor_arithmetic)) {
              const Rational& price = prompt.constraint->coefficients[s];
              suffix = " ($" + price.canonical() + " \xC3\x97 " + std::to_string(v) + " = $" +
                       (price * Rational(v)).canonical() + ")";
            }
            push_phrase(number_part, item_name, suffix);
          }
        }
      }

      if (phrases.empty()) {
        text += "nothing at all";
      } else {
        for (size_t k = 0; k < phrases.size(); ++k) {
          if (k > 0) text += phrases.size() > 2 ? ", " : " ";
          if (k + 1 == phrases.size() && phrases.size() > 1) text += "and ";
          text += phrases[k];
        }
      }
      text += ". This combination would total $" + spent.canonical() + ".";
      record.text = text;

      // Gold placeholder indices via re-parse, as a cross-check that the
      // template machinery and the lexer agree.
      MaskedText masked = mask_values(record.text);
      for (size_t s = 0; s < gold.size(); ++s) {
        GoldSlot& g = gold[s];
        if (!g.gold.has_value()) continue;
        for (size_t j = 0; j < masked.values.size(); ++j) {
          if (masked.values[j] == *g.gold) {
            g.placeholder = static_cast<int>(j);
            break;
          }
        }
        if (derive_class_label(g.gold) == ClassLabel::kOther && g.placeholder < 0)
          ++out.expected_missing;
      }

      for (const auto& g : gold) record.labels.push_back({g.gold, g.gold, g.gold});
      out.corpus.responses.push_back(std::move(record));
      out.gold.push_back(std::move(gold));
    }
  }
  return out;
}

// Fills rater1/rater2 by perturbing the resolved (gold) label independently
// per rater at rate/2, so the rater-vs-rater disagreement rate comes out
// near the requested rate. Absent golds are never perturbed; perturbation
// replaces the label with Absent or nudges the value by one.
inline void simulate_raters(Corpus& corpus, double rate, uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw DataError("disagreement rate must be in [0, 1)");
  Rng rng = stage_rng(seed, "rater-sim");
  auto perturb = [&](const ValueLabel& gold) -> ValueLabel {
    if (!gold.has_value() || !rng.next_bool(rate / 2.0)) return gold;
    if (rng.next_bool(0.5)) return std::nullopt;
    Rational v = *gold;
    Rational delta(rng.next_bool(0.5) ? 1 : -1);
    Rational moved = v + delta;
    if (moved < Rational(0)) moved = v + Rational(1);
    return moved;
  };
  for (auto& r : corpus.responses)
    for (auto& slot : r.labels) {
      slot.rater1 = perturb(slot.resolved);
      slot.rater2 = perturb(slot.resolved);
    }
}

}  // namespace vident
