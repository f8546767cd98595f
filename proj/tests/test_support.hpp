#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <string>

#include "vident/corpus.hpp"
#include "vident/rng.hpp"

// Shared helpers for the test suite: a scratch directory and a small
// hand-rolled candy-store corpus with learnable class and slot signals.

namespace vtest {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("vident_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// Two-slot prompt; every response mentions chocolates, gummy bears, and a
// dollar total that acts as a distractor number.
inline vident::Corpus toy_candy_corpus(size_t n, uint64_t seed) {
  using vident::Rational;
  vident::Corpus c;
  vident::Prompt p;
  p.prompt_id = "candy";
  p.question_text = "You have $20 to spend at the candy store. What would you buy?";
  p.slots.push_back(
      {"s1", "bags of chocolates", "How many bags of chocolates did the student buy?"});
  p.slots.push_back(
      {"s2", "giant gummy bears", "How many giant gummy bears did the student buy?"});
  p.constraint = vident::PromptConstraint{{Rational(2), Rational(3)}, Rational(20)};
  c.prompts.push_back(p);

  vident::Rng rng(seed);
  for (size_t i = 0; i < n; ++i) {
    // Class mix per slot: 0 -> Zero, 1 -> One, 2+ -> Other.
    auto pick = [&](int& cls, int64_t& value) {
      cls = static_cast<int>(rng.next_below(4));
      if (cls >= 2) {
        cls = 2;
        value = static_cast<int64_t>(rng.next_in(2, 9));
      } else {
        value = cls;
      }
    };
    int xc, yc;
    int64_t x, y;
    pick(xc, x);
    pick(yc, y);

    bool x_absent = xc == 0 && rng.next_bool(0.5);
    bool y_absent = yc == 0 && rng.next_bool(0.5);

    auto phrase = [&](int cls, int64_t v, bool absent, const std::string& plural,
                      const std::string& singular) -> std::string {
      if (absent) return "some " + plural;
      if (cls == 0) return (rng.next_bool(0.5) ? std::string("0 ") : std::string("no ")) + plural;
      if (cls == 1)
        return (rng.next_bool(0.5) ? std::string("1 ") : std::string("one ")) + singular;
      return std::to_string(v) + " " + plural;
    };
    std::string xs = phrase(xc, x, x_absent, "bags of chocolates", "bag of chocolates");
    std::string ys = phrase(yc, y, y_absent, "giant gummy bears", "giant gummy bear");
    int64_t total = 2 * x + 3 * y;
    std::string text = "I would buy " + xs + " and " + ys + ". That would cost $" +
                       std::to_string(total) + " in total.";

    // "no bags" and "some bags" carry no digit; the label still records the
    // rating decision (Stated 0 vs Absent).
    vident::ValueLabel xlabel =
        x_absent ? vident::ValueLabel{} : vident::ValueLabel{Rational(x)};
    vident::ValueLabel ylabel =
        y_absent ? vident::ValueLabel{} : vident::ValueLabel{Rational(y)};

    vident::ResponseRecord r;
    r.response_id = "r" + std::to_string(i);
    r.prompt_id = "candy";
    r.text = text;
    r.labels.push_back({xlabel, xlabel, xlabel});
    r.labels.push_back({ylabel, ylabel, ylabel});
    c.responses.push_back(std::move(r));
  }
  return c;
}

}  // namespace vtest
