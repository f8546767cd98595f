#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <chrono>
#include <vector>

#include "vident/rng.hpp"
#include "vident/verify.hpp"

using vident::DataError;
using vident::Diagnosis;
using vident::LinearConstraint;
using vident::Rational;
using vident::Verdict;

namespace {

// Independent nested-loop oracle for the candy constraint 7x+3y+5z = 64.
// Written before the enumerator; the enumerator must reproduce it exactly.
std::vector<std::vector<int64_t>> candy_oracle() {
  std::vector<std::vector<int64_t>> out;
  for (int x = 0; x <= 64 / 7; ++x)
    for (int y = 0; y <= 64 / 3; ++y)
      for (int z = 0; z <= 64 / 5; ++z)
        if (7 * x + 3 * y + 5 * z == 64) out.push_back({x, y, z});
  return out;
}

LinearConstraint candy() {
  return LinearConstraint{{Rational(7), Rational(3), Rational(5)}, Rational(64)};
}

}  // namespace

TEST_CASE("candy constraint has exactly 24 solutions") {
  auto oracle = candy_oracle();
  REQUIRE(oracle.size() == 24);

  auto start = std::chrono::steady_clock::now();
  auto solutions = vident::enumerate_solutions(candy());
  auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() < 1000);

  REQUIRE(solutions.size() == 24);
  CHECK(solutions == oracle);  // same set, same lexicographic order

  for (const auto& sol : solutions) {
    std::vector<Rational> values;
    for (int64_t v : sol) values.emplace_back(v);
    CHECK(vident::check_solution(values, candy()).verdict == Verdict::kValid);
  }
}

TEST_CASE("enumerate_solutions matches a nested-loop oracle on random constraints") {
  vident::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int64_t c1 = 1 + static_cast<int64_t>(rng.next_below(9));
    int64_t c2 = 1 + static_cast<int64_t>(rng.next_below(9));
    int64_t c3 = 1 + static_cast<int64_t>(rng.next_below(9));
    int64_t total = static_cast<int64_t>(rng.next_below(41));
    LinearConstraint c{{Rational(c1), Rational(c2), Rational(c3)}, Rational(total)};

    std::vector<std::vector<int64_t>> oracle;
    for (int64_t x = 0; x <= total / c1; ++x)
      for (int64_t y = 0; y <= total / c2; ++y)
        for (int64_t z = 0; z <= total / c3; ++z)
          if (c1 * x + c2 * y + c3 * z == total) oracle.push_back({x, y, z});

    CHECK(vident::enumerate_solutions(c) == oracle);
  }
}

TEST_CASE("enumerate_solutions small cases") {
  CHECK(vident::enumerate_solutions({{Rational(1)}, Rational(0)}) ==
        std::vector<std::vector<int64_t>>{{0}});
  CHECK(vident::enumerate_solutions({{Rational(2)}, Rational(3)}).empty());
  CHECK(vident::enumerate_solutions({{Rational(2)}, Rational(-1)}).empty());
  // Fractional prices work exactly: x/2 = 3/2 has the single solution x=3.
  CHECK(vident::enumerate_solutions({{Rational(1, 2)}, Rational(3, 2)}) ==
        std::vector<std::vector<int64_t>>{{3}});
}

TEST_CASE("enumerate_solutions guards") {
  CHECK_THROWS_AS(vident::enumerate_solutions({{Rational(0)}, Rational(5)}), DataError);
  CHECK_THROWS_AS(vident::enumerate_solutions({{Rational(-2)}, Rational(5)}), DataError);
  CHECK_THROWS_AS(vident::enumerate_solutions({{}, Rational(5)}), DataError);
  // Candidate space beyond the cap is rejected up front.
  LinearConstraint huge{{Rational(1, 100), Rational(1, 100), Rational(1, 100)}, Rational(10000)};
  CHECK_THROWS_AS(vident::enumerate_solutions(huge), DataError);
}

TEST_CASE("check_solution diagnoses the anecdote as overspending") {
  auto d = vident::check_solution({Rational(9), Rational(1), Rational(2)}, candy());
  CHECK(d.verdict == Verdict::kOver);
  CHECK(d.amount == Rational(12));  // 63 + 3 + 10 = 76, which is 12 over
}

TEST_CASE("check_solution verdicts") {
  auto valid = vident::check_solution({Rational(7), Rational(0), Rational(3)}, candy());
  CHECK(valid.verdict == Verdict::kValid);

  auto under = vident::check_solution({Rational(1), Rational(1), Rational(1)}, candy());
  CHECK(under.verdict == Verdict::kUnder);
  CHECK(under.amount == Rational(49));  // 15 spent of 64

  auto frac = vident::check_solution({Rational(1, 2), Rational(0), Rational(0)}, candy());
  CHECK(frac.verdict == Verdict::kNonInteger);
  CHECK(frac.slots == std::vector<size_t>{0});

  auto neg = vident::check_solution({Rational(-1), Rational(22), Rational(1)}, candy());
  CHECK(neg.verdict == Verdict::kNegative);
  CHECK(neg.slots == std::vector<size_t>{0});

  // Domain checks precede the total check, and non-integer wins when a
  // value violates both.
  auto both = vident::check_solution({Rational(-1, 2), Rational(0), Rational(0)}, candy());
  CHECK(both.verdict == Verdict::kNonInteger);

  CHECK_THROWS_AS(vident::check_solution({Rational(1)}, candy()), vident::InternalError);
}

TEST_CASE("check_solution amount is the exact absolute residual") {
  vident::Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    LinearConstraint c{{Rational(1 + static_cast<int64_t>(rng.next_below(9))),
                        Rational(1 + static_cast<int64_t>(rng.next_below(9)))},
                       Rational(static_cast<int64_t>(rng.next_below(50)))};
    std::vector<Rational> v = {Rational(static_cast<int64_t>(rng.next_below(10))),
                               Rational(static_cast<int64_t>(rng.next_below(10)))};
    Rational spent = v[0] * c.coefficients[0] + v[1] * c.coefficients[1];
    auto d = vident::check_solution(v, c);
    if (spent == c.total) {
      CHECK(d.verdict == Verdict::kValid);
    } else if (c.total < spent) {
      CHECK(d.verdict == Verdict::kOver);
      CHECK(d.amount == spent - c.total);
    } else {
      CHECK(d.verdict == Verdict::kUnder);
      CHECK(d.amount == c.total - spent);
    }
  }
}

TEST_CASE("diagnose_fraction") {
  using FV = vident::FractionVerdict;
  CHECK(vident::diagnose_fraction(Rational(1, 2), Rational(1), Rational(2)) == FV::kExact);
  CHECK(vident::diagnose_fraction(Rational(1, 2), Rational(3), Rational(6)) ==
        FV::kEquivalentUnsimplified);
  CHECK(vident::diagnose_fraction(Rational(1, 2), Rational(2), Rational(3)) == FV::kWrongValue);
  CHECK(vident::diagnose_fraction(Rational(1, 2), Rational(1), Rational(0)) ==
        FV::kZeroDenominator);
  // Integers: 4/1 is the canonical pair for 4; 8/2 is unsimplified.
  CHECK(vident::diagnose_fraction(Rational(4), Rational(4), Rational(1)) == FV::kExact);
  CHECK(vident::diagnose_fraction(Rational(4), Rational(8), Rational(2)) ==
        FV::kEquivalentUnsimplified);
  // Negative fractions: canonical sign lives in the numerator.
  CHECK(vident::diagnose_fraction(Rational(-1, 2), Rational(-1), Rational(2)) == FV::kExact);
  CHECK(vident::diagnose_fraction(Rational(-1, 2), Rational(1), Rational(-2)) ==
        FV::kEquivalentUnsimplified);
}
