#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vident/errors.hpp"
#include "vident/rational.hpp"

// Constraint checking for extracted solutions: verdicts with exact amounts,
// misconception diagnostics for fractions, and brute-force enumeration of
// the full solution set.

namespace vident {

struct LinearConstraint {
  std::vector<Rational> coefficients;  // unit prices, all > 0
  Rational total;
};

enum class Verdict { kValid, kOver, kUnder, kNonInteger, kNegative };

struct Diagnosis {
  Verdict verdict = Verdict::kValid;
  Rational amount;            // Over/Under: absolute residual, always > 0
  std::vector<size_t> slots;  // NonInteger/Negative: offending slot indices
};

// Domain violations are reported before any total mismatch; a value that is
// both fractional and negative counts as NonInteger.
inline Diagnosis check_solution(const std::vector<Rational>& values,
                                const LinearConstraint& constraint) {
  if (values.size() != constraint.coefficients.size())
    throw InternalError("check_solution: expected " +
                        std::to_string(constraint.coefficients.size()) + " values, got " +
                        std::to_string(values.size()));
  Diagnosis d;
  for (size_t i = 0; i < values.size(); ++i)
    if (!values[i].is_integer()) d.slots.push_back(i);
  if (!d.slots.empty()) {
    d.verdict = Verdict::kNonInteger;
    return d;
  }
  for (size_t i = 0; i < values.size(); ++i)
    if (values[i] < Rational(0)) d.slots.push_back(i);
  if (!d.slots.empty()) {
    d.verdict = Verdict::kNegative;
    return d;
  }
  Rational spent(0);
  for (size_t i = 0; i < values.size(); ++i) spent = spent + values[i] * constraint.coefficients[i];
  if (spent == constraint.total) {
    d.verdict = Verdict::kValid;
  } else if (constraint.total < spent) {
    d.verdict = Verdict::kOver;
    d.amount = spent - constraint.total;
  } else {
    d.verdict = Verdict::kUnder;
    d.amount = constraint.total - spent;
  }
  return d;
}

// Exhaustive enumeration of non-negative integer solutions, lexicographic.
// The candidate space is bounded up front: beyond 10^7 tuples the search is
// refused instead of left running.
inline std::vector<std::vector<int64_t>> enumerate_solutions(const LinearConstraint& constraint) {
  const size_t k = constraint.coefficients.size();
  if (k == 0) throw DataError("enumerate_solutions: constraint has no coefficients");
  for (const auto& c : constraint.coefficients)
    if (!(Rational(0) < c))
      throw DataError("enumerate_solutions: coefficients must be positive");
  if (constraint.total < Rational(0)) return {};

  // floor(T / c_i) bounds each variable.
  std::vector<int64_t> bounds(k);
  double candidates = 1.0;
  for (size_t i = 0; i < k; ++i) {
    bounds[i] = (constraint.total / constraint.coefficients[i]).floor();
    candidates *= static_cast<double>(bounds[i]) + 1.0;
  }
  if (candidates > 1e7)
    throw DataError("enumerate_solutions: candidate space exceeds 10^7 tuples");

  std::vector<std::vector<int64_t>> out;
  std::vector<int64_t> current(k);
  auto recurse = [&](auto&& self, size_t i, Rational remaining) -> void {
    if (i + 1 == k) {
      // Last coordinate is determined: c_k * v = remaining.
      Rational v = remaining / constraint.coefficients[i];
      if (v.is_integer() && !(v < Rational(0)) && v.numerator() <= bounds[i]) {
        current[i] = v.numerator();
        out.push_back(current);
      }
      return;
    }
    for (int64_t v = 0; v <= bounds[i]; ++v) {
      Rational cost = constraint.coefficients[i] * Rational(v);
      if (remaining < cost) break;
      current[i] = v;
      self(self, i + 1, remaining - cost);
    }
  };
  recurse(recurse, 0, constraint.total);
  return out;
}

enum class FractionVerdict { kExact, kEquivalentUnsimplified, kWrongValue, kZeroDenominator };

// Feedback on a student-written fraction n/d against the expected value:
// the canonical pair is Exact, an equal value in any other clothing is
// EquivalentUnsimplified.
inline FractionVerdict diagnose_fraction(const Rational& expected, const Rational& numerator,
                                         const Rational& denominator) {
  if (denominator == Rational(0)) return FractionVerdict::kZeroDenominator;
  if (numerator / denominator != expected) return FractionVerdict::kWrongValue;
  if (numerator.is_integer() && denominator.is_integer() &&
      numerator.numerator() == expected.numerator() &&
      denominator.numerator() == expected.denominator())
    return FractionVerdict::kExact;
  return FractionVerdict::kEquivalentUnsimplified;
}

}  // namespace vident
