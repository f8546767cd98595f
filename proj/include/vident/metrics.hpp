#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vident/corpus.hpp"
#include "vident/errors.hpp"
#include "vident/rational.hpp"

// Agreement statistics: Cohen's kappa, one-vs-rest kappas pooled over
// N x V slot cases, exact-match rates, and the evaluation report tables.

namespace vident {

struct KappaResult {
  double kappa = 0.0;
  double p_o = 0.0;
  double p_e = 0.0;
  size_t n_cases = 0;
  bool degenerate = false;  // p_e == 1 (both sequences constant and equal)
};

// Kappa from integer category sequences. The ratio is formed from exact
// integer counts: kappa = (agree*n - sum_c ca_c*cb_c) / (n^2 - sum_c ca_c*cb_c).
inline KappaResult cohen_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw InternalError("cohen_kappa: length mismatch");
  if (a.empty()) throw InternalError("cohen_kappa: empty sequences");
  const size_t n = a.size();

  std::map<int, std::pair<uint64_t, uint64_t>> counts;
  uint64_t agree = 0;
  for (size_t i = 0; i < n; ++i) {
    ++counts[a[i]].first;
    ++counts[b[i]].second;
    if (a[i] == b[i]) ++agree;
  }
  __int128 sum_prod = 0;
  for (const auto& [cat, c] : counts)
    sum_prod += static_cast<__int128>(c.first) * static_cast<__int128>(c.second);
  const __int128 n2 = static_cast<__int128>(n) * static_cast<__int128>(n);

  KappaResult out;
  out.n_cases = n;
  out.p_o = static_cast<double>(agree) / static_cast<double>(n);
  out.p_e = static_cast<double>(sum_prod) / static_cast<double>(n2);
  if (sum_prod == n2) {
    out.degenerate = true;
    out.kappa = agree == n ? 1.0 : 0.0;
    return out;
  }
  const __int128 num = static_cast<__int128>(agree) * static_cast<__int128>(n) - sum_prod;
  const __int128 den = n2 - sum_prod;
  out.kappa = static_cast<double>(num) / static_cast<double>(den);
  return out;
}

struct OneVsRestKappas {
  // Empty entries mean "not applicable": strict mode suppresses every
  // degenerate cell (chance agreement 1), which covers the class-absent
  // case since an absent class makes both binarized sequences all-zero.
  std::optional<KappaResult> k_zero;
  std::optional<KappaResult> k_one;
  std::optional<KappaResult> k_value;
};

inline OneVsRestKappas one_vs_rest_kappas(std::span<const ClassLabel> a,
                                          std::span<const ClassLabel> b, bool strict = false) {
  if (a.size() != b.size()) throw InternalError("one_vs_rest_kappas: length mismatch");
  if (a.empty()) throw InternalError("one_vs_rest_kappas: empty sequences");
  OneVsRestKappas out;
  for (int c = 0; c < 3; ++c) {
    std::vector<int> ba(a.size()), bb(b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      ba[i] = static_cast<int>(a[i]) == c ? 1 : 0;
      bb[i] = static_cast<int>(b[i]) == c ? 1 : 0;
    }
    std::optional<KappaResult> r = cohen_kappa(ba, bb);
    if (strict && r->degenerate) r.reset();
    if (c == 0)
      out.k_zero = r;
    else if (c == 1)
      out.k_one = r;
    else
      out.k_value = r;
  }
  return out;
}

enum class MatchRestriction {
  kNone,          // all pairs count
  kEitherStated,  // keep pairs where at least one side is Stated
  kFirstStated,   // keep pairs where the first (reference) side is Stated
};

struct MatchRate {
  size_t matches = 0;
  size_t cases = 0;
  std::optional<double> rate;  // empty when the restricted set is empty
};

// A pair matches when both sides are Stated with equal Rationals; equal
// values in different spellings compare equal by construction.
inline MatchRate exact_match_rate(std::span<const std::pair<ValueLabel, ValueLabel>> pairs,
                                  MatchRestriction restriction) {
  MatchRate out;
  for (const auto& [ref, other] : pairs) {
    bool keep = true;
    if (restriction == MatchRestriction::kEitherStated)
      keep = ref.has_value() || other.has_value();
    else if (restriction == MatchRestriction::kFirstStated)
      keep = ref.has_value();
    if (!keep) continue;
    ++out.cases;
    if (ref.has_value() && other.has_value() && *ref == *other) ++out.matches;
  }
  if (out.cases > 0)
    out.rate = static_cast<double>(out.matches) / static_cast<double>(out.cases);
  return out;
}

// ---------------------------------------------------------------------------
// Report assembly.

struct EngineOutputs {
  // Value-model ids in report column order (the ensemble is one of them).
  std::vector<std::string> model_ids;
  // response_id -> per-slot predicted class (one shared classifier).
  std::unordered_map<std::string, std::vector<ClassLabel>> classes;
  // model_id -> response_id -> per-slot final engine value.
  std::unordered_map<std::string, std::unordered_map<std::string, std::vector<ValueLabel>>>
      values;
};

struct PromptRow {
  std::string prompt_id;  // "Total" for the pooled row
  size_t n_cases = 0;     // N x V test slot cases
  std::optional<double> irr_k0, irr_k1, irr_kv;
  std::optional<double> irr_p;
  std::optional<double> eng_k0, eng_k1, eng_kv;
  std::vector<std::optional<double>> model_p;  // aligned with model_ids
};

struct SlotRow {
  std::string prompt_id;
  std::string slot_id;
  size_t n_other = 0;  // resolved Other-class test cases
  size_t missing = 0;  // resolved value absent from the masked text
  std::optional<double> irr_p;
  std::vector<std::optional<double>> model_p;  // agreement over the n_other cases
};

struct AgreementReport {
  std::vector<std::string> model_ids;
  std::vector<PromptRow> prompt_rows;  // prompts in corpus order, then Total
  std::vector<SlotRow> slot_rows;
};

namespace detail {

inline std::optional<double> opt_kappa(const std::optional<KappaResult>& r) {
  if (!r) return std::nullopt;
  return r->kappa;
}

struct CaseRefs {
  std::vector<ClassLabel> rater1_class, rater2_class, resolved_class, engine_class;
  std::vector<std::pair<ValueLabel, ValueLabel>> rater_pairs;              // (rater1, rater2)
  std::vector<std::vector<std::pair<ValueLabel, ValueLabel>>> model_pairs;  // per model: (resolved, engine)
};

}  // namespace detail

// Builds the evaluation report over one partition (the test split unless
// told otherwise). Every number in the output is recomputable from the
// corpus, split, and engine outputs.
inline AgreementReport build_report(const Corpus& corpus, const SplitAssignment& split,
                                    const EngineOutputs& engine, bool strict_kappa = false,
                                    Partition partition = Partition::kTest) {
  AgreementReport report;
  report.model_ids = engine.model_ids;
  const size_t m = engine.model_ids.size();

  // Missing engine outputs are a hard error, listed by id.
  std::string missing_ids;
  for (const auto& r : corpus.responses) {
    if (split.at(r.response_id) != partition) continue;
    bool ok = engine.classes.count(r.response_id) > 0;
    for (const auto& id : engine.model_ids) {
      auto it = engine.values.find(id);
      ok = ok && it != engine.values.end() && it->second.count(r.response_id) > 0;
    }
    if (!ok) missing_ids += (missing_ids.empty() ? "" : ", ") + r.response_id;
  }
  if (!missing_ids.empty())
    throw DataError("engine outputs missing for responses: " + missing_ids);

  detail::CaseRefs total;
  total.model_pairs.resize(m);

  auto flush_rows = [&](const std::string& prompt_id, const detail::CaseRefs& cases) {
    PromptRow row;
    row.prompt_id = prompt_id;
    row.n_cases = cases.resolved_class.size();
    if (row.n_cases == 0) return row;
    auto irr = one_vs_rest_kappas(cases.rater1_class, cases.rater2_class, strict_kappa);
    row.irr_k0 = detail::opt_kappa(irr.k_zero);
    row.irr_k1 = detail::opt_kappa(irr.k_one);
    row.irr_kv = detail::opt_kappa(irr.k_value);
    row.irr_p = exact_match_rate(cases.rater_pairs, MatchRestriction::kEitherStated).rate;
    auto eng = one_vs_rest_kappas(cases.resolved_class, cases.engine_class, strict_kappa);
    row.eng_k0 = detail::opt_kappa(eng.k_zero);
    row.eng_k1 = detail::opt_kappa(eng.k_one);
    row.eng_kv = detail::opt_kappa(eng.k_value);
    for (size_t k = 0; k < m; ++k)
      row.model_p.push_back(
          exact_match_rate(cases.model_pairs[k], MatchRestriction::kFirstStated).rate);
    return row;
  };

  for (const auto& p : corpus.prompts) {
    detail::CaseRefs cases;
    cases.model_pairs.resize(m);
    // Per-slot accumulators for the appendix rows.
    std::vector<SlotRow> slot_rows(p.slots.size());
    std::vector<std::vector<std::pair<ValueLabel, ValueLabel>>> slot_rater(p.slots.size());
    std::vector<std::vector<std::vector<std::pair<ValueLabel, ValueLabel>>>> slot_model(
        p.slots.size(), std::vector<std::vector<std::pair<ValueLabel, ValueLabel>>>(m));

    for (const auto& r : corpus.responses) {
      if (r.prompt_id != p.prompt_id || split.at(r.response_id) != partition) continue;
      const auto& classes = engine.classes.at(r.response_id);
      if (classes.size() != p.slots.size())
        throw DataError("engine class count mismatch for response " + r.response_id);
      std::optional<MaskedText> masked;  // lazy; needed only for Other cases
      for (size_t s = 0; s < p.slots.size(); ++s) {
        const SlotLabels& sl = r.labels[s];
        cases.rater1_class.push_back(derive_class_label(sl.rater1));
        cases.rater2_class.push_back(derive_class_label(sl.rater2));
        cases.resolved_class.push_back(derive_class_label(sl.resolved));
        cases.engine_class.push_back(classes[s]);
        cases.rater_pairs.emplace_back(sl.rater1, sl.rater2);
        for (size_t k = 0; k < m; ++k) {
          const auto& vals = engine.values.at(engine.model_ids[k]).at(r.response_id);
          if (vals.size() != p.slots.size())
            throw DataError("engine value count mismatch for response " + r.response_id);
          cases.model_pairs[k].emplace_back(sl.resolved, vals[s]);
        }
        if (derive_class_label(sl.resolved) == ClassLabel::kOther) {
          ++slot_rows[s].n_other;
          if (!masked) masked = mask_values(scan_numbers(r.text));
          bool present = false;
          for (const auto& v : masked->values)
            if (v == *sl.resolved) {
              present = true;
              break;
            }
          if (!present) ++slot_rows[s].missing;
          slot_rater[s].emplace_back(sl.rater1, sl.rater2);
          for (size_t k = 0; k < m; ++k)
            slot_model[s][k].emplace_back(
                sl.resolved, engine.values.at(engine.model_ids[k]).at(r.response_id)[s]);
        }
      }
    }
    if (cases.resolved_class.empty()) continue;
    report.prompt_rows.push_back(flush_rows(p.prompt_id, cases));

    for (size_t s = 0; s < p.slots.size(); ++s) {
      SlotRow& row = slot_rows[s];
      row.prompt_id = p.prompt_id;
      row.slot_id = p.slots[s].slot_id;
      row.irr_p = exact_match_rate(slot_rater[s], MatchRestriction::kNone).rate;
      for (size_t k = 0; k < m; ++k)
        row.model_p.push_back(exact_match_rate(slot_model[s][k], MatchRestriction::kNone).rate);
      report.slot_rows.push_back(std::move(row));
    }

    // Pool into the Total row.
    total.rater1_class.insert(total.rater1_class.end(), cases.rater1_class.begin(),
                              cases.rater1_class.end());
    total.rater2_class.insert(total.rater2_class.end(), cases.rater2_class.begin(),
                              cases.rater2_class.end());
    total.resolved_class.insert(total.resolved_class.end(), cases.resolved_class.begin(),
                                cases.resolved_class.end());
    total.engine_class.insert(total.engine_class.end(), cases.engine_class.begin(),
                              cases.engine_class.end());
    total.rater_pairs.insert(total.rater_pairs.end(), cases.rater_pairs.begin(),
                             cases.rater_pairs.end());
    for (size_t k = 0; k < m; ++k)
      total.model_pairs[k].insert(total.model_pairs[k].end(), cases.model_pairs[k].begin(),
                                  cases.model_pairs[k].end());
  }
  if (!total.resolved_class.empty()) report.prompt_rows.push_back(flush_rows("Total", total));
  return report;
}

namespace detail {

inline std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *v);
  return buf;
}

}  // namespace detail

inline std::string render_report_csv(const AgreementReport& report) {
  std::string out = "prompt_id,n_cases,irr_k0,irr_k1,irr_kv,irr_p,engine_k0,engine_k1,engine_kv";
  for (const auto& id : report.model_ids) out += ",p_" + id;
  out += '\n';
  for (const auto& r : report.prompt_rows) {
    out += r.prompt_id + ',' + std::to_string(r.n_cases) + ',' + detail::cell(r.irr_k0) + ',' +
           detail::cell(r.irr_k1) + ',' + detail::cell(r.irr_kv) + ',' + detail::cell(r.irr_p) +
           ',' + detail::cell(r.eng_k0) + ',' + detail::cell(r.eng_k1) + ',' +
           detail::cell(r.eng_kv);
    for (const auto& p : r.model_p) out += ',' + detail::cell(p);
    out += '\n';
  }
  out += "\nprompt_id,slot_id,n_other,missing,irr_p";
  for (const auto& id : report.model_ids) out += ",p_" + id;
  out += '\n';
  for (const auto& r : report.slot_rows) {
    out += r.prompt_id + ',' + r.slot_id + ',' + std::to_string(r.n_other) + ',' +
           std::to_string(r.missing) + ',' + detail::cell(r.irr_p);
    for (const auto& p : r.model_p) out += ',' + detail::cell(p);
    out += '\n';
  }
  return out;
}

inline std::string render_report_text(const AgreementReport& report) {
  auto pad = [](std::string s, size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  std::string out;
  out += pad("prompt", 10) + pad("cases", 8) + pad("irr_k0", 8) + pad("irr_k1", 8) +
         pad("irr_kv", 8) + pad("irr_p", 8) + pad("eng_k0", 8) + pad("eng_k1", 8) +
         pad("eng_kv", 8);
  for (const auto& id : report.model_ids) out += pad("p_" + id, 12);
  out += '\n';
  for (const auto& r : report.prompt_rows) {
    out += pad(r.prompt_id, 10) + pad(std::to_string(r.n_cases), 8) +
           pad(detail::cell(r.irr_k0), 8) + pad(detail::cell(r.irr_k1), 8) +
           pad(detail::cell(r.irr_kv), 8) + pad(detail::cell(r.irr_p), 8) +
           pad(detail::cell(r.eng_k0), 8) + pad(detail::cell(r.eng_k1), 8) +
           pad(detail::cell(r.eng_kv), 8);
    for (const auto& p : r.model_p) out += pad(detail::cell(p), 12);
    out += '\n';
  }
  out += '\n';
  out += pad("prompt", 10) + pad("slot", 10) + pad("n_other", 9) + pad("missing", 9) +
         pad("irr_p", 8);
  for (const auto& id : report.model_ids) out += pad("p_" + id, 12);
  out += '\n';
  for (const auto& r : report.slot_rows) {
    out += pad(r.prompt_id, 10) + pad(r.slot_id, 10) + pad(std::to_string(r.n_other), 9) +
           pad(std::to_string(r.missing), 9) + pad(detail::cell(r.irr_p), 8);
    for (const auto& p : r.model_p) out += pad(detail::cell(p), 12);
    out += '\n';
  }
  return out;
}

}  // namespace vident
