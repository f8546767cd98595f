#pragma once

#include <algorithm>
#include <string>
#include <thread>
#include <vector>

#include "vident/classify.hpp"
#include "vident/corpus.hpp"
#include "vident/ensemble.hpp"
#include "vident/identify.hpp"
#include "vident/metrics.hpp"

// End-to-end scoring: classifier decides Zero/One/Other per slot, value
// models pick a placeholder for Other cases, the fitted ensemble combines
// them. Scoring parallelizes over responses into preallocated rows, so the
// outputs are identical for any worker count.

namespace vident {

// The value models feeding the ensemble: baseline identifiers plus any
// imported external score tables.
struct MemberSet {
  std::vector<IdentifierModel> identifiers;
  ExternalScores external;
  std::vector<std::string> external_ids;

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& m : identifiers) out.push_back(m.model_id);
    for (const auto& id : external_ids) out.push_back(id);
    return out;
  }

  size_t size() const { return identifiers.size() + external_ids.size(); }

  // m x n member score matrix for one (response, slot) pair.
  std::vector<std::vector<double>> score(const Prompt& prompt, size_t slot_idx,
                                         const ResponseRecord& response,
                                         const MaskedText& masked) const {
    std::vector<std::vector<double>> rows;
    rows.reserve(size());
    for (const auto& model : identifiers)
      rows.push_back(score_tokens(model, prompt.slots[slot_idx].question, masked).probs);
    for (const auto& id : external_ids) {
      const std::vector<double>* row =
          external.find(response.response_id, prompt.slots[slot_idx].slot_id, id);
      if (!row)
        throw DataError("no imported scores for response '" + response.response_id +
                        "' slot '" + prompt.slots[slot_idx].slot_id + "' model '" + id + "'");
      rows.push_back(*row);
    }
    return rows;
  }
};

// Fits ensemble weights on the dev split: per (prompt, slot) when per_slot
// is set, otherwise one corpus-level fit under the "*" key. Slots with no
// usable dev cases fall back to uniform weights (flagged as defaulted).
inline FittedEnsemble fit_ensemble_weights(const Corpus& corpus, const SplitAssignment& split,
                                           const MemberSet& members, bool per_slot) {
  if (members.size() == 0) throw DataError("ensemble fitting requires at least one member");
  FittedEnsemble out;
  out.member_ids = members.ids();

  struct SlotKey {
    std::string prompt_id, slot_id;
  };
  std::vector<SlotKey> keys;
  std::vector<std::vector<FitCase>> cases;
  auto slot_index = [&](const std::string& prompt_id, const std::string& slot_id) {
    for (size_t i = 0; i < keys.size(); ++i)
      if (keys[i].prompt_id == prompt_id && keys[i].slot_id == slot_id) return i;
    keys.push_back({prompt_id, slot_id});
    cases.emplace_back();
    return keys.size() - 1;
  };
  if (per_slot) {
    for (const auto& p : corpus.prompts)
      for (const auto& s : p.slots) slot_index(p.prompt_id, s.slot_id);
  } else {
    slot_index("*", "*");
  }

  for (const auto& r : corpus.responses) {
    if (split.at(r.response_id) != Partition::kDev) continue;
    const Prompt& p = corpus.prompt(r.prompt_id);
    MaskedText masked = mask_values(r.text);
    if (masked.values.empty()) continue;
    for (size_t s = 0; s < p.slots.size(); ++s) {
      const ValueLabel& resolved = r.labels[s].resolved;
      if (derive_class_label(resolved) != ClassLabel::kOther) continue;
      auto targets = make_training_targets(masked, *resolved);
      if (!targets) continue;
      FitCase c;
      c.member_scores = members.score(p, s, r, masked);
      c.correct.assign(targets->begin(), targets->end());
      size_t idx = per_slot ? slot_index(p.prompt_id, p.slots[s].slot_id) : 0;
      cases[idx].push_back(std::move(c));
    }
  }

  for (size_t i = 0; i < keys.size(); ++i) {
    FitOutcome fit = fit_weights_for_cases(cases[i], members.size());
    out.slots.push_back(
        {keys[i].prompt_id, keys[i].slot_id, fit.weights, fit.accuracy, fit.defaulted});
  }
  return out;
}

// Full engine pass over one partition. Every value model answers every
// slot case: Zero and One come straight from the classifier; Other defers
// to the model's placeholder choice (Absent when the text has no numbers).
inline EngineOutputs run_engine(const Corpus& corpus, const SplitAssignment& split,
                                Partition target, const ClassifierModel& classifier,
                                const MemberSet& members, const FittedEnsemble& ensemble,
                                unsigned workers) {
  if (workers == 0) workers = 1;
  workers = std::min(workers, 64u);

  EngineOutputs out;
  out.model_ids = members.ids();
  out.model_ids.push_back("ensemble");

  std::vector<const ResponseRecord*> targets;
  for (const auto& r : corpus.responses)
    if (split.at(r.response_id) == target) targets.push_back(&r);

  // Preallocated rows keyed by target index make the parallel fill
  // order-independent.
  std::vector<std::vector<ClassLabel>> classes(targets.size());
  std::vector<std::vector<std::vector<ValueLabel>>> values(
      out.model_ids.size(), std::vector<std::vector<ValueLabel>>(targets.size()));

  auto score_response = [&](size_t ti) {
    const ResponseRecord& r = *targets[ti];
    const Prompt& p = corpus.prompt(r.prompt_id);
    MaskedText masked = mask_values(r.text);
    classes[ti].resize(p.slots.size());
    for (auto& v : values) v[ti].resize(p.slots.size());

    for (size_t s = 0; s < p.slots.size(); ++s) {
      ClassifierInput input = format_classifier_input(p.slots[s].question, r.text);
      ClassLabel cls = predict_class(classifier, input).predicted();
      classes[ti][s] = cls;

      if (cls == ClassLabel::kZero) {
        for (auto& v : values) v[ti][s] = Rational(0);
        continue;
      }
      if (cls == ClassLabel::kOne) {
        for (auto& v : values) v[ti][s] = Rational(1);
        continue;
      }
      std::vector<std::vector<double>> member_rows = members.score(p, s, r, masked);
      for (size_t k = 0; k < member_rows.size(); ++k) {
        auto pick = select_value(masked, TokenScores{member_rows[k]});
        values[k][ti][s] = pick ? ValueLabel{pick->value} : ValueLabel{};
      }
      const SlotWeights& w = ensemble.find(p.prompt_id, p.slots[s].slot_id);
      std::vector<TokenScores> member_scores;
      member_scores.reserve(member_rows.size());
      for (auto& row : member_rows) member_scores.push_back(TokenScores{std::move(row)});
      auto pick = select_value(masked, combine_scores(member_scores, w.weights));
      values.back()[ti][s] = pick ? ValueLabel{pick->value} : ValueLabel{};
    }
  };

  if (workers == 1 || targets.size() < 2) {
    for (size_t ti = 0; ti < targets.size(); ++ti) score_response(ti);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (size_t ti = w; ti < targets.size(); ti += workers) score_response(ti);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (size_t ti = 0; ti < targets.size(); ++ti) {
    out.classes[targets[ti]->response_id] = std::move(classes[ti]);
    for (size_t k = 0; k < out.model_ids.size(); ++k)
      out.values[out.model_ids[k]][targets[ti]->response_id] = std::move(values[k][ti]);
  }
  return out;
}

}  // namespace vident
