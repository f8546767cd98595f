#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "vident/engine.hpp"

using namespace vident;

namespace {

struct Fixture {
  Corpus corpus;
  SplitAssignment split;
  ClassifierModel classifier;
  MemberSet members;
  FittedEnsemble ensemble;
};

Fixture make_fixture(size_t n = 240, uint64_t seed = 5) {
  Fixture f;
  f.corpus = vtest::toy_candy_corpus(n, seed);
  f.split = split_corpus(f.corpus, 7);
  f.classifier = train_baseline_classifier(f.corpus, f.split, 31);
  f.members.identifiers.push_back(train_baseline_identifier(f.corpus, f.split, "context", 31));
  f.members.identifiers.push_back(train_baseline_identifier(f.corpus, f.split, "structure", 31));
  f.ensemble = fit_ensemble_weights(f.corpus, f.split, f.members, true);
  return f;
}

bool outputs_equal(const EngineOutputs& a, const EngineOutputs& b) {
  if (a.model_ids != b.model_ids) return false;
  if (a.classes.size() != b.classes.size()) return false;
  for (const auto& [id, row] : a.classes) {
    auto it = b.classes.find(id);
    if (it == b.classes.end() || it->second != row) return false;
  }
  if (a.values.size() != b.values.size()) return false;
  for (const auto& [model, rows] : a.values) {
    auto mit = b.values.find(model);
    if (mit == b.values.end() || mit->second.size() != rows.size()) return false;
    for (const auto& [id, row] : rows) {
      auto it = mit->second.find(id);
      if (it == mit->second.end() || it->second != row) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("fit_ensemble_weights covers every slot") {
  Fixture f = make_fixture();
  REQUIRE(f.ensemble.member_ids == std::vector<std::string>{"context", "structure"});
  REQUIRE(f.ensemble.slots.size() == 2);
  for (const auto& s : f.ensemble.slots) {
    REQUIRE(s.prompt_id == "candy");
    REQUIRE((s.slot_id == "s1" || s.slot_id == "s2"));
    REQUIRE(s.weights.alphas.size() == 2);
    check_simplex(s.weights);
  }
}

TEST_CASE("fit_ensemble_weights global mode produces one row") {
  Fixture f = make_fixture();
  FittedEnsemble global = fit_ensemble_weights(f.corpus, f.split, f.members, false);
  REQUIRE(global.slots.size() == 1);
  REQUIRE(global.slots[0].prompt_id == "*");
  REQUIRE(global.slots[0].slot_id == "*");
  // Any concrete slot resolves through the fallback row.
  REQUIRE(&global.find("candy", "s1") == &global.slots[0]);
}

TEST_CASE("fit_ensemble_weights with no members is an error") {
  Fixture f = make_fixture(60);
  MemberSet empty;
  REQUIRE_THROWS_AS(fit_ensemble_weights(f.corpus, f.split, empty, true), DataError);
}

TEST_CASE("run_engine output shape and value assembly") {
  Fixture f = make_fixture();
  EngineOutputs out = run_engine(f.corpus, f.split, Partition::kTest, f.classifier, f.members,
                                 f.ensemble, 1);
  REQUIRE(out.model_ids == std::vector<std::string>{"context", "structure", "ensemble"});

  size_t n_test = 0;
  for (const auto& r : f.corpus.responses) {
    if (f.split.at(r.response_id) != Partition::kTest) continue;
    ++n_test;
    auto cit = out.classes.find(r.response_id);
    REQUIRE(cit != out.classes.end());
    REQUIRE(cit->second.size() == 2);
    for (const auto& model : out.model_ids) {
      const auto& row = out.values.at(model).at(r.response_id);
      REQUIRE(row.size() == 2);
      for (size_t s = 0; s < 2; ++s) {
        // Class Zero and One fix the value outright; Other may be Absent
        // when no number survives in the text.
        if (cit->second[s] == ClassLabel::kZero) {
          REQUIRE(row[s] == ValueLabel{Rational(0)});
        } else if (cit->second[s] == ClassLabel::kOne) {
          REQUIRE(row[s] == ValueLabel{Rational(1)});
        } else if (row[s].has_value()) {
          REQUIRE(row[s]->denominator() == 1);
        }
      }
    }
  }
  REQUIRE(n_test > 0);
  REQUIRE(out.classes.size() == n_test);
}

TEST_CASE("run_engine outputs feed build_report") {
  Fixture f = make_fixture();
  EngineOutputs out = run_engine(f.corpus, f.split, Partition::kTest, f.classifier, f.members,
                                 f.ensemble, 1);
  AgreementReport report = build_report(f.corpus, f.split, out);
  REQUIRE(report.model_ids == out.model_ids);
  REQUIRE(report.prompt_rows.size() == 2);  // candy + Total
  REQUIRE(report.prompt_rows.back().prompt_id == "Total");
  // On a clean toy corpus the trained engine should be decently accurate.
  REQUIRE(report.slot_rows.size() == 2);
  size_t ens = out.model_ids.size() - 1;
  for (const auto& row : report.slot_rows) {
    REQUIRE(row.model_p.size() == out.model_ids.size());
    REQUIRE(row.model_p[ens].has_value());
    REQUIRE(*row.model_p[ens] >= 0.8);
  }
}

TEST_CASE("run_engine is worker-count independent") {
  Fixture f = make_fixture();
  EngineOutputs one = run_engine(f.corpus, f.split, Partition::kTest, f.classifier, f.members,
                                 f.ensemble, 1);
  EngineOutputs four = run_engine(f.corpus, f.split, Partition::kTest, f.classifier, f.members,
                                  f.ensemble, 4);
  EngineOutputs nine = run_engine(f.corpus, f.split, Partition::kTest, f.classifier, f.members,
                                  f.ensemble, 9);
  REQUIRE(outputs_equal(one, four));
  REQUIRE(outputs_equal(one, nine));
}

TEST_CASE("run_engine requires external scores to cover the partition") {
  Fixture f = make_fixture(120);
  f.members.external_ids.push_back("ext1");  // no rows imported
  REQUIRE_THROWS_AS(run_engine(f.corpus, f.split, Partition::kTest, f.classifier, f.members,
                               f.ensemble, 1),
                    DataError);
}

TEST_CASE("external member rows join the ensemble") {
  Fixture f = make_fixture(160, 9);
  // Synthesize a perfect external model: probability 1 on placeholders
  // whose value matches the resolved label, uniform elsewhere.
  std::string text = std::string(kScoresHeader) + "\n";
  for (const auto& r : f.corpus.responses) {
    MaskedText masked = mask_values(r.text);
    if (masked.values.empty()) continue;
    const Prompt& p = f.corpus.prompt(r.prompt_id);
    for (size_t s = 0; s < p.slots.size(); ++s) {
      text += r.response_id + "," + p.slots[s].slot_id + ",oracle";
      for (size_t i = 0; i < masked.values.size(); ++i) {
        bool hit = r.labels[s].resolved.has_value() &&
                   masked.values[i] == *r.labels[s].resolved;
        text += hit ? ",1" : ",0.001";
      }
      text += "\n";
    }
  }
  f.members.external = import_external_scores(text, f.corpus, "inline");
  f.members.external_ids.push_back("oracle");

  FittedEnsemble fitted = fit_ensemble_weights(f.corpus, f.split, f.members, true);
  REQUIRE(fitted.member_ids.size() == 3);
  EngineOutputs out = run_engine(f.corpus, f.split, Partition::kTest, f.classifier, f.members,
                                 fitted, 2);
  REQUIRE(out.model_ids.back() == "ensemble");
  REQUIRE(out.values.count("oracle") == 1);

  // The oracle member dominates dev accuracy, so fitted weights should
  // never do worse than the weaker baselines on dev cases.
  for (const auto& s : fitted.slots) REQUIRE(s.dev_accuracy >= 0.9);
}
