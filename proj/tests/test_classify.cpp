#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "vident/classify.hpp"

using vident::ClassDistribution;
using vident::ClassifierInput;
using vident::ClassLabel;
using vident::Corpus;
using vident::DataError;
using vident::Rational;

TEST_CASE("classifier input format") {
  auto in = vident::format_classifier_input("How many bags of gum sticks?", "no gum");
  CHECK(in.formatted == "<cls>How many bags of gum sticks?<sep>no gum<sep>");

  auto [q, r] = vident::decode_classifier_input(in);
  CHECK(q == "How many bags of gum sticks?");
  CHECK(r == "no gum");
}

TEST_CASE("classifier input escapes marker tokens by doubling") {
  struct Case {
    std::string question, response;
  };
  std::vector<Case> cases = {
      {"plain", "plain"},
      {"has <sep> inside", "fine"},
      {"fine", "has <cls> inside"},
      {"<sep>", "<cls>"},
      {"double <sep><sep> run", "tail <sep>"},
      {"", ""},
      {"q", "a<cls><sep>b"},
  };
  for (const auto& c : cases) {
    auto in = vident::format_classifier_input(c.question, c.response);
    auto [q, r] = vident::decode_classifier_input(in);
    CHECK(q == c.question);
    CHECK(r == c.response);
  }
  // Literal markers double up in the encoded form.
  auto in = vident::format_classifier_input("a<sep>b", "c");
  CHECK(in.formatted == "<cls>a<sep><sep>b<sep>c<sep>");
}

TEST_CASE("decode rejects malformed inputs") {
  CHECK_THROWS_AS(vident::decode_classifier_input({"no markers at all"}), DataError);
  CHECK_THROWS_AS(vident::decode_classifier_input({"<cls>only question<sep>"}), DataError);
  CHECK_THROWS_AS(vident::decode_classifier_input({"question<sep>response<sep>"}), DataError);
}

TEST_CASE("class distribution tie-break prefers Zero then One") {
  ClassDistribution even;
  even.p = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(even.predicted() == ClassLabel::kZero);

  ClassDistribution pair;
  pair.p = {0.2, 0.4, 0.4};
  CHECK(pair.predicted() == ClassLabel::kOne);

  ClassDistribution clear;
  clear.p = {0.1, 0.2, 0.7};
  CHECK(clear.predicted() == ClassLabel::kOther);
}

namespace {

double classifier_test_accuracy(const Corpus& corpus, const vident::SplitAssignment& split,
                                const vident::ClassifierModel& model) {
  size_t hit = 0, total = 0;
  for (const auto& r : corpus.responses) {
    if (split.at(r.response_id) != vident::Partition::kTest) continue;
    const auto& p = corpus.prompt(r.prompt_id);
    for (size_t s = 0; s < p.slots.size(); ++s) {
      auto in = vident::format_classifier_input(p.slots[s].question, r.text);
      auto dist = vident::predict_class(model, in);
      hit += dist.predicted() == vident::derive_class_label(r.labels[s].resolved) ? 1 : 0;
      ++total;
    }
  }
  REQUIRE(total > 0);
  return static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("classifier learns the toy corpus") {
  Corpus corpus = vtest::toy_candy_corpus(200, 11);
  auto split = vident::split_corpus(corpus, 7);
  auto model = vident::train_baseline_classifier(corpus, split, 99);

  CHECK(model.corpus_id == vident::corpus_fingerprint(corpus));
  CHECK(model.seed == 99);
  CHECK(classifier_test_accuracy(corpus, split, model) >= 0.9);
}

TEST_CASE("predicted distribution sums to one") {
  Corpus corpus = vtest::toy_candy_corpus(80, 3);
  auto split = vident::split_corpus(corpus, 5);
  auto model = vident::train_baseline_classifier(corpus, split, 1);
  for (const auto& r : corpus.responses) {
    auto in = vident::format_classifier_input(corpus.prompts[0].slots[0].question, r.text);
    auto dist = vident::predict_class(model, in);
    double sum = dist.zero() + dist.one() + dist.other();
    CHECK(std::abs(sum - 1.0) < 1e-9);
    for (double p : dist.p) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("classifier training is deterministic in corpus and seed") {
  Corpus corpus = vtest::toy_candy_corpus(100, 4);
  auto split = vident::split_corpus(corpus, 5);
  vtest::TempDir dir;

  auto m1 = vident::train_baseline_classifier(corpus, split, 42);
  auto m2 = vident::train_baseline_classifier(corpus, split, 42);
  vident::save_classifier(m1, dir.file("a.model"));
  vident::save_classifier(m2, dir.file("b.model"));
  CHECK(vident::read_file(dir.file("a.model")) == vident::read_file(dir.file("b.model")));

  auto m3 = vident::train_baseline_classifier(corpus, split, 43);
  vident::save_classifier(m3, dir.file("c.model"));
  CHECK(vident::read_file(dir.file("a.model")) != vident::read_file(dir.file("c.model")));
}

TEST_CASE("classifier round-trips through its file format") {
  Corpus corpus = vtest::toy_candy_corpus(100, 8);
  auto split = vident::split_corpus(corpus, 2);
  auto model = vident::train_baseline_classifier(corpus, split, 7);

  vtest::TempDir dir;
  vident::save_classifier(model, dir.file("clf.model"));
  auto loaded = vident::load_classifier(dir.file("clf.model"));
  CHECK(loaded.corpus_id == model.corpus_id);
  CHECK(loaded.seed == model.seed);

  for (const auto& r : corpus.responses) {
    for (const auto& s : corpus.prompts[0].slots) {
      auto in = vident::format_classifier_input(s.question, r.text);
      auto d1 = vident::predict_class(model, in);
      auto d2 = vident::predict_class(loaded, in);
      for (int c = 0; c < 3; ++c) CHECK(d1.p[c] == d2.p[c]);
    }
  }
}

TEST_CASE("single-class training data is rejected") {
  Corpus c;
  c.prompts.push_back(vident::Prompt{
      "p", "q", {{"s1", "bags", "How many bags?"}}, std::nullopt});
  for (int i = 0; i < 10; ++i) {
    vident::ResponseRecord r;
    r.response_id = "r" + std::to_string(i);
    r.prompt_id = "p";
    r.text = std::to_string(i + 2) + " bags";
    vident::ValueLabel v{Rational(i + 2)};
    r.labels.push_back({v, v, v});
    c.responses.push_back(r);
  }
  auto split = vident::split_corpus(c, 1);
  CHECK_THROWS_AS(vident::train_baseline_classifier(c, split, 1), DataError);
}

TEST_CASE("inverse-frequency weights keep rare classes reachable") {
  // 90% Zero, 10% Other; an unweighted fit would happily answer Zero
  // everywhere, so a correct Other on clean input is evidence the weights
  // took effect.
  Corpus c;
  c.prompts.push_back(vident::Prompt{
      "p", "q", {{"s1", "bags of gum", "How many bags of gum?"}}, std::nullopt});
  for (int i = 0; i < 200; ++i) {
    vident::ResponseRecord r;
    r.response_id = "r" + std::to_string(i);
    r.prompt_id = "p";
    bool other = i % 10 == 0;
    int64_t v = other ? 5 : 0;
    r.text = other ? "I bought 5 bags of gum." : "I bought no bags of gum.";
    vident::ValueLabel lab{Rational(v)};
    r.labels.push_back({lab, lab, lab});
    c.responses.push_back(r);
  }
  auto split = vident::split_corpus(c, 9);
  auto model = vident::train_baseline_classifier(c, split, 3);
  auto in = vident::format_classifier_input("How many bags of gum?", "I bought 7 bags of gum.");
  CHECK(vident::predict_class(model, in).predicted() == ClassLabel::kOther);
}
