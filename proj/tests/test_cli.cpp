#include <cstdlib>
#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "vident/cli.hpp"

// Drives the real binary (path injected by the build) through std::system,
// so argument parsing, exit codes, and artifact bytes are all tested at the
// process boundary.

using namespace vident;

namespace {

const std::string kBin = VIDENT_CLI_PATH;

int run_cli(const std::string& args, const std::string& stdout_path = "/dev/null") {
  std::string cmd = kBin + " " + args + " >" + stdout_path + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

// One pipeline workspace shared by every CLI test; building it runs the
// binary nine times, which is plenty.
struct Pipeline {
  vtest::TempDir dir;
  std::string ws, cfg;

  Pipeline() {
    ws = dir.file("ws");
    cfg = dir.file("gen.cfg");
    write_file(cfg,
               "seed = 21\n"
               "prompts = 2\n"
               "responses_per_prompt = 240\n"
               "min_slots = 1\n"
               "max_slots = 2\n"
               "rater_disagreement = 0.05\n");
    REQUIRE(run_cli("gen --config " + cfg + " --out " + ws + " --seed 7") == 0);
    REQUIRE(run_cli("normalize --in " + ws) == 0);
    REQUIRE(run_cli("mask --in " + ws) == 0);
    REQUIRE(run_cli("split --in " + ws + " --seed 3") == 0);
    REQUIRE(run_cli("train-classifier --in " + ws + " --seed 5") == 0);
    REQUIRE(run_cli("train-identifier --in " + ws + " --model context --seed 5") == 0);
    REQUIRE(run_cli("train-identifier --in " + ws + " --model structure --seed 5") == 0);
    REQUIRE(run_cli("fit-ensemble --in " + ws) == 0);
    REQUIRE(run_cli("evaluate --in " + ws + " --workers 2") == 0);
  }

  std::string path(const std::string& rel) const { return ws + "/" + rel; }
};

Pipeline& pipeline() {
  static Pipeline p;
  return p;
}

}  // namespace

TEST_CASE("cli: usage errors exit 1 with usage text") {
  vtest::TempDir dir;
  std::string out = dir.file("out.txt");
  REQUIRE(run_cli("frobnicate") == 1);
  REQUIRE(run_cli("") == 1);
  REQUIRE(run_cli("gen") == 1);  // missing required flags
  REQUIRE(run_cli("--help", out) == 0);
  std::string help = read_file(out);
  for (const char* cmd : {"gen", "normalize", "mask", "split", "train-classifier",
                          "train-identifier", "import-scores", "fit-ensemble", "evaluate",
                          "report", "verify", "audit"})
    REQUIRE(help.find(cmd) != std::string::npos);
}

TEST_CASE("cli: data errors exit 2") {
  vtest::TempDir dir;
  REQUIRE(run_cli("report --in " + dir.file(".")) == 2);  // empty workspace
  std::string cfg = dir.file("bad.cfg");
  write_file(cfg, "mix_zero = 2.0\n");
  REQUIRE(run_cli("gen --config " + cfg + " --out " + dir.file("ws")) == 2);
}

TEST_CASE("cli: gen is byte-identical across runs") {
  Pipeline& p = pipeline();
  vtest::TempDir dir;
  std::string ws2 = dir.file("ws2");
  REQUIRE(run_cli("gen --config " + p.cfg + " --out " + ws2 + " --seed 7") == 0);
  REQUIRE(read_file(ws2 + "/corpus.jsonl") == read_file(p.path("corpus.jsonl")));
  REQUIRE(read_file(ws2 + "/prompts.jsonl") == read_file(p.path("prompts.jsonl")));

  // A different seed must change the corpus.
  std::string ws3 = dir.file("ws3");
  REQUIRE(run_cli("gen --config " + p.cfg + " --out " + ws3 + " --seed 8") == 0);
  REQUIRE(read_file(ws3 + "/corpus.jsonl") != read_file(p.path("corpus.jsonl")));
}

TEST_CASE("cli: pipeline artifacts are all present and well formed") {
  Pipeline& p = pipeline();
  for (const char* rel :
       {"prompts.jsonl", "corpus.jsonl", "normalized.jsonl", "masked.jsonl", "splits.csv",
        "models/classifier.model", "models/identifier-context.model",
        "models/identifier-structure.model", "ensemble.csv", "eval/predictions.csv"})
    REQUIRE(std::filesystem::exists(p.path(rel)));

  // The artifacts parse back through the library loaders.
  Corpus corpus = load_corpus(p.path("prompts.jsonl"), p.path("corpus.jsonl"));
  REQUIRE(corpus.responses.size() == 480);
  SplitAssignment split = load_split(p.path("splits.csv"));
  FittedEnsemble fitted = parse_ensemble(read_file(p.path("ensemble.csv")), "ensemble.csv");
  REQUIRE(fitted.member_ids == std::vector<std::string>{"context", "structure"});
  auto pred = cli::detail::parse_predictions(read_file(p.path("eval/predictions.csv")), corpus,
                                             "predictions.csv");
  REQUIRE(pred.partition == Partition::kTest);
  REQUIRE(pred.outputs.model_ids ==
          std::vector<std::string>{"context", "structure", "ensemble"});
}

TEST_CASE("cli: report renders both tables and prints the text form") {
  Pipeline& p = pipeline();
  vtest::TempDir dir;
  std::string out = dir.file("report.txt");
  REQUIRE(run_cli("report --in " + p.ws, out) == 0);
  std::string text = read_file(out);
  REQUIRE(text.find("irr_k0") != std::string::npos);
  REQUIRE(text.find("p_ensemble") != std::string::npos);
  REQUIRE(text.find("Total") != std::string::npos);
  REQUIRE(read_file(p.path("reports/agreement.txt")) == text);
  std::string csv = read_file(p.path("reports/agreement.csv"));
  REQUIRE(csv.find("prompt_id,n_cases,irr_k0") != std::string::npos);
}

TEST_CASE("cli: audit prints the bound table") {
  Pipeline& p = pipeline();
  vtest::TempDir dir;
  std::string out = dir.file("audit.txt");
  REQUIRE(run_cli("audit --in " + p.ws, out) == 0);
  std::string text = read_file(out);
  REQUIRE(text.rfind("#vident-audit v1\nprompt_id,slot_id,n_other,missing,bound\n", 0) == 0);
  REQUIRE(read_file(p.path("reports/audit.csv")) == text);
}

TEST_CASE("cli: verify reproduces the candy verdicts") {
  vtest::TempDir dir;
  std::string ws = dir.file("ws");
  std::filesystem::create_directories(ws);
  Prompt candy;
  candy.prompt_id = "p1";
  candy.question_text = "Spend exactly $64.";
  candy.slots = {{"s1", "gum", "How many bags of gum?"},
                 {"s2", "candy bars", "How many candy bars?"},
                 {"s3", "lollipops", "How many lollipops?"}};
  candy.constraint = PromptConstraint{{Rational(7), Rational(3), Rational(5)}, Rational(64)};
  save_prompts({candy}, ws + "/prompts.jsonl");

  std::string out = dir.file("verdict.txt");
  REQUIRE(run_cli("verify --in " + ws + " --prompt p1 --values 9,1,2", out) == 0);
  REQUIRE(read_file(out) == "Over(12)\n");
  REQUIRE(run_cli("verify --in " + ws + " --prompt p1 --values 7,0,3", out) == 0);
  REQUIRE(read_file(out) == "Valid\n");
  REQUIRE(run_cli("verify --in " + ws + " --prompt p1 --values 1,2,3/2", out) == 0);
  REQUIRE(read_file(out) == "NonInteger(s3)\n");
  REQUIRE(run_cli("verify --in " + ws + " --prompt p1 --values -1,20,2", out) == 0);
  REQUIRE(read_file(out) == "Negative(s1)\n");
  REQUIRE(run_cli("verify --in " + ws + " --prompt p1 --values 1,1", out) == 2);
  REQUIRE(run_cli("verify --in " + ws + " --prompt p1") == 1);  // neither values nor enumerate

  REQUIRE(run_cli("verify --in " + ws + " --prompt p1 --enumerate", out) == 0);
  auto lines = split_lines(read_file(out));
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  REQUIRE(lines.size() == 24);
  REQUIRE(lines[0] == "0,3,11");
}

TEST_CASE("cli: import-scores canonicalizes an external score file") {
  Pipeline& p = pipeline();
  Corpus corpus = load_corpus(p.path("prompts.jsonl"), p.path("corpus.jsonl"));
  // Score every placeholder-bearing response uniformly under model "ext".
  std::string raw(kScoresHeader);
  raw += '\n';
  size_t rows = 0;
  for (const auto& r : corpus.responses) {
    MaskedText masked = mask_values(r.text);
    if (masked.values.empty()) continue;
    const Prompt& prompt = corpus.prompt(r.prompt_id);
    for (const auto& slot : prompt.slots) {
      raw += r.response_id + ',' + slot.slot_id + ",ext";
      for (size_t i = 0; i < masked.values.size(); ++i) raw += ",0.5";
      raw += '\n';
      ++rows;
    }
  }
  REQUIRE(rows > 0);
  vtest::TempDir dir;
  std::string raw_path = dir.file("ext.csv");
  write_file(raw_path, raw);
  REQUIRE(run_cli("import-scores --in " + p.ws + " --scores " + raw_path) == 0);
  ExternalScores imported = import_external_scores(read_file(p.path("scores/external.csv")),
                                                   corpus, "external.csv");
  REQUIRE(imported.rows.size() == rows);

  // With the scores in place the ensemble refits over three members and
  // evaluate emits predictions for the extra model.
  REQUIRE(run_cli("fit-ensemble --in " + p.ws) == 0);
  REQUIRE(run_cli("evaluate --in " + p.ws) == 0);
  auto pred = cli::detail::parse_predictions(read_file(p.path("eval/predictions.csv")), corpus,
                                             "predictions.csv");
  REQUIRE(pred.outputs.model_ids ==
          std::vector<std::string>{"context", "structure", "ext", "ensemble"});

  // Put the workspace back in its two-member state for later tests.
  std::filesystem::remove(p.path("scores/external.csv"));
  REQUIRE(run_cli("fit-ensemble --in " + p.ws) == 0);
  REQUIRE(run_cli("evaluate --in " + p.ws + " --workers 2") == 0);
}

TEST_CASE("cli: evaluate output is worker-count independent") {
  Pipeline& p = pipeline();
  std::string baseline = read_file(p.path("eval/predictions.csv"));
  REQUIRE(run_cli("evaluate --in " + p.ws + " --workers 7") == 0);
  REQUIRE(read_file(p.path("eval/predictions.csv")) == baseline);
  REQUIRE(run_cli("evaluate --in " + p.ws + " --workers 1") == 0);
  REQUIRE(read_file(p.path("eval/predictions.csv")) == baseline);
}

TEST_CASE("cli: every command leaves a replayable manifest") {
  Pipeline& p = pipeline();
  for (const char* cmd :
       {"gen", "normalize", "mask", "split", "train-classifier", "train-identifier-context",
        "train-identifier-structure", "fit-ensemble", "evaluate"}) {
    RunManifest m = load_manifest(p.path("manifests/" + std::string(cmd) + ".json"));
    REQUIRE_FALSE(m.argv.empty());
    for (const auto& [path, checksum] : m.inputs) REQUIRE(file_checksum(path) == checksum);

    // Replay: re-run the recorded argv and compare artifact checksums.
    std::string args;
    for (const auto& a : m.argv) args += a + " ";
    REQUIRE(run_cli(args) == 0);
    for (const auto& [path, checksum] : m.outputs) {
      INFO(cmd << " output " << path);
      REQUIRE(file_checksum(path) == checksum);
    }
  }
}

TEST_CASE("cli: evaluate replay is bit-exact under a different worker count") {
  Pipeline& p = pipeline();
  RunManifest m = load_manifest(p.path("manifests/evaluate.json"));
  std::string args;
  bool next_is_workers = false;
  for (const auto& a : m.argv) {
    std::string arg = a;
    if (next_is_workers) arg = "5";
    next_is_workers = a == "--workers";
    args += arg + " ";
  }
  REQUIRE(run_cli(args) == 0);
  for (const auto& [path, checksum] : m.outputs) REQUIRE(file_checksum(path) == checksum);
}
