#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vident/corpus.hpp"
#include "vident/engine.hpp"
#include "vident/manifest.hpp"
#include "vident/metrics.hpp"
#include "vident/syngen.hpp"
#include "vident/verify.hpp"

// Command-line surface. Every subcommand works against a workspace
// directory and emits a manifest recording arguments, seeds, and the
// checksum of every file it read or wrote, so any stage can be replayed
// and checked bit for bit.
//
// Workspace layout:
//   prompts.jsonl, corpus.jsonl        gen
//   normalized.jsonl, masked.jsonl     normalize, mask
//   splits.csv                         split
//   models/classifier.model            train-classifier
//   models/identifier-<id>.model       train-identifier
//   scores/external.csv                import-scores
//   ensemble.csv                       fit-ensemble
//   eval/predictions.csv               evaluate
//   reports/agreement.{csv,txt}        report
//   reports/audit.csv                  audit
//   manifests/<command>.json           every command

namespace vident::cli {

// Wrong invocation shape discovered after flag parsing (exit 1, like any
// other usage error).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

namespace fs = std::filesystem;

inline std::string ws_path(const std::string& ws, const std::string& rel) {
  return (fs::path(ws) / rel).string();
}

// Tracks manifest contents as files are touched. in() must wrap every read
// path and out() every written one, or replay verification has blind spots.
struct Recorder {
  RunManifest manifest;

  Recorder(std::string command, std::vector<std::string> argv) {
    manifest.command = std::move(command);
    manifest.argv = std::move(argv);
  }

  std::string in(const std::string& path) {
    manifest.inputs.emplace_back(path, file_checksum(path));
    return path;
  }

  void out(const std::string& path) { manifest.outputs.emplace_back(path, file_checksum(path)); }

  // name overrides the manifest filename when one command can run several
  // times per workspace (train-identifier per model id).
  void save(const std::string& ws, const std::string& name = "") {
    manifest.timestamp = utc_timestamp();
    fs::create_directories(fs::path(ws) / "manifests");
    save_manifest(manifest,
                  ws_path(ws, "manifests/" + (name.empty() ? manifest.command : name) + ".json"));
  }
};

inline Corpus load_ws_corpus(const std::string& ws, Recorder& rec) {
  return load_corpus(rec.in(ws_path(ws, "prompts.jsonl")), rec.in(ws_path(ws, "corpus.jsonl")));
}

inline SplitAssignment load_ws_split(const std::string& ws, Recorder& rec) {
  return load_split(rec.in(ws_path(ws, "splits.csv")));
}

// Baseline identifiers, plus any imported external scores sitting in the
// workspace. Member order is fixed: identifiers first, then external model
// ids in sorted order.
inline MemberSet load_members(const std::string& ws, const Corpus& corpus, Recorder& rec) {
  MemberSet members;
  for (const char* id : {"context", "structure"})
    members.identifiers.push_back(
        load_identifier(rec.in(ws_path(ws, std::string("models/identifier-") + id + ".model"))));
  std::string scores_path = ws_path(ws, "scores/external.csv");
  if (fs::exists(scores_path)) {
    members.external = import_external_scores(read_file(rec.in(scores_path)), corpus, scores_path);
    for (const auto& [key, probs] : members.external.rows)
      members.external_ids.push_back(std::get<2>(key));
    std::sort(members.external_ids.begin(), members.external_ids.end());
    members.external_ids.erase(
        std::unique(members.external_ids.begin(), members.external_ids.end()),
        members.external_ids.end());
  }
  return members;
}

inline Partition parse_partition(const std::string& name) {
  if (name == "train") return Partition::kTrain;
  if (name == "dev") return Partition::kDev;
  if (name == "test") return Partition::kTest;
  throw DataError("unknown split '" + name + "'");
}

inline constexpr std::string_view kPredictionsHeader = "#vident-predictions v1";

inline std::string serialize_predictions(const Corpus& corpus, const SplitAssignment& split,
                                         Partition partition, const EngineOutputs& outputs) {
  std::string out(kPredictionsHeader);
  out += "\nsplit,";
  out += partition_name(partition);
  out += "\nmodels";
  for (const auto& id : outputs.model_ids) out += "," + id;
  out += "\nresponse_id,slot_id,class,model_id,value\n";
  for (const auto& r : corpus.responses) {
    if (split.at(r.response_id) != partition) continue;
    const Prompt& p = corpus.prompt(r.prompt_id);
    const auto& classes = outputs.classes.at(r.response_id);
    for (size_t s = 0; s < p.slots.size(); ++s) {
      for (const auto& id : outputs.model_ids) {
        out += r.response_id + ',' + p.slots[s].slot_id + ',' + class_name(classes[s]) + ',' + id +
               ',' + vident::detail::label_text(outputs.values.at(id).at(r.response_id)[s]) + '\n';
      }
    }
  }
  return out;
}

struct ParsedPredictions {
  Partition partition = Partition::kTest;
  EngineOutputs outputs;
};

inline ParsedPredictions parse_predictions(const std::string& text, const Corpus& corpus,
                                           const std::string& path) {
  auto lines = split_lines(text);
  if (lines.size() < 4 || lines[0] != kPredictionsHeader)
    throw DataError(path + ": missing predictions header");
  ParsedPredictions out;
  if (lines[1].rfind("split,", 0) != 0) throw DataError(path + ":2: expected split line");
  out.partition = parse_partition(lines[1].substr(6));
  if (lines[2].rfind("models,", 0) != 0) throw DataError(path + ":3: expected models line");
  if (lines[3] != "response_id,slot_id,class,model_id,value")
    throw DataError(path + ":4: unexpected column header");
  {
    std::string rest = lines[2].substr(7);
    size_t pos = 0;
    while (true) {
      size_t comma = rest.find(',', pos);
      out.outputs.model_ids.push_back(rest.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }

  std::map<std::string, const ResponseRecord*> by_id;
  for (const auto& r : corpus.responses) by_id[r.response_id] = &r;
  std::map<std::string, size_t> model_index;
  for (size_t k = 0; k < out.outputs.model_ids.size(); ++k)
    model_index[out.outputs.model_ids[k]] = k;
  // Which (response, slot) cases already carry a class, for the
  // one-class-per-case consistency check.
  std::map<std::string, std::vector<char>> class_seen;

  for (size_t i = 4; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path + ":" + std::to_string(i + 1);
    std::vector<std::string> f;
    size_t pos = 0;
    while (true) {
      size_t comma = lines[i].find(',', pos);
      f.push_back(lines[i].substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 5) throw DataError(where + ": expected 5 fields");
    auto rit = by_id.find(f[0]);
    if (rit == by_id.end()) throw DataError(where + ": unknown response '" + f[0] + "'");
    const Prompt& p = corpus.prompt(rit->second->prompt_id);
    size_t slot = p.slots.size();
    for (size_t s = 0; s < p.slots.size(); ++s)
      if (p.slots[s].slot_id == f[1]) slot = s;
    if (slot == p.slots.size()) throw DataError(where + ": unknown slot '" + f[1] + "'");
    ClassLabel cls;
    if (f[2] == "Zero")
      cls = ClassLabel::kZero;
    else if (f[2] == "One")
      cls = ClassLabel::kOne;
    else if (f[2] == "Other")
      cls = ClassLabel::kOther;
    else
      throw DataError(where + ": unknown class '" + f[2] + "'");
    auto mit = model_index.find(f[3]);
    if (mit == model_index.end()) throw DataError(where + ": unknown model '" + f[3] + "'");
    ValueLabel value;
    if (!f[4].empty()) {
      auto v = parse_rational(f[4]);
      if (!v) throw DataError(where + ": bad value '" + f[4] + "'");
      value = *v;
    }

    auto& classes = out.outputs.classes[f[0]];
    if (classes.empty()) classes.assign(p.slots.size(), ClassLabel::kZero);
    auto& seen = class_seen[f[0]];
    if (seen.empty()) seen.assign(p.slots.size(), 0);
    // The class column is shared by every model row of a case; enforce it.
    if (seen[slot] && classes[slot] != cls)
      throw DataError(where + ": class disagrees with an earlier row for this case");
    classes[slot] = cls;
    seen[slot] = 1;

    auto& rows = out.outputs.values[f[3]][f[0]];
    if (rows.empty()) rows.assign(p.slots.size(), ValueLabel{});
    rows[slot] = value;
  }
  return out;
}

inline std::string render_verdict(const Diagnosis& d, const Prompt& prompt) {
  auto slot_list = [&]() {
    std::string s;
    for (size_t i : d.slots) {
      if (!s.empty()) s += ",";
      s += prompt.slots[i].slot_id;
    }
    return s;
  };
  switch (d.verdict) {
    case Verdict::kValid: return "Valid";
    case Verdict::kOver: return "Over(" + d.amount.canonical() + ")";
    case Verdict::kUnder: return "Under(" + d.amount.canonical() + ")";
    case Verdict::kNonInteger: return "NonInteger(" + slot_list() + ")";
    default: return "Negative(" + slot_list() + ")";
  }
}

inline std::vector<Rational> parse_values_list(const std::string& text) {
  std::vector<Rational> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    std::string field =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    auto v = parse_rational(field);
    if (!v) throw DataError("bad value '" + field + "' in --values");
    out.push_back(*v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline constexpr std::string_view kAuditHeader = "#vident-audit v1";

inline std::string serialize_audit(const std::vector<SlotAudit>& audits) {
  std::string out(kAuditHeader);
  out += "\nprompt_id,slot_id,n_other,missing,bound\n";
  for (const auto& a : audits) {
    out += a.prompt_id + ',' + a.slot_id + ',' + std::to_string(a.n_other) + ',' +
           std::to_string(a.missing) + ',';
    out += a.bound ? vident::detail::double_text(*a.bound) : std::string("-");
    out += '\n';
  }
  return out;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  using detail::Recorder;
  using detail::ws_path;
  namespace fs = std::filesystem;

  CLI::App app{"value identification pipeline for math short answers"};
  app.require_subcommand(1);

  std::string ws, config_path, out_path, scores_path, model_id, split_name = "test";
  std::string prompt_id, values_text;
  uint64_t seed = 1, rater_seed = 0;
  unsigned workers = 1;
  bool per_slot = true, strict_kappa = false, enumerate = false;

  auto* gen = app.add_subcommand("gen", "generate a synthetic labeled corpus");
  gen->add_option("--config", config_path, "generator config file")
      ->required()
      ->check(CLI::ExistingFile);
  gen->add_option("--out", ws, "workspace directory to create")->required();
  auto* gen_seed = gen->add_option("--seed,--seed-gen", seed, "generation seed");
  auto* gen_rater_seed =
      gen->add_option("--seed-raters", rater_seed, "rater simulation seed (default: --seed)");

  auto* normalize = app.add_subcommand("normalize", "annotate numeric quantities in responses");
  normalize->add_option("--in", ws, "workspace directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  auto* normalize_out = normalize->add_option("--out", out_path, "output path");

  auto* mask = app.add_subcommand("mask", "mask numeric quantities in responses");
  mask->add_option("--in", ws, "workspace directory")->required()->check(CLI::ExistingDirectory);
  auto* mask_out = mask->add_option("--out", out_path, "output path");

  auto* split_cmd = app.add_subcommand("split", "assign responses to train/dev/test");
  split_cmd->add_option("--in", ws, "workspace directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  split_cmd->add_option("--seed,--seed-split", seed, "split seed");

  auto* train_cls = app.add_subcommand("train-classifier", "train the 0/1/v classifier");
  train_cls->add_option("--in", ws, "workspace directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  train_cls->add_option("--seed,--seed-train", seed, "training seed");

  auto* train_id = app.add_subcommand("train-identifier", "train a value identification model");
  train_id->add_option("--in", ws, "workspace directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  train_id->add_option("--model", model_id, "identifier config: context or structure")
      ->required()
      ->check(CLI::IsMember({"context", "structure"}));
  train_id->add_option("--seed,--seed-train", seed, "training seed");

  auto* import_cmd = app.add_subcommand("import-scores", "validate and import external scores");
  import_cmd->add_option("--in", ws, "workspace directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  import_cmd->add_option("--scores", scores_path, "score file to import")
      ->required()
      ->check(CLI::ExistingFile);

  auto* fit = app.add_subcommand("fit-ensemble", "fit convex ensemble weights on the dev split");
  fit->add_option("--in", ws, "workspace directory")->required()->check(CLI::ExistingDirectory);
  fit->add_flag("--per-slot-ensemble,!--no-per-slot-ensemble", per_slot,
                "fit one weight vector per slot (default on)");

  auto* evaluate = app.add_subcommand("evaluate", "run the engine over one split");
  evaluate->add_option("--in", ws, "workspace directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  evaluate->add_option("--split", split_name, "partition to score (default test)")
      ->check(CLI::IsMember({"train", "dev", "test"}));
  evaluate->add_option("--workers", workers, "parallel scoring workers")
      ->check(CLI::Range(1u, 64u));

  auto* report = app.add_subcommand("report", "agreement tables from saved predictions");
  report->add_option("--in", ws, "workspace directory")->required()->check(CLI::ExistingDirectory);
  report->add_flag("--strict-kappa", strict_kappa,
                   "render degenerate kappas as '-' instead of 1.000");

  auto* verify = app.add_subcommand("verify", "check values against a prompt constraint");
  verify->add_option("--in", ws, "workspace directory")->required()->check(CLI::ExistingDirectory);
  verify->add_option("--prompt", prompt_id, "prompt id")->required();
  verify->add_option("--values", values_text, "comma-separated slot values");
  verify->add_flag("--enumerate", enumerate, "list all valid integer solutions");

  auto* audit = app.add_subcommand("audit", "per-slot identification accuracy bounds");
  audit->add_option("--in", ws, "workspace directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (gen->parsed()) {
      Recorder rec("gen", args);
      GeneratorConfig cfg = parse_generator_config(read_file(rec.in(config_path)), config_path);
      rec.manifest.config_path = config_path;
      if (gen_seed->count()) cfg.seed = seed;
      uint64_t rs = gen_rater_seed->count() ? rater_seed : cfg.seed;
      rec.manifest.seeds["gen"] = cfg.seed;
      rec.manifest.seeds["raters"] = rs;
      GeneratedCorpus out = generate_corpus(cfg);
      simulate_raters(out.corpus, cfg.rater_disagreement, rs);
      fs::create_directories(ws);
      save_corpus(out.corpus, ws_path(ws, "prompts.jsonl"), ws_path(ws, "corpus.jsonl"));
      rec.out(ws_path(ws, "prompts.jsonl"));
      rec.out(ws_path(ws, "corpus.jsonl"));
      rec.save(ws);
    } else if (normalize->parsed()) {
      Recorder rec("normalize", args);
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      if (!normalize_out->count()) out_path = ws_path(ws, "normalized.jsonl");
      std::string out =
          nlohmann::json{{"format", "vident-normalized"}, {"version", kFormatVersion}}.dump();
      out += '\n';
      for (const auto& r : corpus.responses) {
        out += nlohmann::json{{"response_id", r.response_id},
                              {"prompt_id", r.prompt_id},
                              {"text", annotate(scan_numbers(r.text))}}
                   .dump();
        out += '\n';
      }
      write_file(out_path, out);
      rec.out(out_path);
      rec.save(ws);
    } else if (mask->parsed()) {
      Recorder rec("mask", args);
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      if (!mask_out->count()) out_path = ws_path(ws, "masked.jsonl");
      std::string out =
          nlohmann::json{{"format", "vident-masked"}, {"version", kFormatVersion}}.dump();
      out += '\n';
      for (const auto& r : corpus.responses) {
        MaskedText masked = mask_values(r.text);
        auto values = nlohmann::json::array();
        for (const auto& v : masked.values) values.push_back(v.canonical());
        out += nlohmann::json{{"response_id", r.response_id},
                              {"prompt_id", r.prompt_id},
                              {"template", masked.template_text},
                              {"values", std::move(values)}}
                   .dump();
        out += '\n';
      }
      write_file(out_path, out);
      rec.out(out_path);
      rec.save(ws);
    } else if (split_cmd->parsed()) {
      Recorder rec("split", args);
      rec.manifest.seeds["split"] = seed;
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      SplitAssignment assignment = split_corpus(corpus, seed);
      save_split(assignment, corpus, ws_path(ws, "splits.csv"));
      rec.out(ws_path(ws, "splits.csv"));
      rec.save(ws);
    } else if (train_cls->parsed()) {
      Recorder rec("train-classifier", args);
      rec.manifest.seeds["train"] = seed;
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      SplitAssignment assignment = detail::load_ws_split(ws, rec);
      ClassifierModel model = train_baseline_classifier(corpus, assignment, seed);
      fs::create_directories(ws_path(ws, "models"));
      save_classifier(model, ws_path(ws, "models/classifier.model"));
      rec.out(ws_path(ws, "models/classifier.model"));
      rec.save(ws);
    } else if (train_id->parsed()) {
      Recorder rec("train-identifier", args);
      rec.manifest.seeds["train"] = seed;
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      SplitAssignment assignment = detail::load_ws_split(ws, rec);
      IdentifierModel model = train_baseline_identifier(corpus, assignment, model_id, seed);
      fs::create_directories(ws_path(ws, "models"));
      std::string path = ws_path(ws, "models/identifier-" + model_id + ".model");
      save_identifier(model, path);
      rec.out(path);
      rec.save(ws, "train-identifier-" + model_id);
    } else if (import_cmd->parsed()) {
      Recorder rec("import-scores", args);
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      ExternalScores scores =
          import_external_scores(read_file(rec.in(scores_path)), corpus, scores_path);
      fs::create_directories(ws_path(ws, "scores"));
      write_file(ws_path(ws, "scores/external.csv"), serialize_scores(scores));
      rec.out(ws_path(ws, "scores/external.csv"));
      rec.save(ws);
    } else if (fit->parsed()) {
      Recorder rec("fit-ensemble", args);
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      SplitAssignment assignment = detail::load_ws_split(ws, rec);
      MemberSet members = detail::load_members(ws, corpus, rec);
      FittedEnsemble fitted = fit_ensemble_weights(corpus, assignment, members, per_slot);
      for (const auto& s : fitted.slots)
        if (s.defaulted)
          std::cerr << "warning: no usable dev cases for " << s.prompt_id << "/" << s.slot_id
                    << "; weights defaulted to uniform\n";
      write_file(ws_path(ws, "ensemble.csv"), serialize_ensemble(fitted));
      rec.out(ws_path(ws, "ensemble.csv"));
      rec.save(ws);
    } else if (evaluate->parsed()) {
      Recorder rec("evaluate", args);
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      SplitAssignment assignment = detail::load_ws_split(ws, rec);
      ClassifierModel classifier = load_classifier(rec.in(ws_path(ws, "models/classifier.model")));
      MemberSet members = detail::load_members(ws, corpus, rec);
      FittedEnsemble fitted = parse_ensemble(read_file(rec.in(ws_path(ws, "ensemble.csv"))),
                                             ws_path(ws, "ensemble.csv"));
      if (fitted.member_ids != members.ids())
        throw DataError("ensemble.csv was fitted for different members; re-run fit-ensemble");
      Partition partition = detail::parse_partition(split_name);
      EngineOutputs outputs =
          run_engine(corpus, assignment, partition, classifier, members, fitted, workers);
      fs::create_directories(ws_path(ws, "eval"));
      write_file(ws_path(ws, "eval/predictions.csv"),
                 detail::serialize_predictions(corpus, assignment, partition, outputs));
      rec.out(ws_path(ws, "eval/predictions.csv"));
      rec.save(ws);
    } else if (report->parsed()) {
      Recorder rec("report", args);
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      SplitAssignment assignment = detail::load_ws_split(ws, rec);
      std::string pred_path = ws_path(ws, "eval/predictions.csv");
      detail::ParsedPredictions pred =
          detail::parse_predictions(read_file(rec.in(pred_path)), corpus, pred_path);
      AgreementReport table =
          build_report(corpus, assignment, pred.outputs, strict_kappa, pred.partition);
      fs::create_directories(ws_path(ws, "reports"));
      std::string text = render_report_text(table);
      write_file(ws_path(ws, "reports/agreement.csv"), render_report_csv(table));
      write_file(ws_path(ws, "reports/agreement.txt"), text);
      rec.out(ws_path(ws, "reports/agreement.csv"));
      rec.out(ws_path(ws, "reports/agreement.txt"));
      rec.save(ws);
      std::cout << text;
    } else if (verify->parsed()) {
      Recorder rec("verify", args);
      auto prompts = load_prompts(rec.in(ws_path(ws, "prompts.jsonl")));
      const Prompt* prompt = nullptr;
      for (const auto& p : prompts)
        if (p.prompt_id == prompt_id) prompt = &p;
      if (!prompt) throw DataError("unknown prompt '" + prompt_id + "'");
      if (!prompt->constraint)
        throw DataError("prompt '" + prompt_id + "' has no purchase constraint");
      LinearConstraint constraint{prompt->constraint->coefficients, prompt->constraint->total};
      if (values_text.empty() && !enumerate)
        throw UsageError("verify needs --values or --enumerate");
      if (!values_text.empty()) {
        std::vector<Rational> values = detail::parse_values_list(values_text);
        if (values.size() != constraint.coefficients.size())
          throw DataError("expected " + std::to_string(constraint.coefficients.size()) +
                          " values for prompt '" + prompt_id + "', got " +
                          std::to_string(values.size()));
        std::cout << detail::render_verdict(check_solution(values, constraint), *prompt) << "\n";
      }
      if (enumerate) {
        for (const auto& solution : enumerate_solutions(constraint)) {
          std::string line;
          for (int64_t v : solution) {
            if (!line.empty()) line += ',';
            line += std::to_string(v);
          }
          std::cout << line << "\n";
        }
      }
      rec.save(ws);
    } else if (audit->parsed()) {
      Recorder rec("audit", args);
      Corpus corpus = detail::load_ws_corpus(ws, rec);
      std::string text = detail::serialize_audit(audit_missing_values(corpus));
      fs::create_directories(ws_path(ws, "reports"));
      write_file(ws_path(ws, "reports/audit.csv"), text);
      rec.out(ws_path(ws, "reports/audit.csv"));
      rec.save(ws);
      std::cout << text;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace vident::cli
