#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evee/errors.hpp"
#include "evee/extract.hpp"
#include "evee/ingest.hpp"
#include "evee/json_io.hpp"
#include "evee/pipeline.hpp"
#include "evee/report.hpp"
#include "evee/standardize.hpp"
#include "evee/validate.hpp"

using namespace evee;

namespace {

struct Options {
  std::string corpus;
  std::string predictions;
  std::string paradigm = "sl";
  std::string task = "ed";
  std::string bank;
  std::string ontology;
  std::string out;
  std::string in_path;
  std::string format;
  std::string gazetteer;
  std::string extract_task;  // empty: triggers + relations
  std::string out_dir = ".";
  std::string id_prefix = "conll";
  std::vector<std::string> report_files;
  bool strict_bio = false;
  bool relaxed_bio = false;
  bool no_gold_preference = false;
  bool offset_only_trigger_match = false;
  bool lenient = false;
  bool sentence_level = false;
  bool compare = false;
  int threads = 1;
};

int emit_error(const Error& error, int code) {
  nlohmann::ordered_json out;
  out["error"] = {{"kind", error.kind()}, {"message", error.what()}};
  std::fprintf(stderr, "%s\n", out.dump().c_str());
  return code;
}

void write_or_print(const std::string& path, std::string_view bytes) {
  if (path.empty()) {
    std::fwrite(bytes.data(), 1, bytes.size(), stdout);
  } else {
    write_file(path, bytes);
  }
}

Corpus load_corpus(const Options& options, bool enforce_invariants = true) {
  ParseOptions parse_options;
  parse_options.enforce_invariants = enforce_invariants;
  return parse_unified_parallel(read_file(options.corpus), parse_options, options.threads);
}

StandardizeOptions standardize_options(const Options& options) {
  StandardizeOptions out;
  out.bio = options.relaxed_bio ? BioMode::Relaxed : BioMode::Strict;
  out.gold_preference = !options.no_gold_preference;
  return out;
}

EvalOptions eval_options(const Options& options) {
  EvalOptions out;
  out.paradigm = paradigm_from(options.paradigm);
  out.standardize = standardize_options(options);
  out.trigger_match = options.offset_only_trigger_match ? TriggerMatchPolicy::OffsetOnly
                                                        : TriggerMatchPolicy::OffsetAndType;
  out.bank_path = options.bank;
  out.threads = options.threads;
  return out;
}

void emit_report(const EvalReport& report, const std::string& out_path) {
  std::string table = render_table(report);
  std::fwrite(table.data(), 1, table.size(), stdout);
  if (!out_path.empty()) write_file(out_path, serialize_report(report));
}

int run_validate(const Options& options) {
  // Semantic faults must surface as violations, not parse errors.
  Corpus corpus = load_corpus(options, false);
  std::optional<Ontology> ontology;
  if (!options.ontology.empty()) ontology = parse_ontology(read_file(options.ontology));
  ValidateOptions validate_opts;
  validate_opts.lenient = options.lenient;
  ValidationReport report = validate_corpus(corpus, ontology ? &*ontology : nullptr,
                                            validate_opts, options.threads);
  for (const Violation& violation : report.violations) {
    std::printf("%s\n", violation.str().c_str());
  }
  for (const Violation& warning : report.warnings) {
    std::fprintf(stderr, "warning: %s\n", warning.str().c_str());
  }
  std::printf("%zu violations\n", report.violations.size());
  return report.ok() ? 0 : 1;
}

int run_convert(const Options& options) {
  std::string bytes = read_file(options.in_path);
  ImportOptions import_opts;
  import_opts.sentence_level = options.sentence_level;
  import_opts.id_prefix = options.id_prefix;
  ImportStats stats;
  Corpus corpus = options.format == "eventlines"
                      ? import_eventlines(bytes, import_opts, &stats)
                      : import_conll_bio(bytes, import_opts, &stats);
  write_or_print(options.out, serialize_unified(corpus));
  std::fprintf(stderr, "imported %zu instances from %zu documents", stats.instances,
               stats.documents);
  if (stats.dropped_relations || stats.dropped_arguments) {
    std::fprintf(stderr, " (dropped %zu cross-sentence relations, %zu cross-sentence arguments)",
                 stats.dropped_relations, stats.dropped_arguments);
  }
  std::fprintf(stderr, "\n");
  return 0;
}

int run_standardize(const Options& options) {
  Corpus corpus = load_corpus(options);
  Paradigm paradigm = paradigm_from(options.paradigm);
  std::string bytes = read_file(options.predictions);
  StandardizeResult result;
  if (options.task == "ed") {
    result = standardize_ed(corpus, parse_ed_predictions(bytes, paradigm),
                            standardize_options(options));
  } else {
    result = standardize_eae(corpus, parse_eae_predictions(bytes, paradigm),
                             standardize_options(options));
  }
  write_or_print(options.out, serialize_mentions(corpus, result.mentions, result.diagnostics));
  return 0;
}

int run_evaluate(const Options& options) {
  Corpus corpus = load_corpus(options);
  std::string bytes = read_file(options.predictions);
  EvalOptions opts = eval_options(options);
  EvalReport report;
  if (options.task == "ed") {
    report = evaluate_ed(corpus, parse_ed_predictions(bytes, opts.paradigm), opts);
  } else if (options.task == "eae") {
    report = evaluate_eae(corpus, parse_eae_predictions(bytes, opts.paradigm), opts);
  } else {
    report = evaluate_ere(corpus, parse_ere_predictions(bytes), opts);
  }
  emit_report(report, options.out);
  return 0;
}

int run_pipeline_eval(const Options& options) {
  Corpus corpus = load_corpus(options);
  TriggerBank bank = parse_trigger_bank(read_file(options.bank), corpus);
  EvalOptions opts = eval_options(options);
  EvalReport report = pipeline_evaluate(
      corpus, bank, parse_eae_predictions(read_file(options.predictions), opts.paradigm), opts);
  emit_report(report, options.out);
  return 0;
}

int run_extract(const Options& options) {
  Corpus corpus = load_corpus(options);
  bool want_ed = options.extract_task.empty() || options.extract_task == "ed";
  bool want_eae = options.extract_task == "eae";
  bool want_ere = options.extract_task.empty() || options.extract_task == "ere";

  Gazetteer gazetteer;
  if (want_ed || want_eae) {
    if (options.gazetteer.empty()) {
      throw SchemaError("--gazetteer is required for trigger/argument extraction");
    }
    gazetteer = parse_gazetteer(read_file(options.gazetteer));
  }

  auto emit = [&](const std::string& name, const std::string& bytes) {
    std::string path = options.out_dir + "/" + name;
    write_file(path, bytes);
    std::printf("wrote %s\n", path.c_str());
  };

  for (Paradigm paradigm :
       {Paradigm::SL, Paradigm::SP, Paradigm::CG, Paradigm::CLS}) {
    if (want_ed) {
      std::vector<EdPrediction> predictions;
      for (const TokenizedInstance& instance : corpus.instances) {
        predictions.push_back(extract_ed(instance, gazetteer, paradigm));
      }
      emit("ed." + std::string(paradigm_name(paradigm)) + ".jsonl",
           serialize_ed_predictions(predictions));
    }
    if (want_eae) {
      std::vector<EaePrediction> predictions;
      for (const TokenizedInstance& instance : corpus.instances) {
        predictions.push_back(extract_eae(instance, gazetteer, paradigm));
      }
      emit("eae." + std::string(paradigm_name(paradigm)) + ".jsonl",
           serialize_eae_predictions(predictions));
    }
  }
  if (want_ere) {
    std::vector<ErePrediction> predictions;
    for (const TokenizedInstance& instance : corpus.instances) {
      predictions.push_back(extract_ere(instance));
    }
    emit("ere.jsonl", serialize_ere_predictions(predictions));
  }
  return 0;
}

int run_report(const Options& options) {
  if (options.compare) {
    EvalReport left = parse_report(read_file(options.report_files[0]));
    EvalReport right = parse_report(read_file(options.report_files[1]));
    CompareResult result = compare_reports(left, right);
    for (const std::string& warning : result.provenance_warnings) {
      std::fprintf(stderr, "warning: provenance differs: %s\n", warning.c_str());
    }
    if (result.metrics_diff) {
      std::printf("metric sections differ at '%s'\n", result.metrics_diff->c_str());
      return 1;
    }
    std::printf("metric sections identical\n");
    return 0;
  }
  EvalReport report = parse_report(read_file(options.report_files[0]));
  std::string table = render_table(report);
  std::fwrite(table.data(), 1, table.size(), stdout);
  return 0;
}

void add_bio_flags(CLI::App* cmd, Options& options) {
  auto* strict = cmd->add_flag("--strict-bio", options.strict_bio,
                               "Lone I-tags are skipped (default)");
  auto* relaxed = cmd->add_flag("--relaxed-bio", options.relaxed_bio,
                                "Lone I-tags open a span");
  strict->excludes(relaxed);
  relaxed->excludes(strict);
  cmd->add_flag("--no-gold-preference", options.no_gold_preference,
                "Generated text: never prefer gold-coincident occurrences");
}

void add_threads_flag(CLI::App* cmd, Options& options) {
  cmd->add_option("--threads", options.threads, "Worker threads (1 = serial)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Options options;
  CLI::App app{"Event-understanding evaluation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; command-line flags win");
  app.set_version_flag("--version", "0.1.0");

  CLI::App* validate = app.add_subcommand("validate", "Check a unified corpus's invariants");
  validate->add_option("--corpus", options.corpus, "Unified corpus (JSONL)")->required();
  validate->add_option("--ontology", options.ontology, "Ontology JSON restricting vocabularies");
  validate->add_flag("--lenient", options.lenient,
                     "Downgrade trigger_word/token mismatches to warnings");
  add_threads_flag(validate, options);

  CLI::App* convert = app.add_subcommand("convert", "Import a foreign corpus format");
  convert->add_option("--format", options.format, "Input format")
      ->required()
      ->check(CLI::IsMember({"eventlines", "conll-bio"}));
  convert->add_option("--in", options.in_path, "Input file")->required();
  convert->add_option("--out", options.out, "Output path (default: stdout)");
  convert->add_flag("--sentence-level", options.sentence_level,
                    "Split documents into per-sentence instances");
  convert->add_option("--id-prefix", options.id_prefix, "Instance id prefix (conll-bio)")
      ->capture_default_str();

  CLI::App* standardize = app.add_subcommand(
      "standardize", "Convert paradigm predictions to unified mentions");
  standardize->add_option("--corpus", options.corpus, "Unified corpus (JSONL)")->required();
  standardize->add_option("--predictions", options.predictions, "Prediction file (JSONL)")
      ->required();
  standardize->add_option("--paradigm", options.paradigm, "Prediction paradigm")
      ->required()
      ->check(CLI::IsMember({"sl", "sp", "cg", "cls"}));
  standardize->add_option("--task", options.task, "Task")
      ->check(CLI::IsMember({"ed", "eae"}))
      ->capture_default_str();
  standardize->add_option("--out", options.out, "Output path (default: stdout)");
  add_bio_flags(standardize, options);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against gold");
  evaluate->add_option("--corpus", options.corpus, "Unified corpus (JSONL)")->required();
  evaluate->add_option("--predictions", options.predictions, "Prediction file (JSONL)")
      ->required();
  evaluate->add_option("--task", options.task, "Task")
      ->check(CLI::IsMember({"ed", "eae", "ere"}))
      ->capture_default_str();
  evaluate->add_option("--paradigm", options.paradigm, "Prediction paradigm (ed/eae)")
      ->check(CLI::IsMember({"sl", "sp", "cg", "cls"}))
      ->capture_default_str();
  evaluate->add_option("--out", options.out, "Write the JSON report here");
  evaluate->add_flag("--offset-only-trigger-match", options.offset_only_trigger_match,
                     "Match governing triggers by offset alone (default: offset and type)");
  add_bio_flags(evaluate, options);
  add_threads_flag(evaluate, options);

  CLI::App* pipeline = app.add_subcommand(
      "pipeline-eval", "Score arguments against a shared predicted-trigger bank");
  pipeline->add_option("--corpus", options.corpus, "Unified corpus (JSONL)")->required();
  pipeline->add_option("--predictions", options.predictions, "EAE prediction file (JSONL)")
      ->required();
  pipeline->add_option("--bank", options.bank, "Trigger bank (JSONL)")->required();
  pipeline->add_option("--paradigm", options.paradigm, "Prediction paradigm")
      ->check(CLI::IsMember({"sl", "sp", "cg", "cls"}))
      ->capture_default_str();
  pipeline->add_option("--out", options.out, "Write the JSON report here");
  pipeline->add_flag("--offset-only-trigger-match", options.offset_only_trigger_match,
                     "Match governing triggers by offset alone (default: offset and type)");
  add_bio_flags(pipeline, options);
  add_threads_flag(pipeline, options);

  CLI::App* extract = app.add_subcommand(
      "extract", "Run the deterministic gazetteer extractors");
  extract->add_option("--corpus", options.corpus, "Unified corpus (JSONL)")->required();
  extract->add_option("--gazetteer", options.gazetteer, "Gazetteer TSV");
  extract->add_option("--task", options.extract_task, "Restrict output (default: ed + ere)")
      ->check(CLI::IsMember({"ed", "eae", "ere"}));
  extract->add_option("--out-dir", options.out_dir, "Output directory")->capture_default_str();

  CLI::App* report = app.add_subcommand("report", "Render or compare evaluation reports");
  report->add_option("files", options.report_files, "Report JSON file(s)")
      ->required()
      ->expected(1, 2);
  report->add_flag("--compare", options.compare, "Compare two reports' metric sections");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    int code = app.exit(error);
    return code == 0 ? 0 : 2;
  }

  if (*report && options.compare && options.report_files.size() != 2) {
    std::fprintf(stderr, "report --compare needs exactly two files\n");
    return 2;
  }
  if (*report && !options.compare && options.report_files.size() != 1) {
    std::fprintf(stderr, "report without --compare renders exactly one file\n");
    return 2;
  }

  auto guarded = [&](int (*fn)(const Options&), int error_code) {
    try {
      return fn(options);
    } catch (const IoError& error) {
      return emit_error(error, 2);
    } catch (const Error& error) {
      return emit_error(error, error_code);
    }
  };

  if (*validate) return guarded(run_validate, 2);  // parse failure is environmental here
  if (*convert) return guarded(run_convert, 1);
  if (*standardize) return guarded(run_standardize, 1);
  if (*evaluate) return guarded(run_evaluate, 1);
  if (*pipeline) return guarded(run_pipeline_eval, 1);
  if (*extract) return guarded(run_extract, 1);
  return guarded(run_report, 1);
}
