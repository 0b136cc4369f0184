#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("evee-cli-" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

RunResult run(const std::string& args) {
  static int counter = 0;
  fs::path out = scratch() / ("stdout." + std::to_string(counter));
  fs::path err = scratch() / ("stderr." + std::to_string(counter));
  ++counter;
  std::string command = std::string(EVEE_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                        err.string();
  int status = std::system(command.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

std::string fx(const std::string& name) {
  return std::string(EVEE_FIXTURES_DIR) + "/" + name;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

nlohmann::ordered_json report_json(const fs::path& path) {
  return nlohmann::ordered_json::parse(slurp(path));
}

void check_all_rows_one(const nlohmann::ordered_json& report) {
  for (const auto& [name, value] : report.at("metrics").items()) {
    INFO(name);
    CHECK(value.at("f1").get<double>() == 1.0);
    CHECK(value.at("precision").get<double>() == 1.0);
    CHECK(value.at("recall").get<double>() == 1.0);
  }
}

}  // namespace

TEST_CASE("version and argument errors") {
  RunResult version = run("--version");
  CHECK(version.code == 0);
  CHECK(contains(version.out, "0.1.0"));

  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("validate").code == 2);
  CHECK(run("evaluate --corpus a --predictions b --task nope").code == 2);
  CHECK(run("convert --format parquet --in x").code == 2);
}

TEST_CASE("validate: clean, faulty, lenient, unreadable") {
  RunResult clean = run("validate --corpus " + fx("sample_corpus.jsonl"));
  CHECK(clean.code == 0);
  CHECK(contains(clean.out, "0 violations"));

  RunResult faulty = run("validate --corpus " + fx("faulty_corpus.jsonl") + " --ontology " +
                         fx("ontology.json"));
  CHECK(faulty.code == 1);
  CHECK(contains(faulty.out, "20 violations"));
  for (const char* rule : {"BoundsError", "DanglingRefError", "DuplicateIdError",
                           "VocabularyError"}) {
    CHECK(contains(faulty.out, rule));
  }
  CHECK(contains(faulty.out, "faulty.bounds"));

  fs::path mismatched = scratch() / "mismatch.jsonl";
  spit(mismatched,
       R"({"id":"w1","text":"a b","tokens":["a","b"],"events":[{"type":"attack","triggers":[{"id":"t1","trigger_word":"zzz","offset":[0,1],"arguments":[]}]}]})"
       "\n");
  RunResult strict = run("validate --corpus " + mismatched.string());
  CHECK(strict.code == 1);
  CHECK(contains(strict.out, "TokenMismatchError"));
  RunResult lenient = run("validate --corpus " + mismatched.string() + " --lenient");
  CHECK(lenient.code == 0);
  CHECK(contains(lenient.out, "0 violations"));
  CHECK(contains(lenient.err, "warning:"));
  CHECK(contains(lenient.err, "TokenMismatchError"));

  fs::path garbage = scratch() / "garbage.jsonl";
  spit(garbage, "{nope\n");
  RunResult broken = run("validate --corpus " + garbage.string());
  CHECK(broken.code == 2);
  CHECK(contains(broken.err, "\"kind\":\"SyntaxError\""));

  RunResult missing = run("validate --corpus " + (scratch() / "absent.jsonl").string());
  CHECK(missing.code == 2);
  CHECK(contains(missing.err, "\"kind\":\"IoError\""));
}

TEST_CASE("evaluate: gold tags score 1.0 on the table and in the JSON report") {
  fs::path report = scratch() / "gold_ed.json";
  RunResult result = run("evaluate --corpus " + fx("code1_corpus.jsonl") + " --predictions " +
                         fx("gold_sl.jsonl") + " --paradigm sl --task ed --out " +
                         report.string());
  CHECK(result.code == 0);
  CHECK(contains(result.out, "trigger-id"));
  CHECK(contains(result.out, "100.0"));

  nlohmann::ordered_json parsed = report_json(report);
  check_all_rows_one(parsed);
  CHECK(parsed.at("provenance").at("task") == "ed");
  CHECK(parsed.at("provenance").at("paradigm") == "sl");
  CHECK(parsed.at("metrics").at("trigger-id").at("tp") == 1);
}

TEST_CASE("evaluate: one prediction, three paradigms, identical strict-zero reports") {
  const char* paradigms[] = {"sl", "sp", "cg"};
  for (const char* paradigm : paradigms) {
    fs::path report = scratch() / ("code1_" + std::string(paradigm) + ".json");
    RunResult result = run("evaluate --corpus " + fx("code1_corpus.jsonl") + " --predictions " +
                           fx(std::string("preds_") + paradigm + ".jsonl") + " --paradigm " +
                           paradigm + " --task ed --out " + report.string());
    CHECK(result.code == 0);
    nlohmann::ordered_json parsed = report_json(report);
    CHECK(parsed.at("metrics").at("trigger-id").at("f1").get<double>() == 0.0);
    CHECK(parsed.at("metrics").at("trigger-cls").at("f1").get<double>() == 0.0);
    CHECK(parsed.at("metrics").at("trigger-id").at("pred") == 1);
    CHECK(parsed.at("metrics").at("trigger-id").at("gold") == 1);
  }

  RunResult same = run("report --compare " + (scratch() / "code1_sl.json").string() + " " +
                       (scratch() / "code1_sp.json").string());
  CHECK(same.code == 0);
  CHECK(contains(same.out, "metric sections identical"));
  CHECK(contains(same.err, "provenance"));

  CHECK(run("report --compare " + (scratch() / "code1_sl.json").string() + " " +
            (scratch() / "code1_cg.json").string())
            .code == 0);

  RunResult differs = run("report --compare " + (scratch() / "code1_sl.json").string() + " " +
                          (scratch() / "gold_ed.json").string());
  CHECK(differs.code == 1);
  CHECK(contains(differs.out, "metric sections differ at 'trigger-id'"));

  RunResult rendered = run("report " + (scratch() / "code1_sl.json").string());
  CHECK(rendered.code == 0);
  CHECK(contains(rendered.out, "trigger-cls"));

  CHECK(run("report --compare " + (scratch() / "code1_sl.json").string()).code == 2);
}

TEST_CASE("standardize prints the unified mentions") {
  RunResult result = run("standardize --corpus " + fx("code1_corpus.jsonl") + " --predictions " +
                         fx("preds_cg.jsonl") + " --paradigm cg --task ed");
  CHECK(result.code == 0);
  CHECK(contains(result.out, "_diagnostics"));
  CHECK(contains(result.out, "[3,6]"));
  CHECK(contains(result.out, "attack"));
}

TEST_CASE("convert imports both foreign formats") {
  fs::path unified = scratch() / "eventlines_doc_level.jsonl";
  RunResult doc = run("convert --format eventlines --in " + fx("eventlines_doc.jsonl") +
                      " --out " + unified.string());
  CHECK(doc.code == 0);
  CHECK(contains(doc.err, "imported 2 instances from 2 documents"));
  CHECK(!contains(doc.err, "dropped"));
  RunResult revalidated = run("validate --corpus " + unified.string());
  CHECK(revalidated.code == 0);

  RunResult sentence =
      run("convert --format eventlines --sentence-level --in " + fx("eventlines_doc.jsonl"));
  CHECK(sentence.code == 0);
  CHECK(contains(sentence.err, "imported 3 instances from 2 documents"));
  CHECK(contains(sentence.err, "dropped 1 cross-sentence relations, 1 cross-sentence arguments"));
  CHECK(contains(sentence.out, "doc1.s0"));

  RunResult conll = run("convert --format conll-bio --in " + fx("conll_sample.txt"));
  CHECK(conll.code == 0);
  CHECK(contains(conll.out, "conll.0001"));
  CHECK(contains(conll.err, "imported 2 instances"));

  RunResult prefixed = run("convert --format conll-bio --id-prefix news --in " +
                           fx("conll_sample.txt"));
  CHECK(contains(prefixed.out, "news.0001"));
}

TEST_CASE("extract writes deterministic prediction files that score back") {
  fs::path dir_a = scratch() / "extract_a";
  fs::path dir_b = scratch() / "extract_b";
  fs::create_directories(dir_a);
  fs::create_directories(dir_b);

  std::string base = "extract --corpus " + fx("sample_corpus.jsonl") + " --gazetteer " +
                     fx("gazetteer.tsv") + " --out-dir ";
  RunResult first = run(base + dir_a.string());
  CHECK(first.code == 0);
  for (const char* name :
       {"ed.sl.jsonl", "ed.sp.jsonl", "ed.cg.jsonl", "ed.cls.jsonl", "ere.jsonl"}) {
    INFO(name);
    CHECK(fs::exists(dir_a / name));
    CHECK(contains(first.out, std::string("wrote ") + (dir_a / name).string()));
  }
  CHECK(run(base + dir_b.string()).code == 0);
  CHECK(slurp(dir_a / "ed.sp.jsonl") == slurp(dir_b / "ed.sp.jsonl"));
  CHECK(slurp(dir_a / "ere.jsonl") == slurp(dir_b / "ere.jsonl"));

  // The fixture gazetteer reproduces the gold triggers exactly.
  RunResult scored = run("evaluate --corpus " + fx("sample_corpus.jsonl") + " --predictions " +
                         (dir_a / "ed.sp.jsonl").string() + " --paradigm sp --task ed");
  CHECK(scored.code == 0);
  CHECK(contains(scored.out, "100.0"));

  RunResult eae_only = run("extract --task eae --corpus " + fx("sample_corpus.jsonl") +
                           " --gazetteer " + fx("gazetteer.tsv") + " --out-dir " +
                           dir_b.string());
  CHECK(eae_only.code == 0);
  CHECK(fs::exists(dir_b / "eae.cls.jsonl"));
  CHECK(!contains(eae_only.out, "ere.jsonl"));

  RunResult ere_only = run("extract --task ere --corpus " + fx("sample_corpus.jsonl") +
                           " --out-dir " + dir_b.string());
  CHECK(ere_only.code == 0);

  RunResult no_gazetteer =
      run("extract --task ed --corpus " + fx("sample_corpus.jsonl") + " --out-dir " +
          dir_b.string());
  CHECK(no_gazetteer.code == 1);
  CHECK(contains(no_gazetteer.err, "gazetteer"));
}

TEST_CASE("pipeline-eval scores a gold bank with perfect arguments at 1.0") {
  fs::path report = scratch() / "pipe.json";
  RunResult result = run("pipeline-eval --corpus " + fx("sample_corpus.jsonl") +
                         " --predictions " + fx("eae_sp.jsonl") + " --bank " + fx("bank.jsonl") +
                         " --paradigm sp --out " + report.string());
  CHECK(result.code == 0);
  nlohmann::ordered_json parsed = report_json(report);
  check_all_rows_one(parsed);
  CHECK(parsed.at("provenance").at("task") == "eae-pipeline");
  CHECK(parsed.at("provenance").at("flags").at("trigger_match") == "offset+type");
  std::string hash = parsed.at("provenance").at("bank").at("hash").get<std::string>();
  CHECK(hash.size() == 16);
  CHECK(parsed.at("provenance").at("bank").at("path").get<std::string>() == fx("bank.jsonl"));
}

TEST_CASE("evaluate ere: fixture relations match gold everywhere") {
  fs::path report = scratch() / "ere.json";
  RunResult result = run("evaluate --task ere --corpus " + fx("sample_corpus.jsonl") +
                         " --predictions " + fx("relations_pred.jsonl") + " --out " +
                         report.string());
  CHECK(result.code == 0);
  nlohmann::ordered_json parsed = report_json(report);
  check_all_rows_one(parsed);
  std::vector<std::string> rows;
  for (const auto& [name, value] : parsed.at("metrics").items()) rows.push_back(name);
  CHECK(rows == std::vector<std::string>{"temporal", "causal", "subevent", "coreference"});
}

TEST_CASE("config file supplies defaults; explicit flags win") {
  RunResult from_config = run("--config " + fx("config.toml") + " evaluate --corpus " +
                              fx("code1_corpus.jsonl") + " --predictions " +
                              fx("preds_sp.jsonl"));
  CHECK(from_config.code == 0);
  CHECK(contains(from_config.out, "trigger-id"));
  CHECK(contains(from_config.out, "0.0"));

  RunResult overridden = run("--config " + fx("config.toml") + " evaluate --corpus " +
                             fx("code1_corpus.jsonl") + " --predictions " + fx("preds_sp.jsonl") +
                             " --paradigm sl");
  CHECK(overridden.code == 1);
  CHECK(contains(overridden.err, "\"kind\":\"SchemaError\""));
}

TEST_CASE("evaluation failures surface as structured errors") {
  RunResult unknown = run("evaluate --task eae --paradigm sp --corpus " +
                          fx("code1_corpus.jsonl") + " --predictions " + fx("eae_sp.jsonl"));
  CHECK(unknown.code == 1);
  CHECK(contains(unknown.err, "\"kind\":\"UnknownInstanceError\""));
  CHECK(contains(unknown.err, "instance.001.01"));
}
