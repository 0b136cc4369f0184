#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "evee/errors.hpp"
#include "evee/extract.hpp"
#include "evee/json_io.hpp"
#include "evee/standardize.hpp"
#include "synth.hpp"

using namespace evee;

namespace {

constexpr Paradigm kParadigms[] = {Paradigm::SL, Paradigm::SP, Paradigm::CG, Paradigm::CLS};

std::string fixture(const std::string& name) {
  return read_file(std::string(EVEE_FIXTURES_DIR) + "/" + name);
}

std::vector<std::string> toks(std::initializer_list<const char*> words) {
  return {words.begin(), words.end()};
}

// Strict left-to-right location, so generated surfaces land back on the
// offsets the matcher consumed.
const StandardizeOptions kLiteral{BioMode::Strict, false};

std::vector<UnifiedMention> ed_mentions(const Corpus& corpus, const Gazetteer& gazetteer,
                                        Paradigm paradigm, Diagnostics* diagnostics = nullptr) {
  std::vector<EdPrediction> predictions;
  for (const TokenizedInstance& instance : corpus.instances) {
    predictions.push_back(extract_ed(instance, gazetteer, paradigm));
  }
  StandardizeResult result = standardize_ed(corpus, predictions, kLiteral);
  if (diagnostics) *diagnostics = result.diagnostics;
  std::sort(result.mentions.begin(), result.mentions.end());
  return result.mentions;
}

std::vector<UnifiedMention> eae_mentions(const Corpus& corpus, const Gazetteer& gazetteer,
                                         Paradigm paradigm) {
  std::vector<EaePrediction> predictions;
  for (const TokenizedInstance& instance : corpus.instances) {
    predictions.push_back(extract_eae(instance, gazetteer, paradigm));
  }
  StandardizeResult result = standardize_eae(corpus, predictions, kLiteral);
  std::sort(result.mentions.begin(), result.mentions.end());
  return result.mentions;
}

}  // namespace

TEST_CASE("gazetteer files parse into token-keyed rules") {
  Gazetteer gazetteer = parse_gazetteer(fixture("gazetteer.tsv"));
  CHECK(!gazetteer.empty());
  CHECK(gazetteer.triggers.size() == 4);
  CHECK(gazetteer.triggers.at(toks({"terrorist", "attack"})) == "attack");
  CHECK(gazetteer.triggers.at(toks({"assault"})) == "attack");
  CHECK(gazetteer.triggers.at(toks({"moving"})) == "motion");
  CHECK(gazetteer.arguments.at("attack").size() == 2);
  CHECK(gazetteer.arguments.at("attack").at(toks({"U.S."})) == "attacker");
  CHECK(gazetteer.arguments.at("motion").at(toks({"Sunday"})) == "time");
  CHECK(Gazetteer{}.empty());
}

TEST_CASE("gazetteer parsing: last line wins, blanks skipped, field counts enforced") {
  Gazetteer repeated = parse_gazetteer("attack\tfoo\n\nattack\tbar\r\n");
  CHECK(repeated.triggers.size() == 1);
  CHECK(repeated.triggers.at(toks({"attack"})) == "bar");

  Gazetteer roles = parse_gazetteer("meet\tplace\told\nmeet\tplace\tnew\n");
  CHECK(roles.arguments.at("meet").at(toks({"place"})) == "new");

  // Event type lookups normalize, so "Meet" declares the same bucket.
  Gazetteer cased = parse_gazetteer("Meet\tplace\tnew\n");
  CHECK(cased.arguments.count("meet") == 1);

  CHECK_THROWS_WITH_AS(parse_gazetteer("justone\n"),
                       "line 1: expected 2 (trigger) or 3 (argument) tab-separated fields, got 1",
                       SchemaError);
  CHECK_THROWS_WITH_AS(parse_gazetteer("ok\tx\na\tb\tc\td\n"),
                       "line 2: expected 2 (trigger) or 3 (argument) tab-separated fields, got 4",
                       SchemaError);
  CHECK_THROWS_WITH_AS(parse_gazetteer("\tattack\n"), "line 1: empty gazetteer surface",
                       SchemaError);
  CHECK_THROWS_WITH_AS(parse_gazetteer("attack\t \trole\n"), "line 1: empty gazetteer surface",
                       SchemaError);
}

TEST_CASE("matching is leftmost-longest and consumes what it matches") {
  Gazetteer gazetteer = parse_gazetteer("a b\tlong\nb\tshort\nb c\tpair\n");

  std::vector<SpanLabel> matches = match_triggers(gazetteer, toks({"a", "b", "c"}));
  // "a b" wins at 0 and consumes the b, so "b c" never fires.
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].offset == Span{0, 2});
  CHECK(matches[0].label == "long");

  matches = match_triggers(gazetteer, toks({"x", "b", "c", "b"}));
  REQUIRE(matches.size() == 2);
  CHECK(matches[0].offset == Span{1, 3});
  CHECK(matches[0].label == "pair");
  CHECK(matches[1].offset == Span{3, 4});
  CHECK(matches[1].label == "short");

  // Token match is exact; "B" is not "b".
  CHECK(match_triggers(gazetteer, toks({"B"})).empty());
  CHECK(match_arguments(gazetteer, "unheard-of", toks({"a"})).empty());
}

TEST_CASE("fixture corpus extraction finds the gazetteer vocabulary") {
  Corpus corpus = parse_unified(fixture("sample_corpus.jsonl"));
  Gazetteer gazetteer = parse_gazetteer(fixture("gazetteer.tsv"));

  std::vector<SpanLabel> basra = match_triggers(gazetteer, corpus.instances[0].tokens);
  REQUIRE(basra.size() == 2);
  CHECK(basra[0].offset == Span{5, 6});
  CHECK(basra[0].label == "motion");
  CHECK(basra[1].offset == Span{21, 22});
  CHECK(basra[1].label == "attack");

  std::vector<SpanLabel> demo = match_triggers(gazetteer, corpus.instances[1].tokens);
  REQUIRE(demo.size() == 1);
  CHECK(demo[0].offset == Span{4, 6});
  CHECK(demo[0].label == "attack");

  EaePrediction eae = extract_eae(corpus.instances[0], gazetteer, Paradigm::SP);
  REQUIRE(eae.groups.size() == 2);
  CHECK(eae.groups[0].trigger_offset == Span{5, 6});
  const SPSpans& motion_args = std::get<SPSpans>(eae.groups[0].payload);
  REQUIRE(motion_args.spans.size() == 1);
  CHECK(motion_args.spans[0].offset == Span{16, 17});
  CHECK(motion_args.spans[0].label == "time");
  CHECK(eae.groups[1].trigger_offset == Span{21, 22});
  const SPSpans& attack_args = std::get<SPSpans>(eae.groups[1].payload);
  REQUIRE(attack_args.spans.size() == 2);
  CHECK(attack_args.spans[0].offset == Span{0, 1});
  CHECK(attack_args.spans[0].label == "attacker");
  CHECK(attack_args.spans[1].offset == Span{25, 26});
  CHECK(attack_args.spans[1].label == "time");
}

TEST_CASE("every paradigm's extraction output standardizes to the match set") {
  Corpus corpus = parse_unified(fixture("sample_corpus.jsonl"));
  Gazetteer gazetteer = parse_gazetteer(fixture("gazetteer.tsv"));

  std::vector<UnifiedMention> expected = {
      {"demo.0001", {4, 6}, "attack", std::nullopt},
      {"instance.001.01", {5, 6}, "motion", std::nullopt},
      {"instance.001.01", {21, 22}, "attack", std::nullopt},
  };
  std::sort(expected.begin(), expected.end());
  for (Paradigm paradigm : kParadigms) {
    Diagnostics diagnostics;
    CHECK(ed_mentions(corpus, gazetteer, paradigm, &diagnostics) == expected);
    CHECK(diagnostics == Diagnostics{});
  }

  std::vector<UnifiedMention> args = {
      {"instance.001.01", {16, 17}, "time", Span{5, 6}},
      {"instance.001.01", {0, 1}, "attacker", Span{21, 22}},
      {"instance.001.01", {25, 26}, "time", Span{21, 22}},
  };
  std::sort(args.begin(), args.end());
  for (Paradigm paradigm : kParadigms) {
    CHECK(eae_mentions(corpus, gazetteer, paradigm) == args);
  }
}

TEST_CASE("random gazetteers extract consistently across paradigms") {
  std::mt19937 rng(4242);
  for (int round = 0; round < 30; ++round) {
    synth::CorpusSpec spec;
    spec.instances = 6;
    Corpus corpus = synth::make_corpus(rng, spec);
    Gazetteer gazetteer = parse_gazetteer(synth::random_gazetteer(rng));

    std::vector<UnifiedMention> ed_reference = ed_mentions(corpus, gazetteer, Paradigm::SL);
    std::vector<UnifiedMention> eae_reference = eae_mentions(corpus, gazetteer, Paradigm::SL);
    for (Paradigm paradigm : {Paradigm::SP, Paradigm::CG, Paradigm::CLS}) {
      CHECK(ed_mentions(corpus, gazetteer, paradigm) == ed_reference);
      CHECK(eae_mentions(corpus, gazetteer, paradigm) == eae_reference);
    }
  }
}

TEST_CASE("temporal heuristic orders gold triggers by start") {
  TokenizedInstance instance;
  instance.id = "h";
  instance.tokens = toks({"a", "b", "c", "d", "e"});
  instance.events.push_back({"x", {{"t2", {3, 4}, "d", {}}, {"t1", {0, 1}, "a", {}}}});
  instance.events.push_back({"y", {{"t3", {3, 5}, "d", {}}}});

  std::vector<RelationTriple> triples = heuristic_temporal(instance);
  // t2 and t3 share a start, so neither precedes the other.
  std::vector<RelationTriple> expected = {{"t1", "before", "t2"}, {"t1", "before", "t3"}};
  CHECK(triples == expected);

  ErePrediction ere = extract_ere(instance);
  CHECK(ere.instance_id == "h");
  CHECK(ere.relations.temporal == expected);
  CHECK(ere.relations.causal.empty());
  CHECK(ere.relations.subevent.empty());

  CHECK(heuristic_temporal(TokenizedInstance{}).empty());
}
