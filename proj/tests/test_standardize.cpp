#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "evee/errors.hpp"
#include "evee/json_io.hpp"
#include "evee/standardize.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace evee;

namespace {

std::string fixture(const std::string& name) {
  return read_file(std::string(EVEE_FIXTURES_DIR) + "/" + name);
}

TokenizedInstance tiny_instance(std::vector<std::string> tokens) {
  TokenizedInstance instance;
  instance.id = "tiny";
  instance.tokens = std::move(tokens);
  return instance;
}

std::vector<std::string> random_tags(std::mt19937& rng, std::size_t n) {
  static const std::vector<std::string> pool = {
      "O",  "B-x",   "I-x",   "B-y",    "I-y",    "I-X",
      "O ", " B-x",  "B-LOC", "I-loc",  "I-LOC",  "B-life-die",
      "I-life-die"};
  std::vector<std::string> tags;
  std::uniform_int_distribution<std::size_t> dist(0, pool.size() - 1);
  for (std::size_t i = 0; i < n; ++i) tags.push_back(pool[dist(rng)]);
  return tags;
}

CGItems random_cg_items(std::mt19937& rng, const TokenizedInstance& instance) {
  CGItems items;
  const int n = static_cast<int>(instance.tokens.size());
  std::uniform_int_distribution<int> count_dist(0, 6);
  std::uniform_real_distribution<double> roll(0.0, 1.0);
  int count = count_dist(rng);
  for (int i = 0; i < count; ++i) {
    std::string surface = "zz qq";
    if (roll(rng) < 0.8 && n > 0) {
      int start = std::uniform_int_distribution<int>(0, n - 1)(rng);
      int len = std::uniform_int_distribution<int>(1, std::min(3, n - start))(rng);
      surface = join_tokens(instance.tokens, {start, start + len});
      if (roll(rng) < 0.3) {
        for (char& c : surface) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
    }
    items.items.push_back({surface, roll(rng) < 0.5 ? "attack" : "meet"});
  }
  return items;
}

std::vector<Span> gold_spans(const TokenizedInstance& instance) {
  std::vector<Span> spans;
  for (const EventRecord& event : instance.events) {
    for (const TriggerMention& trigger : event.triggers) spans.push_back(trigger.offset);
  }
  return spans;
}

std::vector<UnifiedMention> sorted_copy(std::vector<UnifiedMention> mentions) {
  std::sort(mentions.begin(), mentions.end());
  return mentions;
}

}  // namespace

TEST_CASE("bio decoding agrees with the span-predicate oracle") {
  std::mt19937 rng(101);
  for (BioMode mode : {BioMode::Strict, BioMode::Relaxed}) {
    for (int round = 0; round < 400; ++round) {
      std::size_t n = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
      std::vector<std::string> tags = random_tags(rng, n);
      std::vector<BioSpan> got = decode_bio(tags, n, mode);
      std::vector<oracle::TaggedSpan> expected = oracle::decode_bio(tags, mode);
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].offset == expected[i].offset);
        CHECK(got[i].label == expected[i].label);
      }
    }
  }
}

TEST_CASE("bio decoding hand cases") {
  std::vector<std::string> lone = {"O", "I-x", "I-x", "O"};
  CHECK(decode_bio(lone, 4, BioMode::Strict).empty());
  std::vector<BioSpan> relaxed = decode_bio(lone, 4, BioMode::Relaxed);
  REQUIRE(relaxed.size() == 1);
  CHECK(relaxed[0].offset == Span{1, 3});

  std::vector<BioSpan> cased = decode_bio({"B-Attack", "I-attack", "I-ATTACK"}, 3, BioMode::Strict);
  REQUIRE(cased.size() == 1);
  CHECK(cased[0].offset == Span{0, 3});
  CHECK(cased[0].label == "Attack");

  std::vector<BioSpan> adjacent = decode_bio({"B-x", "B-x", "I-y"}, 3, BioMode::Strict);
  REQUIRE(adjacent.size() == 2);
  CHECK(adjacent[0].offset == Span{0, 1});
  CHECK(adjacent[1].offset == Span{1, 2});

  std::vector<BioSpan> hyphen = decode_bio({"B-life-die", "I-life-die"}, 2, BioMode::Strict);
  REQUIRE(hyphen.size() == 1);
  CHECK(hyphen[0].label == "life-die");

  std::vector<BioSpan> padded = decode_bio({" B-x ", "I-x "}, 2, BioMode::Strict);
  REQUIRE(padded.size() == 1);
  CHECK(padded[0].offset == Span{0, 2});
}

TEST_CASE("bio decoding faults") {
  CHECK_THROWS_AS(decode_bio({"B-x", "huh"}, 2, BioMode::Strict), TagSyntaxError);
  CHECK_THROWS_AS(decode_bio({"B-"}, 1, BioMode::Strict), TagSyntaxError);
  CHECK_THROWS_AS(decode_bio({"b-x"}, 1, BioMode::Strict), TagSyntaxError);
  CHECK_THROWS_AS(decode_bio({"X-loc"}, 1, BioMode::Relaxed), TagSyntaxError);
  try {
    decode_bio({"O", "B-x", "?"}, 3, BioMode::Strict);
    FAIL("expected TagSyntaxError");
  } catch (const TagSyntaxError& error) {
    CHECK(std::string(error.what()).find("position 2") != std::string::npos);
  }
  CHECK_THROWS_AS(decode_bio({"O", "O"}, 3, BioMode::Strict), LengthMismatchError);
  CHECK_THROWS_AS(decode_bio({"O", "O"}, 1, BioMode::Relaxed), LengthMismatchError);
}

TEST_CASE("all four paradigms standardize the demo instance to the same mention") {
  Corpus corpus = parse_unified(fixture("code1_corpus.jsonl"));
  struct Case {
    const char* file;
    Paradigm paradigm;
  };
  for (Case c : {Case{"preds_sl.jsonl", Paradigm::SL}, Case{"preds_sp.jsonl", Paradigm::SP},
                 Case{"preds_cg.jsonl", Paradigm::CG}, Case{"preds_cls.jsonl", Paradigm::CLS}}) {
    CAPTURE(c.file);
    std::vector<EdPrediction> predictions = parse_ed_predictions(fixture(c.file), c.paradigm);
    StandardizeResult result = standardize_ed(corpus, predictions);
    REQUIRE(result.mentions.size() == 1);
    CHECK(result.mentions[0] == UnifiedMention{"demo.0001", Span{3, 6}, "attack", std::nullopt});
  }
}

TEST_CASE("sp conversion drops invalid spans and duplicates") {
  Corpus corpus;
  corpus.instances.push_back(tiny_instance({"a", "b", "c"}));
  SPSpans payload;
  payload.spans = {{Span{0, 2}, "Attack"}, {Span{0, 2}, "attack"}, {Span{2, 2}, "attack"},
                   {Span{2, 4}, "attack"}, {Span{-1, 1}, "attack"}, {Span{1, 2}, "meet"}};
  StandardizeResult result = standardize_ed(corpus, {{"tiny", payload}});
  REQUIRE(result.mentions.size() == 2);
  CHECK(result.mentions[0] == UnifiedMention{"tiny", Span{0, 2}, "attack", std::nullopt});
  CHECK(result.mentions[1] == UnifiedMention{"tiny", Span{1, 2}, "meet", std::nullopt});
  CHECK(result.diagnostics.invalid_spans == 3);
  CHECK(result.diagnostics.deduped == 1);
}

TEST_CASE("cls conversion filters rejected candidates and checks bounds") {
  Corpus corpus;
  corpus.instances.push_back(tiny_instance({"a", "b", "c"}));
  CLSCandidates payload;
  payload.candidates = {{Span{0, 1}, "attack"}, {Span{1, 2}, "NA"}, {Span{1, 2}, "None"},
                        {Span{1, 2}, "na"}, {Span{2, 3}, "meet"}};
  StandardizeResult result = standardize_ed(corpus, {{"tiny", payload}});
  REQUIRE(result.mentions.size() == 2);
  CHECK(result.mentions[0].label == "attack");
  CHECK(result.mentions[1].label == "meet");

  CLSCandidates bad;
  bad.candidates = {{Span{2, 4}, "attack"}};
  CHECK_THROWS_AS(standardize_ed(corpus, {{"tiny", bad}}), BoundsError);
}

TEST_CASE("cg location agrees with the brute-force matcher") {
  std::mt19937 rng(202);
  synth::CorpusSpec spec;
  spec.instances = 60;
  for (bool prefer_gold : {true, false}) {
    Corpus corpus = synth::make_corpus(rng, spec);
    StandardizeOptions options;
    options.gold_preference = prefer_gold;
    for (const TokenizedInstance& instance : corpus.instances) {
      CGItems items = random_cg_items(rng, instance);
      Corpus single;
      single.instances.push_back(instance);
      StandardizeResult result = standardize_ed(single, {{instance.id, items}}, options);

      std::size_t unlocatable = 0;
      std::vector<Span> preferred = prefer_gold ? gold_spans(instance) : std::vector<Span>{};
      std::vector<oracle::TaggedSpan> expected =
          oracle::locate_cg(instance.tokens, items.items, preferred, unlocatable);
      REQUIRE(result.mentions.size() == expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(result.mentions[i].offset == expected[i].offset);
        CHECK(result.mentions[i].label == normalize_label(expected[i].label));
      }
      CHECK(result.diagnostics.unlocatable == unlocatable);
    }
  }
}

TEST_CASE("cg hand cases: preference, consumption, case retry") {
  Corpus corpus;
  TokenizedInstance instance = tiny_instance({"win", "a", "win", "now"});
  EventRecord event;
  event.event_type = "award";
  event.triggers.push_back({"t1", Span{2, 3}, "win", {}});
  instance.events.push_back(event);
  corpus.instances.push_back(instance);

  CGItems one{{{"win", "award"}}};
  StandardizeResult preferred = standardize_ed(corpus, {{"tiny", one}});
  REQUIRE(preferred.mentions.size() == 1);
  CHECK(preferred.mentions[0].offset == Span{2, 3});

  StandardizeOptions no_preference;
  no_preference.gold_preference = false;
  StandardizeResult leftmost = standardize_ed(corpus, {{"tiny", one}}, no_preference);
  CHECK(leftmost.mentions[0].offset == Span{0, 1});

  // Repeated generations spread across occurrences; the gold-coincident one
  // is taken first, then the leftmost still available.
  CGItems twice{{{"win", "award"}, {"win", "award"}}};
  StandardizeResult spread = standardize_ed(corpus, {{"tiny", twice}});
  REQUIRE(spread.mentions.size() == 2);
  CHECK(spread.mentions[0].offset == Span{2, 3});
  CHECK(spread.mentions[1].offset == Span{0, 1});

  CGItems cased{{{"WIN now", "award"}}};
  StandardizeResult folded = standardize_ed(corpus, {{"tiny", cased}});
  REQUIRE(folded.mentions.size() == 1);
  CHECK(folded.mentions[0].offset == Span{2, 4});

  // An exact match elsewhere beats a case-insensitive match on gold.
  CGItems exact_first{{{"a", "award"}}};
  StandardizeResult exact = standardize_ed(corpus, {{"tiny", exact_first}});
  CHECK(exact.mentions[0].offset == Span{1, 2});

  CGItems missing{{{"zebra", "award"}, {"win a win now extra", "award"}}};
  StandardizeResult dropped = standardize_ed(corpus, {{"tiny", missing}});
  CHECK(dropped.mentions.empty());
  CHECK(dropped.diagnostics.unlocatable == 2);

  // A token claimed by one generation blocks overlapping occurrences.
  CGItems overlap{{{"a win", "award"}, {"win now", "award"}}};
  StandardizeResult blocked = standardize_ed(corpus, {{"tiny", overlap}}, no_preference);
  REQUIRE(blocked.mentions.size() == 1);
  CHECK(blocked.mentions[0].offset == Span{1, 3});
  CHECK(blocked.diagnostics.unlocatable == 1);
}

TEST_CASE("gold encodings round-trip through every converter") {
  std::mt19937 rng(303);
  synth::CorpusSpec spec;
  spec.instances = 50;
  Corpus corpus = synth::make_corpus(rng, spec);
  for (Paradigm paradigm : {Paradigm::SL, Paradigm::SP, Paradigm::CG, Paradigm::CLS}) {
    StandardizeResult result =
        standardize_ed(corpus, synth::gold_ed_predictions(corpus, paradigm));
    std::vector<UnifiedMention> gold;
    for (const TokenizedInstance& instance : corpus.instances) {
      for (const UnifiedMention& mention : gold_trigger_mentions(instance)) {
        gold.push_back(mention);
      }
    }
    CHECK(sorted_copy(result.mentions) == sorted_copy(gold));
    CHECK(result.diagnostics == Diagnostics{});
  }
}

TEST_CASE("gold argument encodings round-trip through every converter") {
  std::mt19937 rng(404);
  synth::CorpusSpec spec;
  spec.instances = 50;
  Corpus corpus = synth::make_corpus(rng, spec);
  for (Paradigm paradigm : {Paradigm::SL, Paradigm::SP, Paradigm::CG, Paradigm::CLS}) {
    StandardizeResult result =
        standardize_eae(corpus, synth::gold_eae_predictions(corpus, paradigm));
    std::vector<UnifiedMention> gold;
    for (const TokenizedInstance& instance : corpus.instances) {
      for (const UnifiedMention& mention : gold_argument_mentions(instance)) {
        gold.push_back(mention);
      }
    }
    CHECK(sorted_copy(result.mentions) == sorted_copy(gold));
  }
}

TEST_CASE("cg round-trip depends on gold preference") {
  TokenizedInstance instance = tiny_instance({"win", "a", "win"});
  EventRecord event;
  event.event_type = "award";
  event.triggers.push_back({"t1", Span{2, 3}, "win", {}});
  instance.events.push_back(event);
  Corpus corpus;
  corpus.instances.push_back(instance);

  std::vector<EdPrediction> encoded = synth::gold_ed_predictions(corpus, Paradigm::CG);
  CHECK(standardize_ed(corpus, encoded).mentions ==
        std::vector<UnifiedMention>{{"tiny", Span{2, 3}, "award", std::nullopt}});

  StandardizeOptions no_preference;
  no_preference.gold_preference = false;
  CHECK(standardize_ed(corpus, encoded, no_preference).mentions ==
        std::vector<UnifiedMention>{{"tiny", Span{0, 1}, "award", std::nullopt}});
}

TEST_CASE("eae groups carry the governing trigger and pooled preference") {
  TokenizedInstance instance = tiny_instance({"the", "prize", "committee", "gave", "the", "prize"});
  EventRecord event;
  event.event_type = "award";
  TriggerMention trigger{"t1", Span{3, 4}, "gave", {}};
  trigger.arguments.push_back({"the prize", Span{4, 6}, "prize"});
  event.triggers.push_back(trigger);
  instance.events.push_back(event);
  Corpus corpus;
  corpus.instances.push_back(instance);

  EaePrediction prediction;
  prediction.instance_id = "tiny";
  prediction.groups.push_back({Span{3, 4}, CGItems{{{"the prize", "prize"}}}});

  StandardizeResult with_preference = standardize_eae(corpus, {prediction});
  REQUIRE(with_preference.mentions.size() == 1);
  CHECK(with_preference.mentions[0].offset == Span{4, 6});
  CHECK(with_preference.mentions[0].trigger_offset == Span{3, 4});
  CHECK(with_preference.mentions[0].label == "prize");

  StandardizeOptions no_preference;
  no_preference.gold_preference = false;
  StandardizeResult leftmost = standardize_eae(corpus, {prediction}, no_preference);
  CHECK(leftmost.mentions[0].offset == Span{0, 2});
}

TEST_CASE("standardize rejects unknown instances") {
  Corpus corpus;
  corpus.instances.push_back(tiny_instance({"a"}));
  CHECK_THROWS_AS(standardize_ed(corpus, {{"ghost", SPSpans{}}}), UnknownInstanceError);
  EaePrediction prediction;
  prediction.instance_id = "ghost";
  CHECK_THROWS_AS(standardize_eae(corpus, {prediction}), UnknownInstanceError);
}

TEST_CASE("encode_spans sorts entries and rejects overlap only for tags") {
  TokenizedInstance instance = tiny_instance({"a", "b", "c", "d"});
  std::vector<SpanLabel> entries = {{Span{2, 4}, "y"}, {Span{0, 1}, "x"}};
  ParadigmPayload payload = encode_spans(Paradigm::SL, instance, entries);
  const SLTags& tags = std::get<SLTags>(payload);
  CHECK(tags.tags == std::vector<std::string>{"B-x", "O", "B-y", "I-y"});

  std::vector<SpanLabel> overlapping = {{Span{0, 2}, "x"}, {Span{1, 3}, "y"}};
  CHECK_THROWS_AS(encode_spans(Paradigm::SL, instance, overlapping), OverlapError);
  CHECK_NOTHROW(encode_spans(Paradigm::SP, instance, overlapping));
  CHECK_NOTHROW(encode_spans(Paradigm::CLS, instance, overlapping));
}

TEST_CASE("prediction files round-trip for every paradigm") {
  std::mt19937 rng(505);
  synth::CorpusSpec spec;
  spec.instances = 20;
  Corpus corpus = synth::make_corpus(rng, spec);
  for (Paradigm paradigm : {Paradigm::SL, Paradigm::SP, Paradigm::CG, Paradigm::CLS}) {
    std::vector<EdPrediction> ed = synth::noisy_ed_predictions(rng, corpus, paradigm);
    std::string bytes = serialize_ed_predictions(ed);
    std::vector<EdPrediction> ed_reparsed = parse_ed_predictions(bytes, paradigm);
    REQUIRE(ed_reparsed.size() == ed.size());
    CHECK(serialize_ed_predictions(ed_reparsed) == bytes);

    std::vector<EaePrediction> eae = synth::noisy_eae_predictions(rng, corpus, paradigm);
    std::string eae_bytes = serialize_eae_predictions(eae);
    std::vector<EaePrediction> eae_reparsed = parse_eae_predictions(eae_bytes, paradigm);
    REQUIRE(eae_reparsed.size() == eae.size());
    CHECK(serialize_eae_predictions(eae_reparsed) == eae_bytes);
  }
}

TEST_CASE("prediction parsing rejects malformed lines") {
  CHECK_THROWS_AS(parse_ed_predictions("{\"id\":\"x\",\"tags\":[]}\n{\"id\":\"x\",\"tags\":[]}",
                                       Paradigm::SL),
                  SchemaError);
  CHECK_THROWS_AS(parse_ed_predictions(R"({"tags":[]})", Paradigm::SL), SchemaError);
  CHECK_THROWS_AS(parse_ed_predictions(R"({"id":"x","spans":[]})", Paradigm::SL), SchemaError);
  CHECK_THROWS_AS(
      parse_ed_predictions(R"({"id":"x","spans":[{"offset":[0,1]}]})", Paradigm::SP), SchemaError);
  CHECK_THROWS_AS(
      parse_ed_predictions(R"({"id":"x","spans":[{"offset":[0,1],"type":"a","role":"b"}]})",
                           Paradigm::SP),
      SchemaError);
  CHECK_THROWS_AS(parse_ed_predictions("{oops", Paradigm::SP), SyntaxError);
  CHECK_THROWS_AS(parse_eae_predictions(R"({"id":"x","groups":[{"spans":[]}]})", Paradigm::SP),
                  SchemaError);
}

TEST_CASE("mention dump starts with diagnostics and lists instances in corpus order") {
  Corpus corpus = parse_unified(fixture("code1_corpus.jsonl"));
  std::vector<EdPrediction> predictions =
      parse_ed_predictions(fixture("preds_sp.jsonl"), Paradigm::SP);
  StandardizeResult result = standardize_ed(corpus, predictions);
  std::string dump = serialize_mentions(corpus, result.mentions, result.diagnostics);

  std::string first_line = dump.substr(0, dump.find('\n'));
  CHECK(first_line.find("_diagnostics") != std::string::npos);
  CHECK(first_line.find("invalid_spans") != std::string::npos);
  CHECK(dump.find("\"demo.0001\"") != std::string::npos);
  CHECK(dump.find("[3,6]") != std::string::npos);
  CHECK(std::count(dump.begin(), dump.end(), '\n') == 2);
}
