#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "evee/metrics.hpp"
#include "evee/standardize.hpp"
#include "evee/types.hpp"

namespace evee {

struct Gazetteer {
  std::map<std::vector<std::string>, std::string> triggers;
  // argument surface -> role, keyed by normalized event type
  std::map<std::string, std::map<std::vector<std::string>, std::string>> arguments;
  bool empty() const { return triggers.empty() && arguments.empty(); }
};

// Tab-separated lines: "surface<TAB>type" declares a trigger key,
// "event_type<TAB>surface<TAB>role" an argument key. Surfaces are split on
// whitespace and matched token-for-token. A repeated key keeps the last line.
Gazetteer parse_gazetteer(std::string_view bytes);

// Leftmost-longest non-overlapping matching: at each position the longest
// key wins and matching resumes after it.
std::vector<SpanLabel> match_triggers(const Gazetteer& gazetteer,
                                      const std::vector<std::string>& tokens);
std::vector<SpanLabel> match_arguments(const Gazetteer& gazetteer, std::string_view event_type,
                                       const std::vector<std::string>& tokens);

EdPrediction extract_ed(const TokenizedInstance& instance, const Gazetteer& gazetteer,
                        Paradigm paradigm);
// Groups attach to the gazetteer's own trigger matches, so the output pairs
// with a bank built from extract_ed.
EaePrediction extract_eae(const TokenizedInstance& instance, const Gazetteer& gazetteer,
                          Paradigm paradigm);

// (a, "before", b) for every gold trigger pair with a starting strictly
// before b. Pairs are emitted in (start, id) order.
std::vector<RelationTriple> heuristic_temporal(const TokenizedInstance& instance);
ErePrediction extract_ere(const TokenizedInstance& instance);

}  // namespace evee
