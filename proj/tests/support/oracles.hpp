#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evee/ingest.hpp"
#include "evee/metrics.hpp"
#include "evee/standardize.hpp"
#include "evee/types.hpp"

// Independent reimplementations of the scoring and decoding rules, written
// as directly as possible so a disagreement points at the production code.
namespace evee::oracle {

struct TaggedSpan {
  Span offset;
  std::string label;  // raw, as the opening tag spelled it

  friend bool operator==(const TaggedSpan&, const TaggedSpan&) = default;
};

// Enumerates every [s, e) and keeps the ones satisfying the IOB2 span
// predicate: the first tag opens, every inner tag continues the opener's
// label case-insensitively, and the span cannot be extended.
std::vector<TaggedSpan> decode_bio(const std::vector<std::string>& tags, BioMode mode);

// Surface location: exact pass then case-folded pass; within a pass the
// leftmost available occurrence coinciding with a preferred span wins, else
// the leftmost available occurrence. A located item claims its tokens.
std::vector<TaggedSpan> locate_cg(const std::vector<std::string>& tokens,
                                  const std::vector<CGItem>& items,
                                  const std::vector<Span>& preferred, std::size_t& unlocatable);

// Same formula as the scorer, recomputed from raw counts.
PRF prf(std::size_t tp, std::size_t pred, std::size_t gold);

// Greedy one-to-one matching against unused gold mentions after
// full-identity dedup. Predictions must reference corpus instances.
PRF score_triggers(const Corpus& gold, const std::vector<UnifiedMention>& predictions,
                   MatchMode mode);

// Governing events resolved by linear scan; a bank trigger with no gold
// counterpart leaves its arguments unmatched. Refs must resolve.
PRF score_arguments(const Corpus& gold, const std::vector<UnifiedMention>& predictions,
                    const TriggerBank* bank, MatchMode mode, TriggerMatchPolicy policy);

struct BcubedResult {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

// Plain-double per-mention means over cluster overlaps.
BcubedResult bcubed(const std::vector<Cluster>& predicted, const std::vector<Cluster>& gold);

// Fixpoint closure of the link graph over universe plus endpoints.
std::vector<std::set<std::string>> close_links(
    const std::vector<std::pair<std::string, std::string>>& links,
    const std::vector<std::string>& universe);

// Order-free view of a partition, for equality checks.
std::vector<std::set<std::string>> canonical(const std::vector<Cluster>& clusters);

}  // namespace evee::oracle
