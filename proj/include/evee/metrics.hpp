#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evee/ingest.hpp"
#include "evee/standardize.hpp"
#include "evee/types.hpp"

namespace evee {

struct PRF {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::size_t tp = 0;
  std::size_t pred_count = 0;
  std::size_t gold_count = 0;

  // Empty-denominator convention: P=1 when nothing was predicted, R=1 when
  // nothing is gold, F1=0 when P+R=0.
  static PRF from_counts(std::size_t tp, std::size_t pred_count, std::size_t gold_count);

  friend bool operator==(const PRF&, const PRF&) = default;
};

enum class MatchMode { Identification, Classification };

// How a governing trigger must line up with gold before its arguments can
// score: offset and type, or offset alone.
enum class TriggerMatchPolicy { OffsetAndType, OffsetOnly };

// Micro counts are monoidal: per-instance counts merge associatively, so
// serial and parallel corpus drivers produce identical results.
struct MicroCounts {
  std::size_t tp = 0;
  std::size_t pred = 0;
  std::size_t gold = 0;

  MicroCounts& operator+=(const MicroCounts& other);
  PRF finalize() const { return PRF::from_counts(tp, pred, gold); }
};

// Per-instance kernels. `predictions` holds this instance's mentions only;
// duplicates are removed before counting (counted in diagnostics). Matching
// is one-to-one per key via multiset min-counts.
MicroCounts trigger_counts(const TokenizedInstance& instance,
                           const std::vector<UnifiedMention>& predictions, MatchMode mode,
                           Diagnostics& diagnostics);

// Arguments score only under a governing trigger that matches gold (offset
// plus type under the default policy). `bank_entries` null means the
// governing offsets refer to gold triggers directly; otherwise they must
// resolve in the bank (DanglingTriggerRefError), and bank triggers missing
// from gold turn their arguments into false positives.
MicroCounts argument_counts(const TokenizedInstance& instance,
                            const std::vector<UnifiedMention>& predictions,
                            const std::vector<BankEntry>* bank_entries, MatchMode mode,
                            TriggerMatchPolicy policy, Diagnostics& diagnostics);

// Corpus drivers: group predictions by instance (UnknownInstanceError on
// absent ids), run the kernel per instance, merge.
PRF score_triggers(const std::vector<UnifiedMention>& predictions, const Corpus& gold,
                   MatchMode mode, Diagnostics* diagnostics = nullptr);

PRF score_arguments(const std::vector<UnifiedMention>& predictions, const Corpus& gold,
                    const TriggerBank* bank, MatchMode mode,
                    TriggerMatchPolicy policy = TriggerMatchPolicy::OffsetAndType,
                    Diagnostics* diagnostics = nullptr);

using Cluster = std::vector<std::string>;

// B-cubed accumulator; long double keeps the summed fractions well inside
// the 1e-12 tolerance the scorer promises.
struct BcubedSums {
  long double precision_sum = 0;
  long double recall_sum = 0;
  std::size_t mentions = 0;

  BcubedSums& operator+=(const BcubedSums& other);
  // pred_count/gold_count carry the mention-universe size; tp stays 0
  // because B-cubed is mean-based, not count-based.
  PRF finalize() const;
};

// Both inputs must partition the same mention universe (PartitionError).
// An empty universe scores P=R=F1=1.
BcubedSums bcubed_sums(const std::vector<Cluster>& predicted, const std::vector<Cluster>& gold);
PRF bcubed(const std::vector<Cluster>& predicted, const std::vector<Cluster>& gold);

// Transitive closure of pairwise links over `universe`; endpoints outside
// the universe are added to it. Unlinked members become singletons.
std::vector<Cluster> clusters_from_links(
    const std::vector<std::pair<std::string, std::string>>& links,
    const std::vector<std::string>& universe);

// Relation predictions: JSONL {"id", "temporal": [[src, label, tgt], ...],
// "causal": [...], "subevent": [...], "coreference": [[a, b], ...]}.
struct ErePrediction {
  std::string instance_id;
  RelationSet relations;
  std::vector<std::pair<std::string, std::string>> coreference;
};

std::vector<ErePrediction> parse_ere_predictions(std::string_view bytes);
std::string serialize_ere_predictions(const std::vector<ErePrediction>& predictions);

// Directed exact matching per kind; labels compared case-insensitively;
// triple endpoints must name gold triggers (DanglingRefError).
MicroCounts relation_counts(const TokenizedInstance& instance,
                            const std::vector<RelationTriple>& predicted, RelationKind kind,
                            Diagnostics& diagnostics);

// B-cubed over gold event clusters vs the closure of predicted links. The
// mention universe is gold trigger ids plus predicted endpoints; endpoints
// outside gold are singletons on the gold side and flagged in diagnostics.
BcubedSums coreference_sums(const TokenizedInstance& instance,
                            const std::vector<std::pair<std::string, std::string>>& links,
                            Diagnostics& diagnostics);

PRF score_relations(const std::vector<ErePrediction>& predictions, const Corpus& gold,
                    RelationKind kind, Diagnostics* diagnostics = nullptr);

PRF score_coreference(const std::vector<ErePrediction>& predictions, const Corpus& gold,
                      Diagnostics* diagnostics = nullptr);

}  // namespace evee
