#pragma once

#include <vector>

#include "evee/ingest.hpp"
#include "evee/metrics.hpp"
#include "evee/report.hpp"
#include "evee/standardize.hpp"
#include "evee/types.hpp"

namespace evee {

struct EvalOptions {
  Paradigm paradigm = Paradigm::SL;
  StandardizeOptions standardize;
  TriggerMatchPolicy trigger_match = TriggerMatchPolicy::OffsetAndType;
  // Stamped into pipeline reports next to the bank content hash.
  std::string bank_path;
  // Instances are scored on this many OpenMP threads. Results are merged in
  // corpus order, so any value produces the same report bytes.
  int threads = 1;
};

EvalReport evaluate_ed(const Corpus& corpus, const std::vector<EdPrediction>& predictions,
                       const EvalOptions& options);
EvalReport evaluate_eae(const Corpus& corpus, const std::vector<EaePrediction>& predictions,
                        const EvalOptions& options);
EvalReport evaluate_ere(const Corpus& corpus, const std::vector<ErePrediction>& predictions,
                        const EvalOptions& options);
// Triggers are scored from the bank itself; arguments attach to bank triggers.
// A bank holding exactly the gold triggers reproduces evaluate_eae field for
// field on the argument rows.
EvalReport pipeline_evaluate(const Corpus& corpus, const TriggerBank& bank,
                             const std::vector<EaePrediction>& predictions,
                             const EvalOptions& options);

// Straight-line single-threaded implementations of the four entry points,
// kept as the behavioral baseline for tests and the benchmark. `threads` is
// ignored here.
namespace reference {
EvalReport evaluate_ed(const Corpus& corpus, const std::vector<EdPrediction>& predictions,
                       const EvalOptions& options);
EvalReport evaluate_eae(const Corpus& corpus, const std::vector<EaePrediction>& predictions,
                        const EvalOptions& options);
EvalReport evaluate_ere(const Corpus& corpus, const std::vector<ErePrediction>& predictions,
                        const EvalOptions& options);
EvalReport pipeline_evaluate(const Corpus& corpus, const TriggerBank& bank,
                             const std::vector<EaePrediction>& predictions,
                             const EvalOptions& options);
}  // namespace reference

}  // namespace evee
