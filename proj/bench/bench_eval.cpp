// Compares the serial reference evaluators against the parallel drivers on a
// generated corpus and checks the reports stay byte-identical.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "evee/pipeline.hpp"
#include "evee/report.hpp"
#include "synth.hpp"

using namespace evee;

namespace {

double run_ms(const char* name, int repeats, const EvalReport& baseline,
              EvalReport (*fn)(const void*), const void* ctx) {
  auto start = std::chrono::steady_clock::now();
  bool identical = true;
  for (int i = 0; i < repeats; ++i) {
    EvalReport report = fn(ctx);
    identical = identical && serialize_report(report) == serialize_report(baseline);
  }
  auto stop = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
  std::printf("%-28s %9.2f ms/run  %s\n", name, ms, identical ? "identical" : "DIFFERS");
  return ms;
}

struct EdCtx {
  const Corpus* corpus;
  const std::vector<EdPrediction>* predictions;
  EvalOptions options;
};

struct EaeCtx {
  const Corpus* corpus;
  const std::vector<EaePrediction>* predictions;
  EvalOptions options;
};

struct EreCtx {
  const Corpus* corpus;
  const std::vector<ErePrediction>* predictions;
  EvalOptions options;
};

}  // namespace

int main(int argc, char** argv) {
  std::size_t instances = argc > 1 ? std::stoul(argv[1]) : 20000;
  int repeats = argc > 2 ? std::stoi(argv[2]) : 3;

  std::mt19937 rng(20240915);
  synth::CorpusSpec spec;
  spec.instances = instances;
  Corpus corpus = synth::make_corpus(rng, spec);

  std::vector<EdPrediction> ed = synth::noisy_ed_predictions(rng, corpus, Paradigm::SP);
  std::vector<EaePrediction> eae = synth::noisy_eae_predictions(rng, corpus, Paradigm::SP);
  std::vector<ErePrediction> ere = synth::noisy_ere_predictions(rng, corpus);

  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  std::printf("corpus: %zu instances, max threads %d\n\n", corpus.instances.size(), max_threads);

  std::vector<int> thread_counts = {1};
  if (max_threads >= 2) thread_counts.push_back(2);
  if (max_threads >= 4) thread_counts.push_back(4);

  {
    EdCtx ctx{&corpus, &ed, {}};
    ctx.options.paradigm = Paradigm::SP;
    EvalReport baseline = reference::evaluate_ed(corpus, ed, ctx.options);
    double serial = run_ms(
        "ed reference", repeats, baseline,
        [](const void* p) {
          const auto& c = *static_cast<const EdCtx*>(p);
          return reference::evaluate_ed(*c.corpus, *c.predictions, c.options);
        },
        &ctx);
    for (int threads : thread_counts) {
      ctx.options.threads = threads;
      char name[64];
      std::snprintf(name, sizeof name, "ed parallel (%d threads)", threads);
      double ms = run_ms(
          name, repeats, baseline,
          [](const void* p) {
            const auto& c = *static_cast<const EdCtx*>(p);
            return evaluate_ed(*c.corpus, *c.predictions, c.options);
          },
          &ctx);
      std::printf("%-28s speedup vs reference: %.2fx\n", "", ms > 0 ? serial / ms : 0.0);
    }
  }
  std::printf("\n");
  {
    EaeCtx ctx{&corpus, &eae, {}};
    ctx.options.paradigm = Paradigm::SP;
    EvalReport baseline = reference::evaluate_eae(corpus, eae, ctx.options);
    double serial = run_ms(
        "eae reference", repeats, baseline,
        [](const void* p) {
          const auto& c = *static_cast<const EaeCtx*>(p);
          return reference::evaluate_eae(*c.corpus, *c.predictions, c.options);
        },
        &ctx);
    for (int threads : thread_counts) {
      ctx.options.threads = threads;
      char name[64];
      std::snprintf(name, sizeof name, "eae parallel (%d threads)", threads);
      double ms = run_ms(
          name, repeats, baseline,
          [](const void* p) {
            const auto& c = *static_cast<const EaeCtx*>(p);
            return evaluate_eae(*c.corpus, *c.predictions, c.options);
          },
          &ctx);
      std::printf("%-28s speedup vs reference: %.2fx\n", "", ms > 0 ? serial / ms : 0.0);
    }
  }
  std::printf("\n");
  {
    EreCtx ctx{&corpus, &ere, {}};
    EvalReport baseline = reference::evaluate_ere(corpus, ere, ctx.options);
    double serial = run_ms(
        "ere reference", repeats, baseline,
        [](const void* p) {
          const auto& c = *static_cast<const EreCtx*>(p);
          return reference::evaluate_ere(*c.corpus, *c.predictions, c.options);
        },
        &ctx);
    for (int threads : thread_counts) {
      ctx.options.threads = threads;
      char name[64];
      std::snprintf(name, sizeof name, "ere parallel (%d threads)", threads);
      double ms = run_ms(
          name, repeats, baseline,
          [](const void* p) {
            const auto& c = *static_cast<const EreCtx*>(p);
            return evaluate_ere(*c.corpus, *c.predictions, c.options);
          },
          &ctx);
      std::printf("%-28s speedup vs reference: %.2fx\n", "", ms > 0 ? serial / ms : 0.0);
    }
  }
  return 0;
}
