#include "evee/pipeline.hpp"

#include <cstdint>
#include <exception>
#include <map>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "evee/errors.hpp"

namespace evee {

namespace {

template <typename Fn>
void run_instances(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> failures(count);
#pragma omp parallel for schedule(dynamic, 32) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  // Surface the earliest failure so the thread count never changes which
  // error the caller sees.
  for (std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

template <typename Prediction>
std::unordered_map<std::string_view, const Prediction*> index_predictions(
    const std::vector<Prediction>& predictions, const Corpus& corpus) {
  std::unordered_map<std::string_view, const TokenizedInstance*> instances;
  for (const TokenizedInstance& instance : corpus.instances) instances[instance.id] = &instance;
  std::unordered_map<std::string_view, const Prediction*> index;
  for (const Prediction& prediction : predictions) {
    if (!instances.count(prediction.instance_id)) {
      throw UnknownInstanceError("prediction references absent instance '" +
                                 prediction.instance_id + "'");
    }
    if (!index.emplace(prediction.instance_id, &prediction).second) {
      throw SchemaError("multiple prediction lines for instance '" + prediction.instance_id + "'");
    }
  }
  return index;
}

std::map<std::string, std::string> mode_flags(const EvalOptions& options, bool with_trigger_match) {
  std::map<std::string, std::string> flags;
  flags["bio"] = options.standardize.bio == BioMode::Strict ? "strict" : "relaxed";
  flags["gold_preference"] = options.standardize.gold_preference ? "on" : "off";
  if (with_trigger_match) {
    flags["trigger_match"] =
        options.trigger_match == TriggerMatchPolicy::OffsetAndType ? "offset+type" : "offset";
  }
  return flags;
}

Provenance make_provenance(const Corpus& corpus, std::string task, std::string_view paradigm,
                           std::map<std::string, std::string> flags,
                           std::optional<BankStamp> bank) {
  Provenance provenance;
  provenance.task = std::move(task);
  provenance.paradigm = std::string(paradigm);
  provenance.converter = corpus.meta;
  provenance.flags = std::move(flags);
  provenance.bank = std::move(bank);
  return provenance;
}

std::vector<UnifiedMention> mentions_from_bank(const TokenizedInstance& instance,
                                               const std::vector<BankEntry>& entries) {
  std::vector<UnifiedMention> mentions;
  mentions.reserve(entries.size());
  for (const BankEntry& entry : entries) {
    mentions.push_back({instance.id, entry.offset, normalize_label(entry.type), std::nullopt});
  }
  return mentions;
}

const std::vector<BankEntry>& bank_entries_for(const TriggerBank& bank,
                                               const TokenizedInstance& instance) {
  static const std::vector<BankEntry> kNone;
  auto it = bank.by_instance.find(instance.id);
  return it == bank.by_instance.end() ? kNone : it->second;
}

}  // namespace

EvalReport evaluate_ed(const Corpus& corpus, const std::vector<EdPrediction>& predictions,
                       const EvalOptions& options) {
  auto by_instance = index_predictions(predictions, corpus);
  struct Slot {
    MicroCounts id, cls;
    Diagnostics diag;
  };
  std::vector<Slot> slots(corpus.instances.size());
  run_instances(slots.size(), options.threads, [&](std::size_t i) {
    const TokenizedInstance& instance = corpus.instances[i];
    Slot& slot = slots[i];
    std::vector<UnifiedMention> mentions;
    auto it = by_instance.find(instance.id);
    if (it != by_instance.end()) {
      mentions = standardize_ed_instance(instance, *it->second, options.standardize, slot.diag);
    }
    // Both match modes dedup identically; count removals once.
    Diagnostics scratch;
    slot.id = trigger_counts(instance, mentions, MatchMode::Identification, scratch);
    slot.cls = trigger_counts(instance, mentions, MatchMode::Classification, slot.diag);
  });

  MicroCounts id, cls;
  Diagnostics diagnostics;
  for (const Slot& slot : slots) {
    id += slot.id;
    cls += slot.cls;
    diagnostics += slot.diag;
  }
  EvalReport report;
  report.provenance = make_provenance(corpus, "ed", paradigm_name(options.paradigm),
                                      mode_flags(options, false), std::nullopt);
  report.metrics = {{"trigger-id", id.finalize()}, {"trigger-cls", cls.finalize()}};
  report.diagnostics = diagnostics;
  return report;
}

EvalReport evaluate_eae(const Corpus& corpus, const std::vector<EaePrediction>& predictions,
                        const EvalOptions& options) {
  auto by_instance = index_predictions(predictions, corpus);
  struct Slot {
    MicroCounts id, cls;
    Diagnostics diag;
  };
  std::vector<Slot> slots(corpus.instances.size());
  run_instances(slots.size(), options.threads, [&](std::size_t i) {
    const TokenizedInstance& instance = corpus.instances[i];
    Slot& slot = slots[i];
    std::vector<UnifiedMention> mentions;
    auto it = by_instance.find(instance.id);
    if (it != by_instance.end()) {
      mentions = standardize_eae_instance(instance, *it->second, options.standardize, slot.diag);
    }
    Diagnostics scratch;
    slot.id = argument_counts(instance, mentions, nullptr, MatchMode::Identification,
                              options.trigger_match, scratch);
    slot.cls = argument_counts(instance, mentions, nullptr, MatchMode::Classification,
                               options.trigger_match, slot.diag);
  });

  MicroCounts id, cls;
  Diagnostics diagnostics;
  for (const Slot& slot : slots) {
    id += slot.id;
    cls += slot.cls;
    diagnostics += slot.diag;
  }
  EvalReport report;
  report.provenance = make_provenance(corpus, "eae", paradigm_name(options.paradigm),
                                      mode_flags(options, false), std::nullopt);
  report.metrics = {{"argument-id", id.finalize()}, {"argument-cls", cls.finalize()}};
  report.diagnostics = diagnostics;
  return report;
}

EvalReport evaluate_ere(const Corpus& corpus, const std::vector<ErePrediction>& predictions,
                        const EvalOptions& options) {
  auto by_instance = index_predictions(predictions, corpus);
  struct Slot {
    MicroCounts relations[3];
    BcubedSums coref;
    Diagnostics diag;
  };
  static const std::vector<RelationTriple> kNoTriples;
  static const std::vector<std::pair<std::string, std::string>> kNoLinks;
  std::vector<Slot> slots(corpus.instances.size());
  run_instances(slots.size(), options.threads, [&](std::size_t i) {
    const TokenizedInstance& instance = corpus.instances[i];
    Slot& slot = slots[i];
    auto it = by_instance.find(instance.id);
    const ErePrediction* prediction = it == by_instance.end() ? nullptr : it->second;
    for (std::size_t k = 0; k < kRelationKinds.size(); ++k) {
      slot.relations[k] = relation_counts(
          instance, prediction ? prediction->relations.of(kRelationKinds[k]) : kNoTriples,
          kRelationKinds[k], slot.diag);
    }
    slot.coref =
        coreference_sums(instance, prediction ? prediction->coreference : kNoLinks, slot.diag);
  });

  MicroCounts relations[3];
  BcubedSums coref;
  Diagnostics diagnostics;
  for (const Slot& slot : slots) {
    for (std::size_t k = 0; k < kRelationKinds.size(); ++k) relations[k] += slot.relations[k];
    coref += slot.coref;
    diagnostics += slot.diag;
  }
  EvalReport report;
  report.provenance = make_provenance(corpus, "ere", "", {}, std::nullopt);
  for (std::size_t k = 0; k < kRelationKinds.size(); ++k) {
    report.metrics.emplace_back(std::string(relation_kind_name(kRelationKinds[k])),
                                relations[k].finalize());
  }
  report.metrics.emplace_back("coreference", coref.finalize());
  report.diagnostics = diagnostics;
  return report;
}

EvalReport pipeline_evaluate(const Corpus& corpus, const TriggerBank& bank,
                             const std::vector<EaePrediction>& predictions,
                             const EvalOptions& options) {
  auto by_instance = index_predictions(predictions, corpus);
  struct Slot {
    MicroCounts trigger_id, trigger_cls, argument_id, argument_cls;
    Diagnostics diag;
  };
  std::vector<Slot> slots(corpus.instances.size());
  run_instances(slots.size(), options.threads, [&](std::size_t i) {
    const TokenizedInstance& instance = corpus.instances[i];
    Slot& slot = slots[i];
    const std::vector<BankEntry>& entries = bank_entries_for(bank, instance);
    std::vector<UnifiedMention> triggers = mentions_from_bank(instance, entries);
    Diagnostics scratch;
    slot.trigger_id = trigger_counts(instance, triggers, MatchMode::Identification, scratch);
    slot.trigger_cls = trigger_counts(instance, triggers, MatchMode::Classification, slot.diag);

    std::vector<UnifiedMention> arguments;
    auto it = by_instance.find(instance.id);
    if (it != by_instance.end()) {
      arguments = standardize_eae_instance(instance, *it->second, options.standardize, slot.diag);
    }
    slot.argument_id = argument_counts(instance, arguments, &entries, MatchMode::Identification,
                                       options.trigger_match, scratch);
    slot.argument_cls = argument_counts(instance, arguments, &entries, MatchMode::Classification,
                                        options.trigger_match, slot.diag);
  });

  MicroCounts trigger_id, trigger_cls, argument_id, argument_cls;
  Diagnostics diagnostics;
  for (const Slot& slot : slots) {
    trigger_id += slot.trigger_id;
    trigger_cls += slot.trigger_cls;
    argument_id += slot.argument_id;
    argument_cls += slot.argument_cls;
    diagnostics += slot.diag;
  }
  EvalReport report;
  report.provenance =
      make_provenance(corpus, "eae-pipeline", paradigm_name(options.paradigm),
                      mode_flags(options, true),
                      BankStamp{options.bank_path, bank_content_hash_hex(bank)});
  report.metrics = {{"trigger-id", trigger_id.finalize()},
                    {"trigger-cls", trigger_cls.finalize()},
                    {"argument-id", argument_id.finalize()},
                    {"argument-cls", argument_cls.finalize()}};
  report.diagnostics = diagnostics;
  return report;
}

namespace reference {

EvalReport evaluate_ed(const Corpus& corpus, const std::vector<EdPrediction>& predictions,
                       const EvalOptions& options) {
  StandardizeResult standardized = standardize_ed(corpus, predictions, options.standardize);
  Diagnostics diagnostics = standardized.diagnostics;
  PRF id = score_triggers(standardized.mentions, corpus, MatchMode::Identification, nullptr);
  PRF cls = score_triggers(standardized.mentions, corpus, MatchMode::Classification, &diagnostics);
  EvalReport report;
  report.provenance = make_provenance(corpus, "ed", paradigm_name(options.paradigm),
                                      mode_flags(options, false), std::nullopt);
  report.metrics = {{"trigger-id", id}, {"trigger-cls", cls}};
  report.diagnostics = diagnostics;
  return report;
}

EvalReport evaluate_eae(const Corpus& corpus, const std::vector<EaePrediction>& predictions,
                        const EvalOptions& options) {
  StandardizeResult standardized = standardize_eae(corpus, predictions, options.standardize);
  Diagnostics diagnostics = standardized.diagnostics;
  PRF id = score_arguments(standardized.mentions, corpus, nullptr, MatchMode::Identification,
                           options.trigger_match, nullptr);
  PRF cls = score_arguments(standardized.mentions, corpus, nullptr, MatchMode::Classification,
                            options.trigger_match, &diagnostics);
  EvalReport report;
  report.provenance = make_provenance(corpus, "eae", paradigm_name(options.paradigm),
                                      mode_flags(options, false), std::nullopt);
  report.metrics = {{"argument-id", id}, {"argument-cls", cls}};
  report.diagnostics = diagnostics;
  return report;
}

EvalReport evaluate_ere(const Corpus& corpus, const std::vector<ErePrediction>& predictions,
                        const EvalOptions& options) {
  (void)options;
  Diagnostics diagnostics;
  EvalReport report;
  report.provenance = make_provenance(corpus, "ere", "", {}, std::nullopt);
  for (RelationKind kind : kRelationKinds) {
    report.metrics.emplace_back(std::string(relation_kind_name(kind)),
                                score_relations(predictions, corpus, kind, &diagnostics));
  }
  report.metrics.emplace_back("coreference", score_coreference(predictions, corpus, &diagnostics));
  report.diagnostics = diagnostics;
  return report;
}

EvalReport pipeline_evaluate(const Corpus& corpus, const TriggerBank& bank,
                             const std::vector<EaePrediction>& predictions,
                             const EvalOptions& options) {
  std::vector<UnifiedMention> triggers;
  for (const TokenizedInstance& instance : corpus.instances) {
    for (const UnifiedMention& mention :
         mentions_from_bank(instance, bank_entries_for(bank, instance))) {
      triggers.push_back(mention);
    }
  }
  Diagnostics diagnostics;
  PRF trigger_id = score_triggers(triggers, corpus, MatchMode::Identification, nullptr);
  PRF trigger_cls = score_triggers(triggers, corpus, MatchMode::Classification, &diagnostics);

  StandardizeResult standardized = standardize_eae(corpus, predictions, options.standardize);
  diagnostics += standardized.diagnostics;
  PRF argument_id = score_arguments(standardized.mentions, corpus, &bank,
                                    MatchMode::Identification, options.trigger_match, nullptr);
  PRF argument_cls = score_arguments(standardized.mentions, corpus, &bank,
                                     MatchMode::Classification, options.trigger_match, &diagnostics);
  EvalReport report;
  report.provenance =
      make_provenance(corpus, "eae-pipeline", paradigm_name(options.paradigm),
                      mode_flags(options, true),
                      BankStamp{options.bank_path, bank_content_hash_hex(bank)});
  report.metrics = {{"trigger-id", trigger_id},
                    {"trigger-cls", trigger_cls},
                    {"argument-id", argument_id},
                    {"argument-cls", argument_cls}};
  report.diagnostics = diagnostics;
  return report;
}

}  // namespace reference

}  // namespace evee
