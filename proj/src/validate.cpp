#include "evee/validate.hpp"

#include <set>
#include <string>
#include <unordered_set>

namespace evee {

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::Bounds: return "BoundsError";
    case Rule::DanglingRef: return "DanglingRefError";
    case Rule::DuplicateId: return "DuplicateIdError";
    case Rule::Vocabulary: return "VocabularyError";
    case Rule::TokenMismatch: return "TokenMismatchError";
    case Rule::EmptyTokens: return "EmptyTokensError";
    case Rule::SelfLoop: return "SelfLoopError";
    case Rule::EmptyEvent: return "EmptyEventError";
  }
  return "UnknownError";
}

std::string Violation::str() const {
  std::string out(instance_id);
  out += ' ';
  out += rule_name(rule);
  out += ' ';
  out += detail;
  return out;
}

void ValidationReport::append(ValidationReport other) {
  violations.insert(violations.end(),
                    std::make_move_iterator(other.violations.begin()),
                    std::make_move_iterator(other.violations.end()));
  warnings.insert(warnings.end(),
                  std::make_move_iterator(other.warnings.begin()),
                  std::make_move_iterator(other.warnings.end()));
}

NormalizedOntology NormalizedOntology::from(const Ontology& ontology) {
  NormalizedOntology normalized;
  for (const std::string& type : ontology.event_types) {
    normalized.event_types.insert(normalize_label(type));
  }
  for (const std::string& role : ontology.roles) {
    normalized.roles.insert(normalize_label(role));
  }
  for (const auto& [kind, labels] : ontology.relation_labels) {
    std::set<std::string>& out = normalized.relation_labels[normalize_label(kind)];
    for (const std::string& label : labels) out.insert(normalize_label(label));
  }
  return normalized;
}

namespace {

// Empty vocabulary set = unconstrained.
bool in_vocab(const std::set<std::string>& vocab, const std::string& normalized) {
  return vocab.empty() || vocab.count(normalized) > 0;
}

const std::set<std::string>* relation_vocab(const NormalizedOntology* ontology,
                                            std::string_view kind,
                                            const ValidateOptions& options) {
  if (!ontology && !options.default_relation_vocab) return nullptr;
  const std::map<std::string, std::set<std::string>>& labels =
      ontology ? ontology->relation_labels : default_relation_labels();
  auto it = labels.find(std::string(kind));
  return it == labels.end() ? nullptr : &it->second;
}

}  // namespace

ValidationReport validate_instance(const TokenizedInstance& instance,
                                   const NormalizedOntology* ontology,
                                   const ValidateOptions& options) {
  ValidationReport report;
  const int n_tokens = static_cast<int>(instance.tokens.size());
  auto violation = [&](Rule rule, std::string detail) {
    report.violations.push_back({rule, instance.id, std::move(detail)});
  };

  if (instance.tokens.empty() && instance.has_mentions()) {
    violation(Rule::EmptyTokens, "instance carries mentions but has no tokens");
  }

  std::unordered_set<std::string> trigger_ids;
  std::unordered_set<std::string> duplicate_ids;
  for (const EventRecord& event : instance.events) {
    if (event.triggers.empty()) {
      violation(Rule::EmptyEvent, "event '" + event.event_type + "' has no triggers");
    }
    if (ontology && !in_vocab(ontology->event_types, normalize_label(event.event_type))) {
      violation(Rule::Vocabulary, "event type '" + event.event_type + "' not in ontology");
    }
    for (const TriggerMention& trigger : event.triggers) {
      if (!trigger_ids.insert(trigger.id).second &&
          duplicate_ids.insert(trigger.id).second) {
        violation(Rule::DuplicateId, "trigger id '" + trigger.id + "' appears more than once");
      }
      if (!trigger.offset.within(n_tokens)) {
        violation(Rule::Bounds, "trigger '" + trigger.id + "' offset " + trigger.offset.str() +
                                    " outside " + std::to_string(n_tokens) + " tokens");
      } else if (trigger.trigger_word != join_tokens(instance.tokens, trigger.offset)) {
        Violation mismatch{Rule::TokenMismatch, instance.id,
                           "trigger '" + trigger.id + "' word '" + trigger.trigger_word +
                               "' != tokens " + trigger.offset.str() + " '" +
                               join_tokens(instance.tokens, trigger.offset) + "'"};
        if (options.lenient) {
          report.warnings.push_back(std::move(mismatch));
        } else {
          report.violations.push_back(std::move(mismatch));
        }
      }
      for (const ArgumentMention& argument : trigger.arguments) {
        if (!argument.offset.within(n_tokens)) {
          violation(Rule::Bounds, "argument '" + argument.mention + "' offset " +
                                      argument.offset.str() + " outside " +
                                      std::to_string(n_tokens) + " tokens");
        }
        if (ontology && !in_vocab(ontology->roles, normalize_label(argument.role))) {
          violation(Rule::Vocabulary, "role '" + argument.role + "' not in ontology");
        }
      }
    }
  }

  for (RelationKind kind : kRelationKinds) {
    const std::set<std::string>* vocab =
        relation_vocab(ontology, relation_kind_name(kind), options);
    for (const RelationTriple& triple : instance.relations.of(kind)) {
      for (const std::string& endpoint : {triple.source, triple.target}) {
        if (!trigger_ids.count(endpoint)) {
          violation(Rule::DanglingRef, std::string(relation_kind_name(kind)) + " relation names unknown trigger '" +
                                           endpoint + "'");
        }
      }
      if (triple.source == triple.target) {
        violation(Rule::SelfLoop, std::string(relation_kind_name(kind)) + " relation loops on '" +
                                      triple.source + "'");
      }
      if (vocab && !in_vocab(*vocab, normalize_label(triple.label))) {
        violation(Rule::Vocabulary, std::string(relation_kind_name(kind)) + " label '" +
                                        triple.label + "' not in vocabulary");
      }
    }
  }
  return report;
}

ValidationReport validate_corpus(const Corpus& corpus, const Ontology* ontology,
                                 const ValidateOptions& options, int threads) {
  NormalizedOntology normalized;
  const NormalizedOntology* normalized_ptr = nullptr;
  if (ontology) {
    normalized = NormalizedOntology::from(*ontology);
    normalized_ptr = &normalized;
  }

  const size_t n = corpus.instances.size();
  std::vector<ValidationReport> partial(n);
  if (threads > 1) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
    for (size_t i = 0; i < n; ++i) {
      partial[i] = validate_instance(corpus.instances[i], normalized_ptr, options);
    }
  } else {
    for (size_t i = 0; i < n; ++i) {
      partial[i] = validate_instance(corpus.instances[i], normalized_ptr, options);
    }
  }

  ValidationReport report;
  std::unordered_set<std::string> seen_ids;
  for (size_t i = 0; i < n; ++i) {
    const std::string& id = corpus.instances[i].id;
    if (!seen_ids.insert(id).second) {
      report.violations.push_back(
          {Rule::DuplicateId, id, "instance id appears more than once in corpus"});
    }
    report.append(std::move(partial[i]));
  }
  return report;
}

}  // namespace evee
