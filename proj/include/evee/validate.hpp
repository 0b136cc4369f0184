#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "evee/types.hpp"

namespace evee {

enum class Rule {
  Bounds,        // offset outside tokens, or end <= start
  DanglingRef,   // relation endpoint names an unknown trigger id
  DuplicateId,   // trigger id repeated in instance, or instance id in corpus
  Vocabulary,    // type/role/label not in the active vocabulary
  TokenMismatch, // trigger_word differs from the joined tokens of its offset
  EmptyTokens,   // instance carries mentions but has no tokens
  SelfLoop,      // relation with source == target
  EmptyEvent,    // event record with no triggers
};

// Printable rule name, e.g. Rule::Bounds -> "BoundsError".
std::string_view rule_name(Rule rule);

struct Violation {
  Rule rule;
  std::string instance_id;
  std::string detail;

  std::string str() const;  // "<instance id> <rule> <detail>"
};

// Violations are data, not exceptions: an empty `violations` list means the
// input satisfies every invariant. Warnings are lenient-mode downgrades and
// do not affect validity.
struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;

  bool ok() const { return violations.empty(); }
  void append(ValidationReport other);
};

struct ValidateOptions {
  // Downgrades trigger_word/token mismatches to warnings. Real corpora carry
  // detokenization noise; offsets stay authoritative either way.
  bool lenient = false;
  // When no ontology is given, check relation labels against the built-in
  // default vocabulary. Parsing turns this off: custom vocabularies must not
  // be rejected before the ontology is known.
  bool default_relation_vocab = true;
};

// Ontology vocabularies in normalized (trimmed, lowercased) form. An empty
// vocabulary set places no constraint.
struct NormalizedOntology {
  std::set<std::string> event_types;
  std::set<std::string> roles;
  std::map<std::string, std::set<std::string>> relation_labels;

  static NormalizedOntology from(const Ontology& ontology);
};

// Checks every instance invariant; with an ontology, also checks that event
// types, roles, and relation labels are in-vocabulary. Without one, relation
// labels are checked against the built-in default vocabulary.
ValidationReport validate_instance(const TokenizedInstance& instance,
                                   const NormalizedOntology* ontology = nullptr,
                                   const ValidateOptions& options = {});

// Per-instance validation plus corpus-level checks (unique instance ids).
ValidationReport validate_corpus(const Corpus& corpus,
                                 const Ontology* ontology = nullptr,
                                 const ValidateOptions& options = {},
                                 int threads = 1);

}  // namespace evee
