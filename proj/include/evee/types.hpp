#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace evee {

// Half-open token interval [start, end). All offsets in this toolkit are
// token-level and half-open; character offsets are out of scope.
struct Span {
  int start = 0;
  int end = 0;

  friend auto operator<=>(const Span&, const Span&) = default;

  int size() const { return end - start; }
  bool within(int token_count) const {
    return 0 <= start && start < end && end <= token_count;
  }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  std::string str() const;  // "[start, end)"
};

struct ArgumentMention {
  std::string mention;
  Span offset;
  std::string role;

  friend bool operator==(const ArgumentMention&, const ArgumentMention&) = default;
};

struct TriggerMention {
  std::string id;
  Span offset;
  std::string trigger_word;  // expected to equal the joined tokens of offset
  std::vector<ArgumentMention> arguments;

  friend bool operator==(const TriggerMention&, const TriggerMention&) = default;
};

// All triggers of one record are mutually coreferent; the record is the
// coreference cluster.
struct EventRecord {
  std::string event_type;
  std::vector<TriggerMention> triggers;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// Directed (source trigger id, label, target trigger id).
struct RelationTriple {
  std::string source;
  std::string label;
  std::string target;

  friend auto operator<=>(const RelationTriple&, const RelationTriple&) = default;
};

enum class RelationKind { Temporal, Causal, Subevent };

inline constexpr std::array<RelationKind, 3> kRelationKinds = {
    RelationKind::Temporal, RelationKind::Causal, RelationKind::Subevent};

std::string_view relation_kind_name(RelationKind kind);
std::optional<RelationKind> relation_kind_from(std::string_view name);

struct RelationSet {
  std::vector<RelationTriple> temporal;
  std::vector<RelationTriple> causal;
  std::vector<RelationTriple> subevent;

  const std::vector<RelationTriple>& of(RelationKind kind) const;
  std::vector<RelationTriple>& of(RelationKind kind);
  bool empty() const {
    return temporal.empty() && causal.empty() && subevent.empty();
  }

  friend bool operator==(const RelationSet&, const RelationSet&) = default;
};

// One sentence or document in the unified format: explicit tokens, gold
// events with triggers and arguments, and relation triples between triggers.
struct TokenizedInstance {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::string> text;  // display only, never re-tokenized
  std::vector<EventRecord> events;
  RelationSet relations;
  std::string extras;  // unknown source fields, kept as a compact JSON object

  bool has_mentions() const;
  const TriggerMention* find_trigger(std::string_view trigger_id) const;
  // Triggers in document order (event order, then trigger order).
  std::vector<const TriggerMention*> all_triggers() const;

  friend bool operator==(const TokenizedInstance&, const TokenizedInstance&) = default;
};

// Identifies the pre-processing that produced a corpus. Embedded in the
// serialized corpus header so reports can state their provenance.
struct ConverterSpec {
  std::string name;
  std::string version;
  std::map<std::string, std::string> options;

  friend bool operator==(const ConverterSpec&, const ConverterSpec&) = default;
};

struct Corpus {
  std::optional<ConverterSpec> meta;
  std::vector<TokenizedInstance> instances;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Classification schema: event type, role, and relation label vocabularies.
struct Ontology {
  std::string name;
  std::set<std::string> event_types;
  std::set<std::string> roles;
  std::map<std::string, std::set<std::string>> relation_labels;

  friend bool operator==(const Ontology&, const Ontology&) = default;
};

// Relation label vocabulary applied when no ontology is supplied.
const std::map<std::string, std::set<std::string>>& default_relation_labels();

// Splits on runs of whitespace; never yields empty tokens.
std::vector<std::string> tokenize_whitespace(std::string_view text);

// Joins tokens[span) with single spaces. Span must be within bounds.
std::string join_tokens(const std::vector<std::string>& tokens, Span span);

// Trim + ASCII lowercase. Labels (event types, roles, relation labels) are
// compared and stored in this normalized form.
std::string normalize_label(std::string_view label);

// One cluster per EventRecord, holding its trigger ids. The result is a
// partition of the instance's trigger-id set.
std::vector<std::set<std::string>> derive_coref_clusters(const TokenizedInstance& instance);

}  // namespace evee
