#include "evee/types.hpp"

#include <algorithm>
#include <cctype>

namespace evee {

std::string Span::str() const {
  return "[" + std::to_string(start) + ", " + std::to_string(end) + ")";
}

std::string_view relation_kind_name(RelationKind kind) {
  switch (kind) {
    case RelationKind::Temporal: return "temporal";
    case RelationKind::Causal: return "causal";
    case RelationKind::Subevent: return "subevent";
  }
  return "";
}

std::optional<RelationKind> relation_kind_from(std::string_view name) {
  for (RelationKind kind : kRelationKinds) {
    if (relation_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

const std::vector<RelationTriple>& RelationSet::of(RelationKind kind) const {
  switch (kind) {
    case RelationKind::Temporal: return temporal;
    case RelationKind::Causal: return causal;
    case RelationKind::Subevent: return subevent;
  }
  return temporal;
}

std::vector<RelationTriple>& RelationSet::of(RelationKind kind) {
  return const_cast<std::vector<RelationTriple>&>(
      static_cast<const RelationSet&>(*this).of(kind));
}

bool TokenizedInstance::has_mentions() const {
  for (const EventRecord& event : events) {
    if (!event.triggers.empty()) return true;
  }
  return false;
}

const TriggerMention* TokenizedInstance::find_trigger(std::string_view trigger_id) const {
  for (const EventRecord& event : events) {
    for (const TriggerMention& trigger : event.triggers) {
      if (trigger.id == trigger_id) return &trigger;
    }
  }
  return nullptr;
}

std::vector<const TriggerMention*> TokenizedInstance::all_triggers() const {
  std::vector<const TriggerMention*> out;
  for (const EventRecord& event : events) {
    for (const TriggerMention& trigger : event.triggers) {
      out.push_back(&trigger);
    }
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& default_relation_labels() {
  static const std::map<std::string, std::set<std::string>> labels = {
      {"temporal",
       {"before", "overlap", "contains", "simultaneous", "begins-on", "ends-on"}},
      {"causal", {"cause", "precondition"}},
      {"subevent", {"subevent"}},
  };
  return labels;
}

std::vector<std::string> tokenize_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t begin = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > begin) tokens.emplace_back(text.substr(begin, i - begin));
  }
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens, Span span) {
  std::string joined;
  for (int i = span.start; i < span.end; ++i) {
    if (i > span.start) joined += ' ';
    joined += tokens[static_cast<size_t>(i)];
  }
  return joined;
}

std::string normalize_label(std::string_view label) {
  size_t begin = 0;
  size_t end = label.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(label[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(label[end - 1]))) --end;
  std::string out(label.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::set<std::string>> derive_coref_clusters(const TokenizedInstance& instance) {
  std::vector<std::set<std::string>> clusters;
  for (const EventRecord& event : instance.events) {
    std::set<std::string> cluster;
    for (const TriggerMention& trigger : event.triggers) {
      cluster.insert(trigger.id);
    }
    if (!cluster.empty()) clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace evee
