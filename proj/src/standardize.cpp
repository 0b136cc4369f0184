#include "evee/standardize.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "evee/errors.hpp"

namespace evee {

using ojson = nlohmann::ordered_json;

std::string_view paradigm_name(Paradigm paradigm) {
  switch (paradigm) {
    case Paradigm::SL: return "sl";
    case Paradigm::SP: return "sp";
    case Paradigm::CG: return "cg";
    case Paradigm::CLS: return "cls";
  }
  return "?";
}

Paradigm paradigm_from(std::string_view name) {
  std::string norm = normalize_label(name);
  if (norm == "sl") return Paradigm::SL;
  if (norm == "sp") return Paradigm::SP;
  if (norm == "cg") return Paradigm::CG;
  if (norm == "cls") return Paradigm::CLS;
  throw SchemaError("unknown paradigm '" + std::string(name) + "'");
}

Paradigm payload_paradigm(const ParadigmPayload& payload) {
  switch (payload.index()) {
    case 0: return Paradigm::SL;
    case 1: return Paradigm::SP;
    case 2: return Paradigm::CG;
    default: return Paradigm::CLS;
  }
}

Diagnostics& Diagnostics::operator+=(const Diagnostics& other) {
  invalid_spans += other.invalid_spans;
  unlocatable += other.unlocatable;
  deduped += other.deduped;
  non_gold_mentions += other.non_gold_mentions;
  return *this;
}

namespace {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool tokens_equal(const std::string& a, const std::string& b, bool fold_case) {
  if (!fold_case) return a == b;
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::vector<Span> occurrences(const std::vector<std::string>& tokens,
                              const std::vector<std::string>& surface, bool fold_case) {
  std::vector<Span> found;
  if (surface.empty() || surface.size() > tokens.size()) return found;
  const int n = static_cast<int>(tokens.size());
  const int len = static_cast<int>(surface.size());
  for (int i = 0; i + len <= n; ++i) {
    bool match = true;
    for (int j = 0; j < len && match; ++j) {
      match = tokens_equal(tokens[i + j], surface[j], fold_case);
    }
    if (match) found.push_back(Span{i, i + len});
  }
  return found;
}

// Tracks which tokens located generations already claimed. An occurrence is
// available only if it touches no claimed token; claiming is what makes
// repeated identical generations spread across occurrences left-to-right.
class ConsumedTokens {
 public:
  explicit ConsumedTokens(size_t n) : taken_(n, false) {}

  bool available(Span span) const {
    for (int i = span.start; i < span.end; ++i) {
      if (taken_[static_cast<size_t>(i)]) return false;
    }
    return true;
  }

  void claim(Span span) {
    for (int i = span.start; i < span.end; ++i) taken_[static_cast<size_t>(i)] = true;
  }

 private:
  std::vector<bool> taken_;
};

using SpanKey = std::pair<int, int>;

SpanKey key_of(Span span) { return {span.start, span.end}; }

// Location rules for one generated item: prefer the leftmost available
// occurrence that coincides with a preferred (gold) span, else the leftmost
// available occurrence; exact token match first, case-insensitive retry.
std::optional<Span> locate_item(const std::vector<std::string>& tokens,
                                const std::string& surface,
                                const std::set<SpanKey>& preferred,
                                const ConsumedTokens& consumed) {
  std::vector<std::string> surface_tokens = tokenize_whitespace(surface);
  for (bool fold_case : {false, true}) {
    std::vector<Span> found = occurrences(tokens, surface_tokens, fold_case);
    if (!preferred.empty()) {
      for (Span span : found) {
        if (consumed.available(span) && preferred.count(key_of(span))) return span;
      }
    }
    for (Span span : found) {
      if (consumed.available(span)) return span;
    }
  }
  return std::nullopt;
}

struct MentionSink {
  const TokenizedInstance& instance;
  std::optional<Span> trigger_offset;
  std::vector<UnifiedMention>& out;

  void emit(Span offset, const std::string& raw_label) {
    out.push_back({instance.id, offset, normalize_label(raw_label), trigger_offset});
  }
};

void convert_sl(const SLTags& payload, const StandardizeOptions& options, MentionSink sink) {
  for (const BioSpan& span :
       decode_bio(payload.tags, sink.instance.tokens.size(), options.bio)) {
    sink.emit(span.offset, span.label);
  }
}

void convert_sp(const SPSpans& payload, Diagnostics& diagnostics, MentionSink sink) {
  const int n = static_cast<int>(sink.instance.tokens.size());
  std::set<std::pair<SpanKey, std::string>> seen;
  for (const SPSpan& span : payload.spans) {
    if (!span.offset.within(n)) {
      ++diagnostics.invalid_spans;
      continue;
    }
    std::string label = normalize_label(span.label);
    if (!seen.insert({key_of(span.offset), label}).second) {
      ++diagnostics.deduped;
      continue;
    }
    sink.emit(span.offset, span.label);
  }
}

void convert_cls(const CLSCandidates& payload, MentionSink sink) {
  const int n = static_cast<int>(sink.instance.tokens.size());
  for (const CLSCandidate& candidate : payload.candidates) {
    if (!candidate.offset.within(n)) {
      throw BoundsError("instance '" + sink.instance.id + "': candidate offset " +
                        candidate.offset.str() + " outside " + std::to_string(n) + " tokens");
    }
    std::string label = normalize_label(candidate.label);
    if (label == "na" || label == "none") continue;
    sink.emit(candidate.offset, candidate.label);
  }
}

void convert_cg(const CGItems& payload, const std::set<SpanKey>& preferred,
                Diagnostics& diagnostics, MentionSink sink) {
  ConsumedTokens consumed(sink.instance.tokens.size());
  for (const CGItem& item : payload.items) {
    std::optional<Span> located =
        locate_item(sink.instance.tokens, item.surface, preferred, consumed);
    if (!located) {
      ++diagnostics.unlocatable;
      continue;
    }
    consumed.claim(*located);
    sink.emit(*located, item.label);
  }
}

std::set<SpanKey> gold_trigger_spans(const TokenizedInstance& instance) {
  std::set<SpanKey> spans;
  for (const EventRecord& event : instance.events) {
    for (const TriggerMention& trigger : event.triggers) spans.insert(key_of(trigger.offset));
  }
  return spans;
}

// Arguments of the event owning the first gold trigger at `trigger_offset`;
// empty when no gold trigger sits there.
std::set<SpanKey> gold_argument_spans(const TokenizedInstance& instance, Span trigger_offset) {
  for (const EventRecord& event : instance.events) {
    for (const TriggerMention& trigger : event.triggers) {
      if (trigger.offset != trigger_offset) continue;
      std::set<SpanKey> spans;
      for (const TriggerMention& sibling : event.triggers) {
        for (const ArgumentMention& argument : sibling.arguments) {
          spans.insert(key_of(argument.offset));
        }
      }
      return spans;
    }
  }
  return {};
}

void convert_payload(const ParadigmPayload& payload, const std::set<SpanKey>& cg_preferred,
                     const StandardizeOptions& options, Diagnostics& diagnostics,
                     MentionSink sink) {
  if (const auto* sl = std::get_if<SLTags>(&payload)) {
    convert_sl(*sl, options, sink);
  } else if (const auto* sp = std::get_if<SPSpans>(&payload)) {
    convert_sp(*sp, diagnostics, sink);
  } else if (const auto* cg = std::get_if<CGItems>(&payload)) {
    convert_cg(*cg, options.gold_preference ? cg_preferred : std::set<SpanKey>{}, diagnostics,
               sink);
  } else {
    convert_cls(std::get<CLSCandidates>(payload), sink);
  }
}

}  // namespace

std::vector<BioSpan> decode_bio(const std::vector<std::string>& tags, std::size_t n_tokens,
                                BioMode mode) {
  if (tags.size() != n_tokens) {
    throw LengthMismatchError("expected " + std::to_string(n_tokens) + " tags, got " +
                              std::to_string(tags.size()));
  }
  std::vector<BioSpan> spans;
  int start = -1;
  int end = -1;
  std::string label;
  std::string norm;
  auto close = [&] {
    if (start >= 0) spans.push_back({Span{start, end}, label});
    start = -1;
  };
  auto open = [&](int i, std::string_view lab) {
    start = i;
    end = i + 1;
    label = std::string(lab);
    norm = normalize_label(lab);
  };
  for (size_t i = 0; i < tags.size(); ++i) {
    std::string_view tag = trim_view(tags[i]);
    if (tag == "O") {
      close();
      continue;
    }
    bool begins = tag.substr(0, 2) == "B-";
    bool inside = tag.substr(0, 2) == "I-";
    if ((!begins && !inside) || tag.size() == 2) {
      throw TagSyntaxError("unparseable tag '" + std::string(tags[i]) + "' at position " +
                           std::to_string(i));
    }
    std::string_view lab = tag.substr(2);
    if (begins) {
      close();
      open(static_cast<int>(i), lab);
      continue;
    }
    if (start >= 0 && normalize_label(lab) == norm) {
      end = static_cast<int>(i) + 1;
      continue;
    }
    close();
    // Lone I-tag: relaxed mode treats it as a span start, strict skips it.
    if (mode == BioMode::Relaxed) open(static_cast<int>(i), lab);
  }
  close();
  return spans;
}

std::vector<UnifiedMention> standardize_ed_instance(const TokenizedInstance& instance,
                                                    const EdPrediction& prediction,
                                                    const StandardizeOptions& options,
                                                    Diagnostics& diagnostics) {
  std::vector<UnifiedMention> mentions;
  std::set<SpanKey> preferred;
  if (options.gold_preference && std::holds_alternative<CGItems>(prediction.payload)) {
    preferred = gold_trigger_spans(instance);
  }
  convert_payload(prediction.payload, preferred, options, diagnostics,
                  MentionSink{instance, std::nullopt, mentions});
  return mentions;
}

std::vector<UnifiedMention> standardize_eae_instance(const TokenizedInstance& instance,
                                                     const EaePrediction& prediction,
                                                     const StandardizeOptions& options,
                                                     Diagnostics& diagnostics) {
  std::vector<UnifiedMention> mentions;
  for (const EaeGroup& group : prediction.groups) {
    std::set<SpanKey> preferred;
    if (options.gold_preference && std::holds_alternative<CGItems>(group.payload)) {
      preferred = gold_argument_spans(instance, group.trigger_offset);
    }
    convert_payload(group.payload, preferred, options, diagnostics,
                    MentionSink{instance, group.trigger_offset, mentions});
  }
  return mentions;
}

namespace {

template <typename Prediction>
const TokenizedInstance& instance_for(
    const std::unordered_map<std::string_view, const TokenizedInstance*>& index,
    const Prediction& prediction, std::unordered_set<std::string_view>& seen) {
  auto it = index.find(prediction.instance_id);
  if (it == index.end()) {
    throw UnknownInstanceError("prediction references absent instance '" +
                               prediction.instance_id + "'");
  }
  if (!seen.insert(prediction.instance_id).second) {
    throw SchemaError("multiple prediction lines for instance '" + prediction.instance_id + "'");
  }
  return *it->second;
}

std::unordered_map<std::string_view, const TokenizedInstance*> instance_index(
    const Corpus& corpus) {
  std::unordered_map<std::string_view, const TokenizedInstance*> index;
  for (const TokenizedInstance& instance : corpus.instances) index[instance.id] = &instance;
  return index;
}

}  // namespace

StandardizeResult standardize_ed(const Corpus& corpus,
                                 const std::vector<EdPrediction>& predictions,
                                 const StandardizeOptions& options) {
  auto index = instance_index(corpus);
  std::unordered_set<std::string_view> seen;
  StandardizeResult result;
  for (const EdPrediction& prediction : predictions) {
    const TokenizedInstance& instance = instance_for(index, prediction, seen);
    std::vector<UnifiedMention> mentions =
        standardize_ed_instance(instance, prediction, options, result.diagnostics);
    result.mentions.insert(result.mentions.end(), std::make_move_iterator(mentions.begin()),
                           std::make_move_iterator(mentions.end()));
  }
  return result;
}

StandardizeResult standardize_eae(const Corpus& corpus,
                                  const std::vector<EaePrediction>& predictions,
                                  const StandardizeOptions& options) {
  auto index = instance_index(corpus);
  std::unordered_set<std::string_view> seen;
  StandardizeResult result;
  for (const EaePrediction& prediction : predictions) {
    const TokenizedInstance& instance = instance_for(index, prediction, seen);
    std::vector<UnifiedMention> mentions =
        standardize_eae_instance(instance, prediction, options, result.diagnostics);
    result.mentions.insert(result.mentions.end(), std::make_move_iterator(mentions.begin()),
                           std::make_move_iterator(mentions.end()));
  }
  return result;
}

std::vector<UnifiedMention> gold_trigger_mentions(const TokenizedInstance& instance) {
  std::vector<UnifiedMention> mentions;
  for (const EventRecord& event : instance.events) {
    std::string label = normalize_label(event.event_type);
    for (const TriggerMention& trigger : event.triggers) {
      mentions.push_back({instance.id, trigger.offset, label, std::nullopt});
    }
  }
  return mentions;
}

std::vector<UnifiedMention> gold_argument_mentions(const TokenizedInstance& instance) {
  std::vector<UnifiedMention> mentions;
  for (const EventRecord& event : instance.events) {
    for (const TriggerMention& trigger : event.triggers) {
      for (const ArgumentMention& argument : trigger.arguments) {
        mentions.push_back(
            {instance.id, argument.offset, normalize_label(argument.role), trigger.offset});
      }
    }
  }
  return mentions;
}

namespace {

std::vector<SpanLabel> sorted_gold_triggers(const TokenizedInstance& instance) {
  std::vector<SpanLabel> entries;
  for (const EventRecord& event : instance.events) {
    for (const TriggerMention& trigger : event.triggers) {
      entries.push_back({trigger.offset, event.event_type});
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SpanLabel& a, const SpanLabel& b) { return a.offset < b.offset; });
  return entries;
}

SLTags tags_from_entries(const std::vector<SpanLabel>& entries, size_t n_tokens,
                         const std::string& instance_id) {
  SLTags payload;
  payload.tags.assign(n_tokens, "O");
  int previous_end = -1;
  for (const SpanLabel& entry : entries) {
    if (entry.offset.start < previous_end) {
      throw OverlapError("instance '" + instance_id + "': span " + entry.offset.str() +
                         " overlaps an earlier gold span; tagging cannot express that");
    }
    previous_end = entry.offset.end;
    payload.tags[static_cast<size_t>(entry.offset.start)] = "B-" + entry.label;
    for (int i = entry.offset.start + 1; i < entry.offset.end; ++i) {
      payload.tags[static_cast<size_t>(i)] = "I-" + entry.label;
    }
  }
  return payload;
}

// Sorted emission keeps generation round-trips exact when two gold spans
// share a surface: the earlier item claims the earlier occurrence.
CGItems items_from_entries(const std::vector<SpanLabel>& entries,
                           const std::vector<std::string>& tokens) {
  CGItems payload;
  for (const SpanLabel& entry : entries) {
    payload.items.push_back({join_tokens(tokens, entry.offset), entry.label});
  }
  return payload;
}

std::vector<SpanLabel> sorted_gold_arguments(const TriggerMention& trigger) {
  std::vector<SpanLabel> entries;
  for (const ArgumentMention& argument : trigger.arguments) {
    entries.push_back({argument.offset, argument.role});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SpanLabel& a, const SpanLabel& b) { return a.offset < b.offset; });
  return entries;
}

ParadigmPayload payload_from_entries(Paradigm paradigm,
                                     const std::vector<SpanLabel>& sorted_entries,
                                     const TokenizedInstance& instance) {
  switch (paradigm) {
    case Paradigm::SL:
      return tags_from_entries(sorted_entries, instance.tokens.size(), instance.id);
    case Paradigm::SP: {
      SPSpans payload;
      for (const SpanLabel& entry : sorted_entries) {
        payload.spans.push_back({entry.offset, entry.label});
      }
      return payload;
    }
    case Paradigm::CG:
      return items_from_entries(sorted_entries, instance.tokens);
    case Paradigm::CLS: {
      CLSCandidates payload;
      for (const SpanLabel& entry : sorted_entries) {
        payload.candidates.push_back({entry.offset, entry.label});
      }
      return payload;
    }
  }
  throw SchemaError("unknown paradigm");
}

}  // namespace

SLTags encode_gold_as_sl(const TokenizedInstance& instance) {
  return tags_from_entries(sorted_gold_triggers(instance), instance.tokens.size(), instance.id);
}

SPSpans encode_gold_as_sp(const TokenizedInstance& instance) {
  return std::get<SPSpans>(encode_gold_triggers(Paradigm::SP, instance));
}

CGItems encode_gold_as_cg(const TokenizedInstance& instance) {
  return items_from_entries(sorted_gold_triggers(instance), instance.tokens);
}

CLSCandidates encode_gold_as_cls(const TokenizedInstance& instance) {
  return std::get<CLSCandidates>(encode_gold_triggers(Paradigm::CLS, instance));
}

ParadigmPayload encode_gold_triggers(Paradigm paradigm, const TokenizedInstance& instance) {
  return payload_from_entries(paradigm, sorted_gold_triggers(instance), instance);
}

std::vector<EaeGroup> encode_gold_arguments(Paradigm paradigm,
                                            const TokenizedInstance& instance) {
  std::vector<EaeGroup> groups;
  for (const EventRecord& event : instance.events) {
    for (const TriggerMention& trigger : event.triggers) {
      groups.push_back(
          {trigger.offset, payload_from_entries(paradigm, sorted_gold_arguments(trigger), instance)});
    }
  }
  return groups;
}

ParadigmPayload encode_spans(Paradigm paradigm, const TokenizedInstance& instance,
                             std::vector<SpanLabel> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SpanLabel& a, const SpanLabel& b) { return a.offset < b.offset; });
  return payload_from_entries(paradigm, entries, instance);
}

namespace {

std::string line_context(size_t line_number) {
  return "line " + std::to_string(line_number);
}

const ojson& require_field(const ojson& object, const char* key, const std::string& context) {
  auto it = object.find(key);
  if (it == object.end()) throw SchemaError(context + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const ojson& object, const char* key, const std::string& context) {
  const ojson& value = require_field(object, key, context);
  if (!value.is_string()) throw SchemaError(context + ": field '" + key + "' must be a string");
  return value.get<std::string>();
}

Span span_from_json(const ojson& value, const std::string& context) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
      !value[1].is_number_integer()) {
    throw SchemaError(context + ": offsets must be [start, end] integer pairs");
  }
  return Span{value[0].get<int>(), value[1].get<int>()};
}

// Mention labels live under "type" (detection) or "role" (arguments);
// exactly one must be present.
std::string label_from_json(const ojson& object, const std::string& context) {
  bool has_type = object.contains("type");
  bool has_role = object.contains("role");
  if (has_type == has_role) {
    throw SchemaError(context + ": exactly one of 'type'/'role' required");
  }
  return require_string(object, has_type ? "type" : "role", context);
}

void check_payload_keys(const ojson& object, std::string_view payload_key,
                        std::initializer_list<std::string_view> extra,
                        const std::string& context) {
  for (const auto& item : object.items()) {
    if (item.key() == payload_key) continue;
    if (std::find(extra.begin(), extra.end(), item.key()) != extra.end()) continue;
    throw SchemaError(context + ": unknown field '" + item.key() + "'");
  }
}

std::string_view payload_key(Paradigm paradigm) {
  switch (paradigm) {
    case Paradigm::SL: return "tags";
    case Paradigm::SP: return "spans";
    case Paradigm::CG: return "items";
    case Paradigm::CLS: return "candidates";
  }
  return "?";
}

ParadigmPayload payload_from_json(const ojson& object, Paradigm paradigm,
                                  const std::string& context) {
  const ojson& value = require_field(object, std::string(payload_key(paradigm)).c_str(), context);
  if (!value.is_array()) {
    throw SchemaError(context + ": '" + std::string(payload_key(paradigm)) +
                      "' must be an array");
  }
  switch (paradigm) {
    case Paradigm::SL: {
      SLTags payload;
      for (const ojson& tag : value) {
        if (!tag.is_string()) throw SchemaError(context + ": tags must be strings");
        payload.tags.push_back(tag.get<std::string>());
      }
      return payload;
    }
    case Paradigm::SP: {
      SPSpans payload;
      for (const ojson& span : value) {
        if (!span.is_object()) throw SchemaError(context + ": spans must be objects");
        check_payload_keys(span, "offset", {"type", "role"}, context);
        payload.spans.push_back(
            {span_from_json(require_field(span, "offset", context), context),
             label_from_json(span, context)});
      }
      return payload;
    }
    case Paradigm::CG: {
      CGItems payload;
      for (const ojson& item : value) {
        if (!item.is_object()) throw SchemaError(context + ": items must be objects");
        check_payload_keys(item, "surface", {"type", "role"}, context);
        payload.items.push_back(
            {require_string(item, "surface", context), label_from_json(item, context)});
      }
      return payload;
    }
    case Paradigm::CLS: {
      CLSCandidates payload;
      for (const ojson& candidate : value) {
        if (!candidate.is_object()) throw SchemaError(context + ": candidates must be objects");
        check_payload_keys(candidate, "offset", {"type", "role"}, context);
        payload.candidates.push_back(
            {span_from_json(require_field(candidate, "offset", context), context),
             label_from_json(candidate, context)});
      }
      return payload;
    }
  }
  throw SchemaError(context + ": unknown paradigm");
}

template <typename Fn>
void for_each_line(std::string_view bytes, Fn&& fn) {
  size_t line_number = 0;
  size_t position = 0;
  while (position <= bytes.size()) {
    size_t newline = bytes.find('\n', position);
    std::string_view line = bytes.substr(
        position, newline == std::string_view::npos ? bytes.size() - position : newline - position);
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line, line_number);
    if (newline == std::string_view::npos) break;
    position = newline + 1;
  }
}

ojson parse_line_json(std::string_view line, const std::string& context) {
  try {
    return ojson::parse(line);
  } catch (const ojson::parse_error& error) {
    throw SyntaxError(context + ": " + error.what());
  }
}

}  // namespace

std::vector<EdPrediction> parse_ed_predictions(std::string_view bytes, Paradigm paradigm) {
  std::vector<EdPrediction> predictions;
  std::unordered_set<std::string> seen;
  for_each_line(bytes, [&](std::string_view line, size_t line_number) {
    std::string context = line_context(line_number);
    ojson value = parse_line_json(line, context);
    if (!value.is_object()) throw SchemaError(context + ": prediction must be an object");
    check_payload_keys(value, payload_key(paradigm), {"id"}, context);
    EdPrediction prediction{require_string(value, "id", context),
                            payload_from_json(value, paradigm, context)};
    if (!seen.insert(prediction.instance_id).second) {
      throw SchemaError(context + ": duplicate prediction for instance '" +
                        prediction.instance_id + "'");
    }
    predictions.push_back(std::move(prediction));
  });
  return predictions;
}

std::vector<EaePrediction> parse_eae_predictions(std::string_view bytes, Paradigm paradigm) {
  std::vector<EaePrediction> predictions;
  std::unordered_set<std::string> seen;
  for_each_line(bytes, [&](std::string_view line, size_t line_number) {
    std::string context = line_context(line_number);
    ojson value = parse_line_json(line, context);
    if (!value.is_object()) throw SchemaError(context + ": prediction must be an object");
    check_payload_keys(value, "groups", {"id"}, context);
    EaePrediction prediction;
    prediction.instance_id = require_string(value, "id", context);
    const ojson& groups = require_field(value, "groups", context);
    if (!groups.is_array()) throw SchemaError(context + ": 'groups' must be an array");
    for (const ojson& group : groups) {
      if (!group.is_object()) throw SchemaError(context + ": groups must be objects");
      check_payload_keys(group, payload_key(paradigm), {"trigger_offset"}, context);
      prediction.groups.push_back(
          {span_from_json(require_field(group, "trigger_offset", context), context),
           payload_from_json(group, paradigm, context)});
    }
    if (!seen.insert(prediction.instance_id).second) {
      throw SchemaError(context + ": duplicate prediction for instance '" +
                        prediction.instance_id + "'");
    }
    predictions.push_back(std::move(prediction));
  });
  return predictions;
}

namespace {

ojson span_to_json(Span span) { return ojson::array({span.start, span.end}); }

ojson payload_to_json(const ParadigmPayload& payload, const char* label_key) {
  ojson out = ojson::array();
  if (const auto* sl = std::get_if<SLTags>(&payload)) {
    for (const std::string& tag : sl->tags) out.push_back(tag);
  } else if (const auto* sp = std::get_if<SPSpans>(&payload)) {
    for (const SPSpan& span : sp->spans) {
      out.push_back({{"offset", span_to_json(span.offset)}, {label_key, span.label}});
    }
  } else if (const auto* cg = std::get_if<CGItems>(&payload)) {
    for (const CGItem& item : cg->items) {
      out.push_back({{"surface", item.surface}, {label_key, item.label}});
    }
  } else {
    for (const CLSCandidate& candidate : std::get<CLSCandidates>(payload).candidates) {
      out.push_back({{"offset", span_to_json(candidate.offset)}, {label_key, candidate.label}});
    }
  }
  return out;
}

}  // namespace

std::string serialize_ed_predictions(const std::vector<EdPrediction>& predictions) {
  std::string out;
  for (const EdPrediction& prediction : predictions) {
    ojson line = ojson::object();
    line["id"] = prediction.instance_id;
    line[std::string(payload_key(payload_paradigm(prediction.payload)))] =
        payload_to_json(prediction.payload, "type");
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_eae_predictions(const std::vector<EaePrediction>& predictions) {
  std::string out;
  for (const EaePrediction& prediction : predictions) {
    ojson groups = ojson::array();
    for (const EaeGroup& group : prediction.groups) {
      ojson entry = ojson::object();
      entry["trigger_offset"] = span_to_json(group.trigger_offset);
      entry[std::string(payload_key(payload_paradigm(group.payload)))] =
          payload_to_json(group.payload, "role");
      groups.push_back(std::move(entry));
    }
    ojson line = ojson::object();
    line["id"] = prediction.instance_id;
    line["groups"] = std::move(groups);
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_mentions(const Corpus& corpus,
                               const std::vector<UnifiedMention>& mentions,
                               const Diagnostics& diagnostics) {
  std::map<std::string_view, std::vector<const UnifiedMention*>> by_instance;
  for (const UnifiedMention& mention : mentions) {
    by_instance[mention.instance_id].push_back(&mention);
  }
  ojson header = {{"_diagnostics",
                   {{"invalid_spans", diagnostics.invalid_spans},
                    {"unlocatable", diagnostics.unlocatable},
                    {"deduped", diagnostics.deduped},
                    {"non_gold_mentions", diagnostics.non_gold_mentions}}}};
  std::string out = header.dump();
  out += '\n';
  for (const TokenizedInstance& instance : corpus.instances) {
    ojson line = ojson::object();
    line["id"] = instance.id;
    ojson list = ojson::array();
    auto it = by_instance.find(instance.id);
    if (it != by_instance.end()) {
      std::sort(it->second.begin(), it->second.end(),
                [](const UnifiedMention* a, const UnifiedMention* b) { return *a < *b; });
      for (const UnifiedMention* mention : it->second) {
        ojson entry = ojson::object();
        entry["offset"] = span_to_json(mention->offset);
        entry["label"] = mention->label;
        if (mention->trigger_offset) entry["trigger_offset"] = span_to_json(*mention->trigger_offset);
        list.push_back(std::move(entry));
      }
    }
    line["mentions"] = std::move(list);
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace evee
