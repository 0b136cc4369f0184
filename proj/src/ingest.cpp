#include "evee/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "evee/errors.hpp"
#include "evee/standardize.hpp"
#include "evee/validate.hpp"

namespace evee {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kEventlinesVersion = "1.0.0";
constexpr std::string_view kConllVersion = "1.0.0";

std::string line_context(size_t line_number) { return "line " + std::to_string(line_number); }

template <typename Fn>
void for_each_line(std::string_view bytes, bool skip_blank, Fn&& fn) {
  size_t line_number = 0;
  size_t position = 0;
  while (position <= bytes.size()) {
    size_t newline = bytes.find('\n', position);
    std::string_view line = bytes.substr(
        position, newline == std::string_view::npos ? bytes.size() - position : newline - position);
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
    if (!blank || !skip_blank) fn(line, line_number, blank);
    if (newline == std::string_view::npos) break;
    position = newline + 1;
  }
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

int require_int(const ojson& object, const char* key, const std::string& context) {
  const ojson& value = require_field(object, key, context);
  if (!value.is_number_integer()) {
    throw SchemaError(context + ": field '" + key + "' must be an integer");
  }
  return value.get<int>();
}

Span span_from_json(const ojson& value, const std::string& context) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
      !value[1].is_number_integer()) {
    throw SchemaError(context + ": offsets must be [start, end] integer pairs");
  }
  return Span{value[0].get<int>(), value[1].get<int>()};
}

void check_keys(const ojson& object, std::initializer_list<std::string_view> allowed,
                const std::string& context) {
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw SchemaError(context + ": unknown field '" + item.key() + "'");
    }
  }
}

ojson parse_json_line(std::string_view line, const std::string& context) {
  try {
    return ojson::parse(line);
  } catch (const ojson::parse_error& error) {
    throw SyntaxError(context + ": " + error.what());
  }
}

// Imported data must satisfy every unified-format invariant; failures are
// reported with the source line they came from.
void enforce_imported(const TokenizedInstance& instance, const std::string& context) {
  ValidateOptions options;
  options.default_relation_vocab = false;
  ValidationReport report = validate_instance(instance, nullptr, options);
  if (report.ok()) return;
  std::string message = context + ": " + report.violations.front().str();
  switch (report.violations.front().rule) {
    case Rule::Bounds: throw BoundsError(message);
    case Rule::DanglingRef: throw DanglingRefError(message);
    default: throw SchemaError(message);
  }
}

struct SourceArgument {
  ArgumentMention argument;  // sentence-relative offset
  int sent_id;
};

struct SourceMention {
  std::string id;
  std::string trigger_word;
  int sent_id;
  Span offset;  // sentence-relative
  std::vector<SourceArgument> arguments;
};

struct SourceEvent {
  std::string type;
  std::vector<SourceMention> mentions;
};

struct SourceDocument {
  std::string id;
  std::vector<std::vector<std::string>> sentences;
  std::vector<SourceEvent> events;
  RelationSet relations;
  std::string extras;  // unknown top-level fields, preserved
};

SourceDocument read_document(const ojson& value, const std::string& context) {
  if (!value.is_object()) throw SchemaError(context + ": document must be an object");
  SourceDocument document;
  document.id = require_string(value, "id", context);
  const ojson& sentences = require_field(value, "sentences", context);
  if (!sentences.is_array()) throw SchemaError(context + ": 'sentences' must be an array");
  for (const ojson& sentence : sentences) {
    if (!sentence.is_array()) throw SchemaError(context + ": sentences must be token arrays");
    std::vector<std::string> tokens;
    for (const ojson& token : sentence) {
      if (!token.is_string()) throw SchemaError(context + ": tokens must be strings");
      tokens.push_back(token.get<std::string>());
    }
    document.sentences.push_back(std::move(tokens));
  }
  const int n_sentences = static_cast<int>(document.sentences.size());
  auto check_sent = [&](int sent_id, const std::string& owner) {
    if (sent_id < 0 || sent_id >= n_sentences) {
      throw BoundsError(context + ": " + owner + " sent_id " + std::to_string(sent_id) +
                        " outside " + std::to_string(n_sentences) + " sentences");
    }
  };
  auto check_span = [&](Span span, int sent_id, const std::string& owner) {
    const int len = static_cast<int>(document.sentences[static_cast<size_t>(sent_id)].size());
    if (!span.within(len)) {
      throw BoundsError(context + ": " + owner + " offset " + span.str() + " outside sentence " +
                        std::to_string(sent_id) + " (" + std::to_string(len) + " tokens)");
    }
  };
  if (auto it = value.find("events"); it != value.end()) {
    if (!it->is_array()) throw SchemaError(context + ": 'events' must be an array");
    for (const ojson& event_json : *it) {
      if (!event_json.is_object()) throw SchemaError(context + ": events must be objects");
      check_keys(event_json, {"type", "mentions"}, context);
      SourceEvent event;
      event.type = require_string(event_json, "type", context);
      const ojson& mentions = require_field(event_json, "mentions", context);
      if (!mentions.is_array()) throw SchemaError(context + ": 'mentions' must be an array");
      for (const ojson& mention_json : mentions) {
        if (!mention_json.is_object()) throw SchemaError(context + ": mentions must be objects");
        check_keys(mention_json, {"id", "trigger_word", "sent_id", "offset", "arguments"},
                   context);
        SourceMention mention;
        mention.id = require_string(mention_json, "id", context);
        mention.trigger_word = require_string(mention_json, "trigger_word", context);
        mention.sent_id = require_int(mention_json, "sent_id", context);
        mention.offset = span_from_json(require_field(mention_json, "offset", context), context);
        check_sent(mention.sent_id, "mention '" + mention.id + "'");
        check_span(mention.offset, mention.sent_id, "mention '" + mention.id + "'");
        if (auto ait = mention_json.find("arguments"); ait != mention_json.end()) {
          if (!ait->is_array()) throw SchemaError(context + ": 'arguments' must be an array");
          for (const ojson& argument_json : *ait) {
            if (!argument_json.is_object()) {
              throw SchemaError(context + ": arguments must be objects");
            }
            check_keys(argument_json, {"mention", "sent_id", "offset", "role"}, context);
            SourceArgument argument;
            argument.argument.mention = require_string(argument_json, "mention", context);
            argument.argument.role = require_string(argument_json, "role", context);
            argument.sent_id = require_int(argument_json, "sent_id", context);
            argument.argument.offset =
                span_from_json(require_field(argument_json, "offset", context), context);
            check_sent(argument.sent_id, "argument '" + argument.argument.mention + "'");
            check_span(argument.argument.offset, argument.sent_id,
                       "argument '" + argument.argument.mention + "'");
            mention.arguments.push_back(std::move(argument));
          }
        }
        event.mentions.push_back(std::move(mention));
      }
      document.events.push_back(std::move(event));
    }
  }
  for (RelationKind kind : kRelationKinds) {
    std::string_view name = relation_kind_name(kind);
    if (auto it = value.find(name); it != value.end()) {
      if (!it->is_array()) {
        throw SchemaError(context + ": '" + std::string(name) + "' must be an array");
      }
      for (const ojson& triple : *it) {
        if (!triple.is_array() || triple.size() != 3 || !triple[0].is_string() ||
            !triple[1].is_string() || !triple[2].is_string()) {
          throw SchemaError(context + ": '" + std::string(name) +
                            "' entries must be [source, label, target] string triples");
        }
        document.relations.of(kind).push_back({triple[0].get<std::string>(),
                                               triple[1].get<std::string>(),
                                               triple[2].get<std::string>()});
      }
    }
  }
  ojson extras = ojson::object();
  static constexpr std::string_view kKnown[] = {"id",       "sentences", "events",
                                                "temporal", "causal",    "subevent"};
  for (const auto& item : value.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), item.key()) == std::end(kKnown)) {
      extras[item.key()] = item.value();
    }
  }
  if (!extras.empty()) document.extras = extras.dump();
  return document;
}

std::vector<int> sentence_bases(const SourceDocument& document) {
  std::vector<int> bases;
  int base = 0;
  for (const auto& sentence : document.sentences) {
    bases.push_back(base);
    base += static_cast<int>(sentence.size());
  }
  return bases;
}

TokenizedInstance document_instance(const SourceDocument& document, ImportStats* stats) {
  TokenizedInstance instance;
  instance.id = document.id;
  instance.extras = document.extras;
  for (const auto& sentence : document.sentences) {
    instance.tokens.insert(instance.tokens.end(), sentence.begin(), sentence.end());
  }
  std::vector<int> bases = sentence_bases(document);
  auto rebase = [&](Span span, int sent_id) {
    const int base = bases[static_cast<size_t>(sent_id)];
    return Span{span.start + base, span.end + base};
  };
  for (const SourceEvent& source_event : document.events) {
    EventRecord event;
    event.event_type = source_event.type;
    for (const SourceMention& mention : source_event.mentions) {
      TriggerMention trigger;
      trigger.id = mention.id;
      trigger.trigger_word = mention.trigger_word;
      trigger.offset = rebase(mention.offset, mention.sent_id);
      for (const SourceArgument& argument : mention.arguments) {
        ArgumentMention rebased = argument.argument;
        rebased.offset = rebase(argument.argument.offset, argument.sent_id);
        trigger.arguments.push_back(std::move(rebased));
      }
      event.triggers.push_back(std::move(trigger));
    }
    instance.events.push_back(std::move(event));
  }
  instance.relations = document.relations;
  (void)stats;
  return instance;
}

std::vector<TokenizedInstance> sentence_instances(const SourceDocument& document,
                                                  const std::string& context,
                                                  ImportStats* stats) {
  std::vector<TokenizedInstance> instances;
  for (size_t i = 0; i < document.sentences.size(); ++i) {
    TokenizedInstance instance;
    instance.id = document.id + ".s" + std::to_string(i);
    instance.tokens = document.sentences[i];
    instance.extras = document.extras;
    instances.push_back(std::move(instance));
  }
  std::unordered_map<std::string, int> mention_sentence;
  for (const SourceEvent& source_event : document.events) {
    // One EventRecord per sentence the event surfaces in.
    std::map<int, EventRecord> per_sentence;
    for (const SourceMention& mention : source_event.mentions) {
      mention_sentence.emplace(mention.id, mention.sent_id);
      EventRecord& event = per_sentence[mention.sent_id];
      event.event_type = source_event.type;
      TriggerMention trigger;
      trigger.id = mention.id;
      trigger.trigger_word = mention.trigger_word;
      trigger.offset = mention.offset;
      for (const SourceArgument& argument : mention.arguments) {
        if (argument.sent_id != mention.sent_id) {
          if (stats) ++stats->dropped_arguments;
          continue;
        }
        trigger.arguments.push_back(argument.argument);
      }
      event.triggers.push_back(std::move(trigger));
    }
    for (auto& [sent_id, event] : per_sentence) {
      instances[static_cast<size_t>(sent_id)].events.push_back(std::move(event));
    }
  }
  for (RelationKind kind : kRelationKinds) {
    for (const RelationTriple& triple : document.relations.of(kind)) {
      auto source = mention_sentence.find(triple.source);
      auto target = mention_sentence.find(triple.target);
      if (source == mention_sentence.end() || target == mention_sentence.end()) {
        const std::string& missing =
            source == mention_sentence.end() ? triple.source : triple.target;
        throw DanglingRefError(context + ": relation names unknown mention '" + missing + "'");
      }
      if (source->second != target->second) {
        if (stats) ++stats->dropped_relations;
        continue;
      }
      instances[static_cast<size_t>(source->second)].relations.of(kind).push_back(triple);
    }
  }
  return instances;
}

}  // namespace

Corpus import_eventlines(std::string_view bytes, const ImportOptions& options,
                         ImportStats* stats) {
  Corpus corpus;
  ConverterSpec spec;
  spec.name = "eventlines";
  spec.version = std::string(kEventlinesVersion);
  spec.options["granularity"] = options.sentence_level ? "sentence" : "document";
  corpus.meta = std::move(spec);

  std::unordered_set<std::string> seen_ids;
  for_each_line(bytes, true, [&](std::string_view line, size_t line_number, bool) {
    std::string context = line_context(line_number);
    SourceDocument document = read_document(parse_json_line(line, context), context);
    if (stats) ++stats->documents;
    std::vector<TokenizedInstance> instances;
    if (options.sentence_level) {
      instances = sentence_instances(document, context, stats);
    } else {
      instances.push_back(document_instance(document, stats));
    }
    for (TokenizedInstance& instance : instances) {
      enforce_imported(instance, context);
      if (!seen_ids.insert(instance.id).second) {
        throw SchemaError(context + ": duplicate instance id '" + instance.id + "'");
      }
      if (stats) ++stats->instances;
      corpus.instances.push_back(std::move(instance));
    }
  });
  return corpus;
}

namespace {

bool valid_tag_shape(std::string_view tag) {
  if (tag == "O") return true;
  return tag.size() > 2 && (tag.substr(0, 2) == "B-" || tag.substr(0, 2) == "I-");
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Corpus import_conll_bio(std::string_view bytes, const ImportOptions& options,
                        ImportStats* stats) {
  Corpus corpus;
  ConverterSpec spec;
  spec.name = "conll-bio";
  spec.version = std::string(kConllVersion);
  spec.options["id_prefix"] = options.id_prefix;
  corpus.meta = std::move(spec);

  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  size_t sentence_index = 0;

  auto flush = [&] {
    if (tokens.empty()) return;
    TokenizedInstance instance;
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, ".%04zu", ++sentence_index);
    instance.id = options.id_prefix + suffix;
    instance.tokens = std::move(tokens);
    tokens.clear();
    size_t trigger_count = 0;
    for (const BioSpan& span : decode_bio(tags, instance.tokens.size(), BioMode::Strict)) {
      EventRecord event;
      event.event_type = span.label;
      TriggerMention trigger;
      trigger.id = "t" + std::to_string(++trigger_count);
      trigger.offset = span.offset;
      trigger.trigger_word = join_tokens(instance.tokens, span.offset);
      event.triggers.push_back(std::move(trigger));
      instance.events.push_back(std::move(event));
    }
    tags.clear();
    if (stats) ++stats->instances;
    corpus.instances.push_back(std::move(instance));
  };

  for_each_line(bytes, false, [&](std::string_view line, size_t line_number, bool blank) {
    if (blank) {
      flush();
      return;
    }
    line = trim_view(line);
    size_t split = line.find_last_of(" \t");
    std::string_view token = trim_view(line.substr(0, split));
    std::string_view tag = split == std::string_view::npos ? std::string_view{}
                                                           : trim_view(line.substr(split + 1));
    if (token.empty() || tag.empty() || token.find_first_of(" \t") != std::string_view::npos) {
      throw SchemaError(line_context(line_number) + ": expected 'token TAG'");
    }
    if (!valid_tag_shape(tag)) {
      throw TagSyntaxError(line_context(line_number) + ": unparseable tag '" + std::string(tag) +
                           "'");
    }
    tokens.emplace_back(token);
    tags.emplace_back(tag);
  });
  flush();
  return corpus;
}

std::size_t TriggerBank::size() const {
  std::size_t total = 0;
  for (const auto& [id, entries] : by_instance) total += entries.size();
  return total;
}

TriggerBank bank_from_gold(const Corpus& corpus) {
  TriggerBank bank;
  for (const TokenizedInstance& instance : corpus.instances) {
    std::vector<BankEntry>& entries = bank.by_instance[instance.id];
    for (const EventRecord& event : instance.events) {
      for (const TriggerMention& trigger : event.triggers) {
        entries.push_back({trigger.id, trigger.offset, event.event_type});
      }
    }
  }
  return bank;
}

std::string serialize_trigger_bank(const TriggerBank& bank) {
  std::string out;
  for (const auto& [instance_id, entries] : bank.by_instance) {
    ojson triggers = ojson::array();
    for (const BankEntry& entry : entries) {
      triggers.push_back({{"id", entry.id},
                          {"offset", ojson::array({entry.offset.start, entry.offset.end})},
                          {"type", entry.type}});
    }
    ojson line = {{"id", instance_id}, {"triggers", std::move(triggers)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

TriggerBank parse_trigger_bank(std::string_view bytes, const Corpus& corpus,
                               const BankLoadOptions& options) {
  std::unordered_map<std::string_view, const TokenizedInstance*> index;
  for (const TokenizedInstance& instance : corpus.instances) index[instance.id] = &instance;

  TriggerBank bank;
  for_each_line(bytes, true, [&](std::string_view line, size_t line_number, bool) {
    std::string context = line_context(line_number);
    ojson value = parse_json_line(line, context);
    if (!value.is_object()) throw SchemaError(context + ": bank line must be an object");
    check_keys(value, {"id", "triggers"}, context);
    std::string instance_id = require_string(value, "id", context);
    auto instance_it = index.find(instance_id);
    if (instance_it == index.end()) {
      if (options.ignore_unknown) return;
      throw DanglingInstanceError(context + ": bank references unknown instance '" +
                                  instance_id + "'");
    }
    if (bank.by_instance.count(instance_id)) {
      throw SchemaError(context + ": duplicate bank line for instance '" + instance_id + "'");
    }
    const int n_tokens = static_cast<int>(instance_it->second->tokens.size());
    std::vector<BankEntry>& entries = bank.by_instance[instance_id];
    const ojson& triggers = require_field(value, "triggers", context);
    if (!triggers.is_array()) throw SchemaError(context + ": 'triggers' must be an array");
    for (const ojson& trigger : triggers) {
      if (!trigger.is_object()) throw SchemaError(context + ": triggers must be objects");
      check_keys(trigger, {"id", "offset", "type"}, context);
      BankEntry entry{require_string(trigger, "id", context),
                      span_from_json(require_field(trigger, "offset", context), context),
                      require_string(trigger, "type", context)};
      if (!entry.offset.within(n_tokens)) {
        throw BoundsError(context + ": trigger '" + entry.id + "' offset " + entry.offset.str() +
                          " outside " + std::to_string(n_tokens) + " tokens of '" + instance_id +
                          "'");
      }
      entries.push_back(std::move(entry));
    }
  });
  return bank;
}

std::uint64_t bank_content_hash(const TriggerBank& bank) {
  std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char byte : serialize_trigger_bank(bank)) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string bank_content_hash_hex(const TriggerBank& bank) {
  char out[17];
  std::snprintf(out, sizeof out, "%016llx",
                static_cast<unsigned long long>(bank_content_hash(bank)));
  return out;
}

}  // namespace evee
