#include "evee/json_io.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "evee/errors.hpp"
#include "evee/validate.hpp"

namespace evee {

using ojson = nlohmann::ordered_json;

namespace {

std::string where(std::string_view context) {
  return context.empty() ? std::string() : std::string(context) + ": ";
}

const ojson& require_field(const ojson& object, const char* key, std::string_view context) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw SchemaError(where(context) + "missing field '" + key + "'");
  }
  return *it;
}

std::string require_string(const ojson& object, const char* key, std::string_view context) {
  const ojson& value = require_field(object, key, context);
  if (!value.is_string()) {
    throw SchemaError(where(context) + "field '" + key + "' must be a string");
  }
  return value.get<std::string>();
}

void check_keys(const ojson& object, std::initializer_list<std::string_view> allowed,
                std::string_view context) {
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw SchemaError(where(context) + "unknown field '" + item.key() + "'");
    }
  }
}

Span span_from_json(const ojson& value, std::string_view context) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
      !value[1].is_number_integer()) {
    throw SchemaError(where(context) + "'offset' must be a [start, end] integer pair");
  }
  constexpr std::int64_t kLimit = 1'000'000'000;
  std::int64_t start = value[0].get<std::int64_t>();
  std::int64_t end = value[1].get<std::int64_t>();
  if (start < -kLimit || start > kLimit || end < -kLimit || end > kLimit) {
    throw SchemaError(where(context) + "offset out of representable range");
  }
  return Span{static_cast<int>(start), static_cast<int>(end)};
}

ArgumentMention argument_from_json(const ojson& value, std::string_view context) {
  if (!value.is_object()) throw SchemaError(where(context) + "argument must be an object");
  check_keys(value, {"mention", "offset", "role"}, context);
  ArgumentMention argument;
  argument.mention = require_string(value, "mention", context);
  argument.offset = span_from_json(require_field(value, "offset", context), context);
  argument.role = require_string(value, "role", context);
  return argument;
}

TriggerMention trigger_from_json(const ojson& value, std::string_view context) {
  if (!value.is_object()) throw SchemaError(where(context) + "trigger must be an object");
  check_keys(value, {"id", "trigger_word", "offset", "arguments"}, context);
  TriggerMention trigger;
  trigger.id = require_string(value, "id", context);
  trigger.trigger_word = require_string(value, "trigger_word", context);
  trigger.offset = span_from_json(require_field(value, "offset", context), context);
  if (auto it = value.find("arguments"); it != value.end()) {
    if (!it->is_array()) throw SchemaError(where(context) + "'arguments' must be an array");
    for (const ojson& argument : *it) {
      trigger.arguments.push_back(argument_from_json(argument, context));
    }
  }
  return trigger;
}

EventRecord event_from_json(const ojson& value, std::string_view context) {
  if (!value.is_object()) throw SchemaError(where(context) + "event must be an object");
  check_keys(value, {"type", "triggers"}, context);
  EventRecord event;
  event.event_type = require_string(value, "type", context);
  const ojson& triggers = require_field(value, "triggers", context);
  if (triggers.is_object()) {
    // Single-trigger shorthand; the canonical form is a list.
    event.triggers.push_back(trigger_from_json(triggers, context));
  } else if (triggers.is_array()) {
    for (const ojson& trigger : triggers) {
      event.triggers.push_back(trigger_from_json(trigger, context));
    }
  } else {
    throw SchemaError(where(context) + "'triggers' must be a list or a single object");
  }
  return event;
}

std::vector<RelationTriple> triples_from_json(const ojson& value, std::string_view kind,
                                              std::string_view context) {
  if (!value.is_array()) {
    throw SchemaError(where(context) + "'" + std::string(kind) + "' must be an array");
  }
  std::vector<RelationTriple> triples;
  for (const ojson& triple : value) {
    if (!triple.is_array() || triple.size() != 3 || !triple[0].is_string() ||
        !triple[1].is_string() || !triple[2].is_string()) {
      throw SchemaError(where(context) + "'" + std::string(kind) +
                        "' entries must be [source, label, target] string triples");
    }
    triples.push_back({triple[0].get<std::string>(), triple[1].get<std::string>(),
                       triple[2].get<std::string>()});
  }
  return triples;
}

TokenizedInstance instance_from_json(const ojson& value, std::string_view context) {
  if (!value.is_object()) throw SchemaError(where(context) + "instance must be an object");
  check_keys(value, {"id", "text", "tokens", "events", "event-relations", "extras"}, context);
  TokenizedInstance instance;
  instance.id = require_string(value, "id", context);
  const ojson& tokens = require_field(value, "tokens", context);
  if (!tokens.is_array()) throw SchemaError(where(context) + "'tokens' must be an array");
  for (const ojson& token : tokens) {
    if (!token.is_string()) throw SchemaError(where(context) + "tokens must be strings");
    instance.tokens.push_back(token.get<std::string>());
  }
  if (auto it = value.find("text"); it != value.end()) {
    if (!it->is_string()) throw SchemaError(where(context) + "'text' must be a string");
    instance.text = it->get<std::string>();
  }
  if (auto it = value.find("events"); it != value.end()) {
    if (!it->is_array()) throw SchemaError(where(context) + "'events' must be an array");
    for (const ojson& event : *it) {
      instance.events.push_back(event_from_json(event, context));
    }
  }
  if (auto it = value.find("event-relations"); it != value.end()) {
    if (!it->is_object()) {
      throw SchemaError(where(context) + "'event-relations' must be an object");
    }
    check_keys(*it, {"temporal", "causal", "subevent"}, context);
    for (RelationKind kind : kRelationKinds) {
      std::string_view name = relation_kind_name(kind);
      if (auto kit = it->find(name); kit != it->end()) {
        instance.relations.of(kind) = triples_from_json(*kit, name, context);
      }
    }
  }
  if (auto it = value.find("extras"); it != value.end()) {
    if (!it->is_object()) throw SchemaError(where(context) + "'extras' must be an object");
    if (!it->empty()) instance.extras = it->dump();
  }
  return instance;
}

ConverterSpec meta_from_json(const ojson& value, std::string_view context) {
  if (!value.is_object()) throw SchemaError(where(context) + "'_meta' must be an object");
  check_keys(value, {"converter", "version", "options"}, context);
  ConverterSpec spec;
  spec.name = require_string(value, "converter", context);
  spec.version = require_string(value, "version", context);
  if (auto it = value.find("options"); it != value.end()) {
    if (!it->is_object()) throw SchemaError(where(context) + "'options' must be an object");
    for (const auto& item : it->items()) {
      if (!item.value().is_string()) {
        throw SchemaError(where(context) + "option values must be strings");
      }
      spec.options[item.key()] = item.value().get<std::string>();
    }
  }
  return spec;
}

// Per-instance invariants enforced at parse time. Vocabulary needs an
// ontology and trigger_word mismatches are validation findings, so neither
// blocks parsing.
void enforce_instance_invariants(const TokenizedInstance& instance, std::string_view context) {
  ValidateOptions options;
  options.lenient = true;
  options.default_relation_vocab = false;
  ValidationReport report = validate_instance(instance, nullptr, options);
  if (report.ok()) return;
  const Violation& first = report.violations.front();
  std::string message = where(context) + first.str();
  switch (first.rule) {
    case Rule::Bounds: throw BoundsError(message);
    case Rule::DanglingRef: throw DanglingRefError(message);
    default: throw SchemaError(message);
  }
}

struct RawLine {
  std::string_view text;
  size_t number = 0;  // 1-based
};

std::vector<RawLine> split_lines(std::string_view bytes) {
  std::vector<RawLine> lines;
  size_t line_number = 0;
  size_t position = 0;
  while (position <= bytes.size()) {
    size_t newline = bytes.find('\n', position);
    std::string_view line = bytes.substr(
        position, newline == std::string_view::npos ? bytes.size() - position : newline - position);
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
    if (!blank) lines.push_back({line, line_number});
    if (newline == std::string_view::npos) break;
    position = newline + 1;
  }
  return lines;
}

std::string line_context(size_t line_number) {
  return "line " + std::to_string(line_number);
}

// Parses one JSONL line into either the meta header or an instance.
void parse_line(const RawLine& line, bool is_first, Corpus& corpus, const ParseOptions& options) {
  std::string context = line_context(line.number);
  ojson value;
  try {
    value = ojson::parse(line.text);
  } catch (const ojson::parse_error& error) {
    throw SyntaxError(context + ": " + error.what());
  }
  if (value.is_object() && value.contains("_meta")) {
    if (!is_first) throw SchemaError(context + ": '_meta' header only allowed on the first line");
    check_keys(value, {"_meta"}, context);
    corpus.meta = meta_from_json(value["_meta"], context);
    return;
  }
  TokenizedInstance instance = instance_from_json(value, context);
  if (options.enforce_invariants) enforce_instance_invariants(instance, context);
  corpus.instances.push_back(std::move(instance));
}

Corpus parse_array_document(std::string_view bytes, const ParseOptions& options) {
  ojson document;
  try {
    document = ojson::parse(bytes);
  } catch (const ojson::parse_error& error) {
    throw SyntaxError(std::string("array document: ") + error.what());
  }
  if (!document.is_array()) {
    throw SchemaError("top-level document must be a JSON array or JSONL");
  }
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  for (size_t i = 0; i < document.size(); ++i) {
    std::string context = "element " + std::to_string(i);
    const ojson& value = document[i];
    if (value.is_object() && value.contains("_meta")) {
      if (i != 0) throw SchemaError(context + ": '_meta' header only allowed first");
      check_keys(value, {"_meta"}, context);
      corpus.meta = meta_from_json(value["_meta"], context);
      continue;
    }
    TokenizedInstance instance = instance_from_json(value, context);
    if (options.enforce_invariants) {
      enforce_instance_invariants(instance, context);
      if (!seen_ids.insert(instance.id).second) {
        throw SchemaError(context + ": duplicate instance id '" + instance.id + "'");
      }
    }
    corpus.instances.push_back(std::move(instance));
  }
  return corpus;
}

bool looks_like_array(std::string_view bytes) {
  size_t first = bytes.find_first_not_of(" \t\r\n");
  return first != std::string_view::npos && bytes[first] == '[';
}

}  // namespace

Corpus parse_unified(std::string_view bytes, const ParseOptions& options) {
  if (looks_like_array(bytes)) return parse_array_document(bytes, options);
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::vector<RawLine> lines = split_lines(bytes);
  for (size_t i = 0; i < lines.size(); ++i) {
    size_t instances_before = corpus.instances.size();
    parse_line(lines[i], i == 0, corpus, options);
    if (options.enforce_invariants && corpus.instances.size() > instances_before) {
      const std::string& id = corpus.instances.back().id;
      if (!seen_ids.insert(id).second) {
        throw SchemaError(line_context(lines[i].number) + ": duplicate instance id '" + id + "'");
      }
    }
  }
  return corpus;
}

Corpus parse_unified_parallel(std::string_view bytes, const ParseOptions& options, int threads) {
  if (threads <= 1 || looks_like_array(bytes)) return parse_unified(bytes, options);

  std::vector<RawLine> lines = split_lines(bytes);
  const size_t n = lines.size();
  // One slot per line; the meta header occupies a slot with no instance.
  std::vector<std::optional<TokenizedInstance>> slots(n);
  std::vector<std::exception_ptr> failures(n);
  std::optional<ConverterSpec> meta;

#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (size_t i = 0; i < n; ++i) {
    try {
      Corpus local;
      parse_line(lines[i], i == 0, local, options);
      if (!local.instances.empty()) {
        slots[i] = std::move(local.instances.front());
      } else if (local.meta) {
#pragma omp critical(evee_parse_meta)
        meta = std::move(local.meta);
      }
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }

  // Replay in input order so the first error matches the serial path.
  Corpus corpus;
  corpus.meta = std::move(meta);
  std::unordered_set<std::string> seen_ids;
  for (size_t i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
    if (!slots[i]) continue;
    if (options.enforce_invariants && !seen_ids.insert(slots[i]->id).second) {
      throw SchemaError(line_context(lines[i].number) + ": duplicate instance id '" +
                        slots[i]->id + "'");
    }
    corpus.instances.push_back(std::move(*slots[i]));
  }
  return corpus;
}

namespace {

ojson span_to_json(Span span) { return ojson::array({span.start, span.end}); }

ojson triples_to_json(const std::vector<RelationTriple>& triples) {
  ojson out = ojson::array();
  for (const RelationTriple& triple : triples) {
    out.push_back(ojson::array({triple.source, triple.label, triple.target}));
  }
  return out;
}

ojson instance_to_json(const TokenizedInstance& instance) {
  ojson out = ojson::object();
  out["id"] = instance.id;
  if (instance.text) out["text"] = *instance.text;
  out["tokens"] = instance.tokens;
  ojson events = ojson::array();
  for (const EventRecord& event : instance.events) {
    ojson triggers = ojson::array();
    for (const TriggerMention& trigger : event.triggers) {
      ojson arguments = ojson::array();
      for (const ArgumentMention& argument : trigger.arguments) {
        arguments.push_back({{"mention", argument.mention},
                             {"offset", span_to_json(argument.offset)},
                             {"role", argument.role}});
      }
      triggers.push_back({{"id", trigger.id},
                          {"trigger_word", trigger.trigger_word},
                          {"offset", span_to_json(trigger.offset)},
                          {"arguments", std::move(arguments)}});
    }
    events.push_back({{"type", event.event_type}, {"triggers", std::move(triggers)}});
  }
  out["events"] = std::move(events);
  out["event-relations"] = {{"temporal", triples_to_json(instance.relations.temporal)},
                            {"causal", triples_to_json(instance.relations.causal)},
                            {"subevent", triples_to_json(instance.relations.subevent)}};
  if (!instance.extras.empty()) out["extras"] = ojson::parse(instance.extras);
  return out;
}

}  // namespace

std::string serialize_unified(const Corpus& corpus) {
  std::string out;
  if (corpus.meta) {
    ojson options = ojson::object();
    for (const auto& [key, value] : corpus.meta->options) options[key] = value;
    ojson meta = {{"_meta",
                   {{"converter", corpus.meta->name},
                    {"version", corpus.meta->version},
                    {"options", std::move(options)}}}};
    out += meta.dump();
    out += '\n';
  }
  for (const TokenizedInstance& instance : corpus.instances) {
    out += instance_to_json(instance).dump();
    out += '\n';
  }
  return out;
}

Ontology parse_ontology(std::string_view bytes) {
  ojson value;
  try {
    value = ojson::parse(bytes);
  } catch (const ojson::parse_error& error) {
    throw SyntaxError(std::string("ontology: ") + error.what());
  }
  if (!value.is_object()) throw SchemaError("ontology: top level must be an object");
  check_keys(value, {"name", "event_types", "roles", "relation_labels"}, "ontology");
  Ontology ontology;
  ontology.name = require_string(value, "name", "ontology");
  auto read_set = [&](const char* key) {
    std::set<std::string> out;
    if (auto it = value.find(key); it != value.end()) {
      if (!it->is_array()) throw SchemaError(std::string("ontology: '") + key + "' must be an array");
      for (const ojson& entry : *it) {
        if (!entry.is_string()) throw SchemaError(std::string("ontology: '") + key + "' entries must be strings");
        out.insert(entry.get<std::string>());
      }
    }
    return out;
  };
  ontology.event_types = read_set("event_types");
  ontology.roles = read_set("roles");
  if (auto it = value.find("relation_labels"); it != value.end()) {
    if (!it->is_object()) throw SchemaError("ontology: 'relation_labels' must be an object");
    for (const auto& item : it->items()) {
      std::set<std::string> labels;
      if (!item.value().is_array()) {
        throw SchemaError("ontology: relation label vocabularies must be arrays");
      }
      for (const ojson& entry : item.value()) {
        if (!entry.is_string()) throw SchemaError("ontology: relation labels must be strings");
        labels.insert(entry.get<std::string>());
      }
      ontology.relation_labels[item.key()] = std::move(labels);
    }
  }
  return ontology;
}

std::string serialize_ontology(const Ontology& ontology) {
  ojson out = ojson::object();
  out["name"] = ontology.name;
  out["event_types"] = ontology.event_types;
  out["roles"] = ontology.roles;
  ojson labels = ojson::object();
  for (const auto& [kind, vocabulary] : ontology.relation_labels) labels[kind] = vocabulary;
  out["relation_labels"] = std::move(labels);
  return out.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  if (stream.bad()) throw IoError("error while reading '" + path + "'");
  return std::move(buffer).str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream) throw IoError("cannot open '" + path + "' for writing");
  stream.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!stream) throw IoError("error while writing '" + path + "'");
}

}  // namespace evee
