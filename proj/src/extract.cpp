#include "evee/extract.hpp"

#include <algorithm>
#include <set>

#include "evee/errors.hpp"

namespace evee {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t position = 0;
  while (true) {
    size_t tab = line.find('\t', position);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(position));
      return fields;
    }
    fields.push_back(line.substr(position, tab - position));
    position = tab + 1;
  }
}

std::vector<std::string> surface_tokens(std::string_view surface, size_t line_number) {
  std::vector<std::string> tokens = tokenize_whitespace(surface);
  if (tokens.empty()) {
    throw SchemaError("line " + std::to_string(line_number) + ": empty gazetteer surface");
  }
  return tokens;
}

std::vector<SpanLabel> munch(const std::map<std::vector<std::string>, std::string>& rules,
                             const std::vector<std::string>& tokens) {
  std::set<size_t, std::greater<size_t>> lengths;
  for (const auto& [key, label] : rules) lengths.insert(key.size());

  std::vector<SpanLabel> matches;
  std::vector<std::string> window;
  size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    for (size_t length : lengths) {
      if (i + length > tokens.size()) continue;
      window.assign(tokens.begin() + static_cast<long>(i),
                    tokens.begin() + static_cast<long>(i + length));
      auto it = rules.find(window);
      if (it != rules.end()) {
        matches.push_back(
            {Span{static_cast<int>(i), static_cast<int>(i + length)}, it->second});
        i += length;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return matches;
}

}  // namespace

Gazetteer parse_gazetteer(std::string_view bytes) {
  Gazetteer gazetteer;
  size_t line_number = 0;
  size_t position = 0;
  while (position <= bytes.size()) {
    size_t newline = bytes.find('\n', position);
    std::string_view line = bytes.substr(
        position, newline == std::string_view::npos ? bytes.size() - position : newline - position);
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      std::vector<std::string_view> fields = split_tabs(line);
      if (fields.size() == 2) {
        gazetteer.triggers[surface_tokens(fields[0], line_number)] = std::string(fields[1]);
      } else if (fields.size() == 3) {
        gazetteer.arguments[normalize_label(fields[0])][surface_tokens(fields[1], line_number)] =
            std::string(fields[2]);
      } else {
        throw SchemaError("line " + std::to_string(line_number) +
                          ": expected 2 (trigger) or 3 (argument) tab-separated fields, got " +
                          std::to_string(fields.size()));
      }
    }
    if (newline == std::string_view::npos) break;
    position = newline + 1;
  }
  return gazetteer;
}

std::vector<SpanLabel> match_triggers(const Gazetteer& gazetteer,
                                      const std::vector<std::string>& tokens) {
  return munch(gazetteer.triggers, tokens);
}

std::vector<SpanLabel> match_arguments(const Gazetteer& gazetteer, std::string_view event_type,
                                       const std::vector<std::string>& tokens) {
  auto it = gazetteer.arguments.find(normalize_label(event_type));
  if (it == gazetteer.arguments.end()) return {};
  return munch(it->second, tokens);
}

EdPrediction extract_ed(const TokenizedInstance& instance, const Gazetteer& gazetteer,
                        Paradigm paradigm) {
  return {instance.id, encode_spans(paradigm, instance, match_triggers(gazetteer, instance.tokens))};
}

EaePrediction extract_eae(const TokenizedInstance& instance, const Gazetteer& gazetteer,
                          Paradigm paradigm) {
  EaePrediction prediction;
  prediction.instance_id = instance.id;
  for (const SpanLabel& trigger : match_triggers(gazetteer, instance.tokens)) {
    prediction.groups.push_back(
        {trigger.offset,
         encode_spans(paradigm, instance, match_arguments(gazetteer, trigger.label,
                                                          instance.tokens))});
  }
  return prediction;
}

std::vector<RelationTriple> heuristic_temporal(const TokenizedInstance& instance) {
  struct Start {
    int start;
    std::string id;
  };
  std::vector<Start> triggers;
  for (const EventRecord& event : instance.events) {
    for (const TriggerMention& trigger : event.triggers) {
      triggers.push_back({trigger.offset.start, trigger.id});
    }
  }
  std::sort(triggers.begin(), triggers.end(), [](const Start& a, const Start& b) {
    return std::tie(a.start, a.id) < std::tie(b.start, b.id);
  });
  std::vector<RelationTriple> triples;
  for (size_t i = 0; i < triggers.size(); ++i) {
    for (size_t j = i + 1; j < triggers.size(); ++j) {
      if (triggers[i].start < triggers[j].start) {
        triples.push_back({triggers[i].id, "before", triggers[j].id});
      }
    }
  }
  return triples;
}

ErePrediction extract_ere(const TokenizedInstance& instance) {
  ErePrediction prediction;
  prediction.instance_id = instance.id;
  prediction.relations.temporal = heuristic_temporal(instance);
  return prediction;
}

}  // namespace evee
