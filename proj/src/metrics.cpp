#include "evee/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "evee/errors.hpp"

namespace evee {

using ojson = nlohmann::ordered_json;

PRF PRF::from_counts(std::size_t tp, std::size_t pred_count, std::size_t gold_count) {
  PRF out;
  out.tp = tp;
  out.pred_count = pred_count;
  out.gold_count = gold_count;
  out.precision = pred_count == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(pred_count);
  out.recall = gold_count == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(gold_count);
  out.f1 = out.precision + out.recall > 0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

MicroCounts& MicroCounts::operator+=(const MicroCounts& other) {
  tp += other.tp;
  pred += other.pred;
  gold += other.gold;
  return *this;
}

namespace {

using SpanKey = std::pair<int, int>;
using MentionKey = std::pair<SpanKey, std::string>;

SpanKey key_of(Span span) { return {span.start, span.end}; }

MentionKey mention_key(Span offset, const std::string& label, MatchMode mode) {
  return {key_of(offset), mode == MatchMode::Classification ? label : std::string()};
}

std::size_t intersect_count(const std::map<MentionKey, std::size_t>& predicted,
                            const std::map<MentionKey, std::size_t>& gold) {
  std::size_t tp = 0;
  for (const auto& [key, n] : predicted) {
    auto it = gold.find(key);
    if (it != gold.end()) tp += std::min(n, it->second);
  }
  return tp;
}

}  // namespace

MicroCounts trigger_counts(const TokenizedInstance& instance,
                           const std::vector<UnifiedMention>& predictions, MatchMode mode,
                           Diagnostics& diagnostics) {
  MicroCounts counts;
  std::map<MentionKey, std::size_t> predicted;
  std::set<UnifiedMention> seen;
  for (const UnifiedMention& mention : predictions) {
    if (!seen.insert(mention).second) {
      ++diagnostics.deduped;
      continue;
    }
    ++counts.pred;
    ++predicted[mention_key(mention.offset, mention.label, mode)];
  }
  std::map<MentionKey, std::size_t> gold;
  for (const EventRecord& event : instance.events) {
    std::string label = normalize_label(event.event_type);
    for (const TriggerMention& trigger : event.triggers) {
      ++counts.gold;
      ++gold[mention_key(trigger.offset, label, mode)];
    }
  }
  counts.tp = intersect_count(predicted, gold);
  return counts;
}

MicroCounts argument_counts(const TokenizedInstance& instance,
                            const std::vector<UnifiedMention>& predictions,
                            const std::vector<BankEntry>* bank_entries, MatchMode mode,
                            TriggerMatchPolicy policy, Diagnostics& diagnostics) {
  MicroCounts counts;
  std::vector<std::map<MentionKey, std::size_t>> gold_by_event(instance.events.size());
  for (size_t e = 0; e < instance.events.size(); ++e) {
    for (const TriggerMention& trigger : instance.events[e].triggers) {
      for (const ArgumentMention& argument : trigger.arguments) {
        ++counts.gold;
        ++gold_by_event[e][mention_key(argument.offset, normalize_label(argument.role), mode)];
      }
    }
  }

  // First gold event owning a trigger at `offset` whose type (when required)
  // matches `type_norm`; empty type skips the type test.
  auto match_gold_event = [&](Span offset, const std::string& type_norm) -> std::optional<size_t> {
    for (size_t e = 0; e < instance.events.size(); ++e) {
      if (!type_norm.empty() && normalize_label(instance.events[e].event_type) != type_norm) {
        continue;
      }
      for (const TriggerMention& trigger : instance.events[e].triggers) {
        if (trigger.offset == offset) return e;
      }
    }
    return std::nullopt;
  };

  std::map<SpanKey, std::optional<size_t>> resolved;
  auto resolve = [&](Span ref) -> std::optional<size_t> {
    auto cached = resolved.find(key_of(ref));
    if (cached != resolved.end()) return cached->second;
    std::optional<size_t> event_index;
    if (bank_entries == nullptr) {
      event_index = match_gold_event(ref, std::string());
      if (!event_index) {
        throw DanglingTriggerRefError("instance '" + instance.id + "': no gold trigger at " +
                                      ref.str());
      }
    } else {
      const BankEntry* entry = nullptr;
      for (const BankEntry& candidate : *bank_entries) {
        if (candidate.offset == ref) {
          entry = &candidate;
          break;
        }
      }
      if (entry == nullptr) {
        throw DanglingTriggerRefError("instance '" + instance.id + "': governing trigger " +
                                      ref.str() + " not in bank");
      }
      // A bank trigger absent from gold is spurious: arguments under it
      // can only be false positives.
      event_index = match_gold_event(ref, policy == TriggerMatchPolicy::OffsetAndType
                                              ? normalize_label(entry->type)
                                              : std::string());
    }
    resolved.emplace(key_of(ref), event_index);
    return event_index;
  };

  std::map<size_t, std::map<MentionKey, std::size_t>> predicted_by_event;
  std::set<UnifiedMention> seen;
  for (const UnifiedMention& mention : predictions) {
    if (!mention.trigger_offset) {
      throw SchemaError("instance '" + instance.id +
                        "': argument prediction lacks a governing trigger");
    }
    if (!seen.insert(mention).second) {
      ++diagnostics.deduped;
      continue;
    }
    ++counts.pred;
    std::optional<size_t> event_index = resolve(*mention.trigger_offset);
    if (!event_index) continue;
    ++predicted_by_event[*event_index][mention_key(mention.offset, mention.label, mode)];
  }
  for (const auto& [event_index, predicted] : predicted_by_event) {
    counts.tp += intersect_count(predicted, gold_by_event[event_index]);
  }
  return counts;
}

namespace {

std::unordered_map<std::string_view, const TokenizedInstance*> instance_index(
    const Corpus& corpus) {
  std::unordered_map<std::string_view, const TokenizedInstance*> index;
  for (const TokenizedInstance& instance : corpus.instances) index[instance.id] = &instance;
  return index;
}

std::unordered_map<std::string_view, std::vector<UnifiedMention>> group_mentions(
    const std::vector<UnifiedMention>& predictions, const Corpus& corpus) {
  auto index = instance_index(corpus);
  std::unordered_map<std::string_view, std::vector<UnifiedMention>> grouped;
  for (const UnifiedMention& mention : predictions) {
    if (!index.count(mention.instance_id)) {
      throw UnknownInstanceError("prediction references absent instance '" + mention.instance_id +
                                 "'");
    }
    grouped[mention.instance_id].push_back(mention);
  }
  return grouped;
}

const std::vector<UnifiedMention>& mentions_for(
    const std::unordered_map<std::string_view, std::vector<UnifiedMention>>& grouped,
    const TokenizedInstance& instance) {
  static const std::vector<UnifiedMention> kNone;
  auto it = grouped.find(instance.id);
  return it == grouped.end() ? kNone : it->second;
}

}  // namespace

PRF score_triggers(const std::vector<UnifiedMention>& predictions, const Corpus& gold,
                   MatchMode mode, Diagnostics* diagnostics) {
  Diagnostics local;
  Diagnostics& diag = diagnostics ? *diagnostics : local;
  auto grouped = group_mentions(predictions, gold);
  MicroCounts counts;
  for (const TokenizedInstance& instance : gold.instances) {
    counts += trigger_counts(instance, mentions_for(grouped, instance), mode, diag);
  }
  return counts.finalize();
}

PRF score_arguments(const std::vector<UnifiedMention>& predictions, const Corpus& gold,
                    const TriggerBank* bank, MatchMode mode, TriggerMatchPolicy policy,
                    Diagnostics* diagnostics) {
  Diagnostics local;
  Diagnostics& diag = diagnostics ? *diagnostics : local;
  auto grouped = group_mentions(predictions, gold);
  static const std::vector<BankEntry> kNoEntries;
  MicroCounts counts;
  for (const TokenizedInstance& instance : gold.instances) {
    const std::vector<BankEntry>* entries = nullptr;
    if (bank) {
      auto it = bank->by_instance.find(instance.id);
      entries = it == bank->by_instance.end() ? &kNoEntries : &it->second;
    }
    counts += argument_counts(instance, mentions_for(grouped, instance), entries, mode, policy,
                              diag);
  }
  return counts.finalize();
}

BcubedSums& BcubedSums::operator+=(const BcubedSums& other) {
  precision_sum += other.precision_sum;
  recall_sum += other.recall_sum;
  mentions += other.mentions;
  return *this;
}

PRF BcubedSums::finalize() const {
  PRF out;
  out.tp = 0;
  out.pred_count = mentions;
  out.gold_count = mentions;
  if (mentions == 0) {
    out.precision = out.recall = out.f1 = 1.0;
    return out;
  }
  out.precision = static_cast<double>(precision_sum / static_cast<long double>(mentions));
  out.recall = static_cast<double>(recall_sum / static_cast<long double>(mentions));
  out.f1 = out.precision + out.recall > 0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

namespace {

std::unordered_map<std::string_view, size_t> index_partition(const std::vector<Cluster>& clusters,
                                                             std::string_view side) {
  std::unordered_map<std::string_view, size_t> index;
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (const std::string& mention : clusters[c]) {
      if (!index.emplace(mention, c).second) {
        throw PartitionError("mention '" + mention + "' appears twice in " + std::string(side) +
                             " clusters");
      }
    }
  }
  return index;
}

}  // namespace

BcubedSums bcubed_sums(const std::vector<Cluster>& predicted, const std::vector<Cluster>& gold) {
  auto predicted_index = index_partition(predicted, "predicted");
  auto gold_index = index_partition(gold, "gold");
  if (predicted_index.size() != gold_index.size()) {
    throw PartitionError("mention universes differ (" + std::to_string(predicted_index.size()) +
                         " predicted vs " + std::to_string(gold_index.size()) + " gold)");
  }
  for (const auto& [mention, cluster] : gold_index) {
    if (!predicted_index.count(mention)) {
      throw PartitionError("mention '" + std::string(mention) + "' missing from predicted clusters");
    }
  }

  std::map<std::pair<size_t, size_t>, std::size_t> overlap;
  for (size_t g = 0; g < gold.size(); ++g) {
    for (const std::string& mention : gold[g]) {
      ++overlap[{predicted_index.at(mention), g}];
    }
  }

  BcubedSums sums;
  for (size_t g = 0; g < gold.size(); ++g) {
    for (const std::string& mention : gold[g]) {
      size_t p = predicted_index.at(mention);
      auto shared = static_cast<long double>(overlap.at({p, g}));
      sums.precision_sum += shared / static_cast<long double>(predicted[p].size());
      sums.recall_sum += shared / static_cast<long double>(gold[g].size());
      ++sums.mentions;
    }
  }
  return sums;
}

PRF bcubed(const std::vector<Cluster>& predicted, const std::vector<Cluster>& gold) {
  return bcubed_sums(predicted, gold).finalize();
}

std::vector<Cluster> clusters_from_links(
    const std::vector<std::pair<std::string, std::string>>& links,
    const std::vector<std::string>& universe) {
  std::map<std::string, size_t> index;  // sorted: deterministic cluster order
  for (const std::string& mention : universe) index.emplace(mention, 0);
  for (const auto& [a, b] : links) {
    index.emplace(a, 0);
    index.emplace(b, 0);
  }
  size_t next = 0;
  for (auto& [mention, slot] : index) slot = next++;

  std::vector<size_t> parent(index.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [a, b] : links) {
    size_t ra = find(index.at(a));
    size_t rb = find(index.at(b));
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  std::map<size_t, Cluster> by_root;
  for (const auto& [mention, slot] : index) by_root[find(slot)].push_back(mention);
  std::vector<Cluster> clusters;
  clusters.reserve(by_root.size());
  for (auto& [root, cluster] : by_root) clusters.push_back(std::move(cluster));
  return clusters;
}

MicroCounts relation_counts(const TokenizedInstance& instance,
                            const std::vector<RelationTriple>& predicted, RelationKind kind,
                            Diagnostics& diagnostics) {
  std::unordered_set<std::string_view> trigger_ids;
  for (const EventRecord& event : instance.events) {
    for (const TriggerMention& trigger : event.triggers) trigger_ids.insert(trigger.id);
  }

  using TripleKey = std::tuple<std::string, std::string, std::string>;
  MicroCounts counts;
  std::map<TripleKey, std::size_t> gold;
  for (const RelationTriple& triple : instance.relations.of(kind)) {
    ++counts.gold;
    ++gold[{triple.source, normalize_label(triple.label), triple.target}];
  }
  std::set<TripleKey> seen;
  for (const RelationTriple& triple : predicted) {
    for (const std::string& endpoint : {triple.source, triple.target}) {
      if (!trigger_ids.count(endpoint)) {
        throw DanglingRefError("instance '" + instance.id + "': " +
                               std::string(relation_kind_name(kind)) +
                               " relation names unknown trigger '" + endpoint + "'");
      }
    }
    TripleKey key{triple.source, normalize_label(triple.label), triple.target};
    if (!seen.insert(key).second) {
      ++diagnostics.deduped;
      continue;
    }
    ++counts.pred;
    if (gold.count(key)) ++counts.tp;
  }
  return counts;
}

BcubedSums coreference_sums(const TokenizedInstance& instance,
                            const std::vector<std::pair<std::string, std::string>>& links,
                            Diagnostics& diagnostics) {
  std::set<std::string> universe;
  std::unordered_set<std::string_view> gold_ids;
  for (const EventRecord& event : instance.events) {
    for (const TriggerMention& trigger : event.triggers) {
      universe.insert(trigger.id);
      gold_ids.insert(trigger.id);
    }
  }
  std::set<std::string> non_gold;
  for (const auto& [a, b] : links) {
    for (const std::string& endpoint : {a, b}) {
      universe.insert(endpoint);
      if (!gold_ids.count(endpoint)) non_gold.insert(endpoint);
    }
  }
  diagnostics.non_gold_mentions += non_gold.size();

  std::vector<std::string> universe_vec(universe.begin(), universe.end());
  std::vector<Cluster> predicted = clusters_from_links(links, universe_vec);
  std::vector<Cluster> gold_clusters;
  for (const std::set<std::string>& cluster : derive_coref_clusters(instance)) {
    gold_clusters.emplace_back(cluster.begin(), cluster.end());
  }
  for (const std::string& mention : non_gold) gold_clusters.push_back({mention});
  return bcubed_sums(predicted, gold_clusters);
}

namespace {

std::unordered_map<std::string_view, const ErePrediction*> group_ere(
    const std::vector<ErePrediction>& predictions, const Corpus& corpus) {
  auto index = instance_index(corpus);
  std::unordered_map<std::string_view, const ErePrediction*> grouped;
  for (const ErePrediction& prediction : predictions) {
    if (!index.count(prediction.instance_id)) {
      throw UnknownInstanceError("prediction references absent instance '" +
                                 prediction.instance_id + "'");
    }
    if (!grouped.emplace(prediction.instance_id, &prediction).second) {
      throw SchemaError("multiple predictions for instance '" + prediction.instance_id + "'");
    }
  }
  return grouped;
}

}  // namespace

PRF score_relations(const std::vector<ErePrediction>& predictions, const Corpus& gold,
                    RelationKind kind, Diagnostics* diagnostics) {
  Diagnostics local;
  Diagnostics& diag = diagnostics ? *diagnostics : local;
  auto grouped = group_ere(predictions, gold);
  static const std::vector<RelationTriple> kNone;
  MicroCounts counts;
  for (const TokenizedInstance& instance : gold.instances) {
    auto it = grouped.find(instance.id);
    counts += relation_counts(instance, it == grouped.end() ? kNone : it->second->relations.of(kind),
                              kind, diag);
  }
  return counts.finalize();
}

PRF score_coreference(const std::vector<ErePrediction>& predictions, const Corpus& gold,
                      Diagnostics* diagnostics) {
  Diagnostics local;
  Diagnostics& diag = diagnostics ? *diagnostics : local;
  auto grouped = group_ere(predictions, gold);
  static const std::vector<std::pair<std::string, std::string>> kNone;
  BcubedSums sums;
  for (const TokenizedInstance& instance : gold.instances) {
    auto it = grouped.find(instance.id);
    sums += coreference_sums(instance, it == grouped.end() ? kNone : it->second->coreference,
                             diag);
  }
  return sums.finalize();
}

namespace {

std::string line_context(size_t line_number) { return "line " + std::to_string(line_number); }

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

}  // namespace

std::vector<ErePrediction> parse_ere_predictions(std::string_view bytes) {
  std::vector<ErePrediction> predictions;
  std::unordered_set<std::string> seen;
  for_each_line(bytes, [&](std::string_view line, size_t line_number) {
    std::string context = line_context(line_number);
    ojson value;
    try {
      value = ojson::parse(line);
    } catch (const ojson::parse_error& error) {
      throw SyntaxError(context + ": " + error.what());
    }
    if (!value.is_object()) throw SchemaError(context + ": prediction must be an object");
    ErePrediction prediction;
    for (const auto& item : value.items()) {
      const std::string& key = item.key();
      if (key == "id") {
        if (!item.value().is_string()) throw SchemaError(context + ": 'id' must be a string");
        prediction.instance_id = item.value().get<std::string>();
      } else if (key == "temporal" || key == "causal" || key == "subevent") {
        if (!item.value().is_array()) {
          throw SchemaError(context + ": '" + key + "' must be an array");
        }
        for (const ojson& triple : item.value()) {
          if (!triple.is_array() || triple.size() != 3 || !triple[0].is_string() ||
              !triple[1].is_string() || !triple[2].is_string()) {
            throw SchemaError(context + ": '" + key +
                              "' entries must be [source, label, target] string triples");
          }
          prediction.relations.of(*relation_kind_from(key))
              .push_back({triple[0].get<std::string>(), triple[1].get<std::string>(),
                          triple[2].get<std::string>()});
        }
      } else if (key == "coreference") {
        if (!item.value().is_array()) {
          throw SchemaError(context + ": 'coreference' must be an array");
        }
        for (const ojson& pair : item.value()) {
          if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
              !pair[1].is_string()) {
            throw SchemaError(context + ": 'coreference' entries must be [a, b] string pairs");
          }
          prediction.coreference.emplace_back(pair[0].get<std::string>(),
                                              pair[1].get<std::string>());
        }
      } else {
        throw SchemaError(context + ": unknown field '" + key + "'");
      }
    }
    if (prediction.instance_id.empty() && !value.contains("id")) {
      throw SchemaError(context + ": missing field 'id'");
    }
    if (!seen.insert(prediction.instance_id).second) {
      throw SchemaError(context + ": duplicate prediction for instance '" +
                        prediction.instance_id + "'");
    }
    predictions.push_back(std::move(prediction));
  });
  return predictions;
}

std::string serialize_ere_predictions(const std::vector<ErePrediction>& predictions) {
  std::string out;
  for (const ErePrediction& prediction : predictions) {
    ojson line = ojson::object();
    line["id"] = prediction.instance_id;
    for (RelationKind kind : kRelationKinds) {
      ojson triples = ojson::array();
      for (const RelationTriple& triple : prediction.relations.of(kind)) {
        triples.push_back(ojson::array({triple.source, triple.label, triple.target}));
      }
      line[std::string(relation_kind_name(kind))] = std::move(triples);
    }
    ojson pairs = ojson::array();
    for (const auto& [a, b] : prediction.coreference) {
      pairs.push_back(ojson::array({a, b}));
    }
    line["coreference"] = std::move(pairs);
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace evee
