#include "evee/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "evee/errors.hpp"

namespace evee {

using ojson = nlohmann::ordered_json;

namespace {

ojson prf_to_json(const PRF& value) {
  ojson out = ojson::object();
  out["precision"] = value.precision;
  out["recall"] = value.recall;
  out["f1"] = value.f1;
  out["tp"] = value.tp;
  out["pred"] = value.pred_count;
  out["gold"] = value.gold_count;
  return out;
}

ojson metrics_to_json(const EvalReport& report) {
  ojson out = ojson::object();
  for (const auto& [name, value] : report.metrics) out[name] = prf_to_json(value);
  return out;
}

ojson provenance_to_json(const Provenance& provenance) {
  ojson out = ojson::object();
  out["task"] = provenance.task;
  out["paradigm"] = provenance.paradigm;
  if (provenance.converter) {
    ojson converter = ojson::object();
    converter["name"] = provenance.converter->name;
    converter["version"] = provenance.converter->version;
    ojson options = ojson::object();
    for (const auto& [key, value] : provenance.converter->options) options[key] = value;
    converter["options"] = std::move(options);
    out["converter"] = std::move(converter);
  } else {
    out["converter"] = nullptr;
  }
  ojson flags = ojson::object();
  for (const auto& [key, value] : provenance.flags) flags[key] = value;
  out["flags"] = std::move(flags);
  if (provenance.bank) {
    ojson bank = ojson::object();
    bank["path"] = provenance.bank->path;
    bank["hash"] = provenance.bank->hash_hex;
    out["bank"] = std::move(bank);
  } else {
    out["bank"] = nullptr;
  }
  return out;
}

ojson diagnostics_to_json(const Diagnostics& diagnostics) {
  ojson out = ojson::object();
  out["invalid_spans"] = diagnostics.invalid_spans;
  out["unlocatable"] = diagnostics.unlocatable;
  out["deduped"] = diagnostics.deduped;
  out["non_gold_mentions"] = diagnostics.non_gold_mentions;
  return out;
}

const ojson& require_field(const ojson& value, const char* name, std::string_view where) {
  auto it = value.find(name);
  if (it == value.end()) {
    throw SchemaError(std::string(where) + ": missing field '" + name + "'");
  }
  return *it;
}

std::string require_string(const ojson& value, const char* name, std::string_view where) {
  const ojson& field = require_field(value, name, where);
  if (!field.is_string()) {
    throw SchemaError(std::string(where) + ": '" + name + "' must be a string");
  }
  return field.get<std::string>();
}

double require_number(const ojson& value, const char* name, std::string_view where) {
  const ojson& field = require_field(value, name, where);
  if (!field.is_number()) {
    throw SchemaError(std::string(where) + ": '" + name + "' must be a number");
  }
  return field.get<double>();
}

std::size_t require_count(const ojson& value, const char* name, std::string_view where) {
  const ojson& field = require_field(value, name, where);
  if (!field.is_number_unsigned()) {
    throw SchemaError(std::string(where) + ": '" + name + "' must be a non-negative integer");
  }
  return field.get<std::size_t>();
}

PRF prf_from_json(const ojson& value, std::string_view where) {
  if (!value.is_object()) throw SchemaError(std::string(where) + ": metric row must be an object");
  PRF out;
  out.precision = require_number(value, "precision", where);
  out.recall = require_number(value, "recall", where);
  out.f1 = require_number(value, "f1", where);
  out.tp = require_count(value, "tp", where);
  out.pred_count = require_count(value, "pred", where);
  out.gold_count = require_count(value, "gold", where);
  return out;
}

}  // namespace

std::string serialize_report(const EvalReport& report) {
  ojson out = ojson::object();
  out["provenance"] = provenance_to_json(report.provenance);
  out["metrics"] = metrics_to_json(report);
  out["diagnostics"] = diagnostics_to_json(report.diagnostics);
  return out.dump(2) + "\n";
}

std::string serialize_metrics_section(const EvalReport& report) {
  return metrics_to_json(report).dump();
}

EvalReport parse_report(std::string_view bytes) {
  ojson value;
  try {
    value = ojson::parse(bytes);
  } catch (const ojson::parse_error& error) {
    throw SyntaxError(std::string("report: ") + error.what());
  }
  if (!value.is_object()) throw SchemaError("report: document must be an object");

  EvalReport report;
  const ojson& provenance = require_field(value, "provenance", "report");
  if (!provenance.is_object()) throw SchemaError("report: 'provenance' must be an object");
  report.provenance.task = require_string(provenance, "task", "provenance");
  report.provenance.paradigm = require_string(provenance, "paradigm", "provenance");
  const ojson& converter = require_field(provenance, "converter", "provenance");
  if (!converter.is_null()) {
    if (!converter.is_object()) throw SchemaError("provenance: 'converter' must be an object");
    ConverterSpec spec;
    spec.name = require_string(converter, "name", "converter");
    spec.version = require_string(converter, "version", "converter");
    const ojson& options = require_field(converter, "options", "converter");
    if (!options.is_object()) throw SchemaError("converter: 'options' must be an object");
    for (const auto& item : options.items()) {
      if (!item.value().is_string()) {
        throw SchemaError("converter: option '" + item.key() + "' must be a string");
      }
      spec.options[item.key()] = item.value().get<std::string>();
    }
    report.provenance.converter = std::move(spec);
  }
  const ojson& flags = require_field(provenance, "flags", "provenance");
  if (!flags.is_object()) throw SchemaError("provenance: 'flags' must be an object");
  for (const auto& item : flags.items()) {
    if (!item.value().is_string()) {
      throw SchemaError("provenance: flag '" + item.key() + "' must be a string");
    }
    report.provenance.flags[item.key()] = item.value().get<std::string>();
  }
  const ojson& bank = require_field(provenance, "bank", "provenance");
  if (!bank.is_null()) {
    if (!bank.is_object()) throw SchemaError("provenance: 'bank' must be an object");
    report.provenance.bank =
        BankStamp{require_string(bank, "path", "bank"), require_string(bank, "hash", "bank")};
  }

  const ojson& metrics = require_field(value, "metrics", "report");
  if (!metrics.is_object()) throw SchemaError("report: 'metrics' must be an object");
  for (const auto& item : metrics.items()) {
    report.metrics.emplace_back(item.key(), prf_from_json(item.value(), item.key()));
  }

  const ojson& diagnostics = require_field(value, "diagnostics", "report");
  if (!diagnostics.is_object()) throw SchemaError("report: 'diagnostics' must be an object");
  report.diagnostics.invalid_spans = require_count(diagnostics, "invalid_spans", "diagnostics");
  report.diagnostics.unlocatable = require_count(diagnostics, "unlocatable", "diagnostics");
  report.diagnostics.deduped = require_count(diagnostics, "deduped", "diagnostics");
  report.diagnostics.non_gold_mentions =
      require_count(diagnostics, "non_gold_mentions", "diagnostics");
  return report;
}

std::string render_table(const EvalReport& report) {
  std::size_t name_width = 6;  // "metric"
  for (const auto& [name, value] : report.metrics) name_width = std::max(name_width, name.size());

  char buffer[256];
  std::string out;
  std::snprintf(buffer, sizeof buffer, "%-*s %7s %7s %7s %8s %8s %8s\n",
                static_cast<int>(name_width), "metric", "P", "R", "F1", "tp", "pred", "gold");
  out += buffer;
  for (const auto& [name, value] : report.metrics) {
    std::snprintf(buffer, sizeof buffer, "%-*s %7.1f %7.1f %7.1f %8zu %8zu %8zu\n",
                  static_cast<int>(name_width), name.c_str(), value.precision * 100.0,
                  value.recall * 100.0, value.f1 * 100.0, value.tp, value.pred_count,
                  value.gold_count);
    out += buffer;
  }
  return out;
}

CompareResult compare_reports(const EvalReport& left, const EvalReport& right) {
  CompareResult result;
  auto warn = [&](const std::string& field, const std::string& a, const std::string& b) {
    result.provenance_warnings.push_back(field + ": '" + a + "' vs '" + b + "'");
  };

  const Provenance& lp = left.provenance;
  const Provenance& rp = right.provenance;
  if (lp.task != rp.task) warn("task", lp.task, rp.task);
  if (lp.paradigm != rp.paradigm) warn("paradigm", lp.paradigm, rp.paradigm);
  auto converter_str = [](const std::optional<ConverterSpec>& spec) {
    if (!spec) return std::string("none");
    std::string out = spec->name + " " + spec->version;
    for (const auto& [key, value] : spec->options) out += " " + key + "=" + value;
    return out;
  };
  if (converter_str(lp.converter) != converter_str(rp.converter)) {
    warn("converter", converter_str(lp.converter), converter_str(rp.converter));
  }
  std::set<std::string> flag_keys;
  for (const auto& [key, value] : lp.flags) flag_keys.insert(key);
  for (const auto& [key, value] : rp.flags) flag_keys.insert(key);
  for (const std::string& key : flag_keys) {
    auto li = lp.flags.find(key);
    auto ri = rp.flags.find(key);
    std::string lv = li == lp.flags.end() ? "unset" : li->second;
    std::string rv = ri == rp.flags.end() ? "unset" : ri->second;
    if (lv != rv) warn("flag " + key, lv, rv);
  }
  auto bank_str = [](const std::optional<BankStamp>& bank) {
    return bank ? bank->path + " " + bank->hash_hex : std::string("none");
  };
  if (bank_str(lp.bank) != bank_str(rp.bank)) {
    warn("bank", bank_str(lp.bank), bank_str(rp.bank));
  }

  std::size_t rows = std::min(left.metrics.size(), right.metrics.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& [lname, lvalue] = left.metrics[i];
    const auto& [rname, rvalue] = right.metrics[i];
    if (lname != rname || prf_to_json(lvalue) != prf_to_json(rvalue)) {
      result.metrics_diff = lname != rname ? "metrics" : lname;
      return result;
    }
  }
  if (left.metrics.size() != right.metrics.size()) result.metrics_diff = "metrics";
  return result;
}

}  // namespace evee
