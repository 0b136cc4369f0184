#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evee/metrics.hpp"
#include "evee/types.hpp"

namespace evee {

struct BankStamp {
  std::string path;
  std::string hash_hex;
  friend bool operator==(const BankStamp&, const BankStamp&) = default;
};

// Everything that must match before two reports' numbers may be compared.
struct Provenance {
  std::string task;
  std::string paradigm;
  std::optional<ConverterSpec> converter;
  std::map<std::string, std::string> flags;
  std::optional<BankStamp> bank;
};

struct EvalReport {
  Provenance provenance;
  std::vector<std::pair<std::string, PRF>> metrics;
  Diagnostics diagnostics;
};

std::string serialize_report(const EvalReport& report);
EvalReport parse_report(std::string_view bytes);

// Compact dump of the "metrics" object alone. Two runs agree iff these
// bytes are equal.
std::string serialize_metrics_section(const EvalReport& report);

// Fixed-width table; precision/recall/F1 as percentages with one decimal.
std::string render_table(const EvalReport& report);

struct CompareResult {
  std::vector<std::string> provenance_warnings;
  // Row name of the first disagreeing metric, or "metrics" on a shape
  // mismatch. Empty when the metric sections are byte-identical.
  std::optional<std::string> metrics_diff;
};

CompareResult compare_reports(const EvalReport& left, const EvalReport& right);

}  // namespace evee
