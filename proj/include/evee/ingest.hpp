#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "evee/types.hpp"

namespace evee {

// A shared set of predicted triggers, so different argument-extraction runs
// can be scored against the same upstream detections.
struct BankEntry {
  std::string id;
  Span offset;
  std::string type;  // raw label; comparisons normalize

  friend bool operator==(const BankEntry&, const BankEntry&) = default;
};

struct TriggerBank {
  std::map<std::string, std::vector<BankEntry>> by_instance;

  bool empty() const { return by_instance.empty(); }
  std::size_t size() const;  // total entries

  friend bool operator==(const TriggerBank&, const TriggerBank&) = default;
};

TriggerBank bank_from_gold(const Corpus& corpus);

// Bank file: JSONL {"id", "triggers": [{"id", "offset": [s,e], "type"}]}.
// Loading validates against the corpus: unknown instance ids raise
// DanglingInstanceError (skipped under ignore_unknown), bad offsets raise
// BoundsError. serialize∘parse is the identity.
struct BankLoadOptions {
  bool ignore_unknown = false;
};

std::string serialize_trigger_bank(const TriggerBank& bank);
TriggerBank parse_trigger_bank(std::string_view bytes, const Corpus& corpus,
                               const BankLoadOptions& options = {});

// FNV-1a over the canonical serialization; reports embed it so two runs can
// prove they used the same triggers.
std::uint64_t bank_content_hash(const TriggerBank& bank);
std::string bank_content_hash_hex(const TriggerBank& bank);

struct ImportOptions {
  // Split documents into one instance per sentence ("<docid>.sN") instead of
  // one per document. Cross-sentence relations and arguments cannot be
  // represented then; they are dropped and counted.
  bool sentence_level = false;
  std::string id_prefix = "conll";  // instance id stem for tag-file imports
};

struct ImportStats {
  std::size_t documents = 0;
  std::size_t instances = 0;
  std::size_t dropped_relations = 0;
  std::size_t dropped_arguments = 0;
};

// Document JSONL with per-sentence token lists and sentence-relative
// offsets: {"id", "sentences": [[tok, ...], ...],
//           "events": [{"type", "mentions": [{"id", "trigger_word",
//             "sent_id", "offset", "arguments": [{"mention", "sent_id",
//             "offset", "role"}]}]}],
//           "temporal"/"causal"/"subevent": [[src, label, tgt], ...]}.
// Unknown top-level fields are preserved in the instance `extras` bag.
// Document-level output rebases offsets by cumulative sentence lengths.
// The converter identity lands in the corpus meta header.
Corpus import_eventlines(std::string_view bytes, const ImportOptions& options = {},
                         ImportStats* stats = nullptr);

// Two-column "token TAG" lines, blank line between sentences. Tags are
// strict IOB2; decoded spans become single-trigger events.
Corpus import_conll_bio(std::string_view bytes, const ImportOptions& options = {},
                        ImportStats* stats = nullptr);

}  // namespace evee
