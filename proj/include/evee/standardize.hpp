#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evee/types.hpp"

namespace evee {

// Prediction paradigms. SL = token tagging, SP = span prediction,
// CG = generation (no offsets), CLS = classification over candidates.
enum class Paradigm { SL, SP, CG, CLS };

std::string_view paradigm_name(Paradigm paradigm);
Paradigm paradigm_from(std::string_view name);  // throws SchemaError

enum class BioMode { Strict, Relaxed };

struct SLTags {
  std::vector<std::string> tags;  // one per token
};

struct SPSpan {
  Span offset;
  std::string label;
};

struct SPSpans {
  std::vector<SPSpan> spans;
};

struct CGItem {
  std::string surface;  // generated string, located in the tokens later
  std::string label;
};

struct CGItems {
  std::vector<CGItem> items;
};

struct CLSCandidate {
  Span offset;
  std::string label;  // "NA"/"None" marks a rejected candidate
};

struct CLSCandidates {
  std::vector<CLSCandidate> candidates;
};

using ParadigmPayload = std::variant<SLTags, SPSpans, CGItems, CLSCandidates>;

Paradigm payload_paradigm(const ParadigmPayload& payload);

struct EdPrediction {
  std::string instance_id;
  ParadigmPayload payload;
};

// Argument predictions are grouped under the trigger they attach to,
// identified by token offset.
struct EaeGroup {
  Span trigger_offset;
  ParadigmPayload payload;
};

struct EaePrediction {
  std::string instance_id;
  std::vector<EaeGroup> groups;
};

// The unified output space: every paradigm converts into these. `label` is
// the normalized event type (triggers) or role (arguments).
struct UnifiedMention {
  std::string instance_id;
  Span offset;
  std::string label;
  std::optional<Span> trigger_offset;  // arguments only

  auto operator<=>(const UnifiedMention&) const = default;
};

// Conversion loss is reported, never silently swallowed.
struct Diagnostics {
  std::size_t invalid_spans = 0;     // SP spans out of bounds or empty
  std::size_t unlocatable = 0;       // CG items with no token match
  std::size_t deduped = 0;           // duplicate predictions removed
  std::size_t non_gold_mentions = 0; // coreference endpoints outside gold

  Diagnostics& operator+=(const Diagnostics& other);
  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

struct StandardizeOptions {
  BioMode bio = BioMode::Strict;
  // Lets a generated string that matches a gold span land on that span even
  // when an earlier occurrence exists. Flattering to generation models;
  // disable to locate strictly left-to-right.
  bool gold_preference = true;
};

struct BioSpan {
  Span offset;
  std::string label;  // raw tag label, not yet normalized
};

// Strict IOB2: spans start at B-t and extend through consecutive same-label
// I-t; a lone I-t is skipped. Relaxed mode opens a span at a lone I-t
// instead. Labels after "B-"/"I-" are compared case-insensitively.
std::vector<BioSpan> decode_bio(const std::vector<std::string>& tags, std::size_t n_tokens,
                                BioMode mode);

// Per-instance conversion kernels. Pure except for the diagnostics counters,
// so corpus loops can run them concurrently and merge counters afterwards.
std::vector<UnifiedMention> standardize_ed_instance(const TokenizedInstance& instance,
                                                    const EdPrediction& prediction,
                                                    const StandardizeOptions& options,
                                                    Diagnostics& diagnostics);

std::vector<UnifiedMention> standardize_eae_instance(const TokenizedInstance& instance,
                                                     const EaePrediction& prediction,
                                                     const StandardizeOptions& options,
                                                     Diagnostics& diagnostics);

struct StandardizeResult {
  std::vector<UnifiedMention> mentions;
  Diagnostics diagnostics;
};

// Corpus drivers: instances with no prediction line contribute nothing.
// Throws UnknownInstanceError if a prediction names an absent instance.
StandardizeResult standardize_ed(const Corpus& corpus,
                                 const std::vector<EdPrediction>& predictions,
                                 const StandardizeOptions& options = {});

StandardizeResult standardize_eae(const Corpus& corpus,
                                  const std::vector<EaePrediction>& predictions,
                                  const StandardizeOptions& options = {});

// Gold mention sets in the unified space (normalized labels). Arguments
// carry the offset of the trigger they are annotated under.
std::vector<UnifiedMention> gold_trigger_mentions(const TokenizedInstance& instance);
std::vector<UnifiedMention> gold_argument_mentions(const TokenizedInstance& instance);

// Gold encoders: feeding the result through the matching converter
// reproduces the gold mention set (round-trip property; needs
// non-overlapping gold spans for SL, which otherwise throws OverlapError).
SLTags encode_gold_as_sl(const TokenizedInstance& instance);
SPSpans encode_gold_as_sp(const TokenizedInstance& instance);
CGItems encode_gold_as_cg(const TokenizedInstance& instance);
CLSCandidates encode_gold_as_cls(const TokenizedInstance& instance);
ParadigmPayload encode_gold_triggers(Paradigm paradigm, const TokenizedInstance& instance);

// One group per gold trigger, payload encoding that trigger's arguments.
std::vector<EaeGroup> encode_gold_arguments(Paradigm paradigm, const TokenizedInstance& instance);

// Arbitrary labeled spans in any paradigm encoding. Entries are sorted by
// offset before encoding; SL throws OverlapError if any two overlap.
struct SpanLabel {
  Span offset;
  std::string label;
};
ParadigmPayload encode_spans(Paradigm paradigm, const TokenizedInstance& instance,
                             std::vector<SpanLabel> entries);

// Prediction files: UTF-8 JSONL, one object per instance id.
// ED: {"id", "tags"| "spans" | "items" | "candidates"}.
// EAE: {"id", "groups": [{"trigger_offset": [s,e], <payload>}]}.
// Span/item/candidate labels are read from "type" or "role" (exactly one).
std::vector<EdPrediction> parse_ed_predictions(std::string_view bytes, Paradigm paradigm);
std::vector<EaePrediction> parse_eae_predictions(std::string_view bytes, Paradigm paradigm);

std::string serialize_ed_predictions(const std::vector<EdPrediction>& predictions);
std::string serialize_eae_predictions(const std::vector<EaePrediction>& predictions);

// Standardized-mention dump: a {"_diagnostics": ...} header line, then one
// {"id", "mentions": [...]} line per corpus instance with sorted mentions.
std::string serialize_mentions(const Corpus& corpus,
                               const std::vector<UnifiedMention>& mentions,
                               const Diagnostics& diagnostics);

}  // namespace evee
