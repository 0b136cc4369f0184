#pragma once

#include <string>
#include <string_view>

#include "evee/types.hpp"

namespace evee {

struct ParseOptions {
  // When set, every instance invariant is enforced during parsing and the
  // first violation is thrown as its typed error (BoundsError, ...). When
  // clear, only syntax and schema are enforced; semantic faults are left for
  // validate_instance to report as data.
  bool enforce_invariants = true;
};

// Reads the unified corpus format: UTF-8 JSONL (one instance per line, an
// optional {"_meta": ...} header first) or a single JSON array document.
// Structurally invalid input is rejected, never repaired.
//
// Throws SyntaxError (malformed JSON, with line number), SchemaError
// (missing field / wrong shape), and, with enforce_invariants, BoundsError /
// DanglingRefError / SchemaError for the remaining invariants.
Corpus parse_unified(std::string_view bytes, const ParseOptions& options = {});

// Parallel variant: lines are parsed concurrently and assembled in input
// order, so the result and the first-error behavior match parse_unified
// exactly. threads <= 1 falls back to the serial path.
Corpus parse_unified_parallel(std::string_view bytes, const ParseOptions& options,
                              int threads);

// Deterministic serialization: JSONL, fixed key order, one instance per
// line, meta header first when present. parse(serialize(c)) == c for any
// valid corpus, and serialization is byte-stable across runs.
std::string serialize_unified(const Corpus& corpus);

// Ontology files: one flat JSON object with the four vocabularies.
Ontology parse_ontology(std::string_view bytes);
std::string serialize_ontology(const Ontology& ontology);

// Whole-file helpers. Throw IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace evee
