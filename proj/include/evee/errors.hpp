#pragma once

#include <stdexcept>
#include <string>

namespace evee {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const { return "Error"; }
};

// Malformed serialization (bad JSON, bad column count, ...), with location.
struct SyntaxError : Error {
  using Error::Error;
  const char* kind() const override { return "SyntaxError"; }
};

// Missing field or wrong shape in otherwise well-formed input.
struct SchemaError : Error {
  using Error::Error;
  const char* kind() const override { return "SchemaError"; }
};

// Offset outside the instance's token range, or empty interval.
struct BoundsError : Error {
  using Error::Error;
  const char* kind() const override { return "BoundsError"; }
};

// Relation endpoint names a trigger id that does not exist.
struct DanglingRefError : Error {
  using Error::Error;
  const char* kind() const override { return "DanglingRefError"; }
};

// Token carries a tag that is not O, B-<type>, or I-<type>.
struct TagSyntaxError : Error {
  using Error::Error;
  const char* kind() const override { return "TagSyntaxError"; }
};

// Tag sequence length differs from token count.
struct LengthMismatchError : Error {
  using Error::Error;
  const char* kind() const override { return "LengthMismatchError"; }
};

// Sequence-labeling encoding requested for overlapping gold spans.
struct OverlapError : Error {
  using Error::Error;
  const char* kind() const override { return "OverlapError"; }
};

// Prediction references an instance id absent from the corpus.
struct UnknownInstanceError : Error {
  using Error::Error;
  const char* kind() const override { return "UnknownInstanceError"; }
};

// Argument prediction's governing trigger is not in the trigger context.
struct DanglingTriggerRefError : Error {
  using Error::Error;
  const char* kind() const override { return "DanglingTriggerRefError"; }
};

// Trigger bank entry references an instance id absent from the corpus.
struct DanglingInstanceError : Error {
  using Error::Error;
  const char* kind() const override { return "DanglingInstanceError"; }
};

// Cluster sets are not partitions of the same mention universe.
struct PartitionError : Error {
  using Error::Error;
  const char* kind() const override { return "PartitionError"; }
};

struct IoError : Error {
  using Error::Error;
  const char* kind() const override { return "IoError"; }
};

}  // namespace evee
