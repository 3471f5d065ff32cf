#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uqeval {

enum class ErrorKind {
  NonNormalized,
  NegativeProbability,
  InvariantViolation,
  ShapeError,
  ShapeMismatch,
  PatchTooLarge,
  EmptySplit,
  EmptyInput,
  DegenerateLabels,
  NonFinite,
  UnknownTask,
  MissingCell,
  BadConfig,
  ParseError,
  MissingFile,
  InconsistentClassCount,
  InconsistentManifest,
  BadHeader,
  ShapeRankError,
  NonFiniteData,
  LabelRangeError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind so
/// callers (and the Python bindings) can branch on it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonNormalized: return "NonNormalized";
    case ErrorKind::NegativeProbability: return "NegativeProbability";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::PatchTooLarge: return "PatchTooLarge";
    case ErrorKind::EmptySplit: return "EmptySplit";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::UnknownTask: return "UnknownTask";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::InconsistentClassCount: return "InconsistentClassCount";
    case ErrorKind::InconsistentManifest: return "InconsistentManifest";
    case ErrorKind::BadHeader: return "BadHeader";
    case ErrorKind::ShapeRankError: return "ShapeRankError";
    case ErrorKind::NonFiniteData: return "NonFiniteData";
    case ErrorKind::LabelRangeError: return "LabelRangeError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace uqeval
