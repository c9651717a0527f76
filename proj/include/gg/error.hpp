#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gg {

enum class Errc {
  // dataset
  MalformedCsv,
  UnknownColumn,
  MissingColumn,
  DomainViolation,
  NumericParse,
  NoSuchAttribute,
  NotCategorical,
  InvalidSchema,
  // preprocess
  OutOfRange,
  EmptyCode,
  // induction
  EmptyDistribution,
  TooFewDistinctValues,
  EmptyDataset,
  MissingValuesPresent,
  MissingFeature,
  // evaluation
  SchemaMismatch,
  LengthMismatch,
  UnlabeledRows,
  EmptyInput,
  // codegen
  InvalidIdentifier,
  SyntaxError,
  // persistence
  NotFound,
  CorruptDocument,
  DuplicateEmail,
  WeakPassword,
  InvalidEmail,
  BadCredentials,
  AuthRequired,
  Forbidden,
  StoreFailure,
  // cli / config
  InvalidConfig,
  AmbiguousHeader,
  InvalidRequest,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Every domain failure in the project is reported through this type; `code()`
/// carries the error name surfaced by the CLI and the HTTP service.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return to_string(code_); }

 private:
  Errc code_;
};

}  // namespace gg
