#include "gg/error.hpp"

namespace gg {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::UnknownColumn: return "UnknownColumn";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::NumericParse: return "NumericParse";
    case Errc::NoSuchAttribute: return "NoSuchAttribute";
    case Errc::NotCategorical: return "NotCategorical";
    case Errc::InvalidSchema: return "InvalidSchema";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::EmptyCode: return "EmptyCode";
    case Errc::EmptyDistribution: return "EmptyDistribution";
    case Errc::TooFewDistinctValues: return "TooFewDistinctValues";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::MissingValuesPresent: return "MissingValuesPresent";
    case Errc::MissingFeature: return "MissingFeature";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::UnlabeledRows: return "UnlabeledRows";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidIdentifier: return "InvalidIdentifier";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::NotFound: return "NotFound";
    case Errc::CorruptDocument: return "CorruptDocument";
    case Errc::DuplicateEmail: return "DuplicateEmail";
    case Errc::WeakPassword: return "WeakPassword";
    case Errc::InvalidEmail: return "InvalidEmail";
    case Errc::BadCredentials: return "BadCredentials";
    case Errc::AuthRequired: return "AuthRequired";
    case Errc::Forbidden: return "Forbidden";
    case Errc::StoreFailure: return "StoreFailure";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::AmbiguousHeader: return "AmbiguousHeader";
    case Errc::InvalidRequest: return "InvalidRequest";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace gg
