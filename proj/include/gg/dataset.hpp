#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gg/distribution.hpp"

namespace gg {

struct Categorical {
  std::vector<std::string> domain;
  bool operator==(const Categorical&) const = default;
};

struct Continuous {
  std::string unit;
  bool operator==(const Continuous&) const = default;
};

/// Free text with an open domain (identifiers, raw admission codes).
struct Text {
  bool operator==(const Text&) const = default;
};

using AttributeKind = std::variant<Categorical, Continuous, Text>;

enum class Role { Feature, ClassLabel, Identifier, Ignored };

std::string_view to_string(Role role) noexcept;

struct AttributeSchema {
  std::string name;
  AttributeKind kind;
  Role role = Role::Feature;
  /// Alternative header spellings accepted by parse_csv.
  std::vector<std::string> aliases = {};

  bool is_categorical() const noexcept { return std::holds_alternative<Categorical>(kind); }
  bool is_continuous() const noexcept { return std::holds_alternative<Continuous>(kind); }
  const std::vector<std::string>& domain() const;  // throws NotCategorical

  bool operator==(const AttributeSchema&) const = default;
};

class Schema {
 public:
  /// Validates: unique names, exactly one ClassLabel, at least one Feature,
  /// non-empty duplicate-free categorical domains.
  explicit Schema(std::vector<AttributeSchema> attributes);

  const std::vector<AttributeSchema>& attributes() const noexcept { return attributes_; }
  std::size_t size() const noexcept { return attributes_.size(); }
  const AttributeSchema& operator[](std::size_t i) const { return attributes_[i]; }

  std::optional<std::size_t> find(std::string_view name) const noexcept;
  std::size_t index_of(std::string_view name) const;  // throws NoSuchAttribute
  const AttributeSchema& at(std::string_view name) const { return attributes_[index_of(name)]; }

  std::size_t class_index() const noexcept { return class_index_; }
  const AttributeSchema& class_attribute() const noexcept { return attributes_[class_index_]; }
  std::vector<std::string> feature_names() const;

  bool operator==(const Schema& other) const { return attributes_ == other.attributes_; }

 private:
  std::vector<AttributeSchema> attributes_;
  std::size_t class_index_ = 0;
};

struct Missing {
  bool operator==(const Missing&) const = default;
};

using CellValue = std::variant<Missing, std::string, double>;

inline bool is_missing(const CellValue& v) noexcept { return std::holds_alternative<Missing>(v); }
std::string to_display(const CellValue& v);

struct Row {
  std::vector<CellValue> cells;
  bool operator==(const Row&) const = default;
};

class Dataset {
 public:
  /// Validates every row against the schema (arity, domains, cell types).
  Dataset(Schema schema, std::vector<Row> rows);
  explicit Dataset(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const noexcept { return schema_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  const CellValue& cell(std::size_t row, std::size_t attribute) const {
    return rows_[row].cells[attribute];
  }

  bool operator==(const Dataset&) const = default;

 private:
  Schema schema_;
  std::vector<Row> rows_;
};

struct CsvOptions {
  /// Cells equal to this (after trimming) are Missing; empty cells always are.
  std::string missing_sentinel;
};

/// RFC-4180-ish record splitter: comma delimiter, double-quote escaping, LF or
/// CRLF line ends. Throws MalformedCsv on unbalanced quotes.
std::vector<std::vector<std::string>> read_csv_records(std::string_view bytes);

Dataset parse_csv(std::string_view bytes, const Schema& schema, const CsvOptions& options = {});

/// Canonical writer: schema order, LF line ends, minimal quoting, shortest
/// round-trip numbers, Missing as an empty cell.
std::string write_csv(const Dataset& d);

std::map<std::string, Dataset> partition(const Dataset& d, std::string_view attribute);

ClassDistribution class_counts(const Dataset& d);

std::string format_number(double value);

}  // namespace gg
