#include "gg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>

#include "gg/error.hpp"

namespace gg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool in_domain(const std::vector<std::string>& domain, std::string_view value) {
  return std::find(domain.begin(), domain.end(), value) != domain.end();
}

void check_cell(const AttributeSchema& a, const CellValue& v, std::size_t row) {
  if (is_missing(v)) return;
  const auto where = " (attribute '" + a.name + "', row " + std::to_string(row + 1) + ")";
  if (const auto* cat = std::get_if<Categorical>(&a.kind)) {
    const auto* s = std::get_if<std::string>(&v);
    if (s == nullptr || !in_domain(cat->domain, *s))
      throw Error(Errc::DomainViolation, "value '" + to_display(v) + "' outside domain" + where);
  } else if (a.is_continuous()) {
    const auto* d = std::get_if<double>(&v);
    if (d == nullptr) throw Error(Errc::NumericParse, "expected a number" + where);
    if (!std::isfinite(*d)) throw Error(Errc::NumericParse, "non-finite number" + where);
  } else if (!std::holds_alternative<std::string>(v)) {
    throw Error(Errc::DomainViolation, "expected text" + where);
  }
}

std::string quote_if_needed(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos && trim(s) == s) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Feature: return "feature";
    case Role::ClassLabel: return "class";
    case Role::Identifier: return "identifier";
    case Role::Ignored: return "ignored";
  }
  return "feature";
}

const std::vector<std::string>& AttributeSchema::domain() const {
  if (const auto* cat = std::get_if<Categorical>(&kind)) return cat->domain;
  throw Error(Errc::NotCategorical, "attribute '" + name + "' is not categorical");
}

Schema::Schema(std::vector<AttributeSchema> attributes) : attributes_(std::move(attributes)) {
  std::set<std::string, std::less<>> names;
  std::size_t class_labels = 0;
  std::size_t features = 0;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    const auto& a = attributes_[i];
    if (a.name.empty()) throw Error(Errc::InvalidSchema, "attribute with empty name");
    if (!names.insert(a.name).second)
      throw Error(Errc::InvalidSchema, "duplicate attribute name '" + a.name + "'");
    for (const auto& alias : a.aliases)
      if (!names.insert(alias).second)
        throw Error(Errc::InvalidSchema, "alias '" + alias + "' collides with another name");
    if (const auto* cat = std::get_if<Categorical>(&a.kind)) {
      if (cat->domain.empty())
        throw Error(Errc::InvalidSchema, "categorical attribute '" + a.name + "' has an empty domain");
      std::set<std::string_view> seen(cat->domain.begin(), cat->domain.end());
      if (seen.size() != cat->domain.size())
        throw Error(Errc::InvalidSchema, "categorical attribute '" + a.name + "' repeats a value");
    }
    if (a.role == Role::ClassLabel) {
      ++class_labels;
      class_index_ = i;
    }
    if (a.role == Role::Feature) ++features;
  }
  if (class_labels != 1) throw Error(Errc::InvalidSchema, "schema needs exactly one class attribute");
  if (features == 0) throw Error(Errc::InvalidSchema, "schema needs at least one feature");
}

std::optional<std::size_t> Schema::find(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < attributes_.size(); ++i)
    if (attributes_[i].name == name) return i;
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(Errc::NoSuchAttribute, "no attribute named '" + std::string(name) + "'");
}

std::vector<std::string> Schema::feature_names() const {
  std::vector<std::string> out;
  for (const auto& a : attributes_)
    if (a.role == Role::Feature) out.push_back(a.name);
  return out;
}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string to_display(const CellValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  return {};
}

Dataset::Dataset(Schema schema, std::vector<Row> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  const auto& attrs = schema_.attributes();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].cells.size() != attrs.size())
      throw Error(Errc::MalformedCsv, "row " + std::to_string(r + 1) + " has " +
                                          std::to_string(rows_[r].cells.size()) + " cells, expected " +
                                          std::to_string(attrs.size()));
    for (std::size_t a = 0; a < attrs.size(); ++a) check_cell(attrs[a], rows_[r].cells[a], r);
  }
}

std::vector<std::vector<std::string>> read_csv_records(std::string_view bytes) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    // skip blank lines entirely
    if (!(record.size() == 1 && record[0].empty() && !record_has_content)) records.push_back(std::move(record));
    record.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const char c = bytes[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!trim(field).empty() || field_was_quoted)
          throw Error(Errc::MalformedCsv, "stray quote in record " + std::to_string(records.size() + 1));
        field.clear();
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < bytes.size() && bytes[i + 1] == '\n') break;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        if (field_was_quoted && c != ' ' && c != '\t')
          throw Error(Errc::MalformedCsv, "text after closing quote in record " + std::to_string(records.size() + 1));
        if (!field_was_quoted) field += c;
        record_has_content = true;
    }
  }
  if (in_quotes) throw Error(Errc::MalformedCsv, "unbalanced quotes at end of input");
  if (!field.empty() || !record.empty() || record_has_content) end_record();
  return records;
}

Dataset parse_csv(std::string_view bytes, const Schema& schema, const CsvOptions& options) {
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  auto records = read_csv_records(bytes);
  if (records.empty()) throw Error(Errc::MalformedCsv, "missing header row");

  const auto& attrs = schema.attributes();
  // column position in the file -> attribute index
  std::vector<std::size_t> column_to_attr;
  std::vector<bool> present(attrs.size(), false);
  for (const auto& raw_name : records.front()) {
    const auto name = trim(raw_name);
    std::optional<std::size_t> idx = schema.find(name);
    if (!idx) {
      for (std::size_t a = 0; a < attrs.size() && !idx; ++a)
        if (std::find(attrs[a].aliases.begin(), attrs[a].aliases.end(), name) != attrs[a].aliases.end()) idx = a;
    }
    if (!idx) throw Error(Errc::UnknownColumn, "header column '" + std::string(name) + "' is not in the schema");
    if (present[*idx]) throw Error(Errc::MalformedCsv, "header column '" + std::string(name) + "' repeated");
    present[*idx] = true;
    column_to_attr.push_back(*idx);
  }
  for (std::size_t a = 0; a < attrs.size(); ++a) {
    if (!present[a] && attrs[a].role == Role::Feature)
      throw Error(Errc::MissingColumn, "header lacks feature column '" + attrs[a].name + "'");
  }

  std::vector<Row> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::size_t row_no = r;  // 1-based data row number
    if (rec.size() != column_to_attr.size())
      throw Error(Errc::MalformedCsv, "row " + std::to_string(row_no) + " has " + std::to_string(rec.size()) +
                                          " fields, header has " + std::to_string(column_to_attr.size()));
    Row row{std::vector<CellValue>(attrs.size(), Missing{})};
    for (std::size_t c = 0; c < rec.size(); ++c) {
      const auto& attr = attrs[column_to_attr[c]];
      const auto text = trim(rec[c]);
      if (text.empty() || (!options.missing_sentinel.empty() && text == options.missing_sentinel)) continue;
      if (attr.is_continuous()) {
        double value = 0.0;
        const auto* first = text.data();
        const auto* last = text.data() + text.size();
        if (*first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || !std::isfinite(value))
          throw Error(Errc::NumericParse, "row " + std::to_string(row_no) + ": '" + std::string(text) +
                                              "' is not a number (attribute '" + attr.name + "')");
        row.cells[column_to_attr[c]] = value;
      } else {
        if (const auto* cat = std::get_if<Categorical>(&attr.kind); cat && !in_domain(cat->domain, text))
          throw Error(Errc::DomainViolation, "row " + std::to_string(row_no) + ": '" + std::string(text) +
                                                 "' outside the domain of '" + attr.name + "'");
        row.cells[column_to_attr[c]] = std::string(text);
      }
    }
    rows.push_back(std::move(row));
  }
  return Dataset(schema, std::move(rows));
}

std::string write_csv(const Dataset& d) {
  std::string out;
  const auto& attrs = d.schema().attributes();
  for (std::size_t a = 0; a < attrs.size(); ++a) {
    if (a) out += ',';
    out += quote_if_needed(attrs[a].name);
  }
  out += '\n';
  for (const auto& row : d.rows()) {
    for (std::size_t a = 0; a < row.cells.size(); ++a) {
      if (a) out += ',';
      out += quote_if_needed(to_display(row.cells[a]));
    }
    out += '\n';
  }
  return out;
}

std::map<std::string, Dataset> partition(const Dataset& d, std::string_view attribute) {
  const auto idx = d.schema().index_of(attribute);
  if (!d.schema()[idx].is_categorical())
    throw Error(Errc::NotCategorical, "cannot partition on non-categorical '" + std::string(attribute) + "'");
  std::map<std::string, std::vector<Row>> parts;
  for (const auto& row : d.rows()) {
    if (const auto* s = std::get_if<std::string>(&row.cells[idx])) parts[*s].push_back(row);
  }
  std::map<std::string, Dataset> out;
  for (auto& [value, rows] : parts) out.emplace(value, Dataset(d.schema(), std::move(rows)));
  return out;
}

ClassDistribution class_counts(const Dataset& d) {
  ClassDistribution dist;
  const auto& cls = d.schema().class_attribute();
  if (const auto* cat = std::get_if<Categorical>(&cls.kind))
    for (const auto& label : cat->domain) dist.declare(label);
  const auto idx = d.schema().class_index();
  for (const auto& row : d.rows())
    if (const auto* s = std::get_if<std::string>(&row.cells[idx])) dist.add(*s);
  return dist;
}

}  // namespace gg
