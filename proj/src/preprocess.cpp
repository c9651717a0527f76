#include "gg/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "gg/error.hpp"

namespace gg {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

AttributeSchema text(std::string name, Role role) { return {std::move(name), Text{}, role}; }

AttributeSchema categorical(std::string name, std::vector<std::string> domain, Role role = Role::Feature) {
  return {std::move(name), Categorical{std::move(domain)}, role};
}

}  // namespace

void Thresholds::validate() const {
  if (!(merit_max > 0.0)) throw Error(Errc::InvalidConfig, "merit_max must be positive");
  if (!(merit_cutoff >= 0.0 && merit_cutoff <= merit_max))
    throw Error(Errc::InvalidConfig, "merit cutoff must lie within [0, merit_max]");
  if (!(first_class_cutoff >= 0.0 && distinction_cutoff <= 100.0))
    throw Error(Errc::InvalidConfig, "percent cutoffs must lie within [0, 100]");
  if (!(distinction_cutoff > first_class_cutoff))
    throw Error(Errc::InvalidConfig, "distinction cutoff must exceed the first_class cutoff");
}

std::string_view to_string(Merit m) noexcept { return m == Merit::good ? "good" : "bad"; }

std::string_view to_string(PercentClass p) noexcept {
  switch (p) {
    case PercentClass::distinction: return "distinction";
    case PercentClass::first_class: return "first_class";
    case PercentClass::second_class: return "second_class";
  }
  return "second_class";
}

std::string_view to_string(AdmissionType t) noexcept { return t == AdmissionType::AI ? "AI" : "OTHER"; }
std::string_view to_string(Gender g) noexcept { return g == Gender::Male ? "Male" : "Female"; }

std::optional<Merit> parse_merit(std::string_view s) noexcept {
  if (s == "good") return Merit::good;
  if (s == "bad") return Merit::bad;
  return std::nullopt;
}

std::optional<PercentClass> parse_percent_class(std::string_view s) noexcept {
  if (s == "distinction") return PercentClass::distinction;
  if (s == "first_class") return PercentClass::first_class;
  if (s == "second_class") return PercentClass::second_class;
  return std::nullopt;
}

std::optional<AdmissionType> parse_admission_type(std::string_view s) noexcept {
  if (s == "AI") return AdmissionType::AI;
  if (s == "OTHER") return AdmissionType::OTHER;
  return std::nullopt;
}

std::optional<Gender> parse_gender(std::string_view s) noexcept {
  if (s == "Male") return Gender::Male;
  if (s == "Female") return Gender::Female;
  return std::nullopt;
}

Record ProcessedStudentRecord::to_record() const {
  return {
      {std::string(columns::merit), std::string(gg::to_string(merit))},
      {std::string(columns::gender), std::string(gg::to_string(gender))},
      {std::string(columns::percent), std::string(gg::to_string(percent))},
      {std::string(columns::type), std::string(gg::to_string(type))},
  };
}

Schema raw_student_schema() {
  return Schema({
      text("sr_no", Role::Ignored),
      text("merit_no", Role::Ignored),
      {"merit_marks", Continuous{"marks out of 200"}, Role::Feature},
      text("app_id", Role::Identifier),
      text("name", Role::Identifier),
      categorical("gender", {"Male", "Female"}),
      {"cast", Text{}, Role::Ignored, {"caste"}},
      text("location", Role::Ignored),
      {"percent", Continuous{"PCM percent"}, Role::Feature},
      text("type", Role::Feature),
      text("class", Role::ClassLabel),
  });
}

Schema processed_student_schema() {
  return Schema({
      categorical("merit", {"good", "bad"}),
      categorical("gender", {"Male", "Female"}),
      categorical("percent", {"distinction", "first_class", "second_class"}),
      categorical("type", {"AI", "OTHER"}),
      categorical("class", {"pass", "fail"}, Role::ClassLabel),
  });
}

std::vector<std::string> processed_feature_names() { return {"merit", "gender", "percent", "type"}; }

Merit discretize_merit(double marks, const Thresholds& t) {
  if (!std::isfinite(marks) || marks < 0.0 || marks > t.merit_max)
    throw Error(Errc::OutOfRange, "merit marks " + format_number(marks) + " outside [0, " +
                                      format_number(t.merit_max) + "]");
  return marks >= t.merit_cutoff ? Merit::good : Merit::bad;
}

PercentClass discretize_percent(double pcm, const Thresholds& t) {
  if (!std::isfinite(pcm) || pcm < 0.0 || pcm > 100.0)
    throw Error(Errc::OutOfRange, "percent " + format_number(pcm) + " outside [0, 100]");
  if (pcm >= t.distinction_cutoff) return PercentClass::distinction;
  if (pcm >= t.first_class_cutoff) return PercentClass::first_class;
  return PercentClass::second_class;
}

AdmissionType normalize_admission_type(std::string_view code) {
  const auto trimmed = trim(code);
  if (trimmed.empty()) throw Error(Errc::EmptyCode, "empty admission type code");
  return lower(trimmed) == "ai" ? AdmissionType::AI : AdmissionType::OTHER;
}

ProcessedStudentRecord preprocess_record(const RawStudentRecord& raw, const Thresholds& t) {
  ProcessedStudentRecord out;
  out.merit = discretize_merit(raw.merit_marks, t);
  out.gender = raw.gender;
  out.percent = discretize_percent(raw.percent, t);
  out.type = normalize_admission_type(raw.admission_type_code);
  if (raw.class_label) {
    auto label = lower(trim(*raw.class_label));
    if (label != "pass" && label != "fail")
      throw Error(Errc::DomainViolation, "class label '" + *raw.class_label + "' is neither pass nor fail");
    out.class_label = std::move(label);
  }
  return out;
}

CleanResult clean(const Dataset& d, bool require_class) {
  std::vector<std::size_t> checked;
  for (std::size_t a = 0; a < d.schema().size(); ++a) {
    const auto role = d.schema()[a].role;
    if (role == Role::Feature || (require_class && role == Role::ClassLabel)) checked.push_back(a);
  }
  std::vector<Row> kept;
  std::vector<std::size_t> dropped;
  for (std::size_t r = 0; r < d.size(); ++r) {
    const bool incomplete =
        std::any_of(checked.begin(), checked.end(), [&](std::size_t a) { return is_missing(d.cell(r, a)); });
    if (incomplete)
      dropped.push_back(r);
    else
      kept.push_back(d.rows()[r]);
  }
  return {Dataset(d.schema(), std::move(kept)), std::move(dropped)};
}

Row preprocess_row(const Schema& raw_schema, const Row& raw, const Thresholds& t) {
  auto get = [&](std::string_view name) -> const CellValue& { return raw.cells[raw_schema.index_of(name)]; };
  auto number = [&](std::string_view name) {
    const auto* v = std::get_if<double>(&get(name));
    if (v == nullptr) throw Error(Errc::MissingFeature, "missing '" + std::string(name) + "'");
    return *v;
  };
  auto text_of = [&](std::string_view name) {
    const auto* v = std::get_if<std::string>(&get(name));
    if (v == nullptr) throw Error(Errc::MissingFeature, "missing '" + std::string(name) + "'");
    return *v;
  };

  RawStudentRecord rec;
  rec.merit_marks = number("merit_marks");
  rec.percent = number("percent");
  rec.admission_type_code = text_of("type");
  const auto gender = parse_gender(text_of("gender"));
  if (!gender) throw Error(Errc::DomainViolation, "gender must be Male or Female");
  rec.gender = *gender;
  if (const auto* label = std::get_if<std::string>(&raw.cells[raw_schema.class_index()])) rec.class_label = *label;

  const auto p = preprocess_record(rec, t);
  Row out;
  out.cells = {std::string(to_string(p.merit)), std::string(to_string(p.gender)), std::string(to_string(p.percent)),
               std::string(to_string(p.type))};
  if (p.class_label)
    out.cells.emplace_back(*p.class_label);
  else
    out.cells.emplace_back(Missing{});
  return out;
}

PreprocessResult preprocess_detailed(const Dataset& raw, const PreprocessOptions& options) {
  options.thresholds.validate();
  for (auto name : {columns::merit_marks, columns::gender, columns::percent, columns::type})
    if (!raw.schema().find(name))
      throw Error(Errc::SchemaMismatch, "raw dataset lacks column '" + std::string(name) + "'");

  auto cleaned = clean(raw, options.require_class);
  std::vector<std::size_t> source;
  {
    std::size_t next_drop = 0;
    for (std::size_t r = 0; r < raw.size(); ++r) {
      if (next_drop < cleaned.dropped.size() && cleaned.dropped[next_drop] == r) {
        ++next_drop;
        continue;
      }
      source.push_back(r);
    }
  }

  std::vector<Row> rows;
  rows.reserve(cleaned.dataset.size());
  for (std::size_t i = 0; i < cleaned.dataset.size(); ++i) {
    try {
      rows.push_back(preprocess_row(raw.schema(), cleaned.dataset.rows()[i], options.thresholds));
    } catch (const Error& e) {
      throw Error(e.code(), "row " + std::to_string(source[i]) + ": " + e.what());
    }
  }
  return {Dataset(processed_student_schema(), std::move(rows)), std::move(cleaned.dropped), std::move(source)};
}

Dataset preprocess(const Dataset& raw, const PreprocessOptions& options) {
  return std::move(preprocess_detailed(raw, options).dataset);
}

CsvLayout detect_layout(std::string_view csv_bytes) {
  if (csv_bytes.size() >= 3 && csv_bytes.substr(0, 3) == "\xEF\xBB\xBF") csv_bytes.remove_prefix(3);
  const auto eol = csv_bytes.find('\n');
  const auto records = read_csv_records(csv_bytes.substr(0, eol == std::string_view::npos ? csv_bytes.size() : eol + 1));
  if (records.empty()) throw Error(Errc::MalformedCsv, "missing header row");
  bool raw = false;
  bool processed = false;
  for (const auto& field : records.front()) {
    auto name = std::string_view(field);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.remove_prefix(1);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.remove_suffix(1);
    raw = raw || name == columns::merit_marks;
    processed = processed || name == columns::merit;
  }
  if (raw == processed)
    throw Error(Errc::AmbiguousHeader, raw ? "header has both 'merit' and 'merit_marks'"
                                           : "header has neither 'merit' nor 'merit_marks'");
  return raw ? CsvLayout::Raw : CsvLayout::Processed;
}

Dataset parse_student_csv(std::string_view csv_bytes, const CsvOptions& options) {
  const auto layout = detect_layout(csv_bytes);
  return parse_csv(csv_bytes, layout == CsvLayout::Raw ? raw_student_schema() : processed_student_schema(), options);
}

}  // namespace gg
