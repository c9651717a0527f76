#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gg/dataset.hpp"
#include "gg/induction.hpp"

namespace gg {

/// Discretization cutoffs; all comparisons are closed below (>=).
struct Thresholds {
  double merit_cutoff = 120.0;
  double merit_max = 200.0;
  double distinction_cutoff = 70.0;
  double first_class_cutoff = 60.0;

  void validate() const;  // throws InvalidConfig
  bool operator==(const Thresholds&) const = default;
};

// Enumerators are declared in ascending order so comparisons follow the
// natural ranking (bad < good, second_class < first_class < distinction).
enum class Merit { bad, good };
enum class PercentClass { second_class, first_class, distinction };
enum class AdmissionType { AI, OTHER };
enum class Gender { Male, Female };

std::string_view to_string(Merit m) noexcept;
std::string_view to_string(PercentClass p) noexcept;
std::string_view to_string(AdmissionType t) noexcept;
std::string_view to_string(Gender g) noexcept;

std::optional<Merit> parse_merit(std::string_view s) noexcept;
std::optional<PercentClass> parse_percent_class(std::string_view s) noexcept;
std::optional<AdmissionType> parse_admission_type(std::string_view s) noexcept;
std::optional<Gender> parse_gender(std::string_view s) noexcept;

struct RawStudentRecord {
  double merit_marks = 0.0;
  std::string app_id;
  std::string name;
  Gender gender = Gender::Male;
  std::string caste;
  std::string location;
  double percent = 0.0;
  std::string admission_type_code;
  std::optional<std::string> class_label;
};

struct ProcessedStudentRecord {
  Merit merit = Merit::good;
  Gender gender = Gender::Male;
  PercentClass percent = PercentClass::distinction;
  AdmissionType type = AdmissionType::AI;
  std::optional<std::string> class_label;

  /// Feature values keyed by processed attribute name (class omitted).
  Record to_record() const;
  bool operator==(const ProcessedStudentRecord&) const = default;
};

namespace columns {
inline constexpr std::string_view merit = "merit";
inline constexpr std::string_view gender = "gender";
inline constexpr std::string_view percent = "percent";
inline constexpr std::string_view type = "type";
inline constexpr std::string_view cls = "class";
inline constexpr std::string_view merit_marks = "merit_marks";
inline constexpr std::string_view app_id = "app_id";
inline constexpr std::string_view name = "name";
}  // namespace columns

/// sr_no,merit_no,merit_marks,app_id,name,gender,cast,location,percent,type,class
Schema raw_student_schema();
/// merit,gender,percent,type,class
Schema processed_student_schema();
std::vector<std::string> processed_feature_names();

Merit discretize_merit(double marks, const Thresholds& t = {});
PercentClass discretize_percent(double pcm, const Thresholds& t = {});
AdmissionType normalize_admission_type(std::string_view code);

ProcessedStudentRecord preprocess_record(const RawStudentRecord& raw, const Thresholds& t = {});

struct CleanResult {
  Dataset dataset;
  std::vector<std::size_t> dropped;
};

/// Drops every row with a Missing Feature (and, when `require_class`, Missing
/// ClassLabel) cell; returns the 0-based indices of dropped rows.
CleanResult clean(const Dataset& d, bool require_class = true);

struct PreprocessOptions {
  Thresholds thresholds;
  /// When false, unlabeled rows survive with a Missing class cell.
  bool require_class = true;
};

struct PreprocessResult {
  Dataset dataset;
  std::vector<std::size_t> dropped;
  /// Raw row index of each output row.
  std::vector<std::size_t> source_rows;
};

/// Maps one raw-schema row to a processed-schema row. Errors carry no row
/// context; callers add it.
Row preprocess_row(const Schema& raw_schema, const Row& raw, const Thresholds& t);

PreprocessResult preprocess_detailed(const Dataset& raw, const PreprocessOptions& options = {});
Dataset preprocess(const Dataset& raw, const PreprocessOptions& options = {});

enum class CsvLayout { Raw, Processed };

/// Decides by header alone: `merit_marks` marks a raw file, `merit` a
/// processed one. Neither or both throws AmbiguousHeader.
CsvLayout detect_layout(std::string_view csv_bytes);

/// parse_csv against the schema detect_layout picks.
Dataset parse_student_csv(std::string_view csv_bytes, const CsvOptions& options = {});

}  // namespace gg
