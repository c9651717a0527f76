#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gg/dataset.hpp"
#include "gg/induction.hpp"
#include "gg/preprocess.hpp"

namespace gg {

struct Prediction {
  /// app_id when the input carries one, otherwise "row N" (1-based).
  std::string record_ref;
  std::size_t row = 0;
  std::string predicted;
  std::vector<PathStep> path;
  std::string model_ref;
  Algorithm algorithm = Algorithm::ID3;
};

struct Mismatch {
  std::size_t row = 0;
  std::string record_ref;
  /// Input row as supplied (raw or processed columns).
  Row record;
  std::string actual;
  std::string predicted;
};

struct EvaluationReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  /// Half-up rounded to three decimals.
  double accuracy_percent = 0.0;
  double wall_time_ms = 0.0;
  std::vector<Mismatch> mismatches;
};

struct SkippedRow {
  std::size_t row = 0;
  std::string reason;
};

struct BulkResult {
  std::vector<Prediction> predictions;
  std::vector<SkippedRow> skipped;
  double wall_time_ms = 0.0;
};

struct EvaluateOptions {
  Thresholds thresholds;
  Execution execution = Execution::Parallel;
  std::string model_ref;
};

Prediction predict_single(const TrainedModel& model, const ProcessedStudentRecord& record,
                          const std::string& model_ref = {}, const std::string& record_ref = {});

/// Classifies every evaluable row in input order. Raw student files are
/// discretized first; rows that cannot be evaluated land in `skipped`.
BulkResult evaluate_bulk(const TrainedModel& model, const Dataset& d, const EvaluateOptions& options = {});

/// Case-insensitive comparison of predictions against actual labels.
EvaluationReport accuracy(std::span<const Prediction> predictions, std::span<const std::string> actuals);

EvaluationReport verify(const TrainedModel& model, const Dataset& labeled, const EvaluateOptions& options = {});

/// Pooled accuracy 100 * sum(correct) / sum(total), rounded like the reports.
double combined_accuracy(std::span<const EvaluationReport> reports);

/// 100 * correct / total rounded half-up to three decimals; 0 when total is 0.
double rounded_percent(std::size_t correct, std::size_t total);

/// Three-decimal rendering, e.g. "75.145".
std::string format_percent(double percent);

}  // namespace gg
