#include "gg/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>

#include "gg/error.hpp"

namespace gg {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string record_ref_of(const Dataset& d, std::size_t row) {
  if (auto idx = d.schema().find(columns::app_id))
    if (const auto* s = std::get_if<std::string>(&d.cell(row, *idx))) return *s;
  return "row " + std::to_string(row + 1);
}

// The rows to classify, aligned to the model's schema, plus their origin.
struct Prepared {
  const Schema* schema = nullptr;
  std::vector<Row> rows;
  std::vector<std::size_t> source;
  std::vector<std::optional<std::string>> actual;
  std::vector<SkippedRow> skipped;
};

bool directly_compatible(const TrainedModel& model, const Schema& schema) {
  for (const auto& f : model.features) {
    const auto idx = schema.find(f);
    if (!idx) return false;
    if (schema[*idx].kind.index() != model.schema.at(f).kind.index()) return false;
  }
  return true;
}

Prepared prepare(const TrainedModel& model, const Dataset& d, const Thresholds& thresholds) {
  Prepared p;
  const auto cls = d.schema().class_index();
  if (directly_compatible(model, d.schema())) {
    p.schema = &d.schema();
    std::vector<std::size_t> feature_idx;
    for (const auto& f : model.features) feature_idx.push_back(d.schema().index_of(f));
    for (std::size_t r = 0; r < d.size(); ++r) {
      auto missing = std::find_if(feature_idx.begin(), feature_idx.end(),
                                  [&](std::size_t a) { return is_missing(d.cell(r, a)); });
      if (missing != feature_idx.end()) {
        p.skipped.push_back({r, "missing value for '" + d.schema()[*missing].name + "'"});
        continue;
      }
      p.rows.push_back(d.rows()[r]);
      p.source.push_back(r);
      if (const auto* s = std::get_if<std::string>(&d.cell(r, cls)))
        p.actual.emplace_back(*s);
      else
        p.actual.emplace_back(std::nullopt);
    }
    return p;
  }

  static const Schema processed = processed_student_schema();
  const bool raw_input = d.schema().find(columns::merit_marks).has_value();
  const bool processed_model = std::all_of(model.features.begin(), model.features.end(),
                                           [](const std::string& f) { return processed.find(f).has_value(); });
  if (!raw_input || !processed_model || !directly_compatible(model, processed))
    throw Error(Errc::SchemaMismatch, "dataset columns do not match the model's features");

  p.schema = &processed;
  for (std::size_t r = 0; r < d.size(); ++r) {
    try {
      auto row = preprocess_row(d.schema(), d.rows()[r], thresholds);
      if (const auto* s = std::get_if<std::string>(&row.cells.back()))
        p.actual.emplace_back(*s);
      else
        p.actual.emplace_back(std::nullopt);
      p.rows.push_back(std::move(row));
      p.source.push_back(r);
    } catch (const Error& e) {
      p.skipped.push_back({r, std::string(e.name()) + ": " + e.what()});
    }
  }
  return p;
}

struct Classified {
  Prepared prepared;
  std::vector<Classification> results;
  double wall_time_ms = 0.0;
};

Classified run(const TrainedModel& model, const Dataset& d, const EvaluateOptions& options) {
  Classified out{prepare(model, d, options.thresholds), {}, 0.0};
  const auto& rows = out.prepared.rows;
  const auto& schema = *out.prepared.schema;
  out.results.resize(rows.size());

  const auto start = std::chrono::steady_clock::now();
  if (options.execution == Execution::Serial) {
    for (std::size_t i = 0; i < rows.size(); ++i) out.results[i] = classify(model.root, schema, rows[i]);
  } else {
    const auto n = static_cast<long>(rows.size());
#pragma omp parallel for schedule(static) if (n >= 256)
    for (long i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      // every tested feature was checked in prepare(), so classify cannot throw
      out.results[k] = classify(model.root, schema, rows[k]);
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  out.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return out;
}

Prediction make_prediction(const TrainedModel& model, const Dataset& d, std::size_t row, Classification c,
                           const std::string& model_ref) {
  return Prediction{record_ref_of(d, row), row, std::move(c.label), std::move(c.path), model_ref, model.algorithm};
}

}  // namespace

double rounded_percent(std::size_t correct, std::size_t total) {
  if (total == 0) return 0.0;
  // thousandths of a percent, half-up, in exact integer arithmetic
  const auto c = static_cast<unsigned long long>(correct);
  const auto t = static_cast<unsigned long long>(total);
  const auto milli = (200000ULL * c + t) / (2ULL * t);
  return static_cast<double>(milli) / 1000.0;
}

std::string format_percent(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", percent);
  return buf;
}

Prediction predict_single(const TrainedModel& model, const ProcessedStudentRecord& record,
                          const std::string& model_ref, const std::string& record_ref) {
  auto c = classify(model.root, record.to_record());
  return Prediction{record_ref, 0, std::move(c.label), std::move(c.path), model_ref, model.algorithm};
}

BulkResult evaluate_bulk(const TrainedModel& model, const Dataset& d, const EvaluateOptions& options) {
  auto classified = run(model, d, options);
  BulkResult out;
  out.wall_time_ms = classified.wall_time_ms;
  out.skipped = std::move(classified.prepared.skipped);
  out.predictions.reserve(classified.results.size());
  for (std::size_t i = 0; i < classified.results.size(); ++i)
    out.predictions.push_back(
        make_prediction(model, d, classified.prepared.source[i], std::move(classified.results[i]), options.model_ref));
  return out;
}

EvaluationReport accuracy(std::span<const Prediction> predictions, std::span<const std::string> actuals) {
  if (predictions.size() != actuals.size())
    throw Error(Errc::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                          std::to_string(actuals.size()) + " actual labels");
  EvaluationReport report;
  report.total = predictions.size();
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (iequals(predictions[i].predicted, actuals[i])) {
      ++report.correct;
    } else {
      report.mismatches.push_back(
          Mismatch{predictions[i].row, predictions[i].record_ref, {}, actuals[i], predictions[i].predicted});
    }
  }
  report.accuracy_percent = rounded_percent(report.correct, report.total);
  return report;
}

EvaluationReport verify(const TrainedModel& model, const Dataset& labeled, const EvaluateOptions& options) {
  auto classified = run(model, labeled, options);
  const auto& actual = classified.prepared.actual;
  std::vector<std::size_t> unlabeled;
  for (std::size_t i = 0; i < actual.size(); ++i)
    if (!actual[i]) unlabeled.push_back(classified.prepared.source[i]);
  if (!unlabeled.empty()) {
    std::string rows;
    for (auto r : unlabeled) rows += (rows.empty() ? "" : ",") + std::to_string(r);
    throw Error(Errc::UnlabeledRows, "rows without a class label: " + rows);
  }

  std::vector<Prediction> predictions;
  std::vector<std::string> actuals;
  for (std::size_t i = 0; i < classified.results.size(); ++i) {
    predictions.push_back(make_prediction(model, labeled, classified.prepared.source[i],
                                          std::move(classified.results[i]), options.model_ref));
    actuals.push_back(lower(*actual[i]));
  }
  auto report = accuracy(predictions, actuals);
  report.wall_time_ms = classified.wall_time_ms;
  for (auto& m : report.mismatches) m.record = labeled.rows()[m.row];
  return report;
}

double combined_accuracy(std::span<const EvaluationReport> reports) {
  if (reports.empty()) throw Error(Errc::EmptyInput, "no reports to combine");
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& r : reports) {
    correct += r.correct;
    total += r.total;
  }
  return rounded_percent(correct, total);
}

}  // namespace gg
