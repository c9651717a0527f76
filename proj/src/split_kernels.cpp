#include "gg/split_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

namespace gg::kernels {

EncodedData::EncodedData(const Dataset& d) : rows(d.size()) {
  const auto& schema = d.schema();
  const auto class_idx = schema.class_index();

  std::set<std::string> class_set;
  if (const auto* cat = std::get_if<Categorical>(&schema.class_attribute().kind))
    class_set.insert(cat->domain.begin(), cat->domain.end());
  for (const auto& row : d.rows())
    if (const auto* s = std::get_if<std::string>(&row.cells[class_idx])) class_set.insert(*s);
  class_levels.assign(class_set.begin(), class_set.end());
  std::unordered_map<std::string, int> class_code;
  for (std::size_t i = 0; i < class_levels.size(); ++i) class_code.emplace(class_levels[i], static_cast<int>(i));

  labels.resize(rows, -1);
  for (std::size_t r = 0; r < rows; ++r)
    if (const auto* s = std::get_if<std::string>(&d.cell(r, class_idx))) labels[r] = class_code.at(*s);

  columns.resize(schema.size());
  for (std::size_t a = 0; a < schema.size(); ++a) {
    const auto& attr = schema[a];
    auto& col = columns[a];
    col.name = attr.name;
    if (attr.is_continuous()) {
      col.continuous = true;
      col.values.resize(rows, std::numeric_limits<double>::quiet_NaN());
      for (std::size_t r = 0; r < rows; ++r)
        if (const auto* v = std::get_if<double>(&d.cell(r, a))) col.values[r] = *v;
      continue;
    }
    if (const auto* cat = std::get_if<Categorical>(&attr.kind)) {
      col.levels = cat->domain;
    } else {
      std::set<std::string> seen;
      for (const auto& row : d.rows())
        if (const auto* s = std::get_if<std::string>(&row.cells[a])) seen.insert(*s);
      col.levels.assign(seen.begin(), seen.end());
    }
    std::unordered_map<std::string, int> code;
    for (std::size_t i = 0; i < col.levels.size(); ++i) code.emplace(col.levels[i], static_cast<int>(i));
    col.codes.resize(rows, -1);
    for (std::size_t r = 0; r < rows; ++r)
      if (const auto* s = std::get_if<std::string>(&d.cell(r, a))) col.codes[r] = code.at(*s);
  }
}

ClassDistribution EncodedData::distribution(std::span<const std::size_t> subset) const {
  std::vector<double> counts(class_levels.size(), 0.0);
  for (auto r : subset)
    if (labels[r] >= 0) counts[static_cast<std::size_t>(labels[r])] += 1.0;
  ClassDistribution dist;
  for (std::size_t c = 0; c < counts.size(); ++c) dist.add(class_levels[c], counts[c]);
  return dist;
}

double entropy_bits(std::span<const double> counts) noexcept {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

CandidateScore score_categorical(const EncodedData& data, std::span<const std::size_t> rows, std::size_t attribute,
                                 Criterion criterion) {
  const auto& col = data.columns[attribute];
  const std::size_t n_levels = col.levels.size();
  const std::size_t n_classes = data.class_levels.size();

  std::vector<double> table(n_levels * n_classes, 0.0);
  std::vector<double> part_sizes(n_levels, 0.0);
  std::vector<double> known_classes(n_classes, 0.0);
  double labelled = 0.0;
  double known = 0.0;
  for (auto r : rows) {
    const int label = data.labels[r];
    if (label < 0) continue;
    labelled += 1.0;
    const int code = col.codes[r];
    if (code < 0) continue;
    known += 1.0;
    table[static_cast<std::size_t>(code) * n_classes + static_cast<std::size_t>(label)] += 1.0;
    part_sizes[static_cast<std::size_t>(code)] += 1.0;
    known_classes[static_cast<std::size_t>(label)] += 1.0;
  }

  CandidateScore s;
  s.attribute = attribute;
  if (known <= 0.0) return s;
  s.valid = true;
  s.known_fraction = known / labelled;

  double remainder = 0.0;
  for (std::size_t v = 0; v < n_levels; ++v) {
    if (part_sizes[v] <= 0.0) continue;
    remainder += part_sizes[v] / known *
                 entropy_bits(std::span<const double>(table.data() + v * n_classes, n_classes));
  }
  s.gain = std::max(0.0, entropy_bits(known_classes) - remainder);
  s.split_info = entropy_bits(part_sizes);
  if (criterion == Criterion::InformationGain)
    s.score = s.gain;
  else
    s.score = s.split_info > 0.0 ? s.known_fraction * s.gain / s.split_info : 0.0;
  return s;
}

CandidateScore score_continuous(const EncodedData& data, std::span<const std::size_t> rows, std::size_t attribute,
                                Criterion criterion) {
  const auto& col = data.columns[attribute];
  const std::size_t n_classes = data.class_levels.size();

  std::vector<std::pair<double, int>> known_rows;
  known_rows.reserve(rows.size());
  double labelled = 0.0;
  for (auto r : rows) {
    const int label = data.labels[r];
    if (label < 0) continue;
    labelled += 1.0;
    const double v = col.values[r];
    if (std::isnan(v)) continue;
    known_rows.emplace_back(v, label);
  }

  CandidateScore s;
  s.attribute = attribute;
  if (known_rows.size() < 2) return s;
  std::sort(known_rows.begin(), known_rows.end());
  if (known_rows.front().first == known_rows.back().first) return s;

  const double known = static_cast<double>(known_rows.size());
  std::vector<double> right(n_classes, 0.0);
  for (const auto& [v, label] : known_rows) right[static_cast<std::size_t>(label)] += 1.0;
  std::vector<double> left(n_classes, 0.0);
  const double base = entropy_bits(right);

  bool found = false;
  double best_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < known_rows.size(); ++i) {
    const auto label = static_cast<std::size_t>(known_rows[i].second);
    left[label] += 1.0;
    right[label] -= 1.0;
    const double lo = known_rows[i].first;
    const double hi = known_rows[i + 1].first;
    if (lo == hi) continue;

    const double n_left = static_cast<double>(i + 1);
    const double n_right = known - n_left;
    const double gain =
        std::max(0.0, base - (n_left / known) * entropy_bits(left) - (n_right / known) * entropy_bits(right));
    const double sizes[2] = {n_left, n_right};
    const double split = entropy_bits(sizes);
    const double ratio = split > 0.0 ? gain / split : 0.0;
    if (!found || ratio > best_ratio + kTieTolerance) {
      found = true;
      best_ratio = ratio;
      double mid = lo + (hi - lo) / 2.0;
      if (!(mid < hi)) mid = lo;
      s.threshold = mid;
      s.gain = gain;
      s.split_info = split;
    }
  }

  s.valid = true;
  s.known_fraction = known / labelled;
  if (criterion == Criterion::InformationGain)
    s.score = s.gain;
  else
    s.score = s.split_info > 0.0 ? s.known_fraction * s.gain / s.split_info : 0.0;
  return s;
}

}  // namespace

CandidateScore score_attribute(const EncodedData& data, std::span<const std::size_t> rows, std::size_t attribute,
                               Criterion criterion) {
  return data.columns[attribute].continuous ? score_continuous(data, rows, attribute, criterion)
                                            : score_categorical(data, rows, attribute, criterion);
}

std::vector<CandidateScore> score_candidates_serial(const EncodedData& data, std::span<const std::size_t> rows,
                                                    std::span<const std::size_t> attributes, Criterion criterion) {
  std::vector<CandidateScore> out(attributes.size());
  for (std::size_t i = 0; i < attributes.size(); ++i) out[i] = score_attribute(data, rows, attributes[i], criterion);
  return out;
}

std::vector<CandidateScore> score_candidates_parallel(const EncodedData& data, std::span<const std::size_t> rows,
                                                      std::span<const std::size_t> attributes, Criterion criterion) {
  std::vector<CandidateScore> out(attributes.size());
  const auto n = static_cast<long>(attributes.size());
#pragma omp parallel for schedule(dynamic) if (n > 1 && rows.size() >= 64)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = score_attribute(data, rows, attributes[k], criterion);
  }
  return out;
}

std::size_t select_best(std::span<const CandidateScore> scores) noexcept {
  std::size_t best = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i].valid) continue;
    if (best == scores.size() || scores[i].score > scores[best].score + kTieTolerance) best = i;
  }
  return best;
}

}  // namespace gg::kernels
