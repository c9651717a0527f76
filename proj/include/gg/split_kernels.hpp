#pragma once

// Columnar encoding and candidate-split scoring used by the tree builders.
// Every kernel exists in a serial reference form and an OpenMP form; the two
// must agree exactly (tests/test_kernels.cpp).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gg/dataset.hpp"
#include "gg/induction.hpp"

namespace gg::kernels {

struct EncodedColumn {
  std::string name;
  bool continuous = false;
  /// Categorical: level index per row, -1 for Missing.
  std::vector<int> codes;
  /// Continuous: value per row, NaN for Missing.
  std::vector<double> values;
  /// Categorical levels in domain order.
  std::vector<std::string> levels;
};

/// Dataset re-laid out column-wise with class labels as small integers.
/// Class levels are sorted lexicographically, so the lowest index wins ties.
struct EncodedData {
  explicit EncodedData(const Dataset& d);

  std::vector<EncodedColumn> columns;  // parallel to schema attributes
  std::vector<int> labels;             // -1 where the class is Missing
  std::vector<std::string> class_levels;
  std::size_t rows = 0;

  ClassDistribution distribution(std::span<const std::size_t> rows) const;
};

double entropy_bits(std::span<const double> counts) noexcept;

enum class Criterion { InformationGain, GainRatio };

struct CandidateScore {
  std::size_t attribute = 0;
  bool valid = false;
  double threshold = 0.0;  // continuous only
  double gain = 0.0;       // unscaled, over rows with a known value
  double split_info = 0.0;
  double known_fraction = 1.0;
  /// Selection score: gain (ID3) or known_fraction * gain / split_info (C4.5).
  double score = 0.0;
};

/// Scores one attribute over `rows`. Continuous attributes are scanned for
/// their best midpoint threshold by gain ratio.
CandidateScore score_attribute(const EncodedData& data, std::span<const std::size_t> rows,
                               std::size_t attribute, Criterion criterion);

std::vector<CandidateScore> score_candidates_serial(const EncodedData& data, std::span<const std::size_t> rows,
                                                    std::span<const std::size_t> attributes, Criterion criterion);

std::vector<CandidateScore> score_candidates_parallel(const EncodedData& data, std::span<const std::size_t> rows,
                                                      std::span<const std::size_t> attributes, Criterion criterion);

/// Index into `scores` of the best valid candidate (earliest wins ties), or
/// scores.size() when none is valid.
std::size_t select_best(std::span<const CandidateScore> scores) noexcept;

inline constexpr double kTieTolerance = 1e-12;

}  // namespace gg::kernels
