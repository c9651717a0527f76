#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gg/dataset.hpp"
#include "gg/distribution.hpp"

namespace gg {

struct CategoricalSplit {
  std::string attribute;
  bool operator==(const CategoricalSplit&) const = default;
};

/// value <= threshold goes to the "<=" branch, value > threshold to ">".
struct ContinuousSplit {
  std::string attribute;
  double threshold = 0.0;
  bool operator==(const ContinuousSplit&) const = default;
};

using SplitTest = std::variant<CategoricalSplit, ContinuousSplit>;

const std::string& attribute_of(const SplitTest& test) noexcept;

inline constexpr std::string_view kLessEqual = "<=";
inline constexpr std::string_view kGreater = ">";

struct Branch;

/// A leaf when `test` is empty. For internal nodes `label` is the fallback
/// label (majority of `distribution`) used when a record has no matching branch.
struct TreeNode {
  std::optional<SplitTest> test;
  std::vector<Branch> branches;
  std::string label;
  ClassDistribution distribution;

  bool is_leaf() const noexcept { return !test.has_value(); }
  const TreeNode* child(std::string_view key) const noexcept;

  static TreeNode make_leaf(std::string label, ClassDistribution distribution);

  bool operator==(const TreeNode& other) const;
};

struct Branch {
  std::string key;
  TreeNode child;
  bool operator==(const Branch& other) const = default;
};

inline bool TreeNode::operator==(const TreeNode& other) const {
  return test == other.test && branches == other.branches && label == other.label &&
         distribution == other.distribution;
}

std::size_t node_count(const TreeNode& root) noexcept;
std::size_t leaf_count(const TreeNode& root) noexcept;
std::size_t depth(const TreeNode& root) noexcept;

enum class Algorithm { ID3, C45 };

std::string_view to_string(Algorithm a) noexcept;
/// Accepts "ID3", "C45", "C4.5" in any case.
std::optional<Algorithm> parse_algorithm(std::string_view text) noexcept;

struct TrainConfig {
  std::size_t min_leaf_size = 1;
  bool prune = false;
  double confidence_factor = 0.25;

  static TrainConfig id3_defaults() { return {1, false, 0.25}; }
  static TrainConfig c45_defaults() { return {2, true, 0.25}; }
  static TrainConfig defaults_for(Algorithm a) { return a == Algorithm::ID3 ? id3_defaults() : c45_defaults(); }

  void validate() const;  // throws InvalidConfig
  bool operator==(const TrainConfig&) const = default;
};

struct TrainStats {
  std::size_t training_rows = 0;
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  bool operator==(const TrainStats&) const = default;
};

struct TrainedModel {
  Algorithm algorithm = Algorithm::ID3;
  TreeNode root;
  Schema schema;
  /// Feature list the model was trained with, in caller order.
  std::vector<std::string> features;
  TrainConfig config;
  TrainStats stats;

  bool operator==(const TrainedModel&) const = default;
};

/// Serial kernels are the reference; parallel ones spread candidate scoring
/// over OpenMP threads and must produce identical trees.
enum class Execution { Serial, Parallel };

// ---- split measures -------------------------------------------------------

/// Shannon entropy in bits. Throws EmptyDistribution when total() is 0.
double entropy(const ClassDistribution& dist);

double information_gain(const Dataset& d, const SplitTest& test);
double split_info(const Dataset& d, const SplitTest& test);
/// information_gain / split_info, or 0 when split_info is 0.
double gain_ratio(const Dataset& d, const SplitTest& test);

struct ContinuousSplitChoice {
  double threshold = 0.0;
  double gain_ratio = 0.0;
};

/// Scans midpoints between consecutive distinct values; ties go to the
/// smallest threshold. Throws TooFewDistinctValues.
ContinuousSplitChoice best_continuous_split(const Dataset& d, std::string_view attribute);

// ---- training -------------------------------------------------------------

TrainedModel train_id3(const Dataset& d, const std::vector<std::string>& features, const TrainConfig& config,
                       Execution exec = Execution::Parallel);

TrainedModel train_c45(const Dataset& d, const std::vector<std::string>& features, const TrainConfig& config,
                       Execution exec = Execution::Parallel);

TrainedModel train(Algorithm algorithm, const Dataset& d, const std::vector<std::string>& features,
                   const TrainConfig& config, Execution exec = Execution::Parallel);

/// Upper confidence limit on the error count of a leaf holding `total`
/// weight with `errors` misclassified, at tail probability `confidence_factor`.
/// Never below the observed error count.
double pessimistic_errors(double total, double errors, double confidence_factor);

TreeNode prune(const TreeNode& root, const TrainConfig& config);

// ---- classification -------------------------------------------------------

using Record = std::map<std::string, CellValue, std::less<>>;

struct PathStep {
  SplitTest test;
  /// Branch key taken, or "*" when the fallback label was used.
  std::string outcome;
  bool operator==(const PathStep&) const = default;
};

inline constexpr std::string_view kFallbackOutcome = "*";

struct Classification {
  std::string label;
  std::vector<PathStep> path;
};

/// Throws MissingFeature when the record has no entry for a tested attribute;
/// a Missing value or a value without a branch yields the fallback label.
Classification classify(const TreeNode& root, const Record& record);
Classification classify(const TreeNode& root, const Schema& schema, const Row& row);

Record to_record(const Schema& schema, const Row& row);

}  // namespace gg
