#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "gg/dataset.hpp"
#include "gg/induction.hpp"
#include "gg/preprocess.hpp"

namespace gg::test {

/// Portable draws on top of mt19937_64 (the std distributions are not
/// specified bit-for-bit across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(g_() % n); }
  double unit() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double between(double lo, double hi) { return lo + (hi - lo) * unit(); }
  bool coin() { return (g_() >> 63) != 0; }

 private:
  std::mt19937_64 g_;
};

/// The published decision ladder: distinction passes; first_class passes
/// with good merit or an AI seat; second_class fails. Gender is unused.
inline std::string ladder_label(Merit merit, PercentClass percent, AdmissionType type) {
  if (percent == PercentClass::distinction) return "pass";
  if (percent == PercentClass::second_class) return "fail";
  if (merit == Merit::good) return "pass";
  return type == AdmissionType::AI ? "pass" : "fail";
}

inline std::string ladder_label(const ProcessedStudentRecord& r) { return ladder_label(r.merit, r.percent, r.type); }

/// All 24 points of merit x gender x percent x type.
inline std::vector<ProcessedStudentRecord> all_combinations() {
  std::vector<ProcessedStudentRecord> out;
  for (auto m : {Merit::bad, Merit::good})
    for (auto g : {Gender::Male, Gender::Female})
      for (auto p : {PercentClass::second_class, PercentClass::first_class, PercentClass::distinction})
        for (auto t : {AdmissionType::AI, AdmissionType::OTHER}) out.push_back({m, g, p, t, std::nullopt});
  return out;
}

inline Row processed_row(const ProcessedStudentRecord& r, const std::string& label) {
  return Row{{std::string(to_string(r.merit)), std::string(to_string(r.gender)), std::string(to_string(r.percent)),
              std::string(to_string(r.type)), label}};
}

/// `n` noise-free ladder rows: every combination round-robin, then shuffled.
inline Dataset ladder_rows(std::size_t n, std::uint64_t seed) {
  const auto combos = all_combinations();
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(processed_row(combos[i % combos.size()], ladder_label(combos[i % combos.size()])));
  Rng rng(seed);
  for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
  return Dataset(processed_student_schema(), std::move(rows));
}

inline TrainedModel ladder_model(Execution exec = Execution::Parallel) {
  return train_c45(ladder_rows(200, 7), processed_feature_names(), TrainConfig::c45_defaults(), exec);
}

/// A processed labelled set of `total` rows where exactly `agreeing` labels
/// match the ladder; the rest carry the opposite label.
inline Dataset planted_verification(std::size_t total, std::size_t agreeing, std::uint64_t seed) {
  Rng rng(seed);
  const auto combos = all_combinations();
  std::vector<bool> flip(total, false);
  for (std::size_t i = 0; i < total - agreeing; ++i) flip[i] = true;
  for (std::size_t i = total; i > 1; --i) {
    const auto j = rng.below(i);
    const bool tmp = flip[i - 1];
    flip[i - 1] = flip[j];
    flip[j] = tmp;
  }
  std::vector<Row> rows;
  for (std::size_t i = 0; i < total; ++i) {
    const auto& c = combos[rng.below(combos.size())];
    auto label = ladder_label(c);
    if (flip[i]) label = label == "pass" ? "fail" : "pass";
    rows.push_back(processed_row(c, label));
  }
  return Dataset(processed_student_schema(), std::move(rows));
}

/// Raw student rows whose discretized features follow the ladder exactly.
inline std::string raw_ladder_csv(std::size_t n, std::uint64_t seed, bool with_class = true) {
  Rng rng(seed);
  std::string csv = "sr_no,merit_no,merit_marks,app_id,name,gender,cast,location,percent,type";
  csv += with_class ? ",class\n" : "\n";
  const char* codes[] = {"AI", "OTHER", "OMS", "MS"};
  for (std::size_t i = 0; i < n; ++i) {
    const double marks = static_cast<double>(rng.below(2001)) / 10.0;
    const double pcm = static_cast<double>(rng.below(10001)) / 100.0;
    const auto* code = codes[rng.below(4)];
    const char* gender = rng.coin() ? "Male" : "Female";
    ProcessedStudentRecord r{discretize_merit(marks), Gender::Male, discretize_percent(pcm),
                             normalize_admission_type(code), std::nullopt};
    csv += std::to_string(i + 1) + "," + std::to_string(1000 + i) + "," + format_number(marks) + ",DX" +
           std::to_string(100000 + i) + ",Student " + std::to_string(i) + "," + gender + ",OPEN,Pune," +
           format_number(pcm) + "," + code;
    if (with_class) csv += "," + std::string(ladder_label(r) == "pass" ? "PASS" : "FAIL");
    csv += "\n";
  }
  return csv;
}

/// Model schema for synthetic mixed trees: two categorical and two continuous features.
inline Schema mixed_schema() {
  return Schema({{"c0", Categorical{{"x", "y", "z"}}},
                 {"c1", Categorical{{"x", "y", "z"}}},
                 {"n0", Continuous{"u"}},
                 {"n1", Continuous{"u"}},
                 {"class", Categorical{{"fail", "pass"}}, Role::ClassLabel}});
}

namespace detail {
inline TreeNode random_node(Rng& rng, int depth, bool full) {
  if (depth == 0 || rng.below(4) == 0) {
    const std::string label = rng.coin() ? "pass" : "fail";
    ClassDistribution dist;
    dist.add(label, static_cast<double>(2 + rng.below(6)));
    if (rng.coin()) dist.add(label == "pass" ? "fail" : "pass", 1.0);
    return TreeNode::make_leaf(label, dist);
  }
  static const char* names[] = {"c0", "c1", "n0", "n1"};
  const std::string attr = names[rng.below(4)];
  TreeNode node;
  if (attr[0] == 'n') {
    node.test = ContinuousSplit{attr, static_cast<double>(rng.below(400)) / 4.0};
    node.branches.push_back({std::string(kLessEqual), random_node(rng, depth - 1, full)});
    node.branches.push_back({std::string(kGreater), random_node(rng, depth - 1, full)});
  } else {
    node.test = CategoricalSplit{attr};
    for (const char* v : {"x", "y", "z"})
      if (full || rng.below(3) != 0) node.branches.push_back({v, random_node(rng, depth - 1, full)});
    if (node.branches.empty()) node.branches.push_back({"y", random_node(rng, depth - 1, full)});
  }
  for (const auto& b : node.branches) node.distribution += b.child.distribution;
  node.label = node.distribution.majority();
  return node;
}
}  // namespace detail

/// Random tree over mixed_schema(). With `full` every categorical node
/// covers its whole domain, as trained trees do.
inline TrainedModel random_mixed_model(Rng& rng, bool full = true, int max_depth = 5) {
  const auto algorithm = rng.coin() ? Algorithm::ID3 : Algorithm::C45;
  auto root = detail::random_node(rng, max_depth, full);
  const TrainStats stats{static_cast<std::size_t>(root.distribution.total()), node_count(root), leaf_count(root)};
  return TrainedModel{algorithm, std::move(root), mixed_schema(), {"c0", "c1", "n0", "n1"},
                      TrainConfig::defaults_for(algorithm), stats};
}

/// Record over mixed_schema(); half the numbers sit on the quarter grid so
/// they can land exactly on a threshold.
inline Record random_mixed_record(Rng& rng) {
  static const char* values[] = {"x", "y", "z"};
  Record r;
  r["c0"] = std::string(values[rng.below(3)]);
  r["c1"] = std::string(values[rng.below(3)]);
  for (const char* n : {"n0", "n1"})
    r[n] = rng.coin() ? static_cast<double>(rng.below(400)) / 4.0 : rng.between(-5, 105);
  return r;
}

inline std::filesystem::path temp_path(const std::string& stem) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() / "gradegauge-tests";
  std::filesystem::create_directories(dir);
  return dir / (stem + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
}

}  // namespace gg::test
