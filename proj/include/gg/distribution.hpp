#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace gg {

/// Per-class weights. Counts are reals so fractional instance weights fit, but
/// everything produced by this project is integral.
class ClassDistribution {
 public:
  using Counts = std::map<std::string, double, std::less<>>;

  ClassDistribution() = default;
  explicit ClassDistribution(Counts counts);

  void add(std::string_view label, double weight = 1.0);
  /// Registers a label with zero weight so it shows up in serialized output.
  void declare(std::string_view label);

  double count(std::string_view label) const;
  double total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ <= 0.0; }
  const Counts& counts() const noexcept { return counts_; }

  /// Number of labels with a strictly positive count.
  std::size_t positive_classes() const noexcept;

  /// Label with the largest count; ties go to the lexicographically smallest
  /// label. Returns an empty string when nothing is recorded.
  std::string majority() const;

  /// total() minus the count of majority(); the training error of a leaf.
  double errors() const;

  ClassDistribution& operator+=(const ClassDistribution& other);
  ClassDistribution scaled(double factor) const;

  bool operator==(const ClassDistribution& other) const = default;

 private:
  Counts counts_;
  double total_ = 0.0;
};

}  // namespace gg
