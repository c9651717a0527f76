#include "gg/distribution.hpp"

namespace gg {

ClassDistribution::ClassDistribution(Counts counts) : counts_(std::move(counts)) {
  for (const auto& [label, c] : counts_) total_ += c;
}

void ClassDistribution::add(std::string_view label, double weight) {
  auto it = counts_.find(label);
  if (it == counts_.end()) it = counts_.emplace(std::string(label), 0.0).first;
  it->second += weight;
  total_ += weight;
}

void ClassDistribution::declare(std::string_view label) {
  if (counts_.find(label) == counts_.end()) counts_.emplace(std::string(label), 0.0);
}

double ClassDistribution::count(std::string_view label) const {
  auto it = counts_.find(label);
  return it == counts_.end() ? 0.0 : it->second;
}

std::size_t ClassDistribution::positive_classes() const noexcept {
  std::size_t n = 0;
  for (const auto& [label, c] : counts_)
    if (c > 0.0) ++n;
  return n;
}

std::string ClassDistribution::majority() const {
  const std::string* best = nullptr;
  double best_count = 0.0;
  // map iteration is lexicographic, so strict > keeps the smallest label on ties
  for (const auto& [label, c] : counts_) {
    if (c > 0.0 && (best == nullptr || c > best_count)) {
      best = &label;
      best_count = c;
    }
  }
  return best ? *best : std::string{};
}

double ClassDistribution::errors() const {
  const auto label = majority();
  return label.empty() ? 0.0 : total_ - count(label);
}

ClassDistribution& ClassDistribution::operator+=(const ClassDistribution& other) {
  for (const auto& [label, c] : other.counts_) add(label, c);
  return *this;
}

ClassDistribution ClassDistribution::scaled(double factor) const {
  Counts out;
  for (const auto& [label, c] : counts_) out.emplace(label, c * factor);
  return ClassDistribution(std::move(out));
}

}  // namespace gg
