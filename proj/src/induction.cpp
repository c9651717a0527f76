#include "gg/induction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/special_functions/beta.hpp>

#include "gg/error.hpp"
#include "gg/split_kernels.hpp"

namespace gg {

const std::string& attribute_of(const SplitTest& test) noexcept {
  return std::visit([](const auto& t) -> const std::string& { return t.attribute; }, test);
}

const TreeNode* TreeNode::child(std::string_view key) const noexcept {
  for (const auto& b : branches)
    if (b.key == key) return &b.child;
  return nullptr;
}

TreeNode TreeNode::make_leaf(std::string label, ClassDistribution distribution) {
  TreeNode n;
  n.label = std::move(label);
  n.distribution = std::move(distribution);
  return n;
}

std::size_t node_count(const TreeNode& root) noexcept {
  std::size_t n = 1;
  for (const auto& b : root.branches) n += node_count(b.child);
  return n;
}

std::size_t leaf_count(const TreeNode& root) noexcept {
  if (root.is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& b : root.branches) n += leaf_count(b.child);
  return n;
}

std::size_t depth(const TreeNode& root) noexcept {
  std::size_t d = 0;
  for (const auto& b : root.branches) d = std::max(d, depth(b.child));
  return root.is_leaf() ? 0 : d + 1;
}

std::string_view to_string(Algorithm a) noexcept { return a == Algorithm::ID3 ? "ID3" : "C45"; }

std::optional<Algorithm> parse_algorithm(std::string_view text) noexcept {
  std::string t;
  for (char c : text)
    if (c != '.') t += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (t == "ID3") return Algorithm::ID3;
  if (t == "C45") return Algorithm::C45;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (min_leaf_size < 1) throw Error(Errc::InvalidConfig, "min_leaf_size must be at least 1");
  if (!(confidence_factor > 0.0 && confidence_factor < 1.0))
    throw Error(Errc::InvalidConfig, "confidence_factor must lie in (0, 1)");
}

// ---- split measures -------------------------------------------------------

double entropy(const ClassDistribution& dist) {
  if (dist.empty()) throw Error(Errc::EmptyDistribution, "entropy of an empty distribution");
  std::vector<double> counts;
  counts.reserve(dist.counts().size());
  for (const auto& [label, c] : dist.counts()) counts.push_back(c);
  return kernels::entropy_bits(counts);
}

namespace {

// Class distribution of each part of `test` over rows with a known class and a
// known test value; parts keyed by branch key.
std::map<std::string, ClassDistribution> split_parts(const Dataset& d, const SplitTest& test) {
  const auto attr = d.schema().index_of(attribute_of(test));
  const auto cls = d.schema().class_index();
  std::map<std::string, ClassDistribution> parts;
  for (const auto& row : d.rows()) {
    const auto* label = std::get_if<std::string>(&row.cells[cls]);
    if (label == nullptr) continue;
    const auto& cell = row.cells[attr];
    if (const auto* cont = std::get_if<ContinuousSplit>(&test)) {
      const auto* v = std::get_if<double>(&cell);
      if (v == nullptr) continue;
      parts[std::string(*v <= cont->threshold ? kLessEqual : kGreater)].add(*label);
    } else {
      if (!d.schema()[attr].is_categorical())
        throw Error(Errc::NotCategorical, "categorical test on '" + attribute_of(test) + "'");
      const auto* s = std::get_if<std::string>(&cell);
      if (s == nullptr) continue;
      parts[*s].add(*label);
    }
  }
  return parts;
}

double part_total(const std::map<std::string, ClassDistribution>& parts) {
  double n = 0.0;
  for (const auto& [k, dist] : parts) n += dist.total();
  return n;
}

void require_labelled(const Dataset& d) {
  const auto cls = d.schema().class_index();
  for (const auto& row : d.rows())
    if (!is_missing(row.cells[cls])) return;
  throw Error(Errc::EmptyDistribution, "dataset has no rows with a known class");
}

}  // namespace

double information_gain(const Dataset& d, const SplitTest& test) {
  require_labelled(d);
  const auto parts = split_parts(d, test);
  const double known = part_total(parts);
  if (known <= 0.0) return 0.0;
  ClassDistribution whole;
  double remainder = 0.0;
  for (const auto& [key, dist] : parts) {
    whole += dist;
    remainder += dist.total() / known * entropy(dist);
  }
  return std::max(0.0, entropy(whole) - remainder);
}

double split_info(const Dataset& d, const SplitTest& test) {
  require_labelled(d);
  const auto parts = split_parts(d, test);
  std::vector<double> sizes;
  for (const auto& [key, dist] : parts) sizes.push_back(dist.total());
  return kernels::entropy_bits(sizes);
}

double gain_ratio(const Dataset& d, const SplitTest& test) {
  const double si = split_info(d, test);
  return si > 0.0 ? information_gain(d, test) / si : 0.0;
}

ContinuousSplitChoice best_continuous_split(const Dataset& d, std::string_view attribute) {
  const auto attr = d.schema().index_of(attribute);
  if (!d.schema()[attr].is_continuous())
    throw Error(Errc::InvalidSchema, "attribute '" + std::string(attribute) + "' is not continuous");
  const kernels::EncodedData data(d);
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const auto s = kernels::score_attribute(data, rows, attr, kernels::Criterion::GainRatio);
  if (!s.valid)
    throw Error(Errc::TooFewDistinctValues, "attribute '" + std::string(attribute) + "' needs two distinct values");
  return {s.threshold, s.split_info > 0.0 ? s.gain / s.split_info : 0.0};
}

// ---- training -------------------------------------------------------------

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const kernels::EncodedData& data, Algorithm algorithm, const TrainConfig& config, Execution exec)
      : data_(data), algorithm_(algorithm), config_(config), exec_(exec) {}

  TreeNode build(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& attributes) const {
    auto dist = data_.distribution(rows);
    auto majority = dist.majority();
    if (dist.positive_classes() <= 1 || attributes.empty() || rows.size() < config_.min_leaf_size)
      return TreeNode::make_leaf(std::move(majority), std::move(dist));

    const auto criterion =
        algorithm_ == Algorithm::ID3 ? kernels::Criterion::InformationGain : kernels::Criterion::GainRatio;
    const auto scores = exec_ == Execution::Serial
                            ? kernels::score_candidates_serial(data_, rows, attributes, criterion)
                            : kernels::score_candidates_parallel(data_, rows, attributes, criterion);
    const auto best = kernels::select_best(scores);
    if (best == scores.size() || (algorithm_ == Algorithm::C45 && scores[best].score <= kernels::kTieTolerance))
      return TreeNode::make_leaf(std::move(majority), std::move(dist));

    const auto& chosen = scores[best];
    const auto& col = data_.columns[chosen.attribute];
    TreeNode node;
    node.label = majority;
    node.distribution = std::move(dist);

    if (col.continuous) {
      node.test = ContinuousSplit{col.name, chosen.threshold};
      std::vector<std::size_t> left, right;
      for (auto r : rows) {
        const double v = col.values[r];
        if (std::isnan(v)) continue;
        (v <= chosen.threshold ? left : right).push_back(r);
      }
      node.branches.push_back({std::string(kLessEqual), build(left, attributes)});
      node.branches.push_back({std::string(kGreater), build(right, attributes)});
      return node;
    }

    node.test = CategoricalSplit{col.name};
    std::vector<std::vector<std::size_t>> buckets(col.levels.size());
    for (auto r : rows)
      if (col.codes[r] >= 0) buckets[static_cast<std::size_t>(col.codes[r])].push_back(r);
    std::vector<std::size_t> remaining;
    for (auto a : attributes)
      if (a != chosen.attribute) remaining.push_back(a);
    for (std::size_t v = 0; v < col.levels.size(); ++v) {
      if (buckets[v].empty())
        node.branches.push_back({col.levels[v], TreeNode::make_leaf(majority, data_.distribution({}))});
      else
        node.branches.push_back({col.levels[v], build(buckets[v], remaining)});
    }
    return node;
  }

 private:
  const kernels::EncodedData& data_;
  Algorithm algorithm_;
  TrainConfig config_;
  Execution exec_;
};

std::vector<std::size_t> resolve_features(const Schema& schema, const std::vector<std::string>& features,
                                          Algorithm algorithm) {
  if (features.empty()) throw Error(Errc::InvalidConfig, "no features given");
  std::vector<std::size_t> out;
  std::set<std::size_t> seen;
  for (const auto& name : features) {
    const auto idx = schema.index_of(name);
    const auto& attr = schema[idx];
    if (attr.role == Role::ClassLabel) throw Error(Errc::InvalidConfig, "class attribute used as a feature");
    if (!seen.insert(idx).second) throw Error(Errc::InvalidConfig, "feature '" + name + "' listed twice");
    const bool ok = attr.is_categorical() || (algorithm == Algorithm::C45 && attr.is_continuous());
    if (!ok) throw Error(Errc::NotCategorical, "feature '" + name + "' is not usable by " +
                                                   std::string(to_string(algorithm)));
    out.push_back(idx);
  }
  return out;
}

TrainedModel finish(Algorithm algorithm, const Dataset& d, const std::vector<std::string>& features,
                    const TrainConfig& config, TreeNode root, std::size_t rows) {
  if (config.prune) root = prune(root, config);
  TrainStats stats{rows, node_count(root), leaf_count(root)};
  return TrainedModel{algorithm, std::move(root), d.schema(), features, config, stats};
}

}  // namespace

TrainedModel train_id3(const Dataset& d, const std::vector<std::string>& features, const TrainConfig& config,
                       Execution exec) {
  config.validate();
  if (d.empty()) throw Error(Errc::EmptyDataset, "cannot train on an empty dataset");
  const auto attrs = resolve_features(d.schema(), features, Algorithm::ID3);
  const auto cls = d.schema().class_index();
  for (std::size_t r = 0; r < d.size(); ++r) {
    bool missing = is_missing(d.cell(r, cls));
    for (auto a : attrs) missing = missing || is_missing(d.cell(r, a));
    if (missing)
      throw Error(Errc::MissingValuesPresent, "row " + std::to_string(r + 1) + " has missing values; clean first");
  }
  const kernels::EncodedData data(d);
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  auto root = TreeBuilder(data, Algorithm::ID3, config, exec).build(rows, attrs);
  return finish(Algorithm::ID3, d, features, config, std::move(root), rows.size());
}

TrainedModel train_c45(const Dataset& d, const std::vector<std::string>& features, const TrainConfig& config,
                       Execution exec) {
  config.validate();
  const auto attrs = resolve_features(d.schema(), features, Algorithm::C45);
  const auto cls = d.schema().class_index();
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < d.size(); ++r)
    if (!is_missing(d.cell(r, cls))) rows.push_back(r);
  if (rows.empty()) throw Error(Errc::EmptyDataset, "no labelled rows to train on");
  const kernels::EncodedData data(d);
  auto root = TreeBuilder(data, Algorithm::C45, config, exec).build(rows, attrs);
  return finish(Algorithm::C45, d, features, config, std::move(root), rows.size());
}

TrainedModel train(Algorithm algorithm, const Dataset& d, const std::vector<std::string>& features,
                   const TrainConfig& config, Execution exec) {
  return algorithm == Algorithm::ID3 ? train_id3(d, features, config, exec) : train_c45(d, features, config, exec);
}

// ---- pruning --------------------------------------------------------------

double pessimistic_errors(double total, double errors, double confidence_factor) {
  if (total <= 0.0) return 0.0;
  if (errors >= total) return total;
  // Upper limit U of the binomial error rate: P(X <= errors; total, U) = CF.
  // the long double promotion trips Newton at symmetric points such as (5, 5, 0.5)
  using NoPromotion = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
  const double a = errors + 1.0, b = total - errors, p = 1.0 - confidence_factor;
  double upper = 0.0;
  try {
    upper = boost::math::ibeta_inv(a, b, p, NoPromotion());
  } catch (const boost::math::evaluation_error&) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
      const double mid = 0.5 * (lo + hi);
      (boost::math::ibeta(a, b, mid) < p ? lo : hi) = mid;
    }
    upper = 0.5 * (lo + hi);
  }
  return std::max(total * upper, errors);
}

namespace {

double prune_in_place(TreeNode& node, double cf) {
  if (node.is_leaf()) return pessimistic_errors(node.distribution.total(), node.distribution.errors(), cf);

  double subtree = 0.0;
  for (auto& b : node.branches) subtree += prune_in_place(b.child, cf);

  const bool uniform = std::all_of(node.branches.begin(), node.branches.end(), [&](const Branch& b) {
    return b.child.is_leaf() && b.child.label == node.branches.front().child.label;
  });
  const double as_leaf = pessimistic_errors(node.distribution.total(), node.distribution.errors(), cf);
  if (uniform || as_leaf <= subtree + 1e-9) {
    auto label = node.distribution.empty() ? node.label : node.distribution.majority();
    node = TreeNode::make_leaf(std::move(label), std::move(node.distribution));
    return as_leaf;
  }
  return subtree;
}

}  // namespace

TreeNode prune(const TreeNode& root, const TrainConfig& config) {
  TreeNode out = root;
  prune_in_place(out, config.confidence_factor);
  return out;
}

// ---- classification -------------------------------------------------------

namespace {

template <typename Lookup>
Classification walk(const TreeNode& root, Lookup&& lookup) {
  Classification result;
  const TreeNode* node = &root;
  while (!node->is_leaf()) {
    const auto& test = *node->test;
    const CellValue& value = lookup(attribute_of(test));
    const TreeNode* next = nullptr;
    std::string outcome;
    if (const auto* cont = std::get_if<ContinuousSplit>(&test)) {
      if (const auto* v = std::get_if<double>(&value)) {
        outcome = *v <= cont->threshold ? kLessEqual : kGreater;
        next = node->child(outcome);
      }
    } else if (const auto* s = std::get_if<std::string>(&value)) {
      next = node->child(*s);
      outcome = *s;
    }
    if (next == nullptr) {
      result.path.push_back({test, std::string(kFallbackOutcome)});
      result.label = node->label;
      return result;
    }
    result.path.push_back({test, std::move(outcome)});
    node = next;
  }
  result.label = node->label;
  return result;
}

}  // namespace

Classification classify(const TreeNode& root, const Record& record) {
  return walk(root, [&](const std::string& name) -> const CellValue& {
    auto it = record.find(name);
    if (it == record.end()) throw Error(Errc::MissingFeature, "record has no value for '" + name + "'");
    return it->second;
  });
}

Classification classify(const TreeNode& root, const Schema& schema, const Row& row) {
  return walk(root, [&](const std::string& name) -> const CellValue& {
    const auto idx = schema.find(name);
    if (!idx || *idx >= row.cells.size())
      throw Error(Errc::MissingFeature, "row has no value for '" + name + "'");
    return row.cells[*idx];
  });
}

Record to_record(const Schema& schema, const Row& row) {
  Record r;
  for (std::size_t i = 0; i < schema.size() && i < row.cells.size(); ++i) r.emplace(schema[i].name, row.cells[i]);
  return r;
}

}  // namespace gg
