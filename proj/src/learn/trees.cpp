#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdsmell/error.hpp"
#include "internal.hpp"

namespace crowdsmell::learn::detail {

namespace {

struct Split {
  int attr = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double ratio = 0.0;
  std::size_t left_count = 0;
  [[nodiscard]] bool valid() const { return attr >= 0; }
};

double midpoint(double lo, double hi) {
  double m = lo + (hi - lo) / 2;
  return m < hi ? m : lo;
}

// Best information-gain threshold on one attribute. `idx` must be sorted by
// the attribute. Only cut points leaving >= min_side rows on both sides count.
Split scan_attribute(const TrainingSet& data, const std::vector<std::size_t>& idx, std::size_t attr,
                     double min_side, double parent_entropy, std::size_t* candidates) {
  const std::size_t n = idx.size();
  const std::size_t cols = data.cols();
  double total_pos = 0;
  for (std::size_t i : idx) total_pos += data.y[i];
  Split best;
  double left_pos = 0;
  std::size_t count = 0;
  for (std::size_t k = 1; k < n; ++k) {
    left_pos += data.y[idx[k - 1]];
    double prev = data.x[idx[k - 1] * cols + attr];
    double cur = data.x[idx[k] * cols + attr];
    if (!(prev < cur)) continue;
    double nl = static_cast<double>(k);
    double nr = static_cast<double>(n - k);
    if (nl < min_side || nr < min_side) continue;
    ++count;
    double gain = parent_entropy - (nl / n) * entropy(left_pos, nl) - (nr / n) * entropy(total_pos - left_pos, nr);
    if (!best.valid() || gain > best.gain) {
      best.attr = static_cast<int>(attr);
      best.threshold = midpoint(prev, cur);
      best.gain = gain;
      best.left_count = k;
    }
  }
  if (candidates) *candidates = count;
  return best;
}

double positives_of(const TrainingSet& data, const std::vector<std::size_t>& idx) {
  double pos = 0;
  for (std::size_t i : idx) pos += data.y[i];
  return pos;
}

void partition(const TrainingSet& data, const std::vector<std::size_t>& idx, const Split& s,
               std::vector<std::size_t>& left, std::vector<std::size_t>& right) {
  const std::size_t cols = data.cols();
  for (std::size_t i : idx) {
    (data.x[i * cols + s.attr] <= s.threshold ? left : right).push_back(i);
  }
}

// ---- C4.5 ----------------------------------------------------------------

// Upper confidence bound on extra errors at a leaf (normal approximation to
// the binomial, as in C4.5's pessimistic pruning).
double normal_upper_quantile(double p) {
  double lo = 0.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    double mid = (lo + hi) / 2;
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

double add_errors(double n, double e, double cf) {
  if (n <= 0) return 0;
  if (e < 1) {
    double base = n * (1 - std::pow(cf, 1 / n));
    if (e == 0) return base;
    return base + e * (add_errors(n, 1, cf) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  double z = normal_upper_quantile(cf);
  double f = (e + 0.5) / n;
  double r = (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n);
  return r * n - e;
}

class C45Builder {
 public:
  C45Builder(const TrainingSet& data, const J48Params& p) : data_(data), p_(p) {}

  Tree build() {
    std::vector<std::size_t> all(data_.rows);
    std::iota(all.begin(), all.end(), 0);
    tree_.nodes.emplace_back();
    grow(0, all);
    prune(0);
    tree_.compact();
    return std::move(tree_);
  }

 private:
  const TrainingSet& data_;
  J48Params p_;
  Tree tree_;

  void grow(int node, std::vector<std::size_t>& idx) {
    const double n = static_cast<double>(idx.size());
    const double pos = positives_of(data_, idx);
    tree_.nodes[node].positives = pos;
    tree_.nodes[node].total = n;
    if (pos == 0 || pos == n || n < 2.0 * static_cast<double>(p_.min_leaf)) return;

    double min_side = 0.1 * n / 2.0;
    if (min_side <= static_cast<double>(p_.min_leaf)) {
      min_side = static_cast<double>(p_.min_leaf);
    } else if (min_side > 25) {
      min_side = 25;
    }
    const double h = entropy(pos, n);
    std::vector<Split> splits;
    std::vector<std::size_t> sorted = idx;
    for (std::size_t a = 0; a < data_.cols(); ++a) {
      sort_by_attribute(data_, a, sorted);
      std::size_t count = 0;
      Split s = scan_attribute(data_, sorted, a, min_side, h, &count);
      if (!s.valid()) continue;
      s.gain -= std::log2(static_cast<double>(count)) / n;
      if (s.gain <= 0) continue;
      double nl = static_cast<double>(s.left_count);
      double split_info = entropy(nl, n);
      s.ratio = split_info > 0 ? s.gain / split_info : 0.0;
      splits.push_back(s);
    }
    if (splits.empty()) return;
    double avg = 0;
    for (const auto& s : splits) avg += s.gain;
    avg /= static_cast<double>(splits.size());
    const Split* best = nullptr;
    for (const auto& s : splits) {
      if (s.gain >= avg - 1e-3 && (!best || s.ratio > best->ratio)) best = &s;
    }
    if (!best || best->ratio <= 0) return;

    std::vector<std::size_t> left, right;
    partition(data_, idx, *best, left, right);
    if (left.empty() || right.empty()) return;
    const Split chosen = *best;
    int l = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    int r = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[node].attr = chosen.attr;
    tree_.nodes[node].threshold = chosen.threshold;
    tree_.nodes[node].left = l;
    tree_.nodes[node].right = r;
    idx.clear();
    idx.shrink_to_fit();
    grow(l, left);
    grow(r, right);
  }

  double leaf_estimate(const TreeNode& node) const {
    double errors = std::min(node.positives, node.total - node.positives);
    return errors + add_errors(node.total, errors, p_.confidence);
  }

  // Subtree replacement, bottom-up. Returns the estimated error count.
  double prune(int node) {
    TreeNode& self = tree_.nodes[node];
    if (self.leaf()) return leaf_estimate(self);
    double subtree = prune(self.left) + prune(self.right);
    TreeNode& again = tree_.nodes[node];
    double as_leaf = leaf_estimate(again);
    if (as_leaf <= subtree + 0.1) {
      again.attr = -1;
      again.left = again.right = -1;
      return as_leaf;
    }
    return subtree;
  }
};

class J48Model final : public Model {
 public:
  explicit J48Model(Tree tree) : tree_(std::move(tree)) {}
  double score(std::span<const double> x) const override { return tree_.score(x); }
  json state() const override { return json{{"tree", tree_.to_json()}}; }

 private:
  Tree tree_;
};

// ---- random forest ---------------------------------------------------------

class RandomTreeBuilder {
 public:
  RandomTreeBuilder(const TrainingSet& data, std::size_t k, std::uint64_t seed) : data_(data), k_(k), rng_(seed) {}

  Tree build(std::vector<std::size_t> sample) {
    tree_.nodes.emplace_back();
    grow(0, sample);
    return std::move(tree_);
  }

 private:
  const TrainingSet& data_;
  std::size_t k_;
  Rng rng_;
  Tree tree_;

  void grow(int node, std::vector<std::size_t>& idx) {
    const double n = static_cast<double>(idx.size());
    const double pos = positives_of(data_, idx);
    tree_.nodes[node].positives = pos;
    tree_.nodes[node].total = n;
    if (pos == 0 || pos == n || idx.size() < 2) return;

    std::vector<std::size_t> attrs(data_.cols());
    std::iota(attrs.begin(), attrs.end(), 0);
    rng_.shuffle(std::span<std::size_t>(attrs));
    const double h = entropy(pos, n);
    Split best;
    std::vector<std::size_t> sorted = idx;
    for (std::size_t tried = 0; tried < attrs.size(); ++tried) {
      // After k attributes, keep looking only while nothing useful was found.
      if (tried >= k_ && best.valid() && best.gain > 1e-10) break;
      sort_by_attribute(data_, attrs[tried], sorted);
      Split s = scan_attribute(data_, sorted, attrs[tried], 1.0, h, nullptr);
      if (s.valid() && (!best.valid() || s.gain > best.gain)) best = s;
    }
    if (!best.valid() || best.gain <= 1e-10) return;

    std::vector<std::size_t> left, right;
    partition(data_, idx, best, left, right);
    int l = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    int r = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[node].attr = best.attr;
    tree_.nodes[node].threshold = best.threshold;
    tree_.nodes[node].left = l;
    tree_.nodes[node].right = r;
    idx.clear();
    idx.shrink_to_fit();
    grow(l, left);
    grow(r, right);
  }
};

}  // namespace

class ForestModel final : public Model {
 public:
  explicit ForestModel(std::vector<Tree> trees) : trees_(std::move(trees)) {}

  std::vector<bool> votes(std::span<const double> x) const {
    std::vector<bool> out;
    out.reserve(trees_.size());
    for (const auto& t : trees_) out.push_back(t.score(x) >= 0.5);
    return out;
  }

  double score(std::span<const double> x) const override {
    std::size_t yes = 0;
    for (const auto& t : trees_) yes += t.score(x) >= 0.5 ? 1 : 0;
    return static_cast<double>(yes) / static_cast<double>(trees_.size());
  }

  json state() const override {
    json trees = json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return json{{"trees", trees}};
  }

 private:
  std::vector<Tree> trees_;
};

std::unique_ptr<Model> train_j48(const TrainingSet& data, const TrainParams& p) {
  if (p.j48.confidence <= 0 || p.j48.confidence >= 0.5) {
    throw Error(ErrorCode::InvalidArgument, "J48 confidence must lie in (0, 0.5)");
  }
  if (p.j48.min_leaf < 1) throw Error(ErrorCode::InvalidArgument, "J48 min_leaf must be >= 1");
  return std::make_unique<J48Model>(C45Builder(data, p.j48).build());
}

std::unique_ptr<Model> load_j48(const json& state) {
  return std::make_unique<J48Model>(Tree::from_json(state.at("tree")));
}

std::unique_ptr<Model> train_forest(const TrainingSet& data, const TrainParams& p) {
  if (p.forest.trees == 0) throw Error(ErrorCode::InvalidArgument, "forest needs at least one tree");
  std::size_t k = p.forest.features_per_split;
  if (k == 0) k = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(data.cols())) + 1));
  k = std::clamp<std::size_t>(k, 1, data.cols());
  std::vector<Tree> trees;
  trees.reserve(p.forest.trees);
  for (std::size_t t = 0; t < p.forest.trees; ++t) {
    const std::uint64_t member_seed = derive_seed(p.seed, t);
    Rng bag(member_seed);
    std::vector<std::size_t> sample(data.rows);
    for (auto& s : sample) s = bag.index(data.rows);
    trees.push_back(RandomTreeBuilder(data, k, derive_seed(member_seed, 1)).build(std::move(sample)));
  }
  return std::make_unique<ForestModel>(std::move(trees));
}

std::unique_ptr<Model> load_forest(const json& state) {
  std::vector<Tree> trees;
  for (const auto& t : state.at("trees")) trees.push_back(Tree::from_json(t));
  if (trees.empty()) throw Error(ErrorCode::SchemaMismatch, "forest without trees");
  return std::make_unique<ForestModel>(std::move(trees));
}

}  // namespace crowdsmell::learn::detail

namespace crowdsmell::learn {

std::vector<bool> forest_member_votes(const TrainedModel& model, std::span<const double> x) {
  const auto* forest = dynamic_cast<const detail::ForestModel*>(&model.impl());
  if (!forest) throw Error(ErrorCode::InvalidArgument, "not a random forest model");
  if (x.size() != model.feature_names().size()) throw Error(ErrorCode::FeatureMismatch, "feature count mismatch");
  return forest->votes(x);
}

}  // namespace crowdsmell::learn
