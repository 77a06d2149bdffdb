#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "crowdsmell/error.hpp"
#include "internal.hpp"

namespace crowdsmell::learn {

using detail::json;

namespace {

std::string fold_case(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '_' || c == '-' || c == ' ') continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::J48:
      return "J48_TREE";
    case ClassifierKind::RandomForest:
      return "RANDOM_FOREST";
    case ClassifierKind::AdaBoostM1:
      return "ADABOOST_M1";
    case ClassifierKind::Smo:
      return "SMO_SVM";
    case ClassifierKind::Mlp:
      return "MLP";
    case ClassifierKind::NaiveBayes:
      return "NAIVE_BAYES";
  }
  return "?";
}

std::string_view display_name(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::J48:
      return "J48";
    case ClassifierKind::RandomForest:
      return "Random Forest";
    case ClassifierKind::AdaBoostM1:
      return "AdaBoostM1";
    case ClassifierKind::Smo:
      return "SMO";
    case ClassifierKind::Mlp:
      return "MultilayerPerceptron";
    case ClassifierKind::NaiveBayes:
      return "NaiveBayes";
  }
  return "?";
}

ClassifierKind parse_kind(std::string_view text) {
  const std::string key = fold_case(text);
  for (ClassifierKind k : kAllKinds) {
    if (key == fold_case(to_string(k)) || key == fold_case(display_name(k))) return k;
  }
  if (key == "rf") return ClassifierKind::RandomForest;
  if (key == "adaboost") return ClassifierKind::AdaBoostM1;
  if (key == "nb") return ClassifierKind::NaiveBayes;
  throw Error(ErrorCode::InvalidArgument, "unknown classifier '" + std::string(text) +
                                              "' (J48_TREE, RANDOM_FOREST, ADABOOST_M1, SMO_SVM, MLP, NAIVE_BAYES)");
}

std::size_t TrainingSet::positives() const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{1}));
}

TrainingSet make_training_set(const oracle::OracleDataset& dataset) {
  TrainingSet out;
  const auto& names = metrics::acronyms_for(oracle::scope_of(dataset.smell));
  out.feature_names.assign(names.begin(), names.end());
  out.rows = dataset.instances.size();
  out.x.reserve(out.rows * names.size());
  out.y.reserve(out.rows);
  for (const auto& inst : dataset.instances) {
    for (const auto& n : names) out.x.push_back(inst.metrics.at(n));
    out.y.push_back(inst.is_smell ? 1 : 0);
  }
  return out;
}

TrainingSet subset(const TrainingSet& data, std::span<const std::size_t> indices) {
  TrainingSet out;
  out.feature_names = data.feature_names;
  out.rows = indices.size();
  out.x.reserve(indices.size() * data.cols());
  out.y.reserve(indices.size());
  for (std::size_t i : indices) {
    auto r = data.row(i);
    out.x.insert(out.x.end(), r.begin(), r.end());
    out.y.push_back(data.y[i]);
  }
  return out;
}

json params_to_json(const TrainParams& p) {
  return json{
      {"kind", to_string(p.kind)},
      {"seed", p.seed},
      {"j48", {{"confidence", p.j48.confidence}, {"min_leaf", p.j48.min_leaf}}},
      {"forest", {{"trees", p.forest.trees}, {"features_per_split", p.forest.features_per_split}}},
      {"boost", {{"rounds", p.boost.rounds}}},
      {"smo",
       {{"c", p.smo.c},
        {"tolerance", p.smo.tolerance},
        {"exponent", p.smo.exponent},
        {"max_iterations", p.smo.max_iterations}}},
      {"mlp",
       {{"learning_rate", p.mlp.learning_rate},
        {"momentum", p.mlp.momentum},
        {"epochs", p.mlp.epochs},
        {"hidden", p.mlp.hidden}}},
      {"naive_bayes", {{"variance_floor", p.nb.variance_floor}}},
  };
}

TrainParams params_from_json(const json& j) {
  TrainParams p;
  p.kind = parse_kind(j.at("kind").get<std::string>());
  p.seed = j.at("seed").get<std::uint64_t>();
  p.j48.confidence = j.at("j48").at("confidence");
  p.j48.min_leaf = j.at("j48").at("min_leaf");
  p.forest.trees = j.at("forest").at("trees");
  p.forest.features_per_split = j.at("forest").at("features_per_split");
  p.boost.rounds = j.at("boost").at("rounds");
  p.smo.c = j.at("smo").at("c");
  p.smo.tolerance = j.at("smo").at("tolerance");
  p.smo.exponent = j.at("smo").at("exponent");
  p.smo.max_iterations = j.at("smo").at("max_iterations");
  p.mlp.learning_rate = j.at("mlp").at("learning_rate");
  p.mlp.momentum = j.at("mlp").at("momentum");
  p.mlp.epochs = j.at("mlp").at("epochs");
  p.mlp.hidden = j.at("mlp").at("hidden");
  p.nb.variance_floor = j.at("naive_bayes").at("variance_floor");
  return p;
}

TrainedModel::TrainedModel(TrainParams params, std::vector<std::string> feature_names,
                           std::shared_ptr<const detail::Model> impl)
    : params_(params), feature_names_(std::move(feature_names)), impl_(std::move(impl)) {}

double TrainedModel::threshold() const { return impl_->threshold(); }

double TrainedModel::score(std::span<const double> x) const {
  if (x.size() != feature_names_.size()) {
    throw Error(ErrorCode::FeatureMismatch, "model expects " + std::to_string(feature_names_.size()) +
                                                " features, got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "non-finite feature value");
  }
  return impl_->score(x);
}

Prediction TrainedModel::predict(std::span<const double> x) const {
  double s = score(x);
  return Prediction{s >= threshold(), s};
}

Prediction TrainedModel::predict(const metrics::MetricVector& vector) const {
  if (vector.values.size() != feature_names_.size()) {
    throw Error(ErrorCode::FeatureMismatch, "vector has " + std::to_string(vector.values.size()) +
                                                " metrics, model expects " + std::to_string(feature_names_.size()));
  }
  std::vector<double> x;
  x.reserve(feature_names_.size());
  for (const auto& name : feature_names_) {
    auto it = vector.values.find(name);
    if (it == vector.values.end()) throw Error(ErrorCode::FeatureMismatch, "vector lacks metric " + name);
    x.push_back(it->second);
  }
  return predict(x);
}

json TrainedModel::to_json() const {
  return json{{"format", "crowdsmell-model"},
              {"format_version", 1},
              {"params", params_to_json(params_)},
              {"feature_names", feature_names_},
              {"state", impl_->state()}};
}

TrainedModel TrainedModel::from_json(const json& j) {
  try {
    if (j.at("format") != "crowdsmell-model" || j.at("format_version") != 1) {
      throw Error(ErrorCode::SchemaMismatch, "not a crowdsmell model (format/version)");
    }
    TrainParams params = params_from_json(j.at("params"));
    auto names = j.at("feature_names").get<std::vector<std::string>>();
    const json& state = j.at("state");
    std::unique_ptr<detail::Model> impl;
    switch (params.kind) {
      case ClassifierKind::J48:
        impl = detail::load_j48(state);
        break;
      case ClassifierKind::RandomForest:
        impl = detail::load_forest(state);
        break;
      case ClassifierKind::AdaBoostM1:
        impl = detail::load_boost(state);
        break;
      case ClassifierKind::Smo:
        impl = detail::load_smo(state);
        break;
      case ClassifierKind::Mlp:
        impl = detail::load_mlp(state);
        break;
      case ClassifierKind::NaiveBayes:
        impl = detail::load_nb(state);
        break;
    }
    return TrainedModel(params, std::move(names), std::move(impl));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("malformed model: ") + e.what());
  }
}

TrainedModel train(const TrainingSet& data, const TrainParams& params) {
  if (data.rows == 0) throw Error(ErrorCode::DegenerateData, "empty training set");
  if (data.x.size() != data.rows * data.cols() || data.y.size() != data.rows) {
    throw Error(ErrorCode::InvalidArgument, "training set shape is inconsistent");
  }
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    if (!std::isfinite(data.x[i])) {
      throw Error(ErrorCode::NonFiniteFeature, "row " + std::to_string(i / data.cols() + 1) + ", feature " +
                                                   data.feature_names[i % data.cols()] + " is not finite");
    }
  }
  std::unique_ptr<detail::Model> impl;
  switch (params.kind) {
    case ClassifierKind::J48:
      impl = detail::train_j48(data, params);
      break;
    case ClassifierKind::RandomForest:
      impl = detail::train_forest(data, params);
      break;
    case ClassifierKind::AdaBoostM1:
      impl = detail::train_boost(data, params);
      break;
    case ClassifierKind::Smo:
      impl = detail::train_smo(data, params);
      break;
    case ClassifierKind::Mlp:
      impl = detail::train_mlp(data, params);
      break;
    case ClassifierKind::NaiveBayes:
      impl = detail::train_nb(data, params);
      break;
  }
  return TrainedModel(params, data.feature_names, std::move(impl));
}

TrainedModel train(const oracle::OracleDataset& dataset, const TrainParams& params) {
  return train(make_training_set(dataset), params);
}

namespace detail {

const TreeNode& Tree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes.front();
  while (!node->leaf()) node = &nodes[x[node->attr] <= node->threshold ? node->left : node->right];
  return *node;
}

double Tree::score(std::span<const double> x) const {
  const TreeNode& leaf = leaf_for(x);
  return leaf.total > 0 ? leaf.positives / leaf.total : 0.0;
}

json Tree::to_json() const {
  json out = json::array();
  for (const auto& n : nodes) {
    if (n.leaf()) {
      out.push_back(json::array({n.positives, n.total}));
    } else {
      out.push_back(json::array({n.positives, n.total, n.attr, n.threshold, n.left, n.right}));
    }
  }
  return out;
}

Tree Tree::from_json(const json& j) {
  Tree t;
  for (const auto& n : j) {
    TreeNode node;
    node.positives = n.at(0);
    node.total = n.at(1);
    if (n.size() == 6) {
      node.attr = n.at(2);
      node.threshold = n.at(3);
      node.left = n.at(4);
      node.right = n.at(5);
    }
    t.nodes.push_back(node);
  }
  if (t.nodes.empty()) throw Error(ErrorCode::SchemaMismatch, "empty tree");
  for (const auto& n : t.nodes) {
    if (!n.leaf() && (n.left <= 0 || n.right <= 0 || n.left >= static_cast<int>(t.nodes.size()) ||
                      n.right >= static_cast<int>(t.nodes.size()))) {
      throw Error(ErrorCode::SchemaMismatch, "tree child index out of range");
    }
  }
  return t;
}

void Tree::compact() {
  std::vector<TreeNode> out;
  std::function<int(int)> copy = [&](int i) -> int {
    int slot = static_cast<int>(out.size());
    out.push_back(nodes[i]);
    if (!nodes[i].leaf()) {
      int l = copy(nodes[i].left);
      int r = copy(nodes[i].right);
      out[slot].left = l;
      out[slot].right = r;
    }
    return slot;
  };
  copy(0);
  nodes = std::move(out);
}

double entropy(double pos, double total) {
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (double c : {pos, total - pos}) {
    if (c > 0) {
      double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

void sort_by_attribute(const TrainingSet& data, std::size_t attr, std::vector<std::size_t>& idx) {
  const std::size_t cols = data.cols();
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    double va = data.x[a * cols + attr];
    double vb = data.x[b * cols + attr];
    return va < vb || (va == vb && a < b);
  });
}

std::vector<std::size_t> canonical_order(const TrainingSet& data) {
  std::vector<std::size_t> idx(data.rows);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    auto ra = data.row(a);
    auto rb = data.row(b);
    int c = std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())   ? -1
            : std::lexicographical_compare(rb.begin(), rb.end(), ra.begin(), ra.end()) ? 1
                                                                                       : 0;
    if (c != 0) return c < 0;
    return data.y[a] < data.y[b];
  });
  return idx;
}

void require_two_classes(const TrainingSet& data, std::string_view who) {
  std::size_t pos = data.positives();
  if (pos == 0 || pos == data.rows) {
    throw Error(ErrorCode::DegenerateData, std::string(who) + " needs both TRUE and FALSE instances");
  }
}

}  // namespace detail

}  // namespace crowdsmell::learn
