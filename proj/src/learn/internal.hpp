#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "crowdsmell/common/rng.hpp"
#include "crowdsmell/learn/learners.hpp"

namespace crowdsmell::learn::detail {

using nlohmann::json;

class Model {
 public:
  virtual ~Model() = default;
  [[nodiscard]] virtual double score(std::span<const double> x) const = 0;
  [[nodiscard]] virtual double threshold() const { return 0.5; }
  [[nodiscard]] virtual json state() const = 0;
};

// Binary tree over numeric attributes; left branch takes x[attr] <= threshold.
struct TreeNode {
  int attr = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double positives = 0.0;
  double total = 0.0;

  [[nodiscard]] bool leaf() const { return attr < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  [[nodiscard]] const TreeNode& leaf_for(std::span<const double> x) const;
  [[nodiscard]] double score(std::span<const double> x) const;
  [[nodiscard]] json to_json() const;
  static Tree from_json(const json& j);
  /// Drops nodes unreachable from the root, preserving preorder.
  void compact();
};

double entropy(double pos, double total);

// Sorts `idx` by attribute value, ties by index, so scans are deterministic.
void sort_by_attribute(const TrainingSet& data, std::size_t attr, std::vector<std::size_t>& idx);

/// Rows ordered lexicographically by (features, label); used by learners that
/// must not depend on training-row order.
std::vector<std::size_t> canonical_order(const TrainingSet& data);

void require_two_classes(const TrainingSet& data, std::string_view who);

std::unique_ptr<Model> train_j48(const TrainingSet& data, const TrainParams& p);
std::unique_ptr<Model> train_forest(const TrainingSet& data, const TrainParams& p);
std::unique_ptr<Model> train_boost(const TrainingSet& data, const TrainParams& p);
std::unique_ptr<Model> train_smo(const TrainingSet& data, const TrainParams& p);
std::unique_ptr<Model> train_mlp(const TrainingSet& data, const TrainParams& p);
std::unique_ptr<Model> train_nb(const TrainingSet& data, const TrainParams& p);

std::unique_ptr<Model> load_j48(const json& state);
std::unique_ptr<Model> load_forest(const json& state);
std::unique_ptr<Model> load_boost(const json& state);
std::unique_ptr<Model> load_smo(const json& state);
std::unique_ptr<Model> load_mlp(const json& state);
std::unique_ptr<Model> load_nb(const json& state);

}  // namespace crowdsmell::learn::detail
