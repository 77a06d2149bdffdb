#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crowdsmell/oracle/oracle.hpp"

namespace crowdsmell::learn {

enum class ClassifierKind { J48, RandomForest, AdaBoostM1, Smo, Mlp, NaiveBayes };

inline constexpr ClassifierKind kAllKinds[] = {ClassifierKind::J48, ClassifierKind::RandomForest,
                                               ClassifierKind::AdaBoostM1, ClassifierKind::Smo,
                                               ClassifierKind::Mlp, ClassifierKind::NaiveBayes};

std::string_view to_string(ClassifierKind kind) noexcept;  // J48_TREE, RANDOM_FOREST, ...
std::string_view display_name(ClassifierKind kind) noexcept;  // "J48", "Random Forest", ...
/// Accepts enum names and display names, case-insensitively. Throws InvalidArgument.
ClassifierKind parse_kind(std::string_view text);

/// Dense row-major feature matrix with 0/1 labels.
struct TrainingSet {
  std::vector<std::string> feature_names;
  std::size_t rows = 0;
  std::vector<double> x;
  std::vector<std::uint8_t> y;

  [[nodiscard]] std::size_t cols() const { return feature_names.size(); }
  [[nodiscard]] std::span<const double> row(std::size_t i) const { return {x.data() + i * cols(), cols()}; }
  [[nodiscard]] std::size_t positives() const;
};

/// Features in registry order for the dataset's scope.
TrainingSet make_training_set(const oracle::OracleDataset& dataset);
TrainingSet subset(const TrainingSet& data, std::span<const std::size_t> indices);

struct J48Params {
  double confidence = 0.25;
  std::size_t min_leaf = 2;
};
struct ForestParams {
  std::size_t trees = 100;
  std::size_t features_per_split = 0;  // 0: floor(log2(F) + 1)
};
struct BoostParams {
  std::size_t rounds = 10;
};
struct SmoParams {
  double c = 1.0;
  double tolerance = 1e-3;
  double exponent = 1.0;
  std::size_t max_iterations = 1000000;
};
struct MlpParams {
  double learning_rate = 0.3;
  double momentum = 0.2;
  std::size_t epochs = 500;
  std::size_t hidden = 0;  // 0: ceil((F + 2) / 2)
};
struct NaiveBayesParams {
  double variance_floor = 1e-9;
};

struct TrainParams {
  ClassifierKind kind = ClassifierKind::J48;
  std::uint64_t seed = 42;
  J48Params j48;
  ForestParams forest;
  BoostParams boost;
  SmoParams smo;
  MlpParams mlp;
  NaiveBayesParams nb;
};

nlohmann::json params_to_json(const TrainParams& params);
TrainParams params_from_json(const nlohmann::json& j);

struct Prediction {
  bool label = false;
  double score = 0.0;
};

namespace detail {
class Model;
}

class TrainedModel {
 public:
  TrainedModel(TrainParams params, std::vector<std::string> feature_names, std::shared_ptr<const detail::Model> impl);

  [[nodiscard]] ClassifierKind kind() const { return params_.kind; }
  [[nodiscard]] const TrainParams& params() const { return params_; }
  [[nodiscard]] const std::vector<std::string>& feature_names() const { return feature_names_; }
  /// Scores at or above the threshold are labelled TRUE.
  [[nodiscard]] double threshold() const;

  /// Throws FeatureMismatch unless x has exactly feature_names().size() values.
  [[nodiscard]] double score(std::span<const double> x) const;
  [[nodiscard]] Prediction predict(std::span<const double> x) const;
  /// Throws FeatureMismatch unless the vector holds exactly feature_names().
  [[nodiscard]] Prediction predict(const metrics::MetricVector& vector) const;

  [[nodiscard]] nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);

  [[nodiscard]] const detail::Model& impl() const { return *impl_; }

 private:
  TrainParams params_;
  std::vector<std::string> feature_names_;
  std::shared_ptr<const detail::Model> impl_;
};

/// Errors: DegenerateData, NonFiniteFeature, InvalidArgument.
TrainedModel train(const TrainingSet& data, const TrainParams& params);
TrainedModel train(const oracle::OracleDataset& dataset, const TrainParams& params);

// Introspection used by tests and diagnostics. Each throws InvalidArgument
// when the model is of a different kind.

/// TRUE votes of every forest member for x.
std::vector<bool> forest_member_votes(const TrainedModel& model, std::span<const double> x);
/// Weighted error of each boosting round's learner after reweighting.
std::vector<double> boost_reweighted_errors(const TrainedModel& model);
/// Largest KKT violation (max over the violating pair gap) at termination.
double smo_kkt_residual(const TrainedModel& model);
/// Max relative difference between backprop and central-difference gradients
/// of the squared error over `data`, for weights initialised from `seed`.
double mlp_gradient_check(const TrainingSet& data, const TrainParams& params);

}  // namespace crowdsmell::learn
