#include <algorithm>
#include <cmath>
#include <numbers>

#include "crowdsmell/error.hpp"
#include "internal.hpp"

namespace crowdsmell::learn::detail {

namespace {

class NaiveBayesModel final : public Model {
 public:
  NaiveBayesModel(double prior_true, std::vector<double> mean_t, std::vector<double> var_t,
                  std::vector<double> mean_f, std::vector<double> var_f)
      : prior_true_(prior_true), mean_t_(std::move(mean_t)), var_t_(std::move(var_t)), mean_f_(std::move(mean_f)),
        var_f_(std::move(var_f)) {}

  double score(std::span<const double> x) const override {
    double lt = std::log(prior_true_);
    double lf = std::log(1 - prior_true_);
    for (std::size_t k = 0; k < x.size(); ++k) {
      lt += log_density(x[k], mean_t_[k], var_t_[k]);
      lf += log_density(x[k], mean_f_[k], var_f_[k]);
    }
    // P(TRUE | x) = 1 / (1 + exp(lf - lt)), stable on both tails.
    double d = lf - lt;
    if (d > 0) {
      double e = std::exp(-d);
      return e / (1 + e);
    }
    return 1 / (1 + std::exp(d));
  }

  json state() const override {
    return json{{"prior_true", prior_true_}, {"mean_true", mean_t_}, {"var_true", var_t_},
                {"mean_false", mean_f_},     {"var_false", var_f_}};
  }

 private:
  static double log_density(double x, double mean, double var) {
    double d = x - mean;
    return -0.5 * std::log(2 * std::numbers::pi * var) - d * d / (2 * var);
  }

  double prior_true_;
  std::vector<double> mean_t_, var_t_, mean_f_, var_f_;
};

}  // namespace

std::unique_ptr<Model> train_nb(const TrainingSet& data, const TrainParams& p) {
  require_two_classes(data, "NaiveBayes");
  if (!(p.nb.variance_floor > 0)) throw Error(ErrorCode::InvalidArgument, "variance floor must be > 0");
  const std::size_t F = data.cols();
  const auto order = canonical_order(data);
  std::vector<double> mean[2], var[2];
  double count[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    mean[c].assign(F, 0.0);
    var[c].assign(F, 0.0);
  }
  for (std::size_t i : order) {
    int c = data.y[i];
    count[c] += 1;
    auto r = data.row(i);
    for (std::size_t f = 0; f < F; ++f) mean[c][f] += r[f];
  }
  for (int c = 0; c < 2; ++c) {
    for (double& m : mean[c]) m /= count[c];
  }
  for (std::size_t i : order) {
    int c = data.y[i];
    auto r = data.row(i);
    for (std::size_t f = 0; f < F; ++f) var[c][f] += (r[f] - mean[c][f]) * (r[f] - mean[c][f]);
  }
  for (int c = 0; c < 2; ++c) {
    for (double& v : var[c]) v = std::max(v / count[c], p.nb.variance_floor);
  }
  const double prior = count[1] / (count[0] + count[1]);
  return std::make_unique<NaiveBayesModel>(prior, mean[1], var[1], mean[0], var[0]);
}

std::unique_ptr<Model> load_nb(const json& s) {
  double prior = s.at("prior_true");
  if (!(prior > 0 && prior < 1)) throw Error(ErrorCode::SchemaMismatch, "NaiveBayes prior out of range");
  return std::make_unique<NaiveBayesModel>(prior, s.at("mean_true").get<std::vector<double>>(),
                                           s.at("var_true").get<std::vector<double>>(),
                                           s.at("mean_false").get<std::vector<double>>(),
                                           s.at("var_false").get<std::vector<double>>());
}

}  // namespace crowdsmell::learn::detail
