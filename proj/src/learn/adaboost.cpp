#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdsmell/error.hpp"
#include "internal.hpp"

namespace crowdsmell::learn::detail {

namespace {

struct Stump {
  int attr = -1;  // -1: constant prediction
  double threshold = 0.0;
  bool left_label = false;
  bool right_label = false;

  [[nodiscard]] bool predict(std::span<const double> x) const {
    if (attr < 0) return left_label;
    return x[attr] <= threshold ? left_label : right_label;
  }
};

// Minimises weighted misclassification over all single splits.
Stump fit_stump(const TrainingSet& data, const std::vector<double>& w) {
  double total_pos = 0, total_neg = 0;
  for (std::size_t i = 0; i < data.rows; ++i) (data.y[i] ? total_pos : total_neg) += w[i];
  Stump best;
  best.left_label = best.right_label = total_pos >= total_neg;
  double best_err = std::min(total_pos, total_neg);

  std::vector<std::size_t> idx(data.rows);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t cols = data.cols();
  for (std::size_t a = 0; a < cols; ++a) {
    sort_by_attribute(data, a, idx);
    double lp = 0, ln = 0;
    for (std::size_t k = 1; k < idx.size(); ++k) {
      (data.y[idx[k - 1]] ? lp : ln) += w[idx[k - 1]];
      double prev = data.x[idx[k - 1] * cols + a];
      double cur = data.x[idx[k] * cols + a];
      if (!(prev < cur)) continue;
      double rp = total_pos - lp, rn = total_neg - ln;
      double err = std::min(lp, ln) + std::min(rp, rn);
      if (err < best_err - 1e-12) {
        best_err = err;
        best.attr = static_cast<int>(a);
        double mid = prev + (cur - prev) / 2;
        best.threshold = mid < cur ? mid : prev;
        best.left_label = lp >= ln;
        best.right_label = rp >= rn;
      }
    }
  }
  return best;
}

}  // namespace

class BoostModel final : public Model {
 public:
  BoostModel(std::vector<Stump> stumps, std::vector<double> alphas, std::vector<double> reweighted)
      : stumps_(std::move(stumps)), alphas_(std::move(alphas)), reweighted_(std::move(reweighted)) {}

  double score(std::span<const double> x) const override {
    double yes = 0, total = 0;
    for (std::size_t i = 0; i < stumps_.size(); ++i) {
      total += alphas_[i];
      if (stumps_[i].predict(x)) yes += alphas_[i];
    }
    return total > 0 ? yes / total : 0.0;
  }

  json state() const override {
    json s = json::array();
    for (std::size_t i = 0; i < stumps_.size(); ++i) {
      const auto& st = stumps_[i];
      s.push_back(json{{"attr", st.attr},
                       {"threshold", st.threshold},
                       {"left", st.left_label},
                       {"right", st.right_label},
                       {"alpha", alphas_[i]}});
    }
    return json{{"stumps", s}, {"reweighted_errors", reweighted_}};
  }

  static std::unique_ptr<BoostModel> load(const json& state) {
    std::vector<Stump> stumps;
    std::vector<double> alphas;
    for (const auto& s : state.at("stumps")) {
      Stump st;
      st.attr = s.at("attr");
      st.threshold = s.at("threshold");
      st.left_label = s.at("left");
      st.right_label = s.at("right");
      stumps.push_back(st);
      alphas.push_back(s.at("alpha"));
    }
    if (stumps.empty()) throw Error(ErrorCode::SchemaMismatch, "boosted model without learners");
    return std::make_unique<BoostModel>(std::move(stumps), std::move(alphas),
                                        state.at("reweighted_errors").get<std::vector<double>>());
  }

  const std::vector<double>& reweighted() const { return reweighted_; }

 private:
  std::vector<Stump> stumps_;
  std::vector<double> alphas_;
  std::vector<double> reweighted_;
};

std::unique_ptr<Model> train_boost(const TrainingSet& data, const TrainParams& p) {
  if (p.boost.rounds == 0) throw Error(ErrorCode::InvalidArgument, "boosting needs at least one round");
  const std::size_t n = data.rows;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<Stump> stumps;
  std::vector<double> alphas;
  std::vector<double> reweighted;
  std::vector<bool> correct(n);
  for (std::size_t round = 0; round < p.boost.rounds; ++round) {
    Stump h = fit_stump(data, w);
    double err = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      correct[i] = h.predict(data.row(i)) == (data.y[i] != 0);
      total += w[i];
      if (!correct[i]) err += w[i];
    }
    err /= total;
    if (err >= 0.5) {
      if (stumps.empty()) {
        stumps.push_back(h);
        alphas.push_back(1.0);
      }
      break;
    }
    if (err <= 0) {
      // A perfect learner dominates the vote; nothing is left to reweight.
      stumps.push_back(h);
      alphas.push_back(std::log((1 - 1e-10) / 1e-10));
      break;
    }
    const double beta = err / (1 - err);
    stumps.push_back(h);
    alphas.push_back(std::log(1 / beta));
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (correct[i]) w[i] *= beta;
      sum += w[i];
    }
    double wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= sum;
      if (!correct[i]) wrong += w[i];
    }
    reweighted.push_back(wrong);
  }
  return std::make_unique<BoostModel>(std::move(stumps), std::move(alphas), std::move(reweighted));
}

std::unique_ptr<Model> load_boost(const json& state) { return BoostModel::load(state); }

}  // namespace crowdsmell::learn::detail

namespace crowdsmell::learn {

std::vector<double> boost_reweighted_errors(const TrainedModel& model) {
  const auto* boost = dynamic_cast<const detail::BoostModel*>(&model.impl());
  if (!boost) throw Error(ErrorCode::InvalidArgument, "not an AdaBoostM1 model");
  return boost->reweighted();
}

}  // namespace crowdsmell::learn
