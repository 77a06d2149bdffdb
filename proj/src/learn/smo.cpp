#include <algorithm>
#include <cmath>
#include <limits>

#include "crowdsmell/error.hpp"
#include "internal.hpp"

namespace crowdsmell::learn::detail {

namespace {

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 0 for constant columns

  void apply(std::span<const double> x, std::vector<double>& out) const {
    out.resize(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) out[f] = scale[f] == 0 ? 0.0 : (x[f] - mean[f]) * scale[f];
  }
};

Standardizer fit_standardizer(const TrainingSet& data, const std::vector<std::size_t>& order) {
  const std::size_t F = data.cols();
  const double n = static_cast<double>(order.size());
  Standardizer s;
  s.mean.assign(F, 0.0);
  s.scale.assign(F, 0.0);
  for (std::size_t i : order) {
    auto r = data.row(i);
    for (std::size_t f = 0; f < F; ++f) s.mean[f] += r[f];
  }
  for (double& m : s.mean) m /= n;
  std::vector<double> var(F, 0.0);
  for (std::size_t i : order) {
    auto r = data.row(i);
    for (std::size_t f = 0; f < F; ++f) var[f] += (r[f] - s.mean[f]) * (r[f] - s.mean[f]);
  }
  for (std::size_t f = 0; f < F; ++f) {
    double sd = n > 1 ? std::sqrt(var[f] / (n - 1)) : 0.0;
    s.scale[f] = sd > 0 ? 1.0 / sd : 0.0;
  }
  return s;
}

double kernel(std::span<const double> a, std::span<const double> b, double exponent) {
  double dot = 0;
  for (std::size_t f = 0; f < a.size(); ++f) dot += a[f] * b[f];
  return exponent == 1.0 ? dot : std::pow(dot, exponent);
}

}  // namespace

class SmoModel final : public Model {
 public:
  SmoModel(Standardizer st, std::vector<std::vector<double>> sv, std::vector<double> coef, double rho, double exponent,
           double residual)
      : st_(std::move(st)), sv_(std::move(sv)), coef_(std::move(coef)), rho_(rho), exponent_(exponent),
        residual_(residual) {
    if (exponent_ == 1.0) {
      w_.assign(st_.mean.size(), 0.0);
      for (std::size_t i = 0; i < sv_.size(); ++i) {
        for (std::size_t f = 0; f < w_.size(); ++f) w_[f] += coef_[i] * sv_[i][f];
      }
    }
  }

  double score(std::span<const double> x) const override {
    std::vector<double> z;
    st_.apply(x, z);
    double f = -rho_;
    if (exponent_ == 1.0) {
      for (std::size_t k = 0; k < z.size(); ++k) f += w_[k] * z[k];
    } else {
      for (std::size_t i = 0; i < sv_.size(); ++i) f += coef_[i] * kernel(sv_[i], z, exponent_);
    }
    return f;
  }

  double threshold() const override { return 0.0; }

  json state() const override {
    return json{{"mean", st_.mean}, {"scale", st_.scale}, {"support_vectors", sv_}, {"coefficients", coef_},
                {"rho", rho_},      {"exponent", exponent_}, {"kkt_residual", residual_}};
  }

  static std::unique_ptr<SmoModel> load(const json& s) {
    Standardizer st{s.at("mean").get<std::vector<double>>(), s.at("scale").get<std::vector<double>>()};
    return std::make_unique<SmoModel>(std::move(st), s.at("support_vectors").get<std::vector<std::vector<double>>>(),
                                      s.at("coefficients").get<std::vector<double>>(), s.at("rho").get<double>(),
                                      s.at("exponent").get<double>(), s.at("kkt_residual").get<double>());
  }

  double residual() const { return residual_; }

 private:
  Standardizer st_;
  std::vector<std::vector<double>> sv_;
  std::vector<double> coef_;  // alpha_i * y_i
  double rho_;
  double exponent_;
  double residual_;
  std::vector<double> w_;
};

// Dual coordinate ascent on pairs chosen by maximal KKT violation
// (first-order working set selection).
std::unique_ptr<Model> train_smo(const TrainingSet& data, const TrainParams& p) {
  require_two_classes(data, "SMO");
  if (p.smo.c <= 0 || p.smo.tolerance <= 0) throw Error(ErrorCode::InvalidArgument, "SMO needs C > 0 and tolerance > 0");
  const auto order = canonical_order(data);
  const std::size_t n = order.size();
  const double C = p.smo.c;
  Standardizer st = fit_standardizer(data, order);

  std::vector<std::vector<double>> z(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.apply(data.row(order[i]), z[i]);
    y[i] = data.y[order[i]] ? 1.0 : -1.0;
  }
  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) K[i * n + j] = K[j * n + i] = kernel(z[i], z[j], p.smo.exponent);
  }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> G(n, -1.0);
  auto up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  auto low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };

  double gap = 0;
  for (std::size_t iter = 0;; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      double v = -y[t] * G[t];
      if (up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    gap = (i == n || j == n) ? 0.0 : gmax - gmin;
    if (gap < p.smo.tolerance || iter >= p.smo.max_iterations) break;

    const double old_i = alpha[i], old_j = alpha[j];
    double quad = K[i * n + i] + K[j * n + j] - 2 * K[i * n + j];
    if (quad <= 0) quad = 1e-12;
    if (y[i] != y[j]) {
      double delta = (-G[i] - G[j]) / quad;
      double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double delta = (G[i] - G[j]) / quad;
      double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      G[t] += y[t] * (y[i] * K[t * n + i] * di + y[j] * K[t * n + j] * dj);
    }
  }

  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0;
  std::size_t free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    double yg = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      ++free;
      sum_free += yg;
    }
  }
  double rho = free > 0 ? sum_free / static_cast<double>(free) : (ub + lb) / 2;

  std::vector<std::vector<double>> sv;
  std::vector<double> coef;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0) {
      sv.push_back(z[t]);
      coef.push_back(alpha[t] * y[t]);
    }
  }
  return std::make_unique<SmoModel>(std::move(st), std::move(sv), std::move(coef), rho, p.smo.exponent, gap);
}

std::unique_ptr<Model> load_smo(const json& state) { return SmoModel::load(state); }

}  // namespace crowdsmell::learn::detail

namespace crowdsmell::learn {

double smo_kkt_residual(const TrainedModel& model) {
  const auto* smo = dynamic_cast<const detail::SmoModel*>(&model.impl());
  if (!smo) throw Error(ErrorCode::InvalidArgument, "not an SMO model");
  return smo->residual();
}

}  // namespace crowdsmell::learn
