#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crowdsmell/error.hpp"
#include "internal.hpp"

namespace crowdsmell::learn::detail {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct MinMax {
  std::vector<double> lo;
  std::vector<double> range;  // 0 for constant columns

  void apply(std::span<const double> x, std::vector<double>& out) const {
    out.resize(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) out[f] = range[f] == 0 ? 0.0 : 2.0 * (x[f] - lo[f]) / range[f] - 1.0;
  }
};

MinMax fit_minmax(const TrainingSet& data) {
  const std::size_t F = data.cols();
  MinMax m;
  m.lo.assign(F, std::numeric_limits<double>::infinity());
  std::vector<double> hi(F, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < data.rows; ++i) {
    auto r = data.row(i);
    for (std::size_t f = 0; f < F; ++f) {
      m.lo[f] = std::min(m.lo[f], r[f]);
      hi[f] = std::max(hi[f], r[f]);
    }
  }
  m.range.resize(F);
  for (std::size_t f = 0; f < F; ++f) m.range[f] = hi[f] - m.lo[f];
  return m;
}

// One hidden layer; w1 is H x (F + 1) with the bias last, w2 is H + 1.
struct Net {
  std::size_t F = 0, H = 0;
  std::vector<double> w1, w2;

  void init(std::size_t f, std::size_t h, Rng& rng) {
    F = f;
    H = h;
    w1.resize(H * (F + 1));
    w2.resize(H + 1);
    for (double& w : w1) w = rng.uniform(-0.05, 0.05);
    for (double& w : w2) w = rng.uniform(-0.05, 0.05);
  }

  double forward(std::span<const double> x, std::vector<double>& hidden) const {
    hidden.resize(H);
    double out = w2[H];
    for (std::size_t j = 0; j < H; ++j) {
      const double* row = &w1[j * (F + 1)];
      double a = row[F];
      for (std::size_t k = 0; k < F; ++k) a += row[k] * x[k];
      hidden[j] = sigmoid(a);
      out += w2[j] * hidden[j];
    }
    return sigmoid(out);
  }

  // Gradient of 0.5 * (t - o)^2, accumulated into g1/g2.
  double backward(std::span<const double> x, double target, std::vector<double>& hidden, std::vector<double>& g1,
                  std::vector<double>& g2) const {
    double o = forward(x, hidden);
    double d_out = (o - target) * o * (1 - o);
    for (std::size_t j = 0; j < H; ++j) {
      g2[j] += d_out * hidden[j];
      double d_h = d_out * w2[j] * hidden[j] * (1 - hidden[j]);
      double* g = &g1[j * (F + 1)];
      for (std::size_t k = 0; k < F; ++k) g[k] += d_h * x[k];
      g[F] += d_h;
    }
    g2[H] += d_out;
    return 0.5 * (target - o) * (target - o);
  }
};

std::size_t hidden_units(const TrainingSet& data, const MlpParams& p) {
  if (p.hidden > 0) return p.hidden;
  return (data.cols() + 2 + 1) / 2;
}

std::vector<std::vector<double>> scaled_rows(const TrainingSet& data, const MinMax& mm) {
  std::vector<std::vector<double>> rows(data.rows);
  for (std::size_t i = 0; i < data.rows; ++i) mm.apply(data.row(i), rows[i]);
  return rows;
}

}  // namespace

class MlpModel final : public Model {
 public:
  MlpModel(MinMax mm, Net net) : mm_(std::move(mm)), net_(std::move(net)) {}

  double score(std::span<const double> x) const override {
    std::vector<double> z, hidden;
    mm_.apply(x, z);
    return net_.forward(z, hidden);
  }

  json state() const override {
    return json{{"lo", mm_.lo}, {"range", mm_.range}, {"inputs", net_.F}, {"hidden", net_.H},
                {"w1", net_.w1}, {"w2", net_.w2}};
  }

  static std::unique_ptr<MlpModel> load(const json& s) {
    MinMax mm{s.at("lo").get<std::vector<double>>(), s.at("range").get<std::vector<double>>()};
    Net net;
    net.F = s.at("inputs");
    net.H = s.at("hidden");
    net.w1 = s.at("w1").get<std::vector<double>>();
    net.w2 = s.at("w2").get<std::vector<double>>();
    if (net.w1.size() != net.H * (net.F + 1) || net.w2.size() != net.H + 1 || mm.lo.size() != net.F) {
      throw Error(ErrorCode::SchemaMismatch, "MLP weight shapes do not match");
    }
    return std::make_unique<MlpModel>(std::move(mm), std::move(net));
  }

 private:
  MinMax mm_;
  Net net_;
};

std::unique_ptr<Model> train_mlp(const TrainingSet& data, const TrainParams& p) {
  require_two_classes(data, "MLP");
  if (p.mlp.learning_rate <= 0 || p.mlp.momentum < 0 || p.mlp.momentum >= 1) {
    throw Error(ErrorCode::InvalidArgument, "MLP needs learning_rate > 0 and momentum in [0, 1)");
  }
  MinMax mm = fit_minmax(data);
  const auto rows = scaled_rows(data, mm);
  Rng rng(p.seed);
  Net net;
  net.init(data.cols(), hidden_units(data, p.mlp), rng);

  std::vector<double> g1(net.w1.size()), g2(net.w2.size());
  std::vector<double> m1(net.w1.size(), 0.0), m2(net.w2.size(), 0.0);
  std::vector<double> hidden;
  std::vector<std::size_t> order(data.rows);
  std::iota(order.begin(), order.end(), 0);
  const double lr = p.mlp.learning_rate, mom = p.mlp.momentum;
  for (std::size_t epoch = 0; epoch < p.mlp.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      std::fill(g1.begin(), g1.end(), 0.0);
      std::fill(g2.begin(), g2.end(), 0.0);
      net.backward(rows[i], data.y[i] ? 1.0 : 0.0, hidden, g1, g2);
      for (std::size_t k = 0; k < g1.size(); ++k) {
        m1[k] = -lr * g1[k] + mom * m1[k];
        net.w1[k] += m1[k];
      }
      for (std::size_t k = 0; k < g2.size(); ++k) {
        m2[k] = -lr * g2[k] + mom * m2[k];
        net.w2[k] += m2[k];
      }
    }
  }
  return std::make_unique<MlpModel>(std::move(mm), std::move(net));
}

std::unique_ptr<Model> load_mlp(const json& state) { return MlpModel::load(state); }

}  // namespace crowdsmell::learn::detail

namespace crowdsmell::learn {

double mlp_gradient_check(const TrainingSet& data, const TrainParams& params) {
  using namespace detail;
  MinMax mm = fit_minmax(data);
  const auto rows = scaled_rows(data, mm);
  Rng rng(params.seed);
  Net net;
  net.init(data.cols(), hidden_units(data, params.mlp), rng);
  for (double& w : net.w1) w *= 20;
  for (double& w : net.w2) w *= 20;

  std::vector<double> g1(net.w1.size(), 0.0), g2(net.w2.size(), 0.0), hidden;
  for (std::size_t i = 0; i < data.rows; ++i) net.backward(rows[i], data.y[i] ? 1.0 : 0.0, hidden, g1, g2);

  auto loss = [&]() {
    double e = 0;
    for (std::size_t i = 0; i < data.rows; ++i) {
      double o = net.forward(rows[i], hidden);
      double t = data.y[i] ? 1.0 : 0.0;
      e += 0.5 * (t - o) * (t - o);
    }
    return e;
  };
  const double h = 1e-6;
  double worst = 0;
  auto check = [&](std::vector<double>& w, const std::vector<double>& g) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      double keep = w[k];
      w[k] = keep + h;
      double plus = loss();
      w[k] = keep - h;
      double minus = loss();
      w[k] = keep;
      double numeric = (plus - minus) / (2 * h);
      double denom = std::max({std::abs(numeric), std::abs(g[k]), 1e-7});
      worst = std::max(worst, std::abs(numeric - g[k]) / denom);
    }
  };
  check(net.w1, g1);
  check(net.w2, g2);
  return worst;
}

}  // namespace crowdsmell::learn
