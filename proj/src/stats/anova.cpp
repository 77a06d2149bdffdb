#include "crowdsmell/stats/anova.hpp"

#include <cmath>
#include <limits>

#include "crowdsmell/common/csv.hpp"
#include "crowdsmell/error.hpp"

namespace crowdsmell::stats {

namespace {

constexpr double kEps = 1e-12;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 10000;

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_fraction(double x, double a, double b) {
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0) || !(b > 0)) throw Error(ErrorCode::InvalidArgument, "incomplete beta needs a, b > 0");
  if (std::isnan(x)) throw Error(ErrorCode::InvalidArgument, "incomplete beta of NaN");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(x, a, b) / a;
  return 1.0 - front * beta_fraction(1.0 - x, b, a) / b;
}

double f_survival(double f, double df1, double df2) {
  if (!(df1 >= 1) || !(df2 >= 1) || !std::isfinite(df1) || !std::isfinite(df2)) {
    throw Error(ErrorCode::InvalidDegreesOfFreedom, "degrees of freedom must be >= 1");
  }
  if (std::isnan(f)) throw Error(ErrorCode::InvalidArgument, "F statistic is NaN");
  if (f <= 0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(df2 / (df2 + df1 * f), df2 / 2.0, df1 / 2.0);
}

AnovaResult one_way_anova(const GroupTable& groups) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::TooFewGroups, "ANOVA needs at least 2 groups, got " + std::to_string(groups.size()));
  }
  AnovaResult r;
  std::size_t n = 0;
  double total = 0;
  for (const auto& [name, values] : groups) {
    if (values.size() < 2) throw Error(ErrorCode::InvalidArgument, "group " + name + " has fewer than 2 values");
    double sum = 0;
    for (double v : values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "group " + name + " has a non-finite value");
      sum += v;
    }
    r.group_means[name] = sum / static_cast<double>(values.size());
    total += sum;
    n += values.size();
  }
  r.grand_mean = total / static_cast<double>(n);
  for (const auto& [name, values] : groups) {
    const double mean = r.group_means[name];
    r.ss_between += static_cast<double>(values.size()) * (mean - r.grand_mean) * (mean - r.grand_mean);
    for (double v : values) r.ss_within += (v - mean) * (v - mean);
  }
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(n - groups.size());

  bool all_equal = true;
  const double first = groups.begin()->second.front();
  for (const auto& [name, values] : groups) {
    for (double v : values) all_equal &= v == first;
  }
  if (all_equal) {
    r.degenerate = true;
    r.ss_between = r.ss_within = 0;
    r.f_statistic = 0;
    r.p_value = 1;
    return r;
  }
  if (r.ss_within == 0) throw Error(ErrorCode::DegenerateData, "zero within-group variance");
  const double msb = r.ss_between / r.df_between;
  const double msw = r.ss_within / r.df_within;
  r.f_statistic = msb / msw;
  r.p_value = f_survival(r.f_statistic, r.df_between, r.df_within);
  return r;
}

GroupTable read_roc_table(const std::string& text, const std::set<std::string>& exclude_datasets) {
  auto doc = csv::parse(text);
  if (doc.header != csv::Row{"classifier", "dataset", "roc"}) {
    throw Error(ErrorCode::SchemaMismatch, "expected header classifier,dataset,roc");
  }
  GroupTable groups;
  std::size_t line = 1;
  for (const auto& row : doc.rows) {
    ++line;
    if (row.size() != 3) throw Error(ErrorCode::SchemaMismatch, "row " + std::to_string(line) + ": expected 3 fields");
    if (exclude_datasets.count(row[1])) continue;
    double v;
    try {
      v = csv::parse_real(row[2]);
    } catch (const Error&) {
      throw Error(ErrorCode::SchemaMismatch, "row " + std::to_string(line) + ": roc is not a number");
    }
    if (!(v >= 0 && v <= 1)) throw Error(ErrorCode::InvalidArgument, "row " + std::to_string(line) + ": roc outside [0,1]");
    groups[row[0]].push_back(v);
  }
  return groups;
}

nlohmann::json to_json(const AnovaResult& r) {
  return nlohmann::json{{"f_statistic", r.f_statistic}, {"df_between", r.df_between}, {"df_within", r.df_within},
                        {"p_value", r.p_value},         {"ss_between", r.ss_between}, {"ss_within", r.ss_within},
                        {"grand_mean", r.grand_mean},   {"group_means", r.group_means}, {"degenerate", r.degenerate}};
}

}  // namespace crowdsmell::stats
