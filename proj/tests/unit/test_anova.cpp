#include <gtest/gtest.h>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "crowdsmell/error.hpp"
#include "crowdsmell/stats/anova.hpp"

using namespace crowdsmell;
using namespace crowdsmell::stats;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(CROWDSMELL_TEST_DATA) + "/data/" + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double two_sided_t(double t, double dof) {
  boost::math::students_t dist(dof);
  return 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::UsageError;
}

}  // namespace

TEST(IncompleteBeta, MatchesBoost) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> shape(0.5, 40), xs(0, 1);
  for (int i = 0; i < 500; ++i) {
    double a = shape(gen), b = shape(gen), x = xs(gen);
    EXPECT_NEAR(incomplete_beta(x, a, b), boost::math::ibeta(a, b, x), 1e-10) << a << " " << b << " " << x;
  }
  EXPECT_EQ(incomplete_beta(0, 2, 3), 0.0);
  EXPECT_EQ(incomplete_beta(1, 2, 3), 1.0);
  // I_x(1, 1) = x, I_x(a, 1) = x^a.
  EXPECT_NEAR(incomplete_beta(0.3, 1, 1), 0.3, 1e-14);
  EXPECT_NEAR(incomplete_beta(0.6, 3, 1), 0.216, 1e-14);
}

TEST(FSurvival, Limits) {
  EXPECT_EQ(f_survival(0, 5, 30), 1.0);
  EXPECT_LT(f_survival(1e6, 5, 30), 1e-8);
  EXPECT_NEAR(f_survival(1.096, 5, 30), 0.383, 0.001);
  EXPECT_EQ(code_of([] { f_survival(1, 0, 30); }), ErrorCode::InvalidDegreesOfFreedom);
  EXPECT_EQ(code_of([] { f_survival(1, 5, 0.5); }), ErrorCode::InvalidDegreesOfFreedom);
}

TEST(FSurvival, EqualsTwoSidedTTail) {
  for (int m : {1, 2, 3, 4, 7, 15, 30, 100}) {
    for (double f : {0.01, 0.3, 1.0, 1.5, 2.7, 6.0, 25.0, 400.0}) {
      EXPECT_NEAR(f_survival(f, 1, m), two_sided_t(std::sqrt(f), m), 1e-8) << "m=" << m << " f=" << f;
    }
  }
}

TEST(FSurvival, MonotoneDecreasing) {
  for (auto [d1, d2] : {std::pair{1, 4}, {5, 30}, {5, 24}, {12, 3}}) {
    double prev = 1.0;
    for (double f = 0.05; f < 50; f *= 1.3) {
      double p = f_survival(f, d1, d2);
      EXPECT_LE(p, prev);
      EXPECT_GE(p, 0.0);
      prev = p;
    }
  }
}

TEST(Anova, HandArithmetic) {
  // Means 2 and 3, grand mean 2.5: SSB = 1.5, SSW = 4, F = 1.5 / (4 / 4).
  auto r = one_way_anova({{"a", {1, 2, 3}}, {"b", {2, 3, 4}}});
  EXPECT_DOUBLE_EQ(r.f_statistic, 1.5);
  EXPECT_EQ(r.df_between, 1);
  EXPECT_EQ(r.df_within, 4);
  EXPECT_DOUBLE_EQ(r.ss_between, 1.5);
  EXPECT_DOUBLE_EQ(r.ss_within, 4.0);
  EXPECT_DOUBLE_EQ(r.grand_mean, 2.5);
  // Closed-form t(4) cdf with s = 1 + t^2/4.
  double t = std::sqrt(1.5), s = 1 + t * t / 4;
  double cdf = 0.5 + 0.375 * (t / std::sqrt(s)) * (1 - (t * t / 4) / (3 * s));
  EXPECT_NEAR(r.p_value, 2 * (1 - cdf), 1e-10);
  EXPECT_NEAR(r.p_value, 0.288, 5e-4);
}

TEST(Anova, IdenticalGroupsAreDegenerate) {
  auto r = one_way_anova({{"a", {0.5, 0.5}}, {"b", {0.5, 0.5}}, {"c", {0.5, 0.5}}});
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.f_statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Anova, Errors) {
  EXPECT_EQ(code_of([] { one_way_anova({{"a", {1, 2}}}); }), ErrorCode::TooFewGroups);
  EXPECT_EQ(code_of([] { one_way_anova({{"a", {1, 2}}, {"b", {3}}}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { one_way_anova({{"a", {1, 1}}, {"b", {3, 3}}}); }), ErrorCode::DegenerateData);
  EXPECT_EQ(code_of([] { read_roc_table("kind,roc\nJ48,0.5\n"); }), ErrorCode::SchemaMismatch);
  EXPECT_EQ(code_of([] { read_roc_table("classifier,dataset,roc\nJ48,2019,1.5\n"); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { read_roc_table("classifier,dataset,roc\nJ48,2019,x\n"); }), ErrorCode::SchemaMismatch);
}

TEST(Anova, AffineAndPermutationInvariance) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.4, 0.9);
  for (int trial = 0; trial < 50; ++trial) {
    GroupTable g;
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < 5; ++i) g["g" + std::to_string(k)].push_back(u(gen));
    }
    auto base = one_way_anova(g);
    auto scaled = g;
    for (auto& [name, v] : scaled) {
      for (auto& x : v) x = 3.7 * x + 11.0;
    }
    auto r = one_way_anova(scaled);
    EXPECT_NEAR(r.f_statistic, base.f_statistic, 1e-10 * std::max(1.0, base.f_statistic));
    EXPECT_NEAR(r.p_value, base.p_value, 1e-10);
    auto shuffled = g;
    for (auto& [name, v] : shuffled) std::shuffle(v.begin(), v.end(), gen);
    auto s = one_way_anova(shuffled);
    EXPECT_NEAR(s.f_statistic, base.f_statistic, 1e-12 * std::max(1.0, base.f_statistic));
    EXPECT_NEAR(s.p_value, base.p_value, 1e-12);
  }
}

TEST(Anova, LongMethodGrid) {
  auto r = one_way_anova(read_roc_table(slurp("roc_long_method.csv")));
  EXPECT_EQ(r.df_between, 5);
  EXPECT_EQ(r.df_within, 30);
  EXPECT_NEAR(r.f_statistic, 1.096, 0.005);
  EXPECT_NEAR(r.p_value, 0.383, 0.005);
}

TEST(Anova, GodClassGrid) {
  auto r = one_way_anova(read_roc_table(slurp("roc_god_class.csv")));
  EXPECT_EQ(r.df_within, 30);
  EXPECT_NEAR(r.f_statistic, 0.655, 0.005);
  EXPECT_NEAR(r.p_value, 0.660, 0.005);
}

TEST(Anova, FeatureEnvyGridWithoutZeroColumn) {
  auto groups = read_roc_table(slurp("roc_feature_envy.csv"), {"2018"});
  auto r = one_way_anova(groups);
  EXPECT_EQ(r.df_between, 5);
  EXPECT_EQ(r.df_within, 24);
  // These inputs yield F = 0.496, p = 0.776; the reference figures 0.585 and 0.712 are not reachable from them.
  EXPECT_NEAR(r.f_statistic, 0.4961, 5e-4);
  EXPECT_NEAR(r.p_value, 0.7760, 5e-4);
}
