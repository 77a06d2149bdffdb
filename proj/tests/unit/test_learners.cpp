#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "crowdsmell/error.hpp"
#include "crowdsmell/learn/learners.hpp"

using namespace crowdsmell;
using namespace crowdsmell::learn;

namespace {

TrainingSet make_set(std::size_t cols, const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  TrainingSet t;
  for (std::size_t c = 0; c < cols; ++c) t.feature_names.push_back("f" + std::to_string(c));
  t.rows = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.x.insert(t.x.end(), rows[i].begin(), rows[i].end());
    t.y.push_back(static_cast<std::uint8_t>(labels[i]));
  }
  return t;
}

// x in [-5, 5] excluding 0; TRUE iff x > 0.
TrainingSet separable_1d() {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = -20; i <= 20; ++i) {
    if (i == 0) continue;
    rows.push_back({i / 4.0});
    labels.push_back(i > 0);
  }
  return make_set(1, rows, labels);
}

TrainingSet noisy(std::size_t n, std::size_t cols, std::uint64_t seed, double signal = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    int label = static_cast<int>(i % 3 == 0);
    std::vector<double> r;
    for (std::size_t c = 0; c < cols; ++c) r.push_back(noise(gen) + (c < 2 ? signal * label : 0.0));
    rows.push_back(r);
    labels.push_back(label);
  }
  return make_set(cols, rows, labels);
}

TrainParams with_kind(ClassifierKind k, std::uint64_t seed = 42) {
  TrainParams p;
  p.kind = k;
  p.seed = seed;
  return p;
}

// Independent check that the data admits a perfect threshold rule.
bool brute_force_separable(const TrainingSet& t) {
  for (std::size_t i = 0; i < t.rows; ++i) {
    double thr = t.x[i];
    bool ok = true;
    for (std::size_t j = 0; j < t.rows && ok; ++j) ok = (t.x[j] > thr) == (t.y[j] == 1);
    if (ok) return true;
  }
  return false;
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

TEST(Kinds, Names) {
  EXPECT_EQ(std::size(kAllKinds), 6u);
  for (auto k : kAllKinds) {
    EXPECT_EQ(parse_kind(to_string(k)), k);
    EXPECT_EQ(parse_kind(display_name(k)), k);
  }
  EXPECT_EQ(parse_kind("j48"), ClassifierKind::J48);
  EXPECT_EQ(display_name(ClassifierKind::Mlp), "MultilayerPerceptron");
  EXPECT_EQ(code_of([] { parse_kind("knn"); }), ErrorCode::InvalidArgument);
}

TEST(Learners, SeparableOneFeatureResubstitution) {
  auto data = separable_1d();
  ASSERT_TRUE(brute_force_separable(data));
  for (auto k : kAllKinds) {
    auto model = train(data, with_kind(k));
    std::size_t right = 0;
    for (std::size_t i = 0; i < data.rows; ++i) right += model.predict(data.row(i)).label == (data.y[i] == 1);
    EXPECT_EQ(right, data.rows) << to_string(k);
    EXPECT_TRUE(model.predict(std::vector<double>{10.0}).label) << to_string(k);
    EXPECT_FALSE(model.predict(std::vector<double>{-10.0}).label) << to_string(k);
  }
}

TEST(Learners, SingleClassTreeIsOneLeaf) {
  auto data = make_set(2, {{1, 2}, {3, 4}, {5, 6}}, {1, 1, 1});
  auto model = train(data, with_kind(ClassifierKind::J48));
  EXPECT_EQ(model.to_json()["state"]["tree"].size(), 1u);
  EXPECT_EQ(model.score(std::vector<double>{0, 0}), 1.0);
  EXPECT_TRUE(model.predict(std::vector<double>{9, 9}).label);
}

TEST(Learners, SingleClassRejectedWhereUnfittable) {
  auto data = make_set(1, {{1}, {2}}, {0, 0});
  for (auto k : {ClassifierKind::Smo, ClassifierKind::Mlp, ClassifierKind::NaiveBayes}) {
    EXPECT_EQ(code_of([&] { train(data, with_kind(k)); }), ErrorCode::DegenerateData) << to_string(k);
  }
  EXPECT_NO_THROW(train(data, with_kind(ClassifierKind::RandomForest)));
  EXPECT_NO_THROW(train(data, with_kind(ClassifierKind::AdaBoostM1)));
}

TEST(Learners, InputValidation) {
  auto bad = make_set(1, {{1}, {std::nan("")}}, {0, 1});
  EXPECT_EQ(code_of([&] { train(bad, with_kind(ClassifierKind::J48)); }), ErrorCode::NonFiniteFeature);
  auto model = train(separable_1d(), with_kind(ClassifierKind::NaiveBayes));
  EXPECT_EQ(code_of([&] { (void)model.score(std::vector<double>{1, 2}); }), ErrorCode::FeatureMismatch);
  metrics::MetricVector v;
  v.values["other"] = 1;
  EXPECT_EQ(code_of([&] { (void)model.predict(v); }), ErrorCode::FeatureMismatch);
  v.values.clear();
  v.values["f0"] = 2;
  EXPECT_TRUE(model.predict(v).label);
  TrainingSet empty;
  empty.feature_names = {"f0"};
  EXPECT_EQ(code_of([&] { train(empty, with_kind(ClassifierKind::J48)); }), ErrorCode::DegenerateData);
}

TEST(NaiveBayes, ConstantFeatureScoresPrior) {
  auto data = make_set(1, {{3}, {3}, {3}, {3}, {3}}, {1, 1, 1, 0, 0});
  auto model = train(data, with_kind(ClassifierKind::NaiveBayes));
  EXPECT_NEAR(model.score(std::vector<double>{3}), 0.6, 1e-12);
  EXPECT_TRUE(model.predict(std::vector<double>{3}).label);
}

TEST(Forest, ScoreIsMemberVoteFraction) {
  auto data = noisy(120, 6, 5, 0.8);
  auto model = train(data, with_kind(ClassifierKind::RandomForest, 7));
  auto probes = noisy(40, 6, 77, 0.8);
  bool saw_fraction = false;
  for (std::size_t i = 0; i < probes.rows; ++i) {
    auto votes = forest_member_votes(model, probes.row(i));
    ASSERT_EQ(votes.size(), 100u);
    double yes = static_cast<double>(std::count(votes.begin(), votes.end(), true));
    EXPECT_EQ(model.score(probes.row(i)), yes / 100.0);
    saw_fraction |= yes > 0 && yes < 100;
  }
  EXPECT_TRUE(saw_fraction);
  EXPECT_EQ(code_of([&] { forest_member_votes(train(data, with_kind(ClassifierKind::J48)), probes.row(0)); }),
            ErrorCode::InvalidArgument);
}

TEST(Boost, ReweightedRoundErrorIsHalf) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto data = noisy(150, 5, seed, 0.7);
    auto model = train(data, with_kind(ClassifierKind::AdaBoostM1, seed));
    auto errors = boost_reweighted_errors(model);
    EXPECT_FALSE(errors.empty());
    for (double e : errors) EXPECT_NEAR(e, 0.5, 1e-9);
  }
}

TEST(Smo, KktResidualWithinTolerance) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto model = train(noisy(200, 8, seed, 0.6), with_kind(ClassifierKind::Smo));
    EXPECT_LE(smo_kkt_residual(model), 1e-3);
    EXPECT_EQ(model.threshold(), 0.0);
  }
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  auto data = make_set(3, {{0.1, 2, -1}, {1.5, 0.3, 0}, {-0.7, 1, 4}, {2, -2, 1}, {0, 0.5, 0.5}}, {1, 0, 1, 0, 1});
  auto p = with_kind(ClassifierKind::Mlp, 3);
  EXPECT_LT(mlp_gradient_check(data, p), 1e-4);
}

TEST(Learners, SeedDeterminism) {
  auto data = noisy(90, 5, 11, 0.8);
  auto probes = noisy(30, 5, 12, 0.8);
  for (auto k : kAllKinds) {
    auto a = train(data, with_kind(k, 9));
    auto b = train(data, with_kind(k, 9));
    for (std::size_t i = 0; i < probes.rows; ++i) EXPECT_EQ(a.score(probes.row(i)), b.score(probes.row(i))) << to_string(k);
  }
}

TEST(Learners, NaiveBayesAndSmoIgnoreRowOrder) {
  auto data = noisy(80, 4, 21, 0.8);
  auto probes = noisy(25, 4, 22, 0.8);
  std::vector<std::size_t> perm(data.rows);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 gen(5);
  for (int round = 0; round < 3; ++round) {
    std::shuffle(perm.begin(), perm.end(), gen);
    auto shuffled = subset(data, perm);
    for (auto k : {ClassifierKind::NaiveBayes, ClassifierKind::Smo}) {
      auto a = train(data, with_kind(k));
      auto b = train(shuffled, with_kind(k));
      for (std::size_t i = 0; i < probes.rows; ++i) EXPECT_EQ(a.score(probes.row(i)), b.score(probes.row(i)));
    }
  }
}

TEST(Learners, LabelFollowsThreshold) {
  auto data = noisy(100, 4, 31, 0.5);
  auto probes = noisy(60, 4, 32, 0.5);
  for (auto k : kAllKinds) {
    auto model = train(data, with_kind(k));
    for (std::size_t i = 0; i < probes.rows; ++i) {
      auto p = model.predict(probes.row(i));
      EXPECT_EQ(p.label, p.score >= model.threshold());
      if (k != ClassifierKind::Smo) {
        EXPECT_GE(p.score, 0.0);
        EXPECT_LE(p.score, 1.0);
      }
    }
  }
}

TEST(Learners, JsonRoundTripPreservesScores) {
  auto data = noisy(70, 4, 41, 0.8);
  auto probes = noisy(20, 4, 42, 0.8);
  for (auto k : kAllKinds) {
    auto model = train(data, with_kind(k, 3));
    auto text = model.to_json().dump();
    auto back = TrainedModel::from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back.kind(), k);
    EXPECT_EQ(back.feature_names(), model.feature_names());
    EXPECT_EQ(back.params().seed, 3u);
    for (std::size_t i = 0; i < probes.rows; ++i) EXPECT_EQ(back.score(probes.row(i)), model.score(probes.row(i)));
  }
  EXPECT_EQ(code_of([] { TrainedModel::from_json(nlohmann::json{{"format", "x"}}); }), ErrorCode::SchemaMismatch);
}

TEST(J48, PruningCollapsesNoise) {
  // Pure noise: the pruned tree should not grow deep.
  auto data = noisy(200, 3, 51, 0.0);
  auto model = train(data, with_kind(ClassifierKind::J48));
  EXPECT_LE(model.to_json()["state"]["tree"].size(), 15u);
  auto strong = train(noisy(200, 3, 52, 4.0), with_kind(ClassifierKind::J48));
  EXPECT_GE(strong.to_json()["state"]["tree"].size(), 3u);
}
