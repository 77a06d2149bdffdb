#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "crowdsmell/error.hpp"
#include "crowdsmell/eval/evaluation.hpp"

using namespace crowdsmell;
using namespace crowdsmell::eval;
using learn::ClassifierKind;

namespace {

// O(n^2) reference: every (positive, negative) pair, ties count half.
Value brute_auc(const std::vector<Scored>& v) {
  double credit = 0;
  std::size_t pairs = 0;
  for (const auto& p : v) {
    if (!p.label) continue;
    for (const auto& n : v) {
      if (n.label) continue;
      ++pairs;
      credit += p.score > n.score ? 1.0 : p.score == n.score ? 0.5 : 0.0;
    }
  }
  if (pairs == 0) return std::nullopt;
  return credit / static_cast<double>(pairs);
}

std::vector<Scored> random_scored(std::mt19937_64& gen, std::size_t n, int levels) {
  std::uniform_int_distribution<int> level(0, levels - 1);
  std::bernoulli_distribution coin(0.4);
  std::vector<Scored> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back({level(gen) / 7.0, coin(gen)});
  return v;
}

learn::TrainingSet small_set(std::size_t n_true, std::size_t n_false, std::uint64_t seed, double signal = 3.0) {
  learn::TrainingSet t;
  t.feature_names = {"a", "b", "c"};
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise;
  for (std::size_t i = 0; i < n_true + n_false; ++i) {
    bool label = i < n_true;
    for (int c = 0; c < 3; ++c) t.x.push_back(noise(gen) + (c == 0 && label ? signal : 0.0));
    t.y.push_back(label);
  }
  t.rows = n_true + n_false;
  return t;
}

learn::TrainParams kind(ClassifierKind k) {
  learn::TrainParams p;
  p.kind = k;
  return p;
}

}  // namespace

TEST(Summarize, PerfectClassifier) {
  auto s = summarize({5, 0, 0, 5}, 1.0);
  for (auto* m : {&s.true_class, &s.false_class, &s.weighted}) {
    for (auto v : {m->accuracy, m->tp_rate, m->precision, m->recall, m->f_measure, m->roc_auc}) EXPECT_EQ(v, 1.0);
    EXPECT_EQ(m->fp_rate, 0.0);
  }
}

TEST(Summarize, HandArithmetic) {
  auto s = summarize({80, 20, 10, 90});
  EXPECT_DOUBLE_EQ(*s.weighted.accuracy, 0.85);
  EXPECT_DOUBLE_EQ(*s.true_class.precision, 0.80);
  EXPECT_DOUBLE_EQ(*s.true_class.recall, 80.0 / 90.0);
  EXPECT_DOUBLE_EQ(*s.true_class.f_measure, 2 * 0.8 * (8.0 / 9.0) / (0.8 + 8.0 / 9.0));
  EXPECT_NEAR(*s.true_class.f_measure, 0.8421, 1e-4);
  EXPECT_DOUBLE_EQ(*s.true_class.fp_rate, 20.0 / 110.0);
  EXPECT_DOUBLE_EQ(*s.false_class.precision, 90.0 / 100.0);
  EXPECT_DOUBLE_EQ(*s.false_class.recall, 90.0 / 110.0);
  EXPECT_FALSE(s.weighted.roc_auc);
}

TEST(Summarize, NoPositivePredictions) {
  auto s = summarize({0, 0, 3, 7});
  EXPECT_FALSE(s.true_class.precision);
  EXPECT_FALSE(s.true_class.f_measure);
  EXPECT_DOUBLE_EQ(*s.weighted.accuracy, 0.7);
  EXPECT_FALSE(s.weighted.precision);
  EXPECT_FALSE(s.weighted.f_measure);
  // Reference layout for a 3 TRUE / 7 FALSE oracle predicted all FALSE.
  EXPECT_EQ(format_percent(s.weighted.accuracy), "70.00%");
  EXPECT_EQ(format_percent(s.weighted.tp_rate), "70.00%");
  EXPECT_EQ(format_percent(s.weighted.fp_rate), "70.00%");
  EXPECT_EQ(format_percent(s.weighted.precision), "-");
  EXPECT_EQ(format_percent(s.weighted.recall), "70.00%");
  EXPECT_EQ(format_percent(s.weighted.f_measure), "-");
  EXPECT_TRUE(to_json(s.weighted)["precision"].is_null());
}

TEST(Summarize, EverythingPredictedTrue) {
  // 79 TRUE / 44 FALSE, all predicted TRUE.
  auto s = summarize({79, 44, 0, 0});
  EXPECT_FALSE(s.false_class.precision);
  EXPECT_EQ(format_percent(s.weighted.accuracy), "64.23%");
  EXPECT_EQ(format_percent(s.weighted.precision), "-");
  EXPECT_EQ(format_percent(s.weighted.recall), "64.23%");
}

TEST(Summarize, WeightedTpRateIsAccuracy) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> count(0, 500);
  for (int i = 0; i < 2000; ++i) {
    ConfusionMatrix cm{static_cast<std::uint64_t>(count(gen)), static_cast<std::uint64_t>(count(gen)),
                       static_cast<std::uint64_t>(count(gen)), static_cast<std::uint64_t>(count(gen))};
    if (cm.n() == 0) continue;
    auto s = summarize(cm);
    ASSERT_TRUE(s.weighted.tp_rate);
    EXPECT_NEAR(*s.weighted.tp_rate, *s.weighted.accuracy, 1e-10);
    EXPECT_NEAR(*s.weighted.recall, *s.weighted.accuracy, 1e-10);
  }
}

TEST(Auc, Examples) {
  std::vector<Scored> perfect{{0.9, true}, {0.8, true}, {0.2, false}, {0.1, false}};
  EXPECT_EQ(auc(perfect), 1.0);
  std::vector<Scored> equal{{0.3, true}, {0.3, false}, {0.3, true}, {0.3, false}};
  EXPECT_EQ(auc(equal), 0.5);
  std::vector<Scored> mixed{{0.9, true}, {0.4, true}, {0.5, false}, {0.1, false}};
  EXPECT_EQ(auc(mixed), 0.75);
  std::vector<Scored> single{{0.9, true}, {0.4, true}};
  EXPECT_FALSE(auc(single));
  EXPECT_FALSE(auc(std::vector<Scored>{}));
}

TEST(Auc, MatchesBruteForce) {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = random_scored(gen, size(gen), trial % 2 ? 5 : 1000);
    EXPECT_EQ(auc(v), brute_auc(v)) << "trial " << trial;
  }
}

TEST(Auc, MonotoneTransformAndComplement) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto v = random_scored(gen, 40, 1 << 20);
    auto base = auc(v);
    if (!base) continue;
    auto t = v;
    for (auto& s : t) s.score = std::sqrt(s.score) * 3 - 1;
    EXPECT_EQ(auc(t), base);
    std::set<double> distinct;
    for (auto& s : v) distinct.insert(s.score);
    if (distinct.size() != v.size()) continue;
    for (auto& s : t) s.score = -s.score;
    EXPECT_NEAR(*auc(t), 1.0 - *base, 1e-15);
  }
}

TEST(Folds, EvenSplit) {
  std::vector<std::uint8_t> labels(20);
  for (int i = 0; i < 10; ++i) labels[i] = 1;
  auto folds = stratified_folds(labels, 10, 1);
  for (const auto& f : folds) {
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(labels[f[0]] + labels[f[1]], 1);
  }
}

TEST(Folds, RoundRobinCounts) {
  std::vector<std::uint8_t> labels(20, 0);
  for (int i = 0; i < 12; ++i) labels[i * 20 / 12] = 1;
  ASSERT_EQ(std::count(labels.begin(), labels.end(), 1), 12);
  auto folds = stratified_folds(labels, 10, 99);
  // Dealing 12 TRUE then 8 FALSE round-robin from fold 0.
  for (std::size_t f = 0; f < 10; ++f) {
    auto t = std::count_if(folds[f].begin(), folds[f].end(), [&](auto i) { return labels[i] == 1; });
    EXPECT_EQ(static_cast<std::size_t>(t), f < 2 ? 2u : 1u);
    EXPECT_EQ(folds[f].size() - t, f < 2 ? 0u : 1u);
  }
}

TEST(Folds, PartitionBalancedAndDeterministic) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 10 + gen() % 300, k = 2 + gen() % 9;
    std::vector<std::uint8_t> labels(n);
    for (auto& l : labels) l = gen() % 3 == 0;
    labels[0] = 1;
    labels[1] = 0;
    auto folds = stratified_folds(labels, k, trial);
    EXPECT_EQ(folds, stratified_folds(labels, k, trial));
    std::vector<int> seen(n, 0);
    std::size_t lo[2] = {n, n}, hi[2] = {0, 0};
    for (const auto& f : folds) {
      EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
      std::size_t c[2] = {0, 0};
      for (auto i : f) {
        ++seen[i];
        ++c[labels[i]];
      }
      for (int x : {0, 1}) {
        lo[x] = std::min(lo[x], c[x]);
        hi[x] = std::max(hi[x], c[x]);
      }
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    EXPECT_LE(hi[0] - lo[0], 1u);
    EXPECT_LE(hi[1] - lo[1], 1u);
  }
  std::vector<std::uint8_t> labels(30);
  for (int i = 0; i < 30; i += 2) labels[i] = 1;
  EXPECT_NE(stratified_folds(labels, 10, 1), stratified_folds(labels, 10, 2));
}

TEST(Folds, Errors) {
  std::vector<std::uint8_t> nine{1, 0, 1, 0, 1, 0, 1, 0, 1};
  try {
    stratified_folds(nine, 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewInstances);
  }
  EXPECT_THROW(stratified_folds(nine, 1, 1), Error);
  std::vector<std::uint8_t> one_class(12, 1);
  EXPECT_THROW(stratified_folds(one_class, 10, 1), Error);
}

TEST(CrossValidate, PooledIsSumAndEveryInstanceTestedOnce) {
  auto data = small_set(30, 45, 8);
  std::vector<int> tested(data.rows, 0);
  std::size_t calls = 0;
  auto report = cross_validate(data, "d", kind(ClassifierKind::NaiveBayes), 10, 4,
                               [&](std::size_t, const learn::TrainingSet& train, const learn::TrainingSet& test,
                                   const learn::TrainedModel&) {
                                 ++calls;
                                 EXPECT_EQ(train.rows + test.rows, data.rows);
                               });
  EXPECT_EQ(calls, 10u);
  ConfusionMatrix sum;
  for (const auto& f : report.folds) sum += f;
  EXPECT_EQ(sum, report.pooled);
  EXPECT_EQ(report.pooled.n(), data.rows);
  EXPECT_EQ(report.pooled.tp + report.pooled.fn, 30u);
  for (const auto& f : stratified_folds(data.y, 10, 4)) {
    for (auto i : f) ++tested[i];
  }
  EXPECT_TRUE(std::all_of(tested.begin(), tested.end(), [](int t) { return t == 1; }));
  std::vector<Scored> scored;
  for (std::size_t i = 0; i < data.rows; ++i) scored.push_back({report.scores[i], data.y[i] != 0});
  EXPECT_EQ(auc(scored), report.summary.weighted.roc_auc);
}

TEST(CrossValidate, TrainingStatisticsIgnoreTestFold) {
  auto data = small_set(20, 30, 9);
  auto folds = stratified_folds(data.y, 10, 6);
  for (auto k : {ClassifierKind::Smo, ClassifierKind::Mlp, ClassifierKind::NaiveBayes}) {
    std::vector<std::string> before, after;
    cross_validate(data, "d", kind(k), 10, 6,
                   [&](std::size_t f, auto&, auto&, const learn::TrainedModel& m) {
                     if (f == 0) before.push_back(m.to_json().dump());
                   });
    auto perturbed = data;
    for (auto i : folds[0]) {
      for (std::size_t c = 0; c < perturbed.cols(); ++c) perturbed.x[i * perturbed.cols() + c] += 1e6;
    }
    cross_validate(perturbed, "d", kind(k), 10, 6,
                   [&](std::size_t f, auto&, auto&, const learn::TrainedModel& m) {
                     if (f == 0) after.push_back(m.to_json().dump());
                   });
    EXPECT_EQ(before, after) << learn::to_string(k);
  }
}

TEST(CrossValidate, ErrorsCarryFoldIndex) {
  auto data = small_set(1, 11, 2);
  try {
    cross_validate(data, "d", kind(ClassifierKind::Smo), 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateData);
    EXPECT_EQ(std::string(e.what()).rfind("fold ", 0), 0u) << e.what();
  }
}

TEST(CrossValidate, SeparableDataRanksWell) {
  auto data = small_set(100, 100, 12, 8.0);
  for (auto k : learn::kAllKinds) {
    auto r = cross_validate(data, "sep", kind(k), 10, 42);
    EXPECT_GE(*r.summary.weighted.roc_auc, 0.99) << learn::to_string(k);
  }
}

TEST(CrossValidate, Deterministic) {
  auto data = small_set(25, 25, 13, 1.0);
  for (auto k : learn::kAllKinds) {
    auto a = cross_validate(data, "d", kind(k), 10, 5);
    auto b = cross_validate(data, "d", kind(k), 10, 5);
    EXPECT_EQ(a.scores, b.scores);
    EXPECT_EQ(report_to_json(a), report_to_json(b));
  }
}

TEST(Report, JsonLayoutValidates) {
  auto r = cross_validate(small_set(20, 20, 14), "2019", kind(ClassifierKind::J48), 10, 3);
  Provenance prov;
  prov.seed = 3;
  prov.inputs = {"o.csv=sha256:ab"};
  auto j = report_to_json(r, prov);
  EXPECT_TRUE(validate_report_json(j).empty());
  EXPECT_EQ(j["dataset"], "2019");
  EXPECT_EQ(j["classifier"], "J48_TREE");
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(j["version"], "0.1.0");
  EXPECT_EQ(j["folds"].size(), 10u);
  EXPECT_EQ(j["inputs"][0], "o.csv=sha256:ab");
  for (auto key : {"tp", "fp", "fn", "tn"}) EXPECT_TRUE(j["pooled"].contains(key));
  EXPECT_TRUE(j["per_class"].contains("TRUE"));

  auto broken = j;
  broken["pooled"]["tp"] = broken["pooled"]["tp"].get<int>() + 1;
  EXPECT_FALSE(validate_report_json(broken).empty());
  broken = j;
  broken["weighted"]["accuracy"] = 1.5;
  EXPECT_FALSE(validate_report_json(broken).empty());
  broken = j;
  broken.erase("folds");
  EXPECT_FALSE(validate_report_json(broken).empty());
  EXPECT_FALSE(validate_report_json(nlohmann::json::array()).empty());
}

TEST(Report, CsvRowsSortedAndFormatted) {
  std::vector<EvaluationReport> reports;
  for (auto name : {"2020", "2018", "2019+2018"}) {
    for (auto k : {ClassifierKind::NaiveBayes, ClassifierKind::J48}) {
      EvaluationReport r;
      r.dataset = name;
      r.kind = k;
      r.pooled = {0, 0, 3, 7};
      r.summary = summarize(r.pooled, 0.6174);
      reports.push_back(r);
    }
  }
  Provenance prov;
  prov.seed = 42;
  std::ostringstream out;
  write_report_csv(out, reports, prov);
  std::istringstream in(out.str());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# ", 0) != 0) lines.push_back(line);
  }
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], kReportHeader);
  EXPECT_EQ(lines[1], "2018,J48,70.00%,70.00%,70.00%,-,70.00%,-,0.617");
  EXPECT_EQ(lines[2].substr(0, 16), "2018,NaiveBayes,");
  EXPECT_EQ(lines[3].substr(0, 14), "2019+2018,J48,");
  EXPECT_EQ(lines[6].substr(0, 16), "2020,NaiveBayes,");
  EXPECT_NE(out.str().find("# seed=42"), std::string::npos);
  EXPECT_EQ(format_roc(std::nullopt), "-");
  EXPECT_EQ(format_percent(0.61017), "61.02%");
}
