#include "crowdsmell/eval/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "crowdsmell/common/csv.hpp"
#include "crowdsmell/common/rng.hpp"
#include "crowdsmell/error.hpp"

namespace crowdsmell::eval {

using nlohmann::json;

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

namespace {

Value ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

MetricsSummary one_class(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn) {
  MetricsSummary m;
  m.accuracy = ratio(tp + tn, tp + fp + fn + tn);
  m.tp_rate = ratio(tp, tp + fn);
  m.fp_rate = ratio(fp, fp + tn);
  m.precision = ratio(tp, tp + fp);
  m.recall = m.tp_rate;
  if (m.precision && m.recall && *m.precision + *m.recall > 0) {
    m.f_measure = 2 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

Value weighted(Value a, std::uint64_t wa, Value b, std::uint64_t wb) {
  if ((wa > 0 && !a) || (wb > 0 && !b) || wa + wb == 0) return std::nullopt;
  double sum = 0;
  if (wa > 0) sum += static_cast<double>(wa) * *a;
  if (wb > 0) sum += static_cast<double>(wb) * *b;
  return sum / static_cast<double>(wa + wb);
}

}  // namespace

Summary summarize(const ConfusionMatrix& cm, Value auc_value) {
  Summary s;
  s.true_class = one_class(cm.tp, cm.fp, cm.fn, cm.tn);
  s.false_class = one_class(cm.tn, cm.fn, cm.fp, cm.tp);
  const std::uint64_t wt = cm.tp + cm.fn, wf = cm.fp + cm.tn;
  auto& w = s.weighted;
  w.accuracy = s.true_class.accuracy;
  w.tp_rate = weighted(s.true_class.tp_rate, wt, s.false_class.tp_rate, wf);
  w.fp_rate = weighted(s.true_class.fp_rate, wt, s.false_class.fp_rate, wf);
  w.precision = weighted(s.true_class.precision, wt, s.false_class.precision, wf);
  w.recall = weighted(s.true_class.recall, wt, s.false_class.recall, wf);
  w.f_measure = weighted(s.true_class.f_measure, wt, s.false_class.f_measure, wf);
  s.true_class.roc_auc = s.false_class.roc_auc = w.roc_auc = auc_value;
  return s;
}

Value auc(std::span<const Scored> scored) {
  std::vector<Scored> v(scored.begin(), scored.end());
  std::sort(v.begin(), v.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });
  std::uint64_t positives = 0, negatives = 0, concordant = 0, ties = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    std::uint64_t p = 0, n = 0;
    for (; j < v.size() && v[j].score == v[i].score; ++j) (v[j].label ? p : n)++;
    concordant += p * negatives;
    ties += p * n;
    positives += p;
    negatives += n;
    i = j;
  }
  if (positives == 0 || negatives == 0) return std::nullopt;
  return static_cast<double>(2 * concordant + ties) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::uint8_t> labels, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
  if (labels.size() < k) {
    throw Error(ErrorCode::TooFewInstances,
                std::to_string(labels.size()) + " instances for " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(i);
  if (by_class[0].empty() || by_class[1].empty()) throw Error(ErrorCode::DegenerateData, "folds need both classes");

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t cursor = 0;
  for (int c : {1, 0}) {
    rng.shuffle(std::span<std::size_t>(by_class[c]));
    for (std::size_t idx : by_class[c]) {
      folds[cursor].push_back(idx);
      cursor = (cursor + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

EvaluationReport cross_validate(const learn::TrainingSet& data, const std::string& dataset_name,
                                const learn::TrainParams& params, std::size_t k, std::uint64_t seed,
                                const FoldObserver& observer) {
  auto folds = stratified_folds(data.y, k, seed);
  EvaluationReport report;
  report.dataset = dataset_name;
  report.kind = params.kind;
  report.seed = seed;
  report.k = k;
  report.params = params;
  report.params.seed = seed;
  report.scores.assign(data.rows, 0.0);

  std::vector<Scored> pooled;
  pooled.reserve(data.rows);
  std::vector<std::uint8_t> in_test(data.rows);
  for (std::size_t f = 0; f < k; ++f) {
    std::fill(in_test.begin(), in_test.end(), 0);
    for (auto i : folds[f]) in_test[i] = 1;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(data.rows - folds[f].size());
    for (std::size_t i = 0; i < data.rows; ++i) {
      if (!in_test[i]) train_idx.push_back(i);
    }
    auto train_set = learn::subset(data, train_idx);
    auto test_set = learn::subset(data, folds[f]);
    auto fold_params = params;
    fold_params.seed = derive_seed(seed, f);

    ConfusionMatrix cm;
    try {
      auto model = learn::train(train_set, fold_params);
      if (observer) observer(f, train_set, test_set, model);
      for (std::size_t t = 0; t < test_set.rows; ++t) {
        auto p = model.predict(test_set.row(t));
        bool truth = test_set.y[t] != 0;
        report.scores[folds[f][t]] = p.score;
        pooled.push_back({p.score, truth});
        if (truth) {
          (p.label ? cm.tp : cm.fn)++;
        } else {
          (p.label ? cm.fp : cm.tn)++;
        }
      }
    } catch (const Error& e) {
      throw Error(e.code(), "fold " + std::to_string(f) + ": " + e.what());
    }
    report.folds.push_back(cm);
    report.pooled += cm;
  }
  report.summary = summarize(report.pooled, auc(pooled));
  return report;
}

EvaluationReport cross_validate(const oracle::OracleDataset& dataset, const learn::TrainParams& params,
                                std::size_t k, std::uint64_t seed) {
  return cross_validate(learn::make_training_set(dataset), dataset.name, params, k, seed);
}

namespace {

json value_json(Value v) { return v ? json(*v) : json(nullptr); }

constexpr const char* kSummaryKeys[] = {"accuracy", "tp_rate",   "fp_rate", "precision",
                                        "recall",   "f_measure", "roc_auc"};
constexpr const char* kCountKeys[] = {"tp", "fp", "fn", "tn"};

}  // namespace

json to_json(const MetricsSummary& m) {
  return json{{"accuracy", value_json(m.accuracy)},   {"tp_rate", value_json(m.tp_rate)},
              {"fp_rate", value_json(m.fp_rate)},     {"precision", value_json(m.precision)},
              {"recall", value_json(m.recall)},       {"f_measure", value_json(m.f_measure)},
              {"roc_auc", value_json(m.roc_auc)}};
}

json to_json(const ConfusionMatrix& cm) { return json{{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}}; }

json report_to_json(const EvaluationReport& r, const Provenance& provenance) {
  json folds = json::array();
  for (std::size_t i = 0; i < r.folds.size(); ++i) {
    auto f = to_json(r.folds[i]);
    f["fold"] = i;
    folds.push_back(f);
  }
  json j;
  j["format"] = "crowdsmell-evaluation";
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["dataset"] = r.dataset;
  j["classifier"] = learn::to_string(r.kind);
  j["classifier_name"] = learn::display_name(r.kind);
  j["seed"] = r.seed;
  j["k"] = r.k;
  j["params"] = learn::params_to_json(r.params);
  j["inputs"] = provenance.inputs;
  j["folds"] = folds;
  j["pooled"] = to_json(r.pooled);
  j["per_class"] = {{"TRUE", to_json(r.summary.true_class)}, {"FALSE", to_json(r.summary.false_class)}};
  j["weighted"] = to_json(r.summary.weighted);
  return j;
}

std::vector<std::string> validate_report_json(const json& j) {
  std::vector<std::string> problems;
  auto need = [&](const json& obj, const char* key, auto pred, const char* what) {
    if (!obj.is_object() || !obj.contains(key) || !pred(obj[key])) {
      problems.push_back(std::string(key) + ": expected " + what);
      return false;
    }
    return true;
  };
  auto is_count = [](const json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0); };
  auto is_string = [](const json& v) { return v.is_string(); };
  auto is_summary = [&](const json& v) {
    if (!v.is_object()) return false;
    for (auto key : kSummaryKeys) {
      if (!v.contains(key)) return false;
      const auto& x = v[key];
      if (!x.is_null() && !(x.is_number() && x.get<double>() >= 0.0 && x.get<double>() <= 1.0)) return false;
    }
    return true;
  };
  auto is_matrix = [&](const json& v) {
    if (!v.is_object()) return false;
    for (auto key : kCountKeys) {
      if (!v.contains(key) || !is_count(v[key])) return false;
    }
    return true;
  };
  auto matrix = [](const json& v) {
    return ConfusionMatrix{v["tp"].get<std::uint64_t>(), v["fp"].get<std::uint64_t>(), v["fn"].get<std::uint64_t>(),
                           v["tn"].get<std::uint64_t>()};
  };

  if (!j.is_object()) return {"document: expected object"};
  need(j, "format", [](const json& v) { return v == "crowdsmell-evaluation"; }, "\"crowdsmell-evaluation\"");
  need(j, "dataset", is_string, "string");
  if (need(j, "classifier", is_string, "string")) {
    try {
      learn::parse_kind(j["classifier"].get<std::string>());
    } catch (const Error&) {
      problems.push_back("classifier: unknown kind");
    }
  }
  need(j, "seed", is_count, "non-negative integer");
  need(j, "k", is_count, "non-negative integer");
  bool folds_ok = need(j, "folds", [](const json& v) { return v.is_array(); }, "array");
  bool pooled_ok = need(j, "pooled", is_matrix, "confusion matrix");
  bool weighted_ok = need(j, "weighted", is_summary, "metrics summary with values in [0,1] or null");
  if (need(j, "per_class", [](const json& v) { return v.is_object(); }, "object")) {
    for (auto cls : {"TRUE", "FALSE"}) {
      if (!j["per_class"].contains(cls) || !is_summary(j["per_class"][cls])) {
        problems.push_back(std::string("per_class.") + cls + ": expected metrics summary");
      }
    }
  }
  if (folds_ok) {
    ConfusionMatrix sum;
    bool all_ok = true;
    for (const auto& f : j["folds"]) {
      if (!is_matrix(f)) {
        all_ok = false;
        break;
      }
      sum += matrix(f);
    }
    if (!all_ok) problems.push_back("folds: expected confusion matrices");
    if (all_ok && j.contains("k") && is_count(j["k"]) && j["folds"].size() != j["k"].get<std::size_t>()) {
      problems.push_back("folds: count differs from k");
    }
    if (all_ok && pooled_ok && !(sum == matrix(j["pooled"]))) problems.push_back("pooled: not the sum of folds");
    if (pooled_ok && matrix(j["pooled"]).n() == 0) problems.push_back("pooled: empty");
  }
  if (weighted_ok) {
    const auto& w = j["weighted"];
    if (w["accuracy"].is_number() && w["tp_rate"].is_number() &&
        std::fabs(w["accuracy"].get<double>() - w["tp_rate"].get<double>()) > 1e-10) {
      problems.push_back("weighted: tp_rate differs from accuracy");
    }
  }
  return problems;
}

std::string format_percent(Value v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", *v * 100.0);
  return buf;
}

std::string format_roc(Value v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

void write_report_csv(std::ostream& out, std::vector<EvaluationReport> reports, const Provenance& provenance) {
  std::stable_sort(reports.begin(), reports.end(), [](const EvaluationReport& a, const EvaluationReport& b) {
    if (a.dataset != b.dataset) return a.dataset < b.dataset;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  for (const auto& line : provenance.comment_lines()) out << "# " << line << "\n";
  out << kReportHeader << "\n";
  for (const auto& r : reports) {
    const auto& w = r.summary.weighted;
    out << csv::format_row({r.dataset, std::string(learn::display_name(r.kind)), format_percent(w.accuracy),
                            format_percent(w.tp_rate), format_percent(w.fp_rate), format_percent(w.precision),
                            format_percent(w.recall), format_percent(w.f_measure), format_roc(w.roc_auc)})
        << "\n";
  }
}

}  // namespace crowdsmell::eval
