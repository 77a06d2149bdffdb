#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdsmell/common/provenance.hpp"
#include "crowdsmell/learn/learners.hpp"

namespace crowdsmell::eval {

/// nullopt is UNDEFINED ("-" in text, null in JSON).
using Value = std::optional<double>;

struct ConfusionMatrix {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  [[nodiscard]] std::uint64_t n() const { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricsSummary {
  Value accuracy, tp_rate, fp_rate, precision, recall, f_measure, roc_auc;
  friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

struct Summary {
  MetricsSummary true_class;   // TRUE treated as positive
  MetricsSummary false_class;  // FALSE treated as positive
  MetricsSummary weighted;     // support-weighted mean of the two
};

/// Per-class metrics from a TRUE-positive confusion matrix. The AUC, if
/// given, is copied to both classes and the weighted row.
Summary summarize(const ConfusionMatrix& cm, Value auc = std::nullopt);

struct Scored {
  double score;
  bool label;
};

/// Mann-Whitney pair counting with ties worth half. UNDEFINED without both classes.
Value auc(std::span<const Scored> scored);

/// k disjoint, ascending index sets covering 0..labels.size()-1.
/// Each class is shuffled independently, then dealt round-robin with the
/// fold cursor carried from one class to the next.
/// Errors: InvalidArgument (k < 2), TooFewInstances (n < k), DegenerateData (a class is empty).
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::uint8_t> labels, std::size_t k,
                                                       std::uint64_t seed);

/// Called once per fold after training, before testing.
using FoldObserver = std::function<void(std::size_t fold, const learn::TrainingSet& train,
                                        const learn::TrainingSet& test, const learn::TrainedModel& model)>;

struct EvaluationReport {
  std::string dataset;
  learn::ClassifierKind kind = learn::ClassifierKind::J48;
  std::uint64_t seed = 0;
  std::size_t k = 10;
  learn::TrainParams params;
  std::vector<ConfusionMatrix> folds;
  ConfusionMatrix pooled;
  Summary summary;
  std::vector<double> scores;  // out-of-fold score per instance
};

/// Learner errors are rethrown with a "fold i: " prefix and the original code.
EvaluationReport cross_validate(const learn::TrainingSet& data, const std::string& dataset_name,
                                const learn::TrainParams& params, std::size_t k, std::uint64_t seed,
                                const FoldObserver& observer = {});
EvaluationReport cross_validate(const oracle::OracleDataset& dataset, const learn::TrainParams& params,
                                std::size_t k = 10, std::uint64_t seed = kDefaultSeed);

nlohmann::json to_json(const MetricsSummary& m);
nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json report_to_json(const EvaluationReport& report, const Provenance& provenance = {});
/// Empty when the document has the report layout and its internal identities hold.
std::vector<std::string> validate_report_json(const nlohmann::json& j);

std::string format_percent(Value v);  // "61.02%" or "-"
std::string format_roc(Value v);      // "0.617" or "-"

inline constexpr const char* kReportHeader =
    "Dataset,Classifier,Accuracy,TP Rate,FP Rate,Precision,Recall,F-Measure,ROC Area";

/// Rows sorted by dataset name, then classifier kind.
void write_report_csv(std::ostream& out, std::vector<EvaluationReport> reports, const Provenance& provenance = {});

}  // namespace crowdsmell::eval
