#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace crowdsmell::stats {

/// Regularized incomplete beta I_x(a, b). Continued fraction (modified Lentz),
/// evaluated on whichever side of the symmetry point converges faster.
double incomplete_beta(double x, double a, double b);

/// P(F > f) for the F distribution with (df1, df2) degrees of freedom.
/// Errors: InvalidDegreesOfFreedom (df < 1), InvalidArgument (f NaN).
double f_survival(double f, double df1, double df2);

/// Group label -> values, e.g. classifier kind -> ROC values.
using GroupTable = std::map<std::string, std::vector<double>>;

struct AnovaResult {
  double f_statistic = 0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1;
  double ss_between = 0;
  double ss_within = 0;
  double grand_mean = 0;
  std::map<std::string, double> group_means;
  /// Every value identical: F=0 and p=1 by convention.
  bool degenerate = false;
};

/// Errors: TooFewGroups (< 2 groups), InvalidArgument (a group with < 2 values
/// or a non-finite value), DegenerateData (zero within-group variance but
/// distinct group means).
AnovaResult one_way_anova(const GroupTable& groups);

/// Reads `classifier,dataset,roc` rows grouped by classifier, skipping the
/// listed datasets. Errors: SchemaMismatch, InvalidArgument (roc outside [0,1]).
GroupTable read_roc_table(const std::string& text, const std::set<std::string>& exclude_datasets = {});

nlohmann::json to_json(const AnovaResult& r);

}  // namespace crowdsmell::stats
