#pragma once

#include <iosfwd>
#include <vector>

#include "crowdsmell/common/provenance.hpp"
#include "crowdsmell/metrics/project.hpp"

namespace crowdsmell::metrics {

/// Class-scope vector (61 metrics). Throws UnknownEntity.
MetricVector compute_class_metrics(const ProjectModel& model, const CodeEntityId& class_id);

/// Method-scope vector: the 21 method-proper metrics plus the enclosing
/// class metrics. Abstract methods yield zeros except NOP_method.
MetricVector compute_method_metrics(const ProjectModel& model, const CodeEntityId& method_id);

/// One vector per class, or per method with a body, ordered by
/// (package, class, signature).
std::vector<MetricVector> extract_all(const ProjectModel& model, Scope scope);

/// Identity columns followed by the registry acronyms of `scope`.
std::vector<std::string> metric_csv_header(Scope scope);
void write_metrics_csv(std::ostream& out, const std::vector<MetricVector>& vectors, Scope scope,
                       const Provenance& provenance);

}  // namespace crowdsmell::metrics
