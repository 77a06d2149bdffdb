#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crowdsmell::metrics {

enum class Scope { Class, Method };

std::string_view to_string(Scope scope) noexcept;

struct MetricDescriptor {
  std::string_view acronym;
  std::string_view full_name;
  Scope scope;
  std::string_view definition_note;
};

/// All metrics in registry order: 61 class-scope entries followed by the
/// 21 method-proper entries (suffixed "_method").
std::span<const MetricDescriptor> registry();

/// Column set of a vector at the given scope: 61 names for Class, the same
/// 61 followed by the 21 method-proper names (82) for Method.
const std::vector<std::string>& acronyms_for(Scope scope);

const MetricDescriptor* find_metric(std::string_view acronym);

inline constexpr std::size_t kClassMetricCount = 61;
inline constexpr std::size_t kMethodProperMetricCount = 21;
inline constexpr std::size_t kMethodMetricCount = kClassMetricCount + kMethodProperMetricCount;

}  // namespace crowdsmell::metrics
