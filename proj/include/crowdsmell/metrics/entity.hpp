#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>

#include "crowdsmell/metrics/registry.hpp"

namespace crowdsmell::metrics {

struct CodeEntityId {
  std::string project;
  std::string package;
  std::string class_name;                       // nested types as Outer.Inner
  std::optional<std::string> method_signature;  // name(Type,...) for method scope

  [[nodiscard]] Scope scope() const { return method_signature ? Scope::Method : Scope::Class; }
  [[nodiscard]] std::string display() const;

  auto operator<=>(const CodeEntityId&) const = default;
  bool operator==(const CodeEntityId&) const = default;
};

struct MetricVector {
  CodeEntityId entity;
  std::map<std::string, double, std::less<>> values;

  [[nodiscard]] double at(std::string_view acronym) const;
  bool operator==(const MetricVector&) const = default;
};

}  // namespace crowdsmell::metrics
