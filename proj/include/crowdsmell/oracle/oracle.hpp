#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crowdsmell/metrics/entity.hpp"

namespace crowdsmell::oracle {

enum class SmellKind { GodClass, LongMethod, FeatureEnvy };

inline constexpr SmellKind kAllSmells[] = {SmellKind::GodClass, SmellKind::LongMethod, SmellKind::FeatureEnvy};

std::string_view to_string(SmellKind smell) noexcept;
/// Accepts GOD_CLASS, god-class, godclass, ... Throws InvalidArgument.
SmellKind parse_smell(std::string_view text);
metrics::Scope scope_of(SmellKind smell) noexcept;

struct LabeledInstance {
  metrics::CodeEntityId entity;
  metrics::MetricVector metrics;
  bool is_smell = false;
  std::string team;
  int year = 0;

  bool operator==(const LabeledInstance&) const = default;
};

struct OracleDataset {
  std::string name;
  SmellKind smell = SmellKind::GodClass;
  std::vector<LabeledInstance> instances;

  [[nodiscard]] std::size_t true_count() const;
  [[nodiscard]] std::size_t false_count() const { return instances.size() - true_count(); }
  [[nodiscard]] std::size_t size() const { return instances.size(); }
};

/// Column layout: team,year,project,package,class,method,<metrics>,is_smell.
std::vector<std::string> oracle_header(SmellKind smell);

/// Parses one team's classification file. When `year` is given, rows with an
/// empty year take it and rows with a different year are rejected.
/// Errors: IoError, SchemaMismatch, BadBoolean, DuplicateRowWithinTeam,
/// NonFiniteFeature.
std::vector<LabeledInstance> ingest_team_file(const std::string& path, SmellKind smell,
                                              std::optional<int> year = std::nullopt);
std::vector<LabeledInstance> ingest_team_text(std::string_view text, SmellKind smell,
                                              std::optional<int> year = std::nullopt,
                                              const std::string& origin = "<memory>");

/// Reads an oracle CSV written by write_oracle. The smell comes from the
/// argument or the "smell=" metadata line; the name from "dataset=" or the
/// file stem. Duplicates are allowed (merged oracles repeat entities).
OracleDataset read_oracle(const std::string& path, std::optional<SmellKind> smell = std::nullopt);
OracleDataset read_oracle_text(std::string_view text, std::optional<SmellKind> smell = std::nullopt,
                               const std::string& fallback_name = "oracle");

/// Writes `extra` comment lines, then smell= and dataset=, then the rows.
void write_oracle(std::ostream& out, const OracleDataset& dataset, const std::vector<std::string>& extra = {});
std::string oracle_to_string(const OracleDataset& dataset, const std::vector<std::string>& extra = {});

/// Concatenation in input order. Name: all "+"-separated parts, sorted
/// descending. Throws MixedSmellKinds, InvalidArgument (empty input).
OracleDataset merge(const std::vector<OracleDataset>& datasets);

struct Composition {
  std::size_t n = 0;
  std::size_t true_count = 0;
  std::size_t false_count = 0;
  std::optional<double> pct_true;   // exact, in [0, 100]
  std::optional<double> pct_false;

  /// Rounded to the nearest integer ("55%"), "-" when undefined.
  [[nodiscard]] std::string display_true() const;
  [[nodiscard]] std::string display_false() const;
};

Composition composition_report(const OracleDataset& dataset);

/// Seeded synthetic oracle with the registry columns of the smell's scope.
/// The first `informative` metrics separate the classes: positives draw from
/// U(6,10), negatives from U(0,4). The rest are U(0,10) noise.
struct SyntheticSpec {
  SmellKind smell = SmellKind::GodClass;
  std::string name = "synthetic";
  std::size_t n_true = 0;
  std::size_t n_false = 0;
  std::size_t informative = 10;
  std::size_t features = 0;  // 0: full registry width for the scope
  int year = 2020;
  std::uint64_t seed = 42;
};

OracleDataset make_synthetic_oracle(const SyntheticSpec& spec);

}  // namespace crowdsmell::oracle
