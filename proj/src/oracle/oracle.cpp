#include "crowdsmell/oracle/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "crowdsmell/common/csv.hpp"
#include "crowdsmell/common/rng.hpp"
#include "crowdsmell/error.hpp"

namespace crowdsmell::oracle {

using metrics::CodeEntityId;
using metrics::MetricVector;
using metrics::Scope;

namespace {

constexpr std::size_t kIdentityColumns = 6;

std::string normalize(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

bool parse_bool(std::string_view text, bool& out) {
  std::string up = normalize(text);
  if (up == "TRUE") {
    out = true;
    return true;
  }
  if (up == "FALSE") {
    out = false;
    return true;
  }
  return false;
}

int parse_year(std::string_view text, const std::string& where) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::SchemaMismatch, where + ": bad year '" + std::string(text) + "'");
  }
  return value;
}

void check_header(const csv::Row& header, SmellKind smell, const std::string& origin) {
  const auto expected = oracle_header(smell);
  const std::size_t metric_cols = expected.size() - kIdentityColumns - 1;
  if (header.size() != expected.size()) {
    std::size_t got = header.size() >= kIdentityColumns + 1 ? header.size() - kIdentityColumns - 1 : 0;
    throw Error(ErrorCode::SchemaMismatch, origin + ": " + std::string(to_string(smell)) + " requires " +
                                               std::to_string(metric_cols) + " metric columns, found " +
                                               std::to_string(got));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (header[i] != expected[i]) {
      throw Error(ErrorCode::SchemaMismatch,
                  origin + ": column " + std::to_string(i + 1) + " is '" + header[i] + "', expected '" + expected[i] + "'");
    }
  }
}

std::vector<LabeledInstance> parse_rows(const csv::Document& doc, SmellKind smell, std::optional<int> year,
                                        const std::string& origin, bool reject_duplicates) {
  check_header(doc.header, smell, origin);
  const auto& acronyms = metrics::acronyms_for(scope_of(smell));
  const bool method_scope = scope_of(smell) == Scope::Method;
  std::vector<LabeledInstance> out;
  out.reserve(doc.rows.size());
  std::set<std::pair<CodeEntityId, std::string>> seen;
  std::size_t line = 1;
  for (const auto& row : doc.rows) {
    ++line;
    const std::string where = origin + ": row " + std::to_string(line - 1);
    if (row.size() != doc.header.size()) {
      throw Error(ErrorCode::SchemaMismatch, where + " has " + std::to_string(row.size()) + " fields, expected " +
                                                 std::to_string(doc.header.size()));
    }
    LabeledInstance inst;
    inst.team = row[0];
    if (row[1].empty()) {
      if (!year) throw Error(ErrorCode::SchemaMismatch, where + ": missing year");
      inst.year = *year;
    } else {
      inst.year = parse_year(row[1], where);
      if (year && inst.year != *year) {
        throw Error(ErrorCode::SchemaMismatch,
                    where + ": year " + row[1] + " does not match " + std::to_string(*year));
      }
    }
    inst.entity = CodeEntityId{row[2], row[3], row[4], std::nullopt};
    if (method_scope) {
      if (row[5].empty()) throw Error(ErrorCode::SchemaMismatch, where + ": method column empty for method-scope smell");
      inst.entity.method_signature = row[5];
    } else if (!row[5].empty()) {
      throw Error(ErrorCode::SchemaMismatch, where + ": method column must be empty for GOD_CLASS");
    }
    inst.metrics.entity = inst.entity;
    for (std::size_t i = 0; i < acronyms.size(); ++i) {
      double v = 0;
      try {
        v = csv::parse_real(row[kIdentityColumns + i]);
      } catch (const Error&) {
        throw Error(ErrorCode::SchemaMismatch, where + ": " + acronyms[i] + " is not a number");
      }
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, where + ": " + acronyms[i] + " is not finite");
      inst.metrics.values.emplace(acronyms[i], v);
    }
    if (!parse_bool(row.back(), inst.is_smell)) {
      throw Error(ErrorCode::BadBoolean, where + ": is_smell '" + row.back() + "' is not TRUE/FALSE");
    }
    if (reject_duplicates && !seen.emplace(inst.entity, inst.team).second) {
      throw Error(ErrorCode::DuplicateRowWithinTeam,
                  where + ": duplicate " + inst.entity.display() + " for team '" + inst.team + "'");
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::optional<std::string> metadata(const std::vector<std::string>& comments, std::string_view key) {
  std::optional<std::string> found;
  for (const auto& c : comments) {
    if (c.size() > key.size() && c.compare(0, key.size(), key) == 0 && c[key.size()] == '=') {
      found = c.substr(key.size() + 1);
    }
  }
  return found;
}

std::vector<std::string> split_name(const std::string& name) {
  std::vector<std::string> parts;
  std::stringstream ss(name);
  std::string part;
  while (std::getline(ss, part, '+')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::string percent(const std::optional<double>& pct) {
  if (!pct) return "-";
  return std::to_string(static_cast<long long>(std::floor(*pct + 0.5))) + "%";
}

}  // namespace

std::string_view to_string(SmellKind smell) noexcept {
  switch (smell) {
    case SmellKind::GodClass:
      return "GOD_CLASS";
    case SmellKind::LongMethod:
      return "LONG_METHOD";
    case SmellKind::FeatureEnvy:
      return "FEATURE_ENVY";
  }
  return "?";
}

SmellKind parse_smell(std::string_view text) {
  const std::string key = normalize(text);
  for (SmellKind s : kAllSmells) {
    if (normalize(to_string(s)) == key) return s;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown smell '" + std::string(text) + "' (GOD_CLASS, LONG_METHOD, FEATURE_ENVY)");
}

metrics::Scope scope_of(SmellKind smell) noexcept {
  return smell == SmellKind::GodClass ? Scope::Class : Scope::Method;
}

std::size_t OracleDataset::true_count() const {
  return static_cast<std::size_t>(
      std::count_if(instances.begin(), instances.end(), [](const LabeledInstance& i) { return i.is_smell; }));
}

std::vector<std::string> oracle_header(SmellKind smell) {
  std::vector<std::string> header{"team", "year", "project", "package", "class", "method"};
  for (const auto& a : metrics::acronyms_for(scope_of(smell))) header.push_back(a);
  header.emplace_back("is_smell");
  return header;
}

std::vector<LabeledInstance> ingest_team_file(const std::string& path, SmellKind smell, std::optional<int> year) {
  return parse_rows(csv::read_file(path), smell, year, path, true);
}

std::vector<LabeledInstance> ingest_team_text(std::string_view text, SmellKind smell, std::optional<int> year,
                                              const std::string& origin) {
  return parse_rows(csv::parse(text), smell, year, origin, true);
}

OracleDataset read_oracle_text(std::string_view text, std::optional<SmellKind> smell,
                               const std::string& fallback_name) {
  auto doc = csv::parse(text);
  OracleDataset out;
  if (!smell) {
    auto tag = metadata(doc.comments, "smell");
    if (!tag) throw Error(ErrorCode::SchemaMismatch, fallback_name + ": no smell= metadata; pass the smell explicitly");
    smell = parse_smell(*tag);
  }
  out.smell = *smell;
  out.name = metadata(doc.comments, "dataset").value_or(fallback_name);
  out.instances = parse_rows(doc, *smell, std::nullopt, fallback_name, false);
  return out;
}

OracleDataset read_oracle(const std::string& path, std::optional<SmellKind> smell) {
  auto doc = csv::read_file(path);
  OracleDataset out;
  if (!smell) {
    auto tag = metadata(doc.comments, "smell");
    if (!tag) throw Error(ErrorCode::SchemaMismatch, path + ": no smell= metadata; pass the smell explicitly");
    smell = parse_smell(*tag);
  }
  out.smell = *smell;
  out.name = metadata(doc.comments, "dataset").value_or(std::filesystem::path(path).stem().string());
  out.instances = parse_rows(doc, *smell, std::nullopt, path, false);
  return out;
}

void write_oracle(std::ostream& out, const OracleDataset& dataset, const std::vector<std::string>& extra) {
  for (const auto& line : extra) out << "# " << line << '\n';
  out << "# smell=" << to_string(dataset.smell) << '\n';
  out << "# dataset=" << dataset.name << '\n';
  out << csv::format_row(oracle_header(dataset.smell)) << '\n';
  const auto& acronyms = metrics::acronyms_for(scope_of(dataset.smell));
  csv::Row row;
  for (const auto& inst : dataset.instances) {
    row.clear();
    row.push_back(inst.team);
    row.push_back(std::to_string(inst.year));
    row.push_back(inst.entity.project);
    row.push_back(inst.entity.package);
    row.push_back(inst.entity.class_name);
    row.push_back(inst.entity.method_signature.value_or(""));
    for (const auto& a : acronyms) row.push_back(csv::format_real(inst.metrics.at(a)));
    row.emplace_back(inst.is_smell ? "TRUE" : "FALSE");
    out << csv::format_row(row) << '\n';
  }
}

std::string oracle_to_string(const OracleDataset& dataset, const std::vector<std::string>& extra) {
  std::ostringstream out;
  write_oracle(out, dataset, extra);
  return out.str();
}

OracleDataset merge(const std::vector<OracleDataset>& datasets) {
  if (datasets.empty()) throw Error(ErrorCode::InvalidArgument, "merge needs at least one dataset");
  OracleDataset out;
  out.smell = datasets.front().smell;
  std::vector<std::string> parts;
  std::size_t total = 0;
  for (const auto& d : datasets) {
    if (d.smell != out.smell) {
      throw Error(ErrorCode::MixedSmellKinds, "cannot merge " + std::string(to_string(d.smell)) + " dataset '" +
                                                  d.name + "' into " + std::string(to_string(out.smell)));
    }
    auto p = split_name(d.name);
    parts.insert(parts.end(), p.begin(), p.end());
    total += d.instances.size();
  }
  std::sort(parts.begin(), parts.end(), std::greater<>());
  for (const auto& p : parts) out.name += (out.name.empty() ? "" : "+") + p;
  out.instances.reserve(total);
  for (const auto& d : datasets) out.instances.insert(out.instances.end(), d.instances.begin(), d.instances.end());
  return out;
}

std::string Composition::display_true() const { return percent(pct_true); }
std::string Composition::display_false() const { return percent(pct_false); }

Composition composition_report(const OracleDataset& dataset) {
  Composition c;
  c.n = dataset.size();
  c.true_count = dataset.true_count();
  c.false_count = c.n - c.true_count;
  if (c.n > 0) {
    c.pct_true = 100.0 * static_cast<double>(c.true_count) / static_cast<double>(c.n);
    c.pct_false = 100.0 * static_cast<double>(c.false_count) / static_cast<double>(c.n);
  }
  return c;
}

OracleDataset make_synthetic_oracle(const SyntheticSpec& spec) {
  const auto& acronyms = metrics::acronyms_for(scope_of(spec.smell));
  const std::size_t width = spec.features == 0 ? acronyms.size() : std::min(spec.features, acronyms.size());
  if (spec.informative > width) {
    throw Error(ErrorCode::InvalidArgument, "more informative features than columns");
  }
  Rng rng(spec.seed);
  OracleDataset out;
  out.name = spec.name;
  out.smell = spec.smell;
  const std::size_t n = spec.n_true + spec.n_false;
  std::vector<bool> labels(n, false);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(spec.n_true), true);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = rng.index(i);
    bool tmp = labels[i - 1];
    labels[i - 1] = labels[j];
    labels[j] = tmp;
  }
  const bool method_scope = scope_of(spec.smell) == Scope::Method;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledInstance inst;
    inst.team = "T" + std::to_string(i % 7 + 1);
    inst.year = spec.year;
    inst.entity = CodeEntityId{"synthetic", "gen." + spec.name, "C" + std::to_string(i), std::nullopt};
    if (method_scope) inst.entity.method_signature = "m" + std::to_string(i) + "()";
    inst.is_smell = labels[i];
    inst.metrics.entity = inst.entity;
    for (std::size_t f = 0; f < acronyms.size(); ++f) {
      double v = 0.0;
      if (f < spec.informative) {
        v = inst.is_smell ? rng.uniform(6.0, 10.0) : rng.uniform(0.0, 4.0);
      } else if (f < width) {
        v = rng.uniform(0.0, 10.0);
      }
      inst.metrics.values.emplace(acronyms[f], v);
    }
    out.instances.push_back(std::move(inst));
  }
  return out;
}

}  // namespace crowdsmell::oracle
