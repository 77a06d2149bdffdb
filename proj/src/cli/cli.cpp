#include "crowdsmell/cli/cli.hpp"

#include <CLI11.hpp>
#include <signal.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "crowdsmell/common/csv.hpp"
#include "crowdsmell/common/provenance.hpp"
#include "crowdsmell/error.hpp"
#include "crowdsmell/eval/evaluation.hpp"
#include "crowdsmell/learn/learners.hpp"
#include "crowdsmell/metrics/extractor.hpp"
#include "crowdsmell/oracle/oracle.hpp"
#include "crowdsmell/review/review.hpp"
#include "crowdsmell/stats/anova.hpp"

namespace crowdsmell::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string input_ref(const std::string& path) { return path + "=sha256:" + file_digest(path); }

// Digest over (relative path, file digest) of every .java file, sorted by path.
std::string tree_ref(const std::string& root) {
  std::vector<std::pair<std::string, std::string>> files;
  std::error_code ec;
  if (fs::is_directory(root, ec)) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().extension() == ".java") {
        files.emplace_back(fs::relative(entry.path(), root).generic_string(), file_digest(entry.path().string()));
      }
    }
  }
  std::sort(files.begin(), files.end());
  std::string manifest;
  for (const auto& [path, digest] : files) manifest += path + '\0' + digest + '\n';
  return root + "=sha256:" + sha256_hex(manifest);
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::IoError, "write failed for " + path);
  }
  fs::rename(tmp, target);
}

json provenance_json(const Provenance& p) {
  return json{{"tool", kToolName}, {"version", kToolVersion}, {"seed", p.seed ? json(*p.seed) : json(nullptr)},
              {"inputs", p.inputs}};
}

oracle::SmellKind smell_arg(const std::string& text) {
  try {
    return oracle::parse_smell(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::UsageError, e.what());
  }
}

learn::ClassifierKind kind_arg(const std::string& text) {
  try {
    return learn::parse_kind(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::UsageError, e.what());
  }
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
}

struct Options {
  std::uint64_t seed = kDefaultSeed;
  // extract
  std::string root, scope = "class", project, out = "-";
  // oracle
  std::string smell, name, in;
  std::vector<std::string> inputs;
  std::optional<int> year;
  std::size_t n_true = 0, n_false = 0, informative = 10;
  bool as_json = false;
  // learn / evaluate
  std::string oracle_path, kind, format;
  std::vector<std::string> kinds;
  std::size_t k = 10;
  std::string out_dir;
  // anova
  std::vector<std::string> exclude;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t compact_every = 1000;
};

int cmd_extract(const Options& o, std::ostream& out, std::ostream& err) {
  metrics::Scope scope;
  if (o.scope == "class") {
    scope = metrics::Scope::Class;
  } else if (o.scope == "method") {
    scope = metrics::Scope::Method;
  } else {
    throw Error(ErrorCode::UsageError, "--scope must be class or method");
  }
  auto model = metrics::ProjectModel::parse_project(o.root, o.project);
  for (const auto& d : model.diagnostics()) err << "warning: " << d.file << ":" << d.line << ": " << d.message << "\n";
  auto vectors = metrics::extract_all(model, scope);
  Provenance prov{o.seed, {tree_ref(o.root)}};
  std::ostringstream s;
  metrics::write_metrics_csv(s, vectors, scope, prov);
  write_output(o.out, s.str(), out);
  err << "extracted " << vectors.size() << " " << o.scope << " vectors from " << model.file_count() << " files\n";
  return 0;
}

std::vector<std::string> oracle_comments(const Provenance& prov) { return prov.comment_lines(); }

int cmd_oracle_build(const Options& o, std::ostream& out, std::ostream& err) {
  auto smell = smell_arg(o.smell);
  oracle::OracleDataset ds;
  ds.smell = smell;
  Provenance prov{o.seed, {}};
  std::set<int, std::greater<>> years;
  for (const auto& path : o.inputs) {
    auto rows = oracle::ingest_team_file(path, smell, o.year);
    prov.inputs.push_back(input_ref(path));
    for (auto& r : rows) {
      years.insert(r.year);
      ds.instances.push_back(std::move(r));
    }
  }
  if (!o.name.empty()) {
    ds.name = o.name;
  } else {
    for (int y : years) ds.name += (ds.name.empty() ? "" : "+") + std::to_string(y);
    if (ds.name.empty()) ds.name = "oracle";
  }
  write_output(o.out, oracle::oracle_to_string(ds, oracle_comments(prov)), out);
  err << "oracle " << ds.name << ": " << ds.size() << " instances from " << o.inputs.size() << " files\n";
  return 0;
}

int cmd_oracle_merge(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<oracle::OracleDataset> parts;
  Provenance prov{o.seed, {}};
  for (const auto& path : o.inputs) {
    parts.push_back(oracle::read_oracle(path));
    prov.inputs.push_back(input_ref(path));
  }
  auto merged = oracle::merge(parts);
  write_output(o.out, oracle::oracle_to_string(merged, oracle_comments(prov)), out);
  err << "merged " << merged.name << ": " << merged.size() << " instances\n";
  return 0;
}

int cmd_oracle_report(const Options& o, std::ostream& out, std::ostream&) {
  json rows = json::array();
  std::ostringstream text;
  text << "Dataset,Code Smell,Total,True,% True,False,% False\n";
  Provenance prov{o.seed, {}};
  for (const auto& path : o.inputs) {
    auto ds = oracle::read_oracle(path);
    prov.inputs.push_back(input_ref(path));
    auto c = oracle::composition_report(ds);
    text << csv::format_row({ds.name, std::string(oracle::to_string(ds.smell)), std::to_string(c.n),
                             std::to_string(c.true_count), c.display_true(), std::to_string(c.false_count),
                             c.display_false()})
         << "\n";
    rows.push_back({{"dataset", ds.name},
                    {"smell", oracle::to_string(ds.smell)},
                    {"total", c.n},
                    {"true", c.true_count},
                    {"false", c.false_count},
                    {"pct_true", c.pct_true ? json(*c.pct_true) : json(nullptr)},
                    {"pct_false", c.pct_false ? json(*c.pct_false) : json(nullptr)}});
  }
  if (o.as_json) {
    auto j = provenance_json(prov);
    j["composition"] = rows;
    write_output(o.out, j.dump(2) + "\n", out);
  } else {
    std::string header;
    for (const auto& line : prov.comment_lines()) header += "# " + line + "\n";
    write_output(o.out, header + text.str(), out);
  }
  return 0;
}

int cmd_oracle_synth(const Options& o, std::ostream& out, std::ostream& err) {
  oracle::SyntheticSpec spec;
  spec.smell = smell_arg(o.smell);
  spec.name = o.name.empty() ? "synthetic" : o.name;
  spec.n_true = o.n_true;
  spec.n_false = o.n_false;
  spec.informative = o.informative;
  spec.year = o.year.value_or(2020);
  spec.seed = o.seed;
  auto ds = oracle::make_synthetic_oracle(spec);
  Provenance prov{o.seed, {}};
  write_output(o.out, oracle::oracle_to_string(ds, oracle_comments(prov)), out);
  err << "synthetic oracle " << ds.name << ": " << ds.true_count() << " TRUE, " << ds.false_count() << " FALSE\n";
  return 0;
}

learn::TrainParams train_params(const Options& o, learn::ClassifierKind kind) {
  learn::TrainParams p;
  p.kind = kind;
  p.seed = o.seed;
  return p;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  auto kind = kind_arg(o.kind);
  auto ds = oracle::read_oracle(o.oracle_path);
  auto model = learn::train(ds, train_params(o, kind));
  auto j = model.to_json();
  j["dataset"] = ds.name;
  j["smell"] = oracle::to_string(ds.smell);
  j["provenance"] = provenance_json(Provenance{o.seed, {input_ref(o.oracle_path)}});
  write_output(o.out, j.dump() + "\n", out);
  err << "trained " << learn::display_name(kind) << " on " << ds.name << " (" << ds.size() << " instances)\n";
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  auto kind = kind_arg(o.kind);
  std::string format = o.format.empty() ? (ends_with(lower(o.out), ".csv") ? "csv" : "json") : lower(o.format);
  if (format != "json" && format != "csv") throw Error(ErrorCode::UsageError, "--format must be json or csv");
  auto ds = oracle::read_oracle(o.oracle_path);
  auto report = eval::cross_validate(ds, train_params(o, kind), o.k, o.seed);
  Provenance prov{o.seed, {input_ref(o.oracle_path)}};
  if (format == "json") {
    write_output(o.out, eval::report_to_json(report, prov).dump(2) + "\n", out);
  } else {
    std::ostringstream s;
    eval::write_report_csv(s, {report}, prov);
    write_output(o.out, s.str(), out);
  }
  err << ds.name << " " << learn::display_name(kind) << ": ROC " << eval::format_roc(report.summary.weighted.roc_auc)
      << "\n";
  return 0;
}

int cmd_evaluate_all(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<learn::ClassifierKind> kinds;
  if (o.kinds.empty()) {
    kinds.assign(std::begin(learn::kAllKinds), std::end(learn::kAllKinds));
  } else {
    for (const auto& k : o.kinds) kinds.push_back(kind_arg(k));
  }
  std::map<oracle::SmellKind, std::vector<eval::EvaluationReport>> by_smell;
  std::map<oracle::SmellKind, Provenance> prov_by_smell;
  json index = json::array();
  for (const auto& path : o.inputs) {
    auto ds = oracle::read_oracle(path);
    auto ref = input_ref(path);
    auto& prov = prov_by_smell[ds.smell];
    prov.seed = o.seed;
    prov.inputs.push_back(ref);
    auto data = learn::make_training_set(ds);
    for (auto kind : kinds) {
      auto start = std::chrono::steady_clock::now();
      auto report = eval::cross_validate(data, ds.name, train_params(o, kind), o.k, o.seed);
      double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      auto rel = fs::path("reports") / lower(std::string(oracle::to_string(ds.smell))) / ds.name /
                 (lower(std::string(learn::to_string(kind))) + ".json");
      write_output((fs::path(o.out_dir) / rel).string(),
                   eval::report_to_json(report, Provenance{o.seed, {ref}}).dump(2) + "\n", out);
      index.push_back({{"oracle", path},
                       {"dataset", ds.name},
                       {"smell", oracle::to_string(ds.smell)},
                       {"classifier", learn::to_string(kind)},
                       {"report", rel.generic_string()},
                       {"roc_auc", report.summary.weighted.roc_auc ? json(*report.summary.weighted.roc_auc) : json(nullptr)},
                       {"seconds", seconds}});
      err << oracle::to_string(ds.smell) << " " << ds.name << " " << learn::display_name(kind) << ": ROC "
          << eval::format_roc(report.summary.weighted.roc_auc) << " (" << seconds << " s)\n";
      report.scores.clear();
      by_smell[ds.smell].push_back(std::move(report));
    }
  }
  std::size_t rows = 0;
  for (const auto& [smell, reports] : by_smell) {
    std::ostringstream s;
    eval::write_report_csv(s, reports, prov_by_smell[smell]);
    write_output((fs::path(o.out_dir) / (lower(std::string(oracle::to_string(smell))) + ".csv")).string(), s.str(), out);
    rows += reports.size();
  }
  Provenance all{o.seed, {}};
  for (const auto& [smell, p] : prov_by_smell) all.inputs.insert(all.inputs.end(), p.inputs.begin(), p.inputs.end());
  auto j = provenance_json(all);
  j["k"] = o.k;
  j["models"] = index;
  write_output((fs::path(o.out_dir) / "index.json").string(), j.dump(2) + "\n", out);
  err << rows << " models evaluated\n";
  return 0;
}

int cmd_anova(const Options& o, std::ostream& out, std::ostream&) {
  std::ifstream in(o.in, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + o.in);
  std::ostringstream text;
  text << in.rdbuf();
  std::set<std::string> exclude(o.exclude.begin(), o.exclude.end());
  auto result = stats::one_way_anova(stats::read_roc_table(text.str(), exclude));
  auto j = stats::to_json(result);
  j["excluded_datasets"] = o.exclude;
  j["provenance"] = provenance_json(Provenance{o.seed, {input_ref(o.in)}});
  write_output(o.out, j.dump(2) + "\n", out);
  return 0;
}

int cmd_serve(const Options& o, std::ostream&, std::ostream& err) {
  review::ReviewService service({o.root, o.compact_every, review::utc_now});
  review::HttpServer server(service);
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  int port = server.start(o.host, o.port);
  err << json{{"event", "listening"}, {"host", o.host}, {"port", port}}.dump() << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  err << json{{"event", "stopped"}, {"signal", sig}}.dump() << std::endl;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crowd-sourced code smell oracles: metric extraction, learning, evaluation and review.", "crowdsmell"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
  app.require_subcommand(1);
  Options o;
  std::function<int(const Options&, std::ostream&, std::ostream&)> action;

  auto seed_opt = [&o](CLI::App* sub) { sub->add_option("--seed", o.seed, "Random seed (default 42)"); };

  auto* extract = app.add_subcommand("extract", "Extract class or method metrics from a Java source tree");
  extract->add_option("--root", o.root, "Project source directory")->required();
  extract->add_option("--scope", o.scope, "class or method")->check(CLI::IsMember({"class", "method"}));
  extract->add_option("--project", o.project, "Project name (default: directory name)");
  extract->add_option("--out", o.out, "Output CSV ('-' for stdout)");
  seed_opt(extract);
  extract->callback([&] { action = cmd_extract; });

  auto* orc = app.add_subcommand("oracle", "Build, merge, report on or synthesize oracles");
  orc->require_subcommand(1);
  auto* build = orc->add_subcommand("build", "Ingest team classification files into one oracle");
  build->add_option("--smell", o.smell, "GOD_CLASS, LONG_METHOD or FEATURE_ENVY")->required();
  build->add_option("--inputs", o.inputs, "Team classification CSV files")->required();
  build->add_option("--year", o.year, "Year to assign and enforce");
  build->add_option("--name", o.name, "Dataset name (default: the years)");
  build->add_option("--out", o.out, "Output oracle CSV");
  seed_opt(build);
  build->callback([&] { action = cmd_oracle_build; });
  auto* merge = orc->add_subcommand("merge", "Concatenate oracles of one smell");
  merge->add_option("--inputs", o.inputs, "Oracle CSV files")->required();
  merge->add_option("--out", o.out, "Output oracle CSV");
  seed_opt(merge);
  merge->callback([&] { action = cmd_oracle_merge; });
  auto* report = orc->add_subcommand("report", "Composition table of one or more oracles");
  report->add_option("--in", o.inputs, "Oracle CSV files")->required();
  report->add_flag("--json", o.as_json, "Emit JSON instead of CSV");
  report->add_option("--out", o.out, "Output file");
  seed_opt(report);
  report->callback([&] { action = cmd_oracle_report; });
  auto* synth = orc->add_subcommand("synth", "Generate a seeded synthetic oracle");
  synth->add_option("--smell", o.smell, "Smell kind")->required();
  synth->add_option("--true", o.n_true, "TRUE instances")->required();
  synth->add_option("--false", o.n_false, "FALSE instances")->required();
  synth->add_option("--informative", o.informative, "Informative metric columns");
  synth->add_option("--name", o.name, "Dataset name");
  synth->add_option("--year", o.year, "Year column value");
  synth->add_option("--out", o.out, "Output oracle CSV");
  seed_opt(synth);
  synth->callback([&] { action = cmd_oracle_synth; });

  auto* train = app.add_subcommand("train", "Train one classifier on an oracle");
  train->add_option("--oracle", o.oracle_path, "Oracle CSV")->required();
  train->add_option("--kind", o.kind, "Classifier kind")->required();
  train->add_option("--out", o.out, "Output model JSON");
  seed_opt(train);
  train->callback([&] { action = cmd_train; });

  auto* evaluate = app.add_subcommand("evaluate", "Stratified k-fold cross-validation of one classifier");
  evaluate->add_option("--oracle", o.oracle_path, "Oracle CSV")->required();
  evaluate->add_option("--kind", o.kind, "Classifier kind")->required();
  evaluate->add_option("--k", o.k, "Folds")->check(CLI::Range(2, 1000));
  evaluate->add_option("--out", o.out, "Report path (.json or .csv)");
  evaluate->add_option("--format", o.format, "json or csv (default: from --out)");
  seed_opt(evaluate);
  evaluate->callback([&] { action = cmd_evaluate; });

  auto* all = app.add_subcommand("evaluate-all", "Cross-validate every classifier on every oracle");
  all->add_option("--oracles", o.inputs, "Oracle CSV files")->required();
  all->add_option("--kinds", o.kinds, "Classifier kinds (default: all six)");
  all->add_option("--k", o.k, "Folds")->check(CLI::Range(2, 1000));
  all->add_option("--out-dir", o.out_dir, "Output directory")->required();
  seed_opt(all);
  all->callback([&] { action = cmd_evaluate_all; });

  auto* anova = app.add_subcommand("anova", "One-way ANOVA of ROC values grouped by classifier");
  anova->add_option("--in", o.in, "CSV with header classifier,dataset,roc")->required();
  anova->add_option("--exclude-dataset", o.exclude, "Datasets to leave out");
  anova->add_option("--out", o.out, "Output JSON");
  seed_opt(anova);
  anova->callback([&] { action = cmd_anova; });

  auto* serve = app.add_subcommand("serve", "Run the review HTTP service");
  serve->add_option("--root", o.root, "Directory holding projects and service state")->required();
  serve->add_option("--port", o.port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--compact-every", o.compact_every, "Log entries between snapshots");
  serve->callback([&] { action = cmd_serve; });

  std::vector<std::string> argv_storage{"crowdsmell"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "UsageError", e.what());
    return 2;
  }

  try {
    return action(o, out, err);
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
    return e.code() == ErrorCode::UsageError ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    report_error(err, "IoError", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what());
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace crowdsmell::cli
