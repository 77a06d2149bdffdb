#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crowdsmell/cli/cli.hpp"
#include "crowdsmell/common/csv.hpp"
#include "crowdsmell/common/provenance.hpp"
#include "crowdsmell/eval/evaluation.hpp"
#include "crowdsmell/oracle/oracle.hpp"

using namespace crowdsmell;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kData = CROWDSMELL_TEST_DATA;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json error_of(const Result& r) {
  auto line = r.err.substr(0, r.err.find('\n'));
  return json::parse(line).at("error");
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("crowdsmell-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string synth(const std::string& smell, std::size_t t, std::size_t f, const std::string& name, int year,
                    std::uint64_t seed = 42) {
    auto out = path(smell + "-" + name + ".csv");
    auto r = run({"oracle", "synth", "--smell", smell, "--true", std::to_string(t), "--false", std::to_string(f),
                  "--name", name, "--year", std::to_string(year), "--seed", std::to_string(seed), "--out", out});
    EXPECT_EQ(r.code, 0) << r.err;
    return out;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, VersionAndHelp) {
  auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("crowdsmell 0.1.0"), std::string::npos);
  auto h = run({"--help"});
  EXPECT_EQ(h.code, 0);
  for (const char* sub : {"extract", "oracle", "train", "evaluate", "evaluate-all", "anova", "serve"}) {
    EXPECT_NE(h.out.find(sub), std::string::npos) << sub;
  }
}

TEST_F(Cli, UsageErrorsExitTwoWithJson) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"evaluate", "--kind", "J48"},
           {"evaluate", "--oracle", "x.csv", "--kind", "knn"},
           {"evaluate", "--oracle", "x.csv", "--kind", "J48", "--k", "1"},
           {"extract", "--root", ".", "--scope", "package"},
           {"oracle", "synth", "--smell", "SPAGHETTI", "--true", "1", "--false", "1"}}) {
    auto r = run(args);
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_EQ(error_of(r).at("code"), "UsageError") << r.err;
    EXPECT_TRUE(r.out.empty());
  }
}

TEST_F(Cli, DataErrorsExitOne) {
  auto missing = run({"evaluate", "--oracle", path("missing.csv"), "--kind", "J48"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(error_of(missing).at("code"), "IoError");

  std::ofstream(path("bad.csv")) << "classifier,dataset,auc\nJ48,a,0.5\n";
  auto bad = run({"anova", "--in", path("bad.csv")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(error_of(bad).at("code"), "SchemaMismatch");

  auto empty = run({"extract", "--root", kData + "/data"});
  EXPECT_EQ(empty.code, 1);
  EXPECT_EQ(error_of(empty).at("code"), "EmptyProject");
}

TEST_F(Cli, ExtractCarriesProvenanceAndIsDeterministic) {
  auto root = kData + "/fixtures/java/shop";
  auto a = run({"extract", "--root", root, "--scope", "method", "--project", "shop", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("# tool=crowdsmell 0.1.0\n"), std::string::npos);
  EXPECT_NE(a.out.find("# seed=7\n"), std::string::npos);
  EXPECT_NE(a.out.find("# input=" + root + "=sha256:"), std::string::npos);
  EXPECT_NE(a.out.find("# scope=method\n"), std::string::npos);
  std::size_t rows = 0;
  std::istringstream lines(a.out);
  for (std::string line; std::getline(lines, line);) rows += line.rfind("shop,", 0) == 0;
  EXPECT_EQ(rows, 11u);
  EXPECT_EQ(run({"extract", "--root", root, "--scope", "method", "--project", "shop", "--seed", "7"}).out, a.out);
}

TEST_F(Cli, TeamFilesBuildMergeAndReport) {
  auto root = kData + "/fixtures/java/shop";
  auto extracted = run({"extract", "--root", root, "--project", "shop"});
  ASSERT_EQ(extracted.code, 0) << extracted.err;

  // Turn the metric table into team classification files.
  auto team_file = [&](const std::string& team, int year, const std::string& name) {
    std::istringstream in(extracted.out);
    std::ostringstream out;
    bool header = true;
    int i = 0;
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("#", 0) == 0) continue;
      if (header) {
        out << "team,year," << line << ",is_smell\n";
        header = false;
      } else {
        out << team << "," << year << "," << line << "," << (i++ % 3 == 0 ? "TRUE" : "FALSE") << "\n";
      }
    }
    std::ofstream(path(name)) << out.str();
    return path(name);
  };
  auto t1 = team_file("Alpha", 2019, "alpha.csv");
  auto t2 = team_file("Beta", 2019, "beta.csv");
  auto t3 = team_file("Gamma", 2020, "gamma.csv");

  auto o19 = path("gc-2019.csv");
  auto b = run({"oracle", "build", "--smell", "GOD_CLASS", "--inputs", t1, t2, "--year", "2019", "--out", o19});
  ASSERT_EQ(b.code, 0) << b.err;
  auto ds19 = oracle::read_oracle(o19);
  EXPECT_EQ(ds19.name, "2019");
  EXPECT_EQ(ds19.size(), 14u);
  EXPECT_EQ(ds19.true_count(), 6u);
  auto text = slurp(o19);
  EXPECT_NE(text.find("# input=" + t1 + "=sha256:" + file_digest(t1)), std::string::npos);

  auto wrong_year = run({"oracle", "build", "--smell", "GOD_CLASS", "--inputs", t3, "--year", "2019", "--out",
                         path("x.csv")});
  EXPECT_EQ(wrong_year.code, 1);
  EXPECT_FALSE(fs::exists(path("x.csv")));

  auto o20 = path("gc-2020.csv");
  ASSERT_EQ(run({"oracle", "build", "--smell", "GOD_CLASS", "--inputs", t3, "--out", o20}).code, 0);
  auto merged = path("gc-merged.csv");
  auto m = run({"oracle", "merge", "--inputs", o19, o20, "--out", merged});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(oracle::read_oracle(merged).name, "2020+2019");

  auto rep = run({"oracle", "report", "--in", o19, o20, merged, "--json"});
  ASSERT_EQ(rep.code, 0) << rep.err;
  auto j = json::parse(rep.out);
  EXPECT_EQ(j.at("tool"), "crowdsmell");
  EXPECT_EQ(j.at("inputs").size(), 3u);
  ASSERT_EQ(j.at("composition").size(), 3u);
  EXPECT_EQ(j["composition"][2]["dataset"], "2020+2019");
  EXPECT_EQ(j["composition"][2]["total"], 21);
  EXPECT_EQ(j["composition"][2]["true"], 9);
  EXPECT_EQ(j["composition"][2]["false"], 12);

  auto csv_rep = run({"oracle", "report", "--in", merged});
  EXPECT_NE(csv_rep.out.find("Dataset,Code Smell,Total,True,% True,False,% False\n"
                             "2020+2019,GOD_CLASS,21,9,43%,12,57%\n"),
            std::string::npos)
      << csv_rep.out;
}

TEST_F(Cli, EvaluateJsonAndCsv) {
  auto oracle_path = synth("GOD_CLASS", 30, 20, "2019", 2019);
  auto json_out = path("report.json");
  auto r = run({"evaluate", "--oracle", oracle_path, "--kind", "NAIVE_BAYES", "--seed", "9", "--out", json_out});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(slurp(json_out));
  EXPECT_TRUE(eval::validate_report_json(j).empty());
  EXPECT_EQ(j.at("seed"), 9);
  EXPECT_EQ(j.at("version"), "0.1.0");
  EXPECT_EQ(j.at("inputs")[0], oracle_path + "=sha256:" + file_digest(oracle_path));
  EXPECT_EQ(j.at("k"), 10);

  auto csv_out = path("report.csv");
  ASSERT_EQ(run({"evaluate", "--oracle", oracle_path, "--kind", "J48", "--k", "5", "--out", csv_out}).code, 0);
  auto text = slurp(csv_out);
  EXPECT_NE(text.find("# seed=42\n"), std::string::npos);
  EXPECT_NE(text.find(std::string(eval::kReportHeader)), std::string::npos);
  EXPECT_NE(text.find("\n2019,J48,"), std::string::npos);

  auto again = path("again.csv");
  ASSERT_EQ(run({"evaluate", "--oracle", oracle_path, "--kind", "J48", "--k", "5", "--out", again}).code, 0);
  EXPECT_EQ(slurp(again), text);
}

TEST_F(Cli, TrainWritesModelWithProvenance) {
  auto oracle_path = synth("LONG_METHOD", 15, 15, "2020", 2020);
  auto r = run({"train", "--oracle", oracle_path, "--kind", "SMO"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j.at("dataset"), "2020");
  EXPECT_EQ(j.at("smell"), "LONG_METHOD");
  EXPECT_EQ(j.at("provenance").at("seed"), 42);
  EXPECT_EQ(j.at("provenance").at("inputs")[0], oracle_path + "=sha256:" + file_digest(oracle_path));
}

TEST_F(Cli, EvaluateAllWritesEveryReport) {
  std::vector<std::string> args{"evaluate-all", "--oracles"};
  args.push_back(synth("GOD_CLASS", 12, 10, "2019", 2019, 1));
  args.push_back(synth("GOD_CLASS", 14, 9, "2020", 2020, 2));
  args.push_back(synth("FEATURE_ENVY", 11, 12, "2020", 2020, 3));
  for (const char* a : {"--kinds", "J48", "NAIVE_BAYES", "ADABOOST_M1", "--k", "3", "--out-dir"}) args.emplace_back(a);
  args.push_back(path("grid"));
  auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;

  auto index = json::parse(slurp(dir_ / "grid" / "index.json"));
  EXPECT_EQ(index.at("models").size(), 9u);
  EXPECT_EQ(index.at("inputs").size(), 3u);
  for (const auto& m : index["models"]) {
    auto report = json::parse(slurp(dir_ / "grid" / m.at("report").get<std::string>()));
    EXPECT_TRUE(eval::validate_report_json(report).empty()) << m;
    EXPECT_EQ(report.at("k"), 3);
  }
  auto gc = csv::parse(slurp(dir_ / "grid" / "god_class.csv"));
  EXPECT_EQ(gc.rows.size(), 6u);
  EXPECT_EQ(gc.comments.front(), "tool=crowdsmell 0.1.0");
  EXPECT_TRUE(fs::exists(dir_ / "grid" / "feature_envy.csv"));
}

TEST_F(Cli, AnovaMatchesLibraryAndHonoursExclusion) {
  auto r = run({"anova", "--in", kData + "/data/roc_long_method.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_NEAR(j.at("f_statistic").get<double>(), 1.0957, 1e-4);
  EXPECT_EQ(j.at("df_within"), 30);
  auto ex = json::parse(run({"anova", "--in", kData + "/data/roc_feature_envy.csv", "--exclude-dataset", "2018"}).out);
  EXPECT_EQ(ex.at("df_within"), 24);
  EXPECT_EQ(ex.at("excluded_datasets")[0], "2018");
}
