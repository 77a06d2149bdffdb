#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "crowdsmell/error.hpp"
#include "crowdsmell/review/review.hpp"

using namespace crowdsmell;
using namespace crowdsmell::review;
using oracle::SmellKind;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixture = fs::path(CROWDSMELL_TEST_DATA) / "fixtures/java/review";

std::string fixed_clock() { return "2020-06-01T00:00:00.000Z"; }

// Fresh service root holding a copy of the fixture project under "app".
class TempRoot {
 public:
  TempRoot() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("crowdsmell-review-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_ / "app");
    fs::copy(kFixture, path_ / "app", fs::copy_options::recursive);
  }
  ~TempRoot() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

ReviewService::Options options(const fs::path& root, std::size_t compact_every = 1000) {
  return {root, compact_every, fixed_clock};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::UsageError;
}

std::vector<std::string> ids(Session& s, SmellKind smell) {
  std::vector<std::string> out;
  for (const auto* c : s.candidates(smell, 0, 1000).items) out.push_back(c->id);
  return out;
}

const Candidate* find_method(Session& s, const std::string& signature) {
  for (const auto* c : s.candidates(SmellKind::LongMethod, 0, 1000).items) {
    if (c->entity.method_signature == signature) return c;
  }
  return nullptr;
}

}  // namespace

TEST(Candidates, EveryEntityOfTheScope) {
  auto model = metrics::ProjectModel::parse_project(kFixture, "app");
  auto classes = generate_candidates(model, SmellKind::GodClass, {});
  EXPECT_EQ(classes.size(), 3u);
  auto methods = generate_candidates(model, SmellKind::LongMethod, {});
  EXPECT_EQ(methods.size(), 4u);
  std::set<std::string> seen;
  for (const auto& c : methods) {
    EXPECT_EQ(c.id.size(), 16u);
    EXPECT_EQ(c.id, candidate_id(SmellKind::LongMethod, c.entity));
    EXPECT_TRUE(seen.insert(c.id).second);
    EXPECT_TRUE(c.metrics.values.count("LOC_method"));
    EXPECT_FALSE(c.source_excerpt.empty());
  }
  EXPECT_NE(candidate_id(SmellKind::LongMethod, methods[0].entity),
            candidate_id(SmellKind::FeatureEnvy, methods[0].entity));
}

TEST(Candidates, AdvisorFlagsLongMethod) {
  auto model = metrics::ProjectModel::parse_project(kFixture, "app");
  for (const auto& c : generate_candidates(model, SmellKind::LongMethod, {})) {
    ASSERT_TRUE(c.advisor);
    EXPECT_EQ(c.advisor->advisor, "threshold");
    if (c.entity.method_signature == "build()") {
      EXPECT_EQ(c.metrics.at("LOC_method"), 50);
      EXPECT_TRUE(c.advisor->flagged);
      EXPECT_EQ(c.source_excerpt.substr(0, 24), "    public int build() {");
    } else {
      EXPECT_FALSE(c.advisor->flagged) << c.entity.display();
    }
  }
  for (const auto& c : generate_candidates(model, SmellKind::GodClass, {false})) EXPECT_FALSE(c.advisor);
}

TEST(Candidates, AdvisorThresholds) {
  metrics::MetricVector v;
  v.values = {{"LOC_method", 39}, {"CYCLO_method", 9}, {"WMC", 46}, {"ATFD", 6}, {"TCC", 0.33},
              {"ATFD_method", 6}, {"LAA_method", 0.32}};
  EXPECT_FALSE(advise(SmellKind::LongMethod, v, {})->flagged);
  EXPECT_FALSE(advise(SmellKind::GodClass, v, {})->flagged);
  EXPECT_TRUE(advise(SmellKind::FeatureEnvy, v, {})->flagged);
  v.values["CYCLO_method"] = 10;
  v.values["TCC"] = 0.32;
  v.values["ATFD_method"] = 5;
  EXPECT_TRUE(advise(SmellKind::LongMethod, v, {})->flagged);
  EXPECT_TRUE(advise(SmellKind::GodClass, v, {})->flagged);
  EXPECT_FALSE(advise(SmellKind::FeatureEnvy, v, {})->flagged);
  v.values["WMC"] = 47;
  v.values["ATFD"] = 5;
  EXPECT_TRUE(advise(SmellKind::GodClass, v, {})->flagged);
}

TEST(Session, VerdictsAndExport) {
  TempRoot root;
  ReviewService svc(options(root.path()));
  auto [s, created] = svc.create_session("app", 2020);
  EXPECT_TRUE(created);
  EXPECT_EQ(s->info().id, "app-2020");
  EXPECT_EQ(svc.create_session("app", 2020).second, false);
  EXPECT_TRUE(s->register_team("T1"));
  EXPECT_TRUE(s->register_team("T2"));
  EXPECT_FALSE(s->register_team("T1"));

  auto gc = ids(*s, SmellKind::GodClass);
  ASSERT_EQ(gc.size(), 3u);
  EXPECT_EQ(code_of([&] { s->export_csv(SmellKind::GodClass); }), ErrorCode::NothingToExport);
  EXPECT_EQ(code_of([&] { s->submit("nope", "T1", true); }), ErrorCode::UnknownCandidate);
  EXPECT_EQ(code_of([&] { s->submit(gc[0], "T9", true); }), ErrorCode::UnknownTeam);

  int trues = 0;
  for (const auto& team : {"T1", "T2"}) {
    for (std::size_t i = 0; i < gc.size(); ++i) {
      bool label = (i + team[1]) % 2 == 0;
      trues += label;
      s->submit(gc[i], team, label);
    }
  }
  auto csv = s->export_csv(SmellKind::GodClass, 2020);
  auto rows = oracle::ingest_team_text(csv, SmellKind::GodClass, 2020);
  EXPECT_EQ(rows.size(), 6u);
  oracle::OracleDataset ds{"2020", SmellKind::GodClass, rows};
  auto comp = oracle::composition_report(ds);
  auto t = s->tally(SmellKind::GodClass);
  EXPECT_EQ(comp.true_count, t.true_count);
  EXPECT_EQ(comp.false_count, t.false_count);
  EXPECT_EQ(static_cast<int>(t.true_count), trues);
  EXPECT_EQ(oracle::oracle_to_string(ds, {"tool=crowdsmell 0.1.0", "session=app-2020"}), csv);
  EXPECT_EQ(code_of([&] { s->export_csv(SmellKind::GodClass, 2019); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { s->export_csv(SmellKind::LongMethod); }), ErrorCode::NothingToExport);
}

TEST(Session, LatestVerdictWinsAndHistoryIsKept) {
  TempRoot root;
  ReviewService svc(options(root.path()));
  auto* s = svc.create_session("app", 2019).first;
  s->register_team("A");
  auto build = find_method(*s, "build()");
  ASSERT_NE(build, nullptr);
  s->submit(build->id, "A", true);
  s->submit(build->id, "A", false);
  EXPECT_EQ(s->verdicts().size(), 2u);
  auto rows = oracle::ingest_team_text(s->export_csv(SmellKind::LongMethod), SmellKind::LongMethod);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].is_smell);
  EXPECT_EQ(rows[0].year, 2019);
  EXPECT_EQ(rows[0].team, "A");
}

TEST(Session, UnlabeledCandidatesAreAbsent) {
  TempRoot root;
  ReviewService svc(options(root.path()));
  auto* s = svc.create_session("app", 2020).first;
  s->register_team("A");
  auto lm = ids(*s, SmellKind::LongMethod);
  s->submit(lm[1], "A", false);
  auto rows = oracle::ingest_team_text(s->export_csv(SmellKind::LongMethod), SmellKind::LongMethod);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(candidate_id(SmellKind::LongMethod, rows[0].entity), lm[1]);
}

TEST(Session, AdvisorNeverReachesExport) {
  std::string exports[2];
  for (bool advisor : {true, false}) {
    TempRoot root;
    ReviewService svc(options(root.path()));
    auto* s = svc.create_session("app", 2020, {advisor}).first;
    s->register_team("A");
    for (const auto& id : ids(*s, SmellKind::LongMethod)) s->submit(id, "A", false);
    exports[advisor] = s->export_csv(SmellKind::LongMethod);
  }
  EXPECT_EQ(exports[0], exports[1]);
}

TEST(Session, RejectsPathsOutsideRoot) {
  TempRoot root;
  ReviewService svc(options(root.path() / "app"));
  EXPECT_EQ(code_of([&] { svc.create_session("..", 2020); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { svc.create_session("missing", 2020); }), ErrorCode::IoError);
  EXPECT_EQ(code_of([&] { svc.create_session(".", 20); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { svc.session("x-1"); }), ErrorCode::UnknownSession);
  auto* s = svc.create_session(".", 2020).first;
  EXPECT_EQ(code_of([&] { s->register_team(""); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { s->register_team("a\nb"); }), ErrorCode::InvalidArgument);
}

TEST(Persistence, RestartReplaysEverything) {
  TempRoot root;
  std::string before;
  std::size_t history = 0;
  for (std::size_t compact_every : {1000u, 3u}) {
    {
      ReviewService svc(options(root.path(), compact_every));
      auto* s = svc.create_session("app", 2020).first;
      s->register_team("T" + std::to_string(compact_every));
      for (const auto& id : ids(*s, SmellKind::FeatureEnvy)) s->submit(id, "T" + std::to_string(compact_every), true);
      s->submit(ids(*s, SmellKind::FeatureEnvy)[0], "T" + std::to_string(compact_every), false);
      before = s->export_csv(SmellKind::FeatureEnvy);
      history = s->verdicts().size();
    }
    ReviewService again(options(root.path(), compact_every));
    auto& s = again.session("app-2020");
    EXPECT_EQ(s.export_csv(SmellKind::FeatureEnvy), before);
    EXPECT_EQ(s.verdicts().size(), history);
    auto seqs = s.verdicts();
    for (std::size_t i = 1; i < seqs.size(); ++i) EXPECT_LT(seqs[i - 1].seq, seqs[i].seq);
  }
  EXPECT_TRUE(fs::exists(root.path() / ".crowdsmell/sessions/app-2020/snapshot.json"));
}

TEST(Persistence, TornTailIsDroppedCorruptLineIsNot) {
  TempRoot root;
  const auto log = root.path() / ".crowdsmell/sessions/app-2020/log.jsonl";
  {
    ReviewService svc(options(root.path()));
    auto* s = svc.create_session("app", 2020).first;
    s->register_team("A");
    s->submit(ids(*s, SmellKind::GodClass)[0], "A", true);
  }
  { std::ofstream(log, std::ios::app) << R"({"seq":3,"type":"verdict","cand)"; }
  {
    ReviewService svc(options(root.path()));
    auto& s = svc.session("app-2020");
    EXPECT_EQ(s.verdicts().size(), 1u);
    auto v = s.submit(ids(s, SmellKind::GodClass)[1], "A", false);
    EXPECT_EQ(v.seq, 3u);
  }
  {
    ReviewService svc(options(root.path()));
    EXPECT_EQ(svc.session("app-2020").verdicts().size(), 2u);
  }
  { std::ofstream(log, std::ios::app) << "garbage\n"; }
  EXPECT_EQ(code_of([&] { ReviewService svc(options(root.path())); }), ErrorCode::SchemaMismatch);
}

TEST(Persistence, ConcurrentWritersSerialize) {
  TempRoot root;
  constexpr int kThreads = 4, kEach = 25;
  {
    ReviewService svc(options(root.path(), 17));
    auto* s = svc.create_session("app", 2020).first;
    auto lm = ids(*s, SmellKind::LongMethod);
    for (int t = 0; t < kThreads; ++t) s->register_team("team" + std::to_string(t));
    std::vector<std::thread> threads;
    for (int t = 0; t < kThreads; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < kEach; ++i) s->submit(lm[i % lm.size()], "team" + std::to_string(t), (i + t) % 2 == 0);
      });
    }
    std::thread reader([&] {
      for (int i = 0; i < 50; ++i) (void)s->tally(SmellKind::LongMethod);
    });
    for (auto& th : threads) th.join();
    reader.join();
    EXPECT_EQ(s->verdicts().size(), static_cast<std::size_t>(kThreads * kEach));
  }
  ReviewService again(options(root.path(), 17));
  auto verdicts = again.session("app-2020").verdicts();
  ASSERT_EQ(verdicts.size(), static_cast<std::size_t>(kThreads * kEach));
  std::set<std::uint64_t> seqs;
  for (const auto& v : verdicts) seqs.insert(v.seq);
  EXPECT_EQ(seqs.size(), verdicts.size());
  EXPECT_EQ(*seqs.rbegin(), static_cast<std::uint64_t>(kThreads * kEach + kThreads));
}

TEST(Http, EndToEnd) {
  TempRoot root;
  ReviewService svc(options(root.path()));
  HttpServer server(svc);
  int port = server.start("127.0.0.1", 0);
  httplib::Client cli("127.0.0.1", port);

  auto health = cli.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body)["status"], "ok");

  auto created = cli.Post("/sessions", R"({"project":"app","year":2020})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(json::parse(created->body)["id"], "app-2020");
  EXPECT_EQ(cli.Post("/sessions", R"({"project":"app","year":2020})", "application/json")->status, 200);
  EXPECT_EQ(json::parse(cli.Get("/sessions")->body)["sessions"], json::array({"app-2020"}));

  EXPECT_EQ(cli.Post("/sessions/app-2020/teams", R"({"name":"T1"})", "application/json")->status, 201);

  auto page = cli.Get("/sessions/app-2020/candidates?smell=LONG_METHOD&offset=1&limit=2");
  ASSERT_EQ(page->status, 200);
  auto pj = json::parse(page->body);
  EXPECT_EQ(pj["total"], 4);
  EXPECT_EQ(pj["items"].size(), 2u);
  auto all = json::parse(cli.Get("/sessions/app-2020/candidates?smell=long-method")->body)["items"];
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[1]["id"], pj["items"][0]["id"]);
  EXPECT_TRUE(all[0].contains("source_excerpt"));
  EXPECT_TRUE(all[0]["advisor"].contains("flagged"));

  std::string cid = all[0]["id"];
  json body{{"candidate_id", cid}, {"team", "T1"}, {"is_smell", true}};
  auto ack = cli.Post("/sessions/app-2020/verdicts", body.dump(), "application/json");
  ASSERT_EQ(ack->status, 201);
  EXPECT_EQ(json::parse(ack->body)["seq"], 2);
  auto one = json::parse(cli.Get("/sessions/app-2020/candidates/" + cid)->body);
  EXPECT_EQ(one["verdicts"]["T1"], true);

  auto exported = cli.Get("/sessions/app-2020/export?smell=LONG_METHOD&year=2020");
  ASSERT_EQ(exported->status, 200);
  EXPECT_EQ(exported->get_header_value("Content-Type"), "text/csv");
  EXPECT_EQ(exported->body, svc.session("app-2020").export_csv(SmellKind::LongMethod));

  auto err = [&](const httplib::Result& r, int status, const std::string& code) {
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, status) << r->body;
    EXPECT_EQ(json::parse(r->body)["error"]["code"], code);
  };
  err(cli.Post("/sessions/app-2020/verdicts", R"({"candidate_id":"zz","team":"T1","is_smell":true})",
               "application/json"),
      404, "UnknownCandidate");
  json unknown_team{{"candidate_id", cid}, {"team", "T2"}, {"is_smell", true}};
  err(cli.Post("/sessions/app-2020/verdicts", unknown_team.dump(), "application/json"), 404, "UnknownTeam");
  err(cli.Post("/sessions/app-2020/verdicts", "{not json", "application/json"), 400, "InvalidArgument");
  err(cli.Post("/sessions/app-2020/verdicts", R"({"team":"T1"})", "application/json"), 400, "InvalidArgument");
  err(cli.Get("/sessions/app-2020/export?smell=GOD_CLASS"), 404, "NothingToExport");
  err(cli.Get("/sessions/none-1/candidates?smell=GOD_CLASS"), 404, "UnknownSession");
  err(cli.Get("/sessions/app-2020/candidates"), 400, "InvalidArgument");
  err(cli.Get("/sessions/app-2020/candidates?smell=GOD_CLASS&limit=-1"), 400, "InvalidArgument");
  err(cli.Post("/sessions", R"({"project":"../..","year":2020})", "application/json"), 400, "InvalidArgument");

  auto summary = json::parse(cli.Get("/sessions/app-2020")->body);
  EXPECT_EQ(summary["tallies"]["LONG_METHOD"]["true"], 1);
  EXPECT_EQ(summary["verdicts"], 1);
  server.stop();
}
