#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdsmell/metrics/project.hpp"
#include "crowdsmell/oracle/oracle.hpp"

namespace crowdsmell::review {

struct AdvisorConfig {
  bool enabled = true;
};

struct AdvisorOpinion {
  std::string advisor;
  bool flagged = false;
};

/// Threshold advisor:
///   LONG_METHOD   LOC_method >= 40 or CYCLO_method >= 10
///   GOD_CLASS     WMC >= 47 or (ATFD > 5 and TCC < 0.33)
///   FEATURE_ENVY  ATFD_method > 5 and LAA_method < 0.33
std::optional<AdvisorOpinion> advise(oracle::SmellKind smell, const metrics::MetricVector& v,
                                     const AdvisorConfig& config);

struct Candidate {
  std::string id;
  metrics::CodeEntityId entity;
  oracle::SmellKind smell = oracle::SmellKind::GodClass;
  metrics::MetricVector metrics;
  std::optional<AdvisorOpinion> advisor;
  std::string source_excerpt;
};

/// First 16 hex digits of sha256("<SMELL>|<entity display>").
std::string candidate_id(oracle::SmellKind smell, const metrics::CodeEntityId& entity);

/// Every entity of the smell's scope, in extraction order.
std::vector<Candidate> generate_candidates(const metrics::ProjectModel& model, oracle::SmellKind smell,
                                           const AdvisorConfig& config);

nlohmann::json to_json(const Candidate& c);

struct Verdict {
  std::uint64_t seq = 0;
  std::string candidate_id;
  std::string team;
  bool is_smell = false;
  std::string timestamp;
};

struct TeamRecord {
  std::uint64_t seq = 0;
  std::string name;
  std::string timestamp;
};

/// Append-only JSONL log plus a compacted snapshot. Every append is
/// fsync'ed before it returns. Not thread-safe; the owning Session locks.
class VerdictLog {
 public:
  struct State {
    std::uint64_t last_seq = 0;
    std::vector<TeamRecord> teams;
    std::vector<Verdict> verdicts;
  };

  /// Creates the directory if needed. A torn final line is dropped.
  explicit VerdictLog(std::filesystem::path dir);
  ~VerdictLog();
  VerdictLog(const VerdictLog&) = delete;
  VerdictLog& operator=(const VerdictLog&) = delete;

  [[nodiscard]] State replay();
  void append(const TeamRecord& team);
  void append(const Verdict& verdict);
  /// Writes `state` as the snapshot, then empties the log.
  void compact(const State& state);
  [[nodiscard]] std::size_t entries_since_snapshot() const { return pending_; }

 private:
  void write_line(const std::string& line);

  std::filesystem::path dir_;
  int fd_ = -1;
  std::size_t pending_ = 0;
};

struct SessionInfo {
  std::string id;
  std::filesystem::path project_path;
  std::string project;
  int year = 0;
  bool advisor = true;
};

struct Tally {
  std::size_t candidates = 0;
  std::size_t labeled = 0;
  std::size_t true_count = 0;
  std::size_t false_count = 0;
};

struct Page {
  std::size_t total = 0;
  std::size_t offset = 0;
  std::vector<const Candidate*> items;
};

using Clock = std::function<std::string()>;
std::string utc_now();

class Session {
 public:
  Session(SessionInfo info, const std::filesystem::path& state_dir, std::size_t compact_every, Clock clock);

  [[nodiscard]] const SessionInfo& info() const { return info_; }

  /// Returns false when the team already exists. Errors: InvalidArgument (bad name).
  bool register_team(const std::string& name);
  [[nodiscard]] std::vector<std::string> teams() const;

  [[nodiscard]] Page candidates(oracle::SmellKind smell, std::size_t offset, std::size_t limit) const;
  /// Errors: UnknownCandidate.
  [[nodiscard]] const Candidate& candidate(const std::string& id) const;

  /// Durable before return. Errors: UnknownCandidate, UnknownTeam.
  Verdict submit(const std::string& candidate_id, const std::string& team, bool is_smell);
  /// Full history in log order, including superseded verdicts.
  [[nodiscard]] std::vector<Verdict> verdicts() const;
  /// Latest verdict per team for one candidate.
  [[nodiscard]] std::map<std::string, bool> latest(const std::string& candidate_id) const;
  [[nodiscard]] Tally tally(oracle::SmellKind smell) const;

  /// Team classification file: one row per (candidate, team) latest verdict,
  /// candidates in extraction order, teams by name.
  /// Errors: NothingToExport, InvalidArgument (year differs from the session).
  [[nodiscard]] std::string export_csv(oracle::SmellKind smell, std::optional<int> year = std::nullopt) const;

  [[nodiscard]] nlohmann::json summary_json() const;

 private:
  void load_candidates();
  void apply(const Verdict& v);

  SessionInfo info_;
  std::size_t compact_every_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::map<oracle::SmellKind, std::vector<Candidate>> candidates_;
  std::map<std::string, const Candidate*, std::less<>> by_id_;
  std::vector<TeamRecord> teams_;
  std::vector<Verdict> verdicts_;
  std::map<std::string, std::map<std::string, bool>> latest_;  // candidate -> team -> label
  std::uint64_t seq_ = 0;
  std::unique_ptr<VerdictLog> log_;
};

class ReviewService {
 public:
  struct Options {
    std::filesystem::path root;
    std::size_t compact_every = 1000;
    Clock clock = utc_now;
  };

  /// Reopens every session persisted under root.
  explicit ReviewService(Options options);

  /// Project paths resolve against root and must stay inside it. Session id
  /// is "<project>-<year>"; re-creating with the same path returns the
  /// existing session. Errors: InvalidArgument, IoError, EmptyProject.
  std::pair<Session*, bool> create_session(const std::string& project_path, int year, AdvisorConfig advisor = {});
  /// Errors: UnknownSession.
  Session& session(const std::string& id);
  [[nodiscard]] std::vector<std::string> session_ids() const;
  [[nodiscard]] const std::filesystem::path& root() const { return options_.root; }

 private:
  std::filesystem::path state_dir(const std::string& id) const;

  Options options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
};

/// HTTP JSON front end. Routes:
///   GET  /healthz
///   GET  /sessions                      POST /sessions {project, year, advisor?}
///   GET  /sessions/{id}
///   GET  /sessions/{id}/teams           POST /sessions/{id}/teams {name}
///   GET  /sessions/{id}/candidates?smell=&offset=&limit=
///   GET  /sessions/{id}/candidates/{cid}
///   GET  /sessions/{id}/verdicts        POST /sessions/{id}/verdicts {candidate_id, team, is_smell}
///   GET  /sessions/{id}/export?smell=&year=   (text/csv)
/// Errors are {"error": {"code", "message"}}.
class HttpServer {
 public:
  explicit HttpServer(ReviewService& service);
  ~HttpServer();

  /// Binds (port 0 picks a free one) and serves on a background thread.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  bool run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace crowdsmell::review
