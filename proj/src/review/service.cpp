#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "crowdsmell/common/provenance.hpp"
#include "crowdsmell/error.hpp"
#include "crowdsmell/metrics/extractor.hpp"
#include "crowdsmell/review/review.hpp"

namespace crowdsmell::review {

namespace fs = std::filesystem;
using nlohmann::json;
using oracle::SmellKind;

namespace {

constexpr const char* kAdvisorName = "threshold";

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void fsync_path(const fs::path& path, int flags) {
  int fd = ::open(path.c_str(), flags);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

// Write to a temp file, fsync, rename over the target, fsync the directory.
void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw Error(ErrorCode::IoError, "cannot write " + tmp.string() + ": " + std::strerror(errno));
  const char* p = content.data();
  std::size_t left = content.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw Error(ErrorCode::IoError, "fsync failed for " + tmp.string());
  }
  ::close(fd);
  fs::rename(tmp, path);
  fsync_path(path.parent_path(), O_RDONLY | O_DIRECTORY);
}

json team_json(const TeamRecord& t) { return json{{"seq", t.seq}, {"type", "team"}, {"team", t.name}, {"ts", t.timestamp}}; }

json verdict_json(const Verdict& v) {
  return json{{"seq", v.seq},   {"type", "verdict"},       {"candidate", v.candidate_id},
              {"team", v.team}, {"is_smell", v.is_smell}, {"ts", v.timestamp}};
}

void apply_record(const json& r, VerdictLog::State& state) {
  const auto seq = r.at("seq").get<std::uint64_t>();
  if (seq <= state.last_seq) return;
  const auto type = r.at("type").get<std::string>();
  if (type == "team") {
    state.teams.push_back({seq, r.at("team").get<std::string>(), r.at("ts").get<std::string>()});
  } else if (type == "verdict") {
    state.verdicts.push_back({seq, r.at("candidate").get<std::string>(), r.at("team").get<std::string>(),
                              r.at("is_smell").get<bool>(), r.at("ts").get<std::string>()});
  } else {
    throw Error(ErrorCode::SchemaMismatch, "unknown log record type '" + type + "'");
  }
  state.last_seq = seq;
}

bool valid_team_name(const std::string& name) {
  if (name.empty() || name.size() > 64) return false;
  if (std::all_of(name.begin(), name.end(), [](unsigned char c) { return c == ' '; })) return false;
  return std::none_of(name.begin(), name.end(), [](unsigned char c) { return c < 0x20 || c == 0x7F; });
}

std::string sanitize_id(const std::string& text) {
  std::string out;
  for (unsigned char c : text) out += std::isalnum(c) || c == '.' || c == '_' || c == '-' ? static_cast<char>(c) : '_';
  return out;
}

}  // namespace

std::string utc_now() {
  using namespace std::chrono;
  auto now = system_clock::now();
  auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::optional<AdvisorOpinion> advise(SmellKind smell, const metrics::MetricVector& v, const AdvisorConfig& config) {
  if (!config.enabled) return std::nullopt;
  bool flagged = false;
  switch (smell) {
    case SmellKind::LongMethod:
      flagged = v.at("LOC_method") >= 40 || v.at("CYCLO_method") >= 10;
      break;
    case SmellKind::GodClass:
      flagged = v.at("WMC") >= 47 || (v.at("ATFD") > 5 && v.at("TCC") < 0.33);
      break;
    case SmellKind::FeatureEnvy:
      flagged = v.at("ATFD_method") > 5 && v.at("LAA_method") < 0.33;
      break;
  }
  return AdvisorOpinion{kAdvisorName, flagged};
}

std::string candidate_id(SmellKind smell, const metrics::CodeEntityId& entity) {
  return sha256_hex(std::string(oracle::to_string(smell)) + "|" + entity.display()).substr(0, 16);
}

std::vector<Candidate> generate_candidates(const metrics::ProjectModel& model, SmellKind smell,
                                           const AdvisorConfig& config) {
  std::vector<Candidate> out;
  for (auto& vec : metrics::extract_all(model, oracle::scope_of(smell))) {
    Candidate c;
    c.entity = vec.entity;
    c.smell = smell;
    c.id = candidate_id(smell, vec.entity);
    c.advisor = advise(smell, vec, config);
    if (vec.entity.method_signature) {
      const auto* m = model.find_method(vec.entity);
      const auto& cls = model.classes()[m->class_index];
      c.source_excerpt = model.source_excerpt(*cls.unit, m->decl->begin_line, m->decl->end_line);
    } else {
      const auto* cls = model.find_class(vec.entity);
      c.source_excerpt = model.source_excerpt(*cls->unit, cls->decl->begin_line, cls->decl->end_line);
    }
    c.metrics = std::move(vec);
    out.push_back(std::move(c));
  }
  return out;
}

json to_json(const Candidate& c) {
  json entity{{"project", c.entity.project},
              {"package", c.entity.package},
              {"class", c.entity.class_name},
              {"method", c.entity.method_signature ? json(*c.entity.method_signature) : json(nullptr)}};
  json metrics = json::object();
  for (const auto& [k, v] : c.metrics.values) metrics[k] = v;
  json advisor = c.advisor ? json{{"name", c.advisor->advisor}, {"flagged", c.advisor->flagged}} : json(nullptr);
  return json{{"id", c.id},           {"smell", oracle::to_string(c.smell)}, {"entity", entity},
              {"display", c.entity.display()}, {"metrics", metrics},   {"advisor", advisor},
              {"source_excerpt", c.source_excerpt}};
}

// ---- VerdictLog -------------------------------------------------------------

VerdictLog::VerdictLog(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir_.string() + ": " + ec.message());
  fd_ = ::open((dir_ / "log.jsonl").c_str(), O_RDWR | O_CREAT | O_APPEND, 0644);
  if (fd_ < 0) throw Error(ErrorCode::IoError, "cannot open log in " + dir_.string() + ": " + std::strerror(errno));
}

VerdictLog::~VerdictLog() {
  if (fd_ >= 0) ::close(fd_);
}

VerdictLog::State VerdictLog::replay() {
  State state;
  const auto snapshot = dir_ / "snapshot.json";
  if (fs::exists(snapshot)) {
    try {
      auto j = json::parse(read_text(snapshot));
      std::vector<json> records(j.at("teams").begin(), j.at("teams").end());
      records.insert(records.end(), j.at("verdicts").begin(), j.at("verdicts").end());
      std::sort(records.begin(), records.end(),
                [](const json& a, const json& b) { return a.at("seq").get<std::uint64_t>() < b.at("seq").get<std::uint64_t>(); });
      for (const auto& r : records) apply_record(r, state);
      state.last_seq = j.at("last_seq").get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::SchemaMismatch, snapshot.string() + ": " + e.what());
    }
  }
  const auto text = read_text(dir_ / "log.jsonl");
  std::size_t good = 0, line_no = 0;
  pending_ = 0;
  while (good < text.size()) {
    auto nl = text.find('\n', good);
    if (nl == std::string::npos) break;  // torn tail
    ++line_no;
    std::string_view line(text.data() + good, nl - good);
    if (!line.empty()) {
      try {
        apply_record(json::parse(line), state);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, "log line " + std::to_string(line_no) + ": " + e.what());
      }
      ++pending_;
    }
    good = nl + 1;
  }
  if (good < text.size()) {
    if (::ftruncate(fd_, static_cast<off_t>(good)) != 0 || ::fsync(fd_) != 0) {
      throw Error(ErrorCode::IoError, "cannot truncate torn log tail");
    }
  }
  return state;
}

void VerdictLog::write_line(const std::string& line) {
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::IoError, std::string("log write failed: ") + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw Error(ErrorCode::IoError, std::string("log fsync failed: ") + std::strerror(errno));
  ++pending_;
}

void VerdictLog::append(const TeamRecord& team) { write_line(team_json(team).dump() + "\n"); }

void VerdictLog::append(const Verdict& verdict) { write_line(verdict_json(verdict).dump() + "\n"); }

void VerdictLog::compact(const State& state) {
  json teams = json::array(), verdicts = json::array();
  for (const auto& t : state.teams) teams.push_back(team_json(t));
  for (const auto& v : state.verdicts) verdicts.push_back(verdict_json(v));
  json j{{"format", "crowdsmell-review-snapshot"}, {"last_seq", state.last_seq}, {"teams", teams}, {"verdicts", verdicts}};
  write_atomically(dir_ / "snapshot.json", j.dump() + "\n");
  if (::ftruncate(fd_, 0) != 0 || ::fsync(fd_) != 0) throw Error(ErrorCode::IoError, "cannot truncate log");
  pending_ = 0;
}

// ---- Session ----------------------------------------------------------------

Session::Session(SessionInfo info, const fs::path& state_dir, std::size_t compact_every, Clock clock)
    : info_(std::move(info)), compact_every_(std::max<std::size_t>(compact_every, 1)), clock_(std::move(clock)) {
  load_candidates();
  log_ = std::make_unique<VerdictLog>(state_dir);
  auto state = log_->replay();
  teams_ = std::move(state.teams);
  for (const auto& v : state.verdicts) apply(v);
  seq_ = state.last_seq;
}

void Session::load_candidates() {
  auto model = metrics::ProjectModel::parse_project(info_.project_path, info_.project);
  AdvisorConfig config{info_.advisor};
  for (auto smell : oracle::kAllSmells) candidates_[smell] = generate_candidates(model, smell, config);
  for (const auto& [smell, list] : candidates_) {
    for (const auto& c : list) by_id_[c.id] = &c;
  }
}

void Session::apply(const Verdict& v) {
  verdicts_.push_back(v);
  latest_[v.candidate_id][v.team] = v.is_smell;
}

bool Session::register_team(const std::string& name) {
  if (!valid_team_name(name)) throw Error(ErrorCode::InvalidArgument, "invalid team name");
  std::unique_lock lock(mutex_);
  for (const auto& t : teams_) {
    if (t.name == name) return false;
  }
  TeamRecord record{seq_ + 1, name, clock_()};
  log_->append(record);
  seq_ = record.seq;
  teams_.push_back(record);
  return true;
}

std::vector<std::string> Session::teams() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& t : teams_) out.push_back(t.name);
  return out;
}

Page Session::candidates(SmellKind smell, std::size_t offset, std::size_t limit) const {
  const auto& list = candidates_.at(smell);
  Page page;
  page.total = list.size();
  page.offset = offset;
  for (std::size_t i = offset; i < list.size() && page.items.size() < limit; ++i) page.items.push_back(&list[i]);
  return page;
}

const Candidate& Session::candidate(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw Error(ErrorCode::UnknownCandidate, "unknown candidate '" + id + "'");
  return *it->second;
}

Verdict Session::submit(const std::string& cid, const std::string& team, bool is_smell) {
  (void)candidate(cid);
  std::unique_lock lock(mutex_);
  if (std::none_of(teams_.begin(), teams_.end(), [&](const TeamRecord& t) { return t.name == team; })) {
    throw Error(ErrorCode::UnknownTeam, "unknown team '" + team + "'");
  }
  Verdict v{seq_ + 1, cid, team, is_smell, clock_()};
  log_->append(v);
  seq_ = v.seq;
  apply(v);
  if (log_->entries_since_snapshot() >= compact_every_) {
    VerdictLog::State state{seq_, teams_, verdicts_};
    log_->compact(state);
  }
  return v;
}

std::vector<Verdict> Session::verdicts() const {
  std::shared_lock lock(mutex_);
  return verdicts_;
}

std::map<std::string, bool> Session::latest(const std::string& cid) const {
  std::shared_lock lock(mutex_);
  auto it = latest_.find(cid);
  return it == latest_.end() ? std::map<std::string, bool>{} : it->second;
}

Tally Session::tally(SmellKind smell) const {
  std::shared_lock lock(mutex_);
  Tally t;
  for (const auto& c : candidates_.at(smell)) {
    ++t.candidates;
    auto it = latest_.find(c.id);
    if (it == latest_.end()) continue;
    ++t.labeled;
    for (const auto& [team, label] : it->second) ++(label ? t.true_count : t.false_count);
  }
  return t;
}

std::string Session::export_csv(SmellKind smell, std::optional<int> year) const {
  if (year && *year != info_.year) {
    throw Error(ErrorCode::InvalidArgument,
                "session " + info_.id + " holds year " + std::to_string(info_.year) + ", not " + std::to_string(*year));
  }
  std::shared_lock lock(mutex_);
  oracle::OracleDataset ds;
  ds.name = std::to_string(info_.year);
  ds.smell = smell;
  for (const auto& c : candidates_.at(smell)) {
    auto it = latest_.find(c.id);
    if (it == latest_.end()) continue;
    for (const auto& [team, label] : it->second) {
      ds.instances.push_back({c.entity, c.metrics, label, team, info_.year});
    }
  }
  if (ds.instances.empty()) {
    throw Error(ErrorCode::NothingToExport,
                "no verdicts for " + std::string(oracle::to_string(smell)) + " in session " + info_.id);
  }
  return oracle::oracle_to_string(
      ds, {"tool=" + std::string(kToolName) + " " + std::string(kToolVersion), "session=" + info_.id});
}

json Session::summary_json() const {
  json tallies = json::object();
  for (auto smell : oracle::kAllSmells) {
    auto t = tally(smell);
    tallies[std::string(oracle::to_string(smell))] = {
        {"candidates", t.candidates}, {"labeled", t.labeled}, {"true", t.true_count}, {"false", t.false_count}};
  }
  std::shared_lock lock(mutex_);
  json teams = json::array();
  for (const auto& t : teams_) teams.push_back(t.name);
  return json{{"id", info_.id},          {"project", info_.project}, {"project_path", info_.project_path.string()},
              {"year", info_.year},      {"advisor", info_.advisor}, {"teams", teams},
              {"verdicts", verdicts_.size()}, {"tallies", tallies}};
}

// ---- ReviewService ----------------------------------------------------------

ReviewService::ReviewService(Options options) : options_(std::move(options)) {
  std::error_code ec;
  if (!fs::is_directory(options_.root, ec)) throw Error(ErrorCode::IoError, "not a directory: " + options_.root.string());
  options_.root = fs::canonical(options_.root);
  const auto sessions = options_.root / ".crowdsmell" / "sessions";
  if (!fs::is_directory(sessions, ec)) return;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(sessions)) {
    if (entry.is_directory() && fs::exists(entry.path() / "session.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    json j;
    try {
      j = json::parse(read_text(dir / "session.json"));
      SessionInfo info{j.at("id").get<std::string>(), fs::path(j.at("project_path").get<std::string>()),
                       j.at("project").get<std::string>(), j.at("year").get<int>(), j.at("advisor").get<bool>()};
      sessions_[info.id] = std::make_unique<Session>(info, dir, options_.compact_every, options_.clock);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::SchemaMismatch, (dir / "session.json").string() + ": " + e.what());
    }
  }
}

fs::path ReviewService::state_dir(const std::string& id) const {
  return options_.root / ".crowdsmell" / "sessions" / id;
}

std::pair<Session*, bool> ReviewService::create_session(const std::string& project_path, int year,
                                                        AdvisorConfig advisor) {
  if (project_path.empty()) throw Error(ErrorCode::InvalidArgument, "project path is empty");
  if (year < 1900 || year > 9999) throw Error(ErrorCode::InvalidArgument, "year out of range");
  fs::path p(project_path);
  if (p.is_relative()) p = options_.root / p;
  std::error_code ec;
  auto resolved = fs::canonical(p, ec);
  if (ec || !fs::is_directory(resolved)) throw Error(ErrorCode::IoError, "no such project directory: " + project_path);
  auto rel = resolved.lexically_relative(options_.root);
  if (rel.empty() || *rel.begin() == "..") {
    throw Error(ErrorCode::InvalidArgument, "project must lie inside the service root");
  }
  std::string project = resolved.filename().string();
  std::string id = sanitize_id(project) + "-" + std::to_string(year);

  std::unique_lock lock(mutex_);
  if (auto it = sessions_.find(id); it != sessions_.end()) {
    if (it->second->info().project_path != resolved || it->second->info().advisor != advisor.enabled) {
      throw Error(ErrorCode::InvalidArgument, "session " + id + " already exists with different settings");
    }
    return {it->second.get(), false};
  }
  SessionInfo info{id, resolved, project, year, advisor.enabled};
  auto session = std::make_unique<Session>(info, state_dir(id), options_.compact_every, options_.clock);
  json j{{"id", id}, {"project_path", resolved.string()}, {"project", project}, {"year", year}, {"advisor", advisor.enabled}};
  write_atomically(state_dir(id) / "session.json", j.dump(2) + "\n");
  auto* raw = session.get();
  sessions_[id] = std::move(session);
  return {raw, true};
}

Session& ReviewService::session(const std::string& id) {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'");
  return *it->second;
}

std::vector<std::string> ReviewService::session_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  return ids;
}

}  // namespace crowdsmell::review
