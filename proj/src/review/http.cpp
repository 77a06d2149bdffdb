#include <httplib.h>

#include <charconv>
#include <thread>

#include "crowdsmell/common/provenance.hpp"
#include "crowdsmell/error.hpp"
#include "crowdsmell/review/review.hpp"

namespace crowdsmell::review {

using nlohmann::json;

namespace {

constexpr std::size_t kDefaultLimit = 50;
constexpr std::size_t kMaxLimit = 1000;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownCandidate:
    case ErrorCode::UnknownTeam:
    case ErrorCode::NothingToExport:
      return 404;
    case ErrorCode::InvalidArgument:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::BadBoolean:
    case ErrorCode::UsageError:
      return 400;
    case ErrorCode::EmptyProject:
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
      return 422;
    default:
      return 500;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, json{{"error", {{"code", code}, {"message", message}}}});
}

json parse_body(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
T field(const json& body, const char* key) {
  if (!body.contains(key)) throw Error(ErrorCode::InvalidArgument, std::string("missing field '") + key + "'");
  try {
    return body.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' has the wrong type");
  }
}

std::size_t size_param(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  auto text = req.get_param_value(key);
  std::size_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string("parameter '") + key + "' must be a non-negative integer");
  }
  return value;
}

oracle::SmellKind smell_param(const httplib::Request& req) {
  if (!req.has_param("smell")) throw Error(ErrorCode::InvalidArgument, "parameter 'smell' is required");
  return oracle::parse_smell(req.get_param_value("smell"));
}

json verdict_to_json(const Verdict& v) {
  return json{{"seq", v.seq}, {"candidate_id", v.candidate_id}, {"team", v.team}, {"is_smell", v.is_smell},
              {"timestamp", v.timestamp}};
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(ReviewService& s) : service(s) { install(); }

  void install();

  ReviewService& service;
  httplib::Server server;
  std::thread thread;
};

void HttpServer::Impl::install() {
  auto& svc = service;
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, json{{"status", "ok"}, {"tool", kToolName}, {"version", kToolVersion}});
  });

  server.Get("/sessions", guarded([&svc](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, json{{"sessions", svc.session_ids()}});
  }));

  server.Post("/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    AdvisorConfig advisor;
    if (body.contains("advisor")) advisor.enabled = field<bool>(body, "advisor");
    auto [session, created] =
        svc.create_session(field<std::string>(body, "project"), field<int>(body, "year"), advisor);
    send_json(res, created ? 201 : 200, session->summary_json());
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, svc.session(req.matches[1]).summary_json());
  }));

  server.Get(R"(/sessions/([^/]+)/teams)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, json{{"teams", svc.session(req.matches[1]).teams()}});
  }));

  server.Post(R"(/sessions/([^/]+)/teams)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    auto& session = svc.session(req.matches[1]);
    auto name = field<std::string>(parse_body(req), "name");
    bool created = session.register_team(name);
    send_json(res, created ? 201 : 200, json{{"name", name}, {"teams", session.teams()}});
  }));

  server.Get(R"(/sessions/([^/]+)/candidates)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    auto& session = svc.session(req.matches[1]);
    auto smell = smell_param(req);
    auto offset = size_param(req, "offset", 0);
    auto limit = std::min(size_param(req, "limit", kDefaultLimit), kMaxLimit);
    auto page = session.candidates(smell, offset, limit);
    json items = json::array();
    for (const auto* c : page.items) {
      auto j = to_json(*c);
      j["verdicts"] = session.latest(c->id);
      items.push_back(j);
    }
    send_json(res, 200, json{{"smell", oracle::to_string(smell)}, {"total", page.total}, {"offset", page.offset},
                             {"limit", limit}, {"items", items}});
  }));

  server.Get(R"(/sessions/([^/]+)/candidates/([^/]+))",
             guarded([&svc](const httplib::Request& req, httplib::Response& res) {
               auto& session = svc.session(req.matches[1]);
               auto j = to_json(session.candidate(req.matches[2]));
               j["verdicts"] = session.latest(req.matches[2]);
               send_json(res, 200, j);
             }));

  server.Get(R"(/sessions/([^/]+)/verdicts)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    json items = json::array();
    for (const auto& v : svc.session(req.matches[1]).verdicts()) items.push_back(verdict_to_json(v));
    send_json(res, 200, json{{"verdicts", items}});
  }));

  server.Post(R"(/sessions/([^/]+)/verdicts)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    auto& session = svc.session(req.matches[1]);
    auto body = parse_body(req);
    auto v = session.submit(field<std::string>(body, "candidate_id"), field<std::string>(body, "team"),
                            field<bool>(body, "is_smell"));
    send_json(res, 201, verdict_to_json(v));
  }));

  server.Get(R"(/sessions/([^/]+)/export)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    auto& session = svc.session(req.matches[1]);
    auto smell = smell_param(req);
    std::optional<int> year;
    if (req.has_param("year")) year = static_cast<int>(size_param(req, "year", 0));
    res.status = 200;
    res.set_header("Content-Disposition", "attachment; filename=\"" + session.info().id + "-" +
                                              std::string(oracle::to_string(smell)) + ".csv\"");
    res.set_content(session.export_csv(smell, year), "text/csv");
  }));
}

HttpServer::HttpServer(ReviewService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool HttpServer::run(const std::string& host, int port) { return impl_->server.listen(host, port); }

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace crowdsmell::review
