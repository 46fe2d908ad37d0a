#include "psyscale/service/http.hpp"

#include <httplib.h>

#include "psyscale/error.hpp"

namespace psyscale {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view name, const std::string& message) {
  Json j;
  j["error"] = name;
  j["message"] = message;
  send_json(res, status, j);
}

// Runs `f` and maps failures onto HTTP statuses.
template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    send_error(res, static_cast<int>(e.status()), to_string(e.status()), e.what());
  } catch (const Error& e) {
    send_error(res, 500, to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "InternalError", e.what());
  }
}

Json parse_body(const httplib::Request& req, bool allow_empty) {
  if (req.body.empty() && allow_empty) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::parse_error&) {
    throw ServiceError(ServiceStatus::BadRequest, "body is not valid JSON");
  }
}

}  // namespace

struct HttpService::Impl {
  SessionManager& manager;
  httplib::Server server;

  explicit Impl(SessionManager& m) : manager(m) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    server.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req, true);
        std::string hint;
        if (body.contains("participant_hint")) {
          if (!body["participant_hint"].is_string()) {
            throw ServiceError(ServiceStatus::BadRequest, "participant_hint must be a string");
          }
          hint = body["participant_hint"].get<std::string>();
        }
        Json out;
        out["session_id"] = manager.start_session(hint);
        send_json(res, 201, out);
      });
    });

    server.Get(R"(/session/([^/]+)/trial)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, to_json(manager.next_trial(req.matches[1]))); });
    });

    server.Post(R"(/session/([^/]+)/response)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        // Unparseable bodies become null and are rejected by the manager,
        // after it has checked for an unknown or finished session.
        const std::string id = req.matches[1];
        const auto body = Json::parse(req.body, nullptr, false);
        send_json(res, 200, to_json(manager.post_response(id, body)));
      });
    });

    server.Get(R"(/session/([^/]+)/progress)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, to_json(manager.progress(req.matches[1]))); });
    });

    server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, manager.health()); });
    });

    server.Get(R"(/stimuli/([0-9a-f]{16})\.png)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto path = manager.stimulus_path(req.matches[1]);
        if (!path) throw ServiceError(ServiceStatus::NotFound, "no such stimulus");
        res.set_header("Cache-Control", "public, max-age=31536000, immutable");
        res.set_content(read_text_file(*path), "image/png");
      });
    });
  }
};

HttpService::HttpService(SessionManager& manager) : impl_(std::make_unique<Impl>(manager)) {}

HttpService::~HttpService() = default;

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpService::run() { impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

void serve(const ServiceConfig& config, std::ostream& log) {
  SessionManager manager(config);
  HttpService http(manager);
  const int port = http.bind(config.host, config.port);
  log << "serving " << manager.pool_size() << " trials from " << config.stimuli_dir.string() << " on http://"
      << config.host << ":" << port << std::endl;
  http.run();
}

}  // namespace psyscale
