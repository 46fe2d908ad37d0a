#pragma once

#include <memory>
#include <ostream>
#include <string>

#include "psyscale/service/session_manager.hpp"

namespace psyscale {

/// cpp-httplib front end for a SessionManager.
///
///   POST /session                    {"participant_hint"?} -> {"session_id"}
///   GET  /session/{id}/trial         -> trial payload
///   POST /session/{id}/response      {"trial_id", "choice"} -> ack
///   GET  /session/{id}/progress      -> {"completed", "total", ...}
///   GET  /healthz
///   GET  /stimuli/{hash}.png
///
/// Errors are JSON {"error": <status name>, "message": ...} with status
/// 400/404/409/410/503, or 500 for anything unexpected.
class HttpService {
 public:
  explicit HttpService(SessionManager& manager);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);

  /// Blocks until stop().
  void run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Loads nothing itself: builds the manager from `config`, binds and serves
/// until the process is stopped. Logs the bound address to `log`.
void serve(const ServiceConfig& config, std::ostream& log);

}  // namespace psyscale
