#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "psyscale/json.hpp"
#include "psyscale/service/config.hpp"
#include "psyscale/trials/plan.hpp"

namespace psyscale {

enum class ServiceStatus {
  BadRequest = 400,
  NotFound = 404,
  Conflict = 409,
  Gone = 410,
  ServiceUnavailable = 503,
};

std::string_view to_string(ServiceStatus s);

class ServiceError : public std::runtime_error {
 public:
  ServiceError(ServiceStatus status, const std::string& message)
      : std::runtime_error(message), status_(status) {}

  ServiceStatus status() const noexcept { return status_; }

 private:
  ServiceStatus status_;
};

struct TrialPayload {
  std::string session_id;
  std::size_t trial_id = 0;
  std::size_t total = 0;
  std::string sequence_id;
  /// Image URLs in display order: two pairs of two.
  std::array<std::array<std::string, 2>, 2> pairs;
  std::uint64_t presentation_seed = 0;
};

Json to_json(const TrialPayload& t);

struct ResponseAck {
  std::size_t trial_id = 0;
  /// FNV-1a of the persisted line (without the newline), 16 hex digits.
  std::string line_hash;
  bool complete = false;
};

Json to_json(const ResponseAck& a);

struct SessionProgress {
  std::string session_id;
  std::size_t completed = 0;
  std::size_t total = 0;
};

Json to_json(const SessionProgress& p);

/// State behind the HTTP API, usable without a server.
///
/// Token "<n>-<hex>" owns slice n of an endless trial stream: the stream is
/// the pool (every sequence x quadruple x repetition) shuffled per epoch with
/// derive_seed(rng_seed, epoch), epochs concatenated. Slice n covers stream
/// positions [n*S, (n+1)*S) with S = max_trials_per_session, so trials served
/// to a token depend only on (rng_seed, token). Responses go to
/// OUTPUT/<token>.jsonl, one atomic append per response; on construction,
/// existing token files are picked up again with their cursor at the line
/// count.
class SessionManager {
 public:
  using Clock = std::function<std::int64_t()>;

  /// Indexes and hashes the stimuli. An empty stimuli directory is allowed;
  /// start_session then reports ServiceUnavailable.
  explicit SessionManager(ServiceConfig config, Clock clock = {});

  std::string start_session(const std::string& participant_hint = "");

  /// NotFound for an unknown token, Gone once the slice is done. Repeated
  /// calls return the same trial until a response is accepted.
  TrialPayload next_trial(const std::string& session_id);

  /// Body: {"trial_id": n, "choice": "FirstPairMoreSimilar" |
  /// "SecondPairMoreSimilar"}, choice in displayed order. Checks in order:
  /// NotFound, Gone, BadRequest, Conflict (trial_id not the current one).
  ResponseAck post_response(const std::string& session_id, const Json& body);

  SessionProgress progress(const std::string& session_id) const;

  /// File behind a /stimuli/<hash>.png URL.
  std::optional<std::filesystem::path> stimulus_path(const std::string& hash) const;

  Json health() const;

  std::filesystem::path response_path(const std::string& session_id) const;

  const ServiceConfig& config() const { return config_; }
  std::size_t pool_size() const { return pool_size_; }

 private:
  struct Session {
    std::uint64_t slice = 0;
    std::size_t cursor = 0;
    std::mutex mutex;
  };

  std::string token_for(std::uint64_t slice) const;
  std::optional<std::uint64_t> slice_of(const std::string& token) const;
  std::shared_ptr<Session> find(const std::string& session_id) const;
  ScheduledTrial trial_at(std::uint64_t slice, std::size_t cursor) const;
  std::shared_ptr<const std::vector<ScheduledTrial>> epoch(std::uint64_t e) const;
  TrialPayload payload(const std::string& id, const Session& s) const;
  void restore_sessions();

  ServiceConfig config_;
  Clock clock_;
  std::vector<std::string> sequence_ids_;
  /// sequence index -> 7 frame hashes.
  std::vector<std::array<std::string, 7>> frame_hashes_;
  std::map<std::string, std::filesystem::path> stimuli_;
  std::size_t pool_size_ = 0;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_slice_ = 0;

  mutable std::mutex epochs_mutex_;
  mutable std::map<std::uint64_t, std::shared_ptr<const std::vector<ScheduledTrial>>> epochs_;
};

}  // namespace psyscale
