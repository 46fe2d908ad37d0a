#include "psyscale/service/session_manager.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <fstream>

#include "psyscale/error.hpp"
#include "psyscale/hash.hpp"
#include "psyscale/mlds/serialize.hpp"
#include "psyscale/random.hpp"
#include "psyscale/stimuli/sequence.hpp"
#include "psyscale/trials/session.hpp"

namespace psyscale {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kEpochCacheSize = 8;

std::int64_t system_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string stimulus_url(const std::string& hash) { return "/stimuli/" + hash + ".png"; }

// One write() on an O_APPEND descriptor, so a crash leaves either the whole
// line or nothing.
void append_line(const fs::path& path, const std::string& line) {
  const std::string data = line + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::IoError, "cannot open " + path.string() + ": " + std::strerror(errno));
  ssize_t n = -1;
  do {
    n = ::write(fd, data.data(), data.size());
  } while (n < 0 && errno == EINTR);
  const int saved = errno;
  ::close(fd);
  if (n != static_cast<ssize_t>(data.size())) {
    throw Error(ErrorCode::IoError, "short append to " + path.string() + ": " + std::strerror(saved));
  }
}

void touch(const fs::path& path) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::IoError, "cannot create " + path.string() + ": " + std::strerror(errno));
  ::close(fd);
}

std::size_t count_complete_lines(const fs::path& path) {
  const auto text = read_text_file(path);
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

std::string_view to_string(ServiceStatus s) {
  switch (s) {
    case ServiceStatus::BadRequest: return "BadRequest";
    case ServiceStatus::NotFound: return "NotFound";
    case ServiceStatus::Conflict: return "Conflict";
    case ServiceStatus::Gone: return "Gone";
    case ServiceStatus::ServiceUnavailable: return "ServiceUnavailable";
  }
  return "Unknown";
}

Json to_json(const TrialPayload& t) {
  Json j;
  j["session_id"] = t.session_id;
  j["trial_id"] = t.trial_id;
  j["total"] = t.total;
  j["sequence_id"] = t.sequence_id;
  j["pairs"] = Json::array({Json::array({t.pairs[0][0], t.pairs[0][1]}),
                            Json::array({t.pairs[1][0], t.pairs[1][1]})});
  j["presentation_seed"] = t.presentation_seed;
  return j;
}

Json to_json(const ResponseAck& a) {
  Json j;
  j["trial_id"] = a.trial_id;
  j["line_hash"] = a.line_hash;
  j["complete"] = a.complete;
  return j;
}

Json to_json(const SessionProgress& p) {
  Json j;
  j["session_id"] = p.session_id;
  j["completed"] = p.completed;
  j["total"] = p.total;
  j["complete"] = p.completed >= p.total;
  return j;
}

SessionManager::SessionManager(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(clock ? std::move(clock) : Clock(system_ms)) {
  config_.validate();
  for (const auto& [id, dir] : index_sequences(config_.stimuli_dir)) {
    std::array<std::string, 7> hashes;
    for (int t = 0; t < 7; ++t) {
      const auto path = dir / ("frame_" + std::to_string(t) + ".png");
      const auto hash = hex64(fnv1a64(read_text_file(path)));
      stimuli_.emplace(hash, path);
      hashes[static_cast<std::size_t>(t)] = hash;
    }
    sequence_ids_.push_back(id);
    frame_hashes_.push_back(hashes);
  }
  pool_size_ = sequence_ids_.size() * enumerate_quadruples().size() *
               static_cast<std::size_t>(config_.repetitions);
  restore_sessions();
}

std::string SessionManager::token_for(std::uint64_t slice) const {
  return std::to_string(slice) + "-" + hex64(derive_seed(config_.rng_seed, slice));
}

std::optional<std::uint64_t> SessionManager::slice_of(const std::string& token) const {
  const auto dash = token.find('-');
  if (dash == std::string::npos) return std::nullopt;
  std::uint64_t slice = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + dash, slice);
  if (ec != std::errc() || end != token.data() + dash) return std::nullopt;
  if (token != token_for(slice)) return std::nullopt;
  return slice;
}

void SessionManager::restore_sessions() {
  for (const auto& entry : fs::directory_iterator(config_.output_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".jsonl") continue;
    const auto token = entry.path().stem().string();
    const auto slice = slice_of(token);
    if (!slice) continue;
    auto s = std::make_shared<Session>();
    s->slice = *slice;
    s->cursor = std::min(count_complete_lines(entry.path()), config_.max_trials_per_session);
    sessions_.emplace(token, std::move(s));
    next_slice_ = std::max(next_slice_, *slice + 1);
  }
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ServiceError(ServiceStatus::NotFound, "unknown session " + session_id);
  return it->second;
}

std::shared_ptr<const std::vector<ScheduledTrial>> SessionManager::epoch(std::uint64_t e) const {
  {
    std::lock_guard lock(epochs_mutex_);
    if (const auto it = epochs_.find(e); it != epochs_.end()) return it->second;
  }
  TrialPlan plan;
  plan.sequence_ids = sequence_ids_;
  plan.repetitions = config_.repetitions;
  plan.rng_seed = derive_seed(config_.rng_seed, e);
  auto schedule = std::make_shared<const std::vector<ScheduledTrial>>(plan.schedule());
  std::lock_guard lock(epochs_mutex_);
  if (epochs_.size() >= kEpochCacheSize) epochs_.erase(epochs_.begin());
  return epochs_.emplace(e, std::move(schedule)).first->second;
}

ScheduledTrial SessionManager::trial_at(std::uint64_t slice, std::size_t cursor) const {
  const std::uint64_t position = slice * config_.max_trials_per_session + cursor;
  return (*epoch(position / pool_size_))[position % pool_size_];
}

std::string SessionManager::start_session(const std::string& participant_hint) {
  if (pool_size_ == 0) {
    throw ServiceError(ServiceStatus::ServiceUnavailable, "no stimuli under " + config_.stimuli_dir.string());
  }
  std::unique_lock lock(sessions_mutex_);
  const auto slice = next_slice_++;
  const auto token = token_for(slice);
  Json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["kind"] = "human_session";
  meta["session_id"] = token;
  meta["participant_hint"] = participant_hint;
  meta["created_ms"] = clock_();
  meta["rng_seed"] = config_.rng_seed;
  meta["total"] = config_.max_trials_per_session;
  write_json_file(config_.output_dir / (token + ".meta.json"), meta);
  // Creating the response file marks the token as issued across restarts.
  touch(response_path(token));
  auto s = std::make_shared<Session>();
  s->slice = slice;
  sessions_.emplace(token, std::move(s));
  return token;
}

TrialPayload SessionManager::payload(const std::string& id, const Session& s) const {
  const auto trial = trial_at(s.slice, s.cursor);
  const auto shown = Presentation::from_seed(trial.presentation_seed).apply(trial.quadruple);
  const auto& hashes = frame_hashes_[trial.sequence_index];
  auto url = [&](int t) { return stimulus_url(hashes[static_cast<std::size_t>(t)]); };
  TrialPayload p;
  p.session_id = id;
  p.trial_id = s.cursor;
  p.total = config_.max_trials_per_session;
  p.sequence_id = sequence_ids_[trial.sequence_index];
  p.pairs = {{{url(shown.i), url(shown.j)}, {url(shown.k), url(shown.l)}}};
  p.presentation_seed = trial.presentation_seed;
  return p;
}

TrialPayload SessionManager::next_trial(const std::string& session_id) {
  const auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  if (s->cursor >= config_.max_trials_per_session) {
    throw ServiceError(ServiceStatus::Gone, "session " + session_id + " is complete");
  }
  return payload(session_id, *s);
}

ResponseAck SessionManager::post_response(const std::string& session_id, const Json& body) {
  const auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  if (s->cursor >= config_.max_trials_per_session) {
    throw ServiceError(ServiceStatus::Gone, "session " + session_id + " is complete");
  }
  if (!body.is_object() || !body.contains("trial_id") || !body["trial_id"].is_number_unsigned() ||
      !body.contains("choice") || !body["choice"].is_string()) {
    throw ServiceError(ServiceStatus::BadRequest, "body needs unsigned trial_id and string choice");
  }
  const auto presented = parse_choice(body["choice"].get<std::string>());
  if (!presented) throw ServiceError(ServiceStatus::BadRequest, "malformed choice");
  const auto trial_id = body["trial_id"].get<std::size_t>();
  if (trial_id != s->cursor) {
    throw ServiceError(ServiceStatus::Conflict, "trial " + std::to_string(trial_id) + " is not current (" +
                                                    std::to_string(s->cursor) + ")");
  }

  const auto trial = trial_at(s->slice, s->cursor);
  TrialResponse r;
  r.sequence_id = sequence_ids_[trial.sequence_index];
  r.class_pair = class_pair_of(r.sequence_id);
  r.quadruple = trial.quadruple;
  r.choice = Presentation::from_seed(trial.presentation_seed).to_canonical(*presented);
  r.observer_id = "human";
  r.presentation_seed = trial.presentation_seed;
  r.timestamp_ms = clock_();
  const auto line = to_jsonl(r);
  parse_response_line(line);  // same validation as every other response file
  append_line(response_path(session_id), line);
  ++s->cursor;
  return {trial_id, hex64(fnv1a64(line)), s->cursor >= config_.max_trials_per_session};
}

SessionProgress SessionManager::progress(const std::string& session_id) const {
  const auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  return {session_id, s->cursor, config_.max_trials_per_session};
}

std::optional<fs::path> SessionManager::stimulus_path(const std::string& hash) const {
  const auto it = stimuli_.find(hash);
  if (it == stimuli_.end()) return std::nullopt;
  return it->second;
}

Json SessionManager::health() const {
  Json j;
  j["status"] = pool_size_ > 0 ? "ok" : "no_stimuli";
  j["sequences"] = sequence_ids_.size();
  j["pool_size"] = pool_size_;
  std::shared_lock lock(sessions_mutex_);
  j["sessions"] = sessions_.size();
  return j;
}

fs::path SessionManager::response_path(const std::string& session_id) const {
  return config_.output_dir / (session_id + ".jsonl");
}

}  // namespace psyscale
