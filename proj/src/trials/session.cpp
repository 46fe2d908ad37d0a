#include "psyscale/trials/session.hpp"

#include <algorithm>

#include "psyscale/mlds/serialize.hpp"
#include "psyscale/parallel.hpp"
#include "psyscale/stimuli/sequence.hpp"

namespace psyscale {

namespace fs = std::filesystem;

SessionRecord run_machine_session(const TrialPlan& plan, Observer& observer,
                                  const std::map<std::string, fs::path>& sequence_dirs,
                                  const SessionOptions& options) {
  SessionRecord record;
  record.plan = plan;
  record.observer_id = options.observer_id.empty() ? observer.id() : options.observer_id;
  record.started_ms = options.epoch_ms;
  record.finished_ms = options.epoch_ms;

  try {
    const auto trials = plan.schedule();
    std::vector<ClassPair> class_pairs;
    for (const auto& id : plan.sequence_ids) class_pairs.push_back(class_pair_of(id));

    if (observer.needs_frames()) {
      for (const auto& id : plan.sequence_ids) {
        if (!sequence_dirs.contains(id)) throw Error(ErrorCode::IoError, "no stimuli for sequence " + id);
      }
      const auto n = static_cast<std::ptrdiff_t>(plan.sequence_ids.size());
      ExceptionSink sink;
#pragma omp parallel for schedule(dynamic, 1)
      for (std::ptrdiff_t s = 0; s < n; ++s) {
        sink.capture([&] {
          const auto& id = plan.sequence_ids[static_cast<std::size_t>(s)];
          observer.add_sequence(id, read_sequence(sequence_dirs.at(id)));
        });
      }
      sink.rethrow();
    }

    record.responses.reserve(trials.size());
    for (std::size_t n = 0; n < trials.size(); ++n) {
      const auto& t = trials[n];
      const auto& seq_id = plan.sequence_ids[t.sequence_index];
      const auto shown = Presentation::from_seed(t.presentation_seed);
      const auto answer = observer.choose(seq_id, shown.apply(t.quadruple));
      TrialResponse r;
      r.sequence_id = seq_id;
      r.class_pair = class_pairs[t.sequence_index];
      r.quadruple = t.quadruple;
      r.choice = shown.to_canonical(answer);
      r.observer_id = record.observer_id;
      r.presentation_seed = t.presentation_seed;
      r.timestamp_ms = options.epoch_ms + static_cast<std::int64_t>(n);
      record.responses.push_back(std::move(r));
    }
    record.complete = true;
  } catch (const Error& e) {
    record.failure = e;
  } catch (const std::exception& e) {
    record.failure = Error(ErrorCode::IoError, e.what());
  }
  record.finished_ms = options.epoch_ms + static_cast<std::int64_t>(record.responses.size());
  return record;
}

std::map<std::string, fs::path> index_sequences(const fs::path& root) {
  std::map<std::string, fs::path> out;
  for (const auto& dir : find_sequences(root)) out.emplace(read_sequence_spec(dir).sequence_id(), dir);
  return out;
}

void write_session(const fs::path& path, const SessionRecord& record) {
  write_responses(path, record.responses);
  Json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["kind"] = "session";
  meta["observer_id"] = record.observer_id;
  meta["plan"] = to_json(record.plan);
  meta["started"] = record.started_ms;
  meta["finished"] = record.finished_ms;
  meta["n_responses"] = record.responses.size();
  meta["complete"] = record.complete;
  if (record.failure) {
    meta["failure"] = {{"code", std::string(to_string(record.failure->code()))},
                       {"message", record.failure->what()}};
  }
  auto meta_path = path;
  meta_path += ".meta.json";
  write_json_file(meta_path, meta);
}

std::vector<TrialResponse> pool_responses(std::span<const fs::path> files, const ClassPair& class_pair) {
  std::vector<TrialResponse> out;
  for (const auto& f : files) {
    for (auto& r : read_responses(f)) {
      if (r.class_pair == class_pair) out.push_back(std::move(r));
    }
  }
  return out;
}

std::map<ClassPair, std::vector<TrialResponse>> pool_by_class_pair(std::span<const fs::path> files) {
  std::map<ClassPair, std::vector<TrialResponse>> out;
  for (const auto& f : files) {
    for (auto& r : read_responses(f)) {
      auto key = r.class_pair;
      out[std::move(key)].push_back(std::move(r));
    }
  }
  return out;
}

std::vector<fs::path> response_files(const fs::path& dir) {
  if (fs::is_regular_file(dir)) return {dir};
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "no such file or directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace psyscale
