#include "psyscale/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "psyscale/error.hpp"
#include "psyscale/mlds/fit.hpp"
#include "psyscale/observers/observer.hpp"
#include "psyscale/parallel.hpp"
#include "psyscale/random.hpp"
#include "psyscale/service/config.hpp"
#include "psyscale/service/http.hpp"
#include "psyscale/stimuli/stimgen.hpp"
#include "psyscale/trials/plan.hpp"
#include "psyscale/trials/session.hpp"

namespace psyscale {

namespace fs = std::filesystem;

FitOutcome fit_responses(const fs::path& responses, const FitCommandOptions& options) {
  const auto files = response_files(responses);
  const auto grouped = pool_by_class_pair(files);
  if (grouped.empty()) {
    throw Error(ErrorCode::InsufficientData, "no responses under " + responses.string());
  }
  const std::vector<std::pair<ClassPair, std::vector<TrialResponse>>> pairs(grouped.begin(), grouped.end());

  std::string observer_id = options.observer_id;
  if (observer_id.empty()) {
    std::set<std::string> ids;
    for (const auto& [pair, rs] : pairs)
      for (const auto& r : rs) ids.insert(r.observer_id);
    observer_id = ids.size() == 1 ? *ids.begin() : "pooled";
  }

  FitConfig cfg;
  cfg.rng_seed = options.seed;
  cfg.n_restarts = options.restarts;
  cfg.validate();

  std::vector<std::optional<FitResult>> fits(pairs.size());
  std::vector<std::string> reasons(pairs.size());
  ExceptionSink sink;
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    sink.capture([&] {
      const auto idx = static_cast<std::size_t>(i);
      try {
        fits[idx] = fit_mlds(pairs[idx].second, cfg);
      } catch (const Error& e) {
        reasons[idx] = e.what();
      }
    });
  }
  sink.rethrow();

  FitOutcome out;
  out.fits.observer_id = observer_id;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (fits[i]) {
      out.fits.fits.emplace_back(pairs[i].first, *fits[i]);
    } else {
      out.skipped.emplace_back(pairs[i].first, reasons[i]);
    }
  }
  if (out.fits.fits.empty()) {
    throw Error(ErrorCode::InsufficientData, "no class pair could be fitted: " + out.skipped.front().second);
  }
  return out;
}

Report build_report(const ReportOptions& options) {
  if (options.null_samples < 1) throw Error(ErrorCode::InvalidParameter, "null samples must be >= 1");
  Report report;
  const auto human = load_skewness(options.human, options.negate_skew);

  std::vector<SkewnessSet> models;
  for (const auto& path : options.models) models.push_back(load_skewness(path, options.negate_skew));

  // Random responders at the human response counts.
  std::map<std::string, std::size_t> counts;
  if (options.human_responses) {
    for (const auto& [pair, rs] : pool_by_class_pair(response_files(*options.human_responses))) {
      counts[pair.key()] = rs.size();
    }
  }
  std::vector<std::pair<std::string, std::size_t>> null_pairs;
  for (const auto& [key, sb] : human.entries) {
    const auto it = counts.find(key);
    null_pairs.emplace_back(key, it == counts.end() ? options.null_responses : it->second);
  }
  std::vector<SkewnessSet> null_sets;
  for (int s = 0; s < options.null_samples; ++s) {
    null_sets.push_back(random_observer_skewness(null_pairs, derive_seed(options.seed, static_cast<std::uint64_t>(s))));
  }

  try {
    report.null_test = chi_squared_null_test(human, null_sets, options.bins);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidParameter) throw;
    report.null_test_error = e.what();
  }

  std::vector<SkewnessSet> rows{human};
  rows.insert(rows.end(), models.begin(), models.end());
  if (null_sets.front().entries.size() >= 2) rows.push_back(null_sets.front());
  report.variance = variance_table(rows);

  std::vector<std::pair<std::string, double>> brain;
  if (options.brain_scores) {
    brain = parse_brain_scores(read_text_file(*options.brain_scores), options.brain_scores->string());
  }
  for (const auto& m : models) {
    auto score = psychophysical_score(human, m);
    for (const auto& [id, value] : brain) {
      if (id == score.observer_id) score.brain_score = value;
    }
    report.scores.push_back(std::move(score));
  }
  if (options.brain_scores) report.comparison = brainscore_comparison(report.scores, brain);
  return report;
}

Json to_json(const Report& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "report";
  j["variance_table"] = Json::array();
  for (const auto& row : report.variance) {
    j["variance_table"].push_back({{"observer_id", row.observer_id}, {"variance", row.variance}, {"n", row.n}});
  }
  if (report.null_test) {
    j["null_test"] = to_json(*report.null_test);
  } else {
    j["null_test"] = nullptr;
    j["null_test_error"] = report.null_test_error;
  }
  j["scores"] = Json::array();
  for (const auto& s : report.scores) j["scores"].push_back(to_json(s));
  j["brainscore"] = report.comparison ? to_json(*report.comparison) : Json(nullptr);
  return j;
}

namespace {

void write_or_print(const std::string& out_path, const Json& doc, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << doc.dump(2) << "\n";
  } else {
    write_json_file(out_path, doc);
  }
}

struct CliState {
  // stimgen
  std::string images, masks, stim_out;
  std::size_t pairs_per_instance = 10;
  double blur_sigma = 3.0;
  // trials
  std::string sequences, plan_out, plan_path, observer, responses_out, observer_id;
  int repetitions = 1;
  std::int64_t epoch_ms = 0;
  // fit
  std::string responses, fit_out, skew_out;
  int restarts = 5;
  // score
  std::string human, model, score_out;
  // report
  std::vector<std::string> models;
  std::string human_responses, brain_scores, report_out, plot_data;
  std::size_t null_responses = 1860;
  int null_samples = 1;
  int bins = 20;
  // serve
  std::string config;
  // shared
  std::uint64_t seed = 0;
  bool negate_skew = false;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perceptual-scale experiments: stimuli, 2AFC trials, MLDS fits and scores", "psyscale"};
  app.require_subcommand(1);
  CliState st;

  auto* stimgen = app.add_subcommand("stimgen", "Build 7-frame blend sequences from object renders");
  stimgen->add_option("--images", st.images, "IMAGES/<class>/<instance>[@viewport].png")->required();
  stimgen->add_option("--masks", st.masks, "Masks mirroring the image tree")->required();
  stimgen->add_option("--out", st.stim_out, "Output directory")->required();
  stimgen->add_option("--pairs-per-instance", st.pairs_per_instance)->capture_default_str();
  stimgen->add_option("--seed", st.seed)->capture_default_str();
  stimgen->add_option("--blur-sigma", st.blur_sigma)->capture_default_str();

  auto* trials = app.add_subcommand("trials", "Plan and run machine-observer sessions");
  trials->require_subcommand(1);
  auto* plan = trials->add_subcommand("plan", "Write a trial plan over every sequence");
  plan->add_option("--sequences", st.sequences, "stimgen output directory")->required();
  plan->add_option("--out", st.plan_out)->required();
  plan->add_option("--repetitions", st.repetitions)->capture_default_str();
  plan->add_option("--seed", st.seed)->capture_default_str();
  auto* run = trials->add_subcommand("run", "Answer a plan with a machine observer");
  run->add_option("--plan", st.plan_path)->required();
  run->add_option("--observer", st.observer, "gabor | random | embedding:PATH | synthetic[:power=X,sigma=Y]")
      ->required();
  run->add_option("--sequences", st.sequences, "stimgen output directory");
  run->add_option("--out", st.responses_out)->required();
  run->add_option("--seed", st.seed, "Observer seed")->capture_default_str();
  run->add_option("--epoch-ms", st.epoch_ms, "Timestamp of the first response")->capture_default_str();
  run->add_option("--observer-id", st.observer_id, "Override the recorded observer id");

  auto* fit = app.add_subcommand("fit", "Fit one perceptual scale per class pair");
  fit->add_option("--responses", st.responses, "Response file or directory of *.jsonl")->required();
  fit->add_option("--out", st.fit_out)->required();
  fit->add_option("--skew-out", st.skew_out, "Also write the skewness set");
  fit->add_option("--observer-id", st.observer_id);
  fit->add_option("--seed", st.seed)->capture_default_str();
  fit->add_option("--restarts", st.restarts)->capture_default_str();
  fit->add_flag("--negate-skew", st.negate_skew);

  auto* score = app.add_subcommand("score", "Psychophysical-Score of a model against humans");
  score->add_option("--human", st.human, "Fits or skewness file")->required();
  score->add_option("--model", st.model, "Fits or skewness file")->required();
  score->add_option("--out", st.score_out, "Score JSON (stdout when omitted)");
  score->add_flag("--negate-skew", st.negate_skew);

  auto* report = app.add_subcommand("report", "Variance table, chi-squared null test, Brain-Score join");
  report->add_option("--human", st.human, "Human fits or skewness file")->required();
  report->add_option("--model", st.models, "Machine fits or skewness files")->take_all();
  report->add_option("--human-responses", st.human_responses, "Match null response counts to these files");
  report->add_option("--null-responses", st.null_responses, "Responses per random pair otherwise")
      ->capture_default_str();
  report->add_option("--null-samples", st.null_samples, "Random-responder sets in the null")
      ->capture_default_str();
  report->add_option("--bins", st.bins)->capture_default_str();
  report->add_option("--seed", st.seed)->capture_default_str();
  report->add_option("--brain-scores", st.brain_scores, "CSV observer_id,brain_score");
  report->add_option("--plot-data", st.plot_data, "TSV for the score comparison plot");
  report->add_option("--out", st.report_out, "Report JSON (stdout when omitted)");
  report->add_flag("--negate-skew", st.negate_skew);

  auto* serve_cmd = app.add_subcommand("serve", "Serve 2AFC trials over HTTP");
  serve_cmd->add_option("--config", st.config, "TOML config (default: $PSYSCALE_CONFIG)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (stimgen->parsed()) {
      const auto summary =
          run_stimgen({st.images, st.masks, st.stim_out, st.pairs_per_instance, st.seed, st.blur_sigma});
      out << summary.sequence_ids.size() << " sequences written to " << st.stim_out << "\n";
      for (const auto& s : summary.short_instances) {
        err << "warning: instance " << s << " has fewer than " << st.pairs_per_instance << " pairs\n";
      }
    } else if (plan->parsed()) {
      std::vector<std::string> ids;
      for (const auto& [id, dir] : index_sequences(st.sequences)) ids.push_back(id);
      const auto p = build_plan(ids, st.repetitions, st.seed);
      write_json_file(st.plan_out, to_json(p));
      out << p.size() << " trials over " << ids.size() << " sequences\n";
    } else if (run->parsed()) {
      const auto p = trial_plan_from_json(read_json_file(st.plan_path));
      const auto spec = ObserverSpec::parse(st.observer);
      auto observer = make_observer(spec, st.seed);
      std::map<std::string, fs::path> dirs;
      if (!st.sequences.empty()) dirs = index_sequences(st.sequences);
      const auto record = run_machine_session(p, *observer, dirs, {st.epoch_ms, st.observer_id});
      write_session(st.responses_out, record);
      if (record.failure) {
        err << "error: " << record.failure->what() << " (" << record.responses.size()
            << " responses kept, session marked incomplete)\n";
        return is_validation_error(record.failure->code()) ? 2 : 1;
      }
      out << record.responses.size() << " responses written to " << st.responses_out << "\n";
    } else if (fit->parsed()) {
      const auto outcome = fit_responses(st.responses, {st.observer_id, st.seed, st.restarts});
      write_json_file(st.fit_out, to_json(outcome.fits));
      if (!st.skew_out.empty()) write_json_file(st.skew_out, to_json(skewness_set(outcome.fits, st.negate_skew)));
      for (const auto& [pair, why] : outcome.skipped) err << "warning: skipped " << pair.key() << ": " << why << "\n";
      out << outcome.fits.fits.size() << " class pairs fitted\n";
    } else if (score->parsed()) {
      const auto r = psychophysical_score(load_skewness(st.human, st.negate_skew),
                                          load_skewness(st.model, st.negate_skew));
      write_or_print(st.score_out, to_json(r), out);
      if (!st.score_out.empty() && st.score_out != "-") {
        out << r.observer_id << " psychophysical_score " << format_double(r.psychophysical_score) << "\n";
      }
    } else if (report->parsed()) {
      ReportOptions ro;
      ro.human = st.human;
      ro.models.assign(st.models.begin(), st.models.end());
      if (!st.human_responses.empty()) ro.human_responses = st.human_responses;
      ro.null_responses = st.null_responses;
      ro.null_samples = st.null_samples;
      ro.seed = st.seed;
      ro.bins = st.bins;
      if (!st.brain_scores.empty()) ro.brain_scores = st.brain_scores;
      ro.negate_skew = st.negate_skew;
      const auto r = build_report(ro);
      if (!r.null_test) err << "warning: null test skipped: " << r.null_test_error << "\n";
      write_or_print(st.report_out, to_json(r), out);
      if (!st.plot_data.empty()) {
        if (!r.comparison) {
          throw Error(ErrorCode::InvalidParameter, "--plot-data needs --brain-scores");
        }
        write_text_file(st.plot_data, to_tsv(*r.comparison));
      }
    } else if (serve_cmd->parsed()) {
      const auto cfg = st.config.empty() ? load_service_config_from_env() : load_service_config(st.config);
      serve(cfg, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_validation_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace psyscale
