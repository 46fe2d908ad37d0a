#include "psyscale/metrics/brainscore.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "psyscale/error.hpp"
#include "psyscale/mlds/serialize.hpp"

namespace psyscale {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::pair<std::string, double>> parse_brain_scores(std::string_view csv,
                                                               const std::string& source) {
  std::vector<std::pair<std::string, double>> out;
  std::set<std::string> seen;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    const auto line = trim(csv.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(line_no);
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorCode::ParseError, where + ": expected two comma-separated fields");
    }
    const auto id = trim(line.substr(0, comma));
    const auto value = trim(line.substr(comma + 1));
    if (!header_seen) {
      if (id != "observer_id" || value != "brain_score") {
        throw Error(ErrorCode::ParseError, where + ": header must be observer_id,brain_score");
      }
      header_seen = true;
      continue;
    }
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (id.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::ParseError, where + ": bad row");
    }
    if (!seen.insert(std::string(id)).second) {
      throw Error(ErrorCode::DuplicateId, where + ": duplicate observer '" + std::string(id) + "'");
    }
    out.emplace_back(std::string(id), v);
  }
  if (!header_seen && !csv.empty() && trim(csv).size() > 0) {
    throw Error(ErrorCode::ParseError, source + ": missing header");
  }
  return out;
}

BrainScoreComparison brainscore_comparison(std::span<const ScoreReport> scores,
                                           std::span<const std::pair<std::string, double>> brain_scores) {
  BrainScoreComparison c;
  std::vector<double> ps, bs;
  for (const auto& s : scores) {
    ComparisonRow row{s.observer_id, s.psychophysical_score, std::nullopt};
    for (const auto& [id, value] : brain_scores) {
      if (id == s.observer_id) row.brain_score = value;
    }
    if (row.brain_score) {
      ps.push_back(row.psychophysical_score);
      bs.push_back(*row.brain_score);
    }
    c.rows.push_back(std::move(row));
  }
  c.n_matched = ps.size();
  if (ps.size() >= 3) {
    try {
      c.cross_rho = spearman_rho(ps, bs);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UndefinedCorrelation) throw;
    }
  }
  return c;
}

Json to_json(const BrainScoreComparison& c) {
  Json j;
  j["rows"] = Json::array();
  for (const auto& r : c.rows) {
    j["rows"].push_back({{"observer_id", r.observer_id},
                         {"psychophysical_score", r.psychophysical_score},
                         {"brain_score", r.brain_score ? Json(*r.brain_score) : Json(nullptr)}});
  }
  j["n_matched"] = c.n_matched;
  j["cross_rho"] = c.cross_rho ? Json(*c.cross_rho) : Json(nullptr);
  return j;
}

std::string to_tsv(const BrainScoreComparison& c) {
  std::string out = "observer_id\tpsychophysical_score\tbrain_score\n";
  for (const auto& r : c.rows) {
    out += r.observer_id + "\t" + format_double(r.psychophysical_score) + "\t" +
           (r.brain_score ? format_double(*r.brain_score) : "") + "\n";
  }
  return out;
}

}  // namespace psyscale
