#include "psyscale/metrics/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psyscale/error.hpp"

namespace psyscale {

double skewness(const PerceptualScale& scale) {
  double sum = 0.0;
  for (double v : scale.values()) sum += v;
  return -2.0 * ((sum - 1.0) / 5.0 - 0.5);
}

SkewnessSet skewness_set(const FitSet& fits, bool negate) {
  SkewnessSet set;
  set.observer_id = fits.observer_id;
  for (const auto& [pair, fit] : fits.fits) {
    const double sb = skewness(fit.scale);
    set.entries[pair.key()] = negate ? -sb : sb;
  }
  return set;
}

Json to_json(const SkewnessSet& set) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "skewness";
  j["observer_id"] = set.observer_id;
  j["entries"] = Json::object();
  for (const auto& [key, sb] : set.entries) j["entries"][key] = sb;
  return j;
}

SkewnessSet skewness_set_from_json(const Json& j) {
  check_schema_version(j, "skewness set");
  SkewnessSet set;
  try {
    if (j.value("kind", "") != "skewness") throw Error(ErrorCode::ParseError, "not a skewness document");
    set.observer_id = j.at("observer_id").get<std::string>();
    for (const auto& [key, value] : j.at("entries").items()) {
      ClassPair::from_key(key);
      const double sb = value.get<double>();
      if (!std::isfinite(sb)) throw Error(ErrorCode::ParseError, "non-finite skewness for " + key);
      set.entries[key] = sb;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("skewness set: ") + e.what());
  }
  return set;
}

SkewnessSet load_skewness(const std::filesystem::path& path, bool negate) {
  const auto doc = read_json_file(path);
  const auto kind = doc.is_object() ? doc.value("kind", "") : "";
  try {
    if (kind == "fits") return skewness_set(fit_set_from_json(doc), negate);
    auto set = skewness_set_from_json(doc);
    if (negate) {
      for (auto& [key, sb] : set.entries) sb = -sb;
    }
    return set;
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && v[order[end]] == v[order[start]]) ++end;
    const double rank = (static_cast<double>(start + end - 1)) / 2.0 + 1.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidParameter, "spearman_rho: length mismatch");
  if (x.size() < 3) throw Error(ErrorCode::InvalidParameter, "spearman_rho needs at least 3 values");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mean = (static_cast<double>(x.size()) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::UndefinedCorrelation, "spearman_rho: constant ranks");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Json to_json(const ScoreReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "score";
  j["observer_id"] = r.observer_id;
  j["psychophysical_score"] = r.psychophysical_score;
  j["n_pairs_compared"] = r.n_pairs_compared;
  j["brain_score"] = r.brain_score ? Json(*r.brain_score) : Json(nullptr);
  j["rho_signed"] = r.rho_signed;
  return j;
}

ScoreReport score_report_from_json(const Json& j) {
  check_schema_version(j, "score report");
  try {
    ScoreReport r;
    if (j.value("kind", "") != "score") throw Error(ErrorCode::ParseError, "not a score document");
    r.observer_id = j.at("observer_id").get<std::string>();
    r.psychophysical_score = j.at("psychophysical_score").get<double>();
    r.n_pairs_compared = j.at("n_pairs_compared").get<std::size_t>();
    if (j.contains("brain_score") && !j["brain_score"].is_null()) r.brain_score = j["brain_score"].get<double>();
    r.rho_signed = j.at("rho_signed").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("score report: ") + e.what());
  }
}

ScoreReport psychophysical_score(const SkewnessSet& human, const SkewnessSet& model) {
  std::vector<double> h, m;
  for (const auto& [key, sb] : human.entries) {
    if (const auto it = model.entries.find(key); it != model.entries.end()) {
      h.push_back(sb);
      m.push_back(it->second);
    }
  }
  if (h.size() < 3) {
    throw Error(ErrorCode::InsufficientOverlap, "only " + std::to_string(h.size()) +
                                                    " class pairs shared between " + human.observer_id +
                                                    " and " + model.observer_id);
  }
  ScoreReport r;
  r.observer_id = model.observer_id;
  r.rho_signed = spearman_rho(h, m);
  r.psychophysical_score = std::abs(r.rho_signed);
  r.n_pairs_compared = h.size();
  return r;
}

std::vector<VarianceRow> variance_table(std::span<const SkewnessSet> sets) {
  std::vector<VarianceRow> rows;
  for (const auto& set : sets) {
    if (set.entries.size() < 2) {
      throw Error(ErrorCode::InsufficientData, "variance needs at least 2 entries for " + set.observer_id);
    }
    double mean = 0.0;
    for (const auto& [key, sb] : set.entries) mean += sb;
    mean /= static_cast<double>(set.entries.size());
    double ss = 0.0;
    for (const auto& [key, sb] : set.entries) ss += (sb - mean) * (sb - mean);
    rows.push_back({set.observer_id, ss / static_cast<double>(set.entries.size()), set.entries.size()});
  }
  std::sort(rows.begin(), rows.end(), [](const VarianceRow& a, const VarianceRow& b) {
    return a.variance != b.variance ? a.variance > b.variance : a.observer_id < b.observer_id;
  });
  return rows;
}

}  // namespace psyscale
