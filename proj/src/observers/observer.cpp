#include "psyscale/observers/observer.hpp"

#include <charconv>
#include <cmath>

#include "psyscale/error.hpp"
#include "psyscale/mlds/normal.hpp"

namespace psyscale {

Choice machine_choice(const Embedding& e_i, const Embedding& e_j, const Embedding& e_k,
                      const Embedding& e_l) {
  return l2_distance(e_i, e_j) <= l2_distance(e_k, e_l) ? Choice::FirstPairMoreSimilar
                                                        : Choice::SecondPairMoreSimilar;
}

Choice machine_choice(const std::array<Embedding, kSequenceLength>& frames, const Quadruple& q) {
  auto at = [&](int p) -> const Embedding& { return frames.at(static_cast<std::size_t>(p)); };
  return machine_choice(at(q.i), at(q.j), at(q.k), at(q.l));
}

Choice synthetic_choice(const PerceptualScale& scale, const Quadruple& q, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma must be >= 0");
  const double d1 = std::abs(scale[q.j] - scale[q.i]);
  const double d2 = std::abs(scale[q.l] - scale[q.k]);
  // Scale values live in [0, 1]; gaps that agree to rounding error count as
  // ties, so equal nominal gaps do not get decided by the last ulp.
  if (sigma == 0.0) {
    return d1 <= d2 + 1e-12 ? Choice::FirstPairMoreSimilar : Choice::SecondPairMoreSimilar;
  }
  return rng.uniform() < normal_cdf((d2 - d1) / sigma) ? Choice::FirstPairMoreSimilar
                                                        : Choice::SecondPairMoreSimilar;
}

SyntheticObserver::SyntheticObserver(PerceptualScale scale, double sigma, std::uint64_t seed)
    : scale_(std::move(scale)), sigma_(sigma), rng_(seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma must be >= 0");
}

Choice SyntheticObserver::choose(const std::string&, const Quadruple& presented) {
  return synthetic_choice(scale_, presented, sigma_, rng_);
}

GaborObserver::GaborObserver(GaborBankConfig config) : extractor_(std::move(config)) {}

void GaborObserver::add_sequence(const std::string& sequence_id, const InstanceSequence& seq) {
  std::array<Embedding, kSequenceLength> feats;
  for (int t = 0; t < kSequenceLength; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    feats[idx] = {frame_id(sequence_id, t), extractor_.features(seq.frames[idx])};
  }
  std::lock_guard lock(mutex_);
  features_.insert_or_assign(sequence_id, std::move(feats));
}

Choice GaborObserver::choose(const std::string& sequence_id, const Quadruple& presented) {
  const auto it = features_.find(sequence_id);
  if (it == features_.end()) throw Error(ErrorCode::MissingEmbedding, frame_id(sequence_id, 0));
  return machine_choice(it->second, presented);
}

EmbeddingObserver::EmbeddingObserver(Manifest manifest, std::string observer_id)
    : manifest_(std::move(manifest)), id_(std::move(observer_id)) {}

Choice EmbeddingObserver::choose(const std::string& sequence_id, const Quadruple& q) {
  auto at = [&](int p) -> const Embedding& {
    const auto id = frame_id(sequence_id, p);
    const auto it = manifest_.find(id);
    if (it == manifest_.end()) throw Error(ErrorCode::MissingEmbedding, id);
    return it->second;
  };
  return machine_choice(at(q.i), at(q.j), at(q.k), at(q.l));
}

namespace {

double parse_number(std::string_view text, std::string_view key) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidParameter, "bad value for " + std::string(key) + ": '" +
                                                 std::string(text) + "'");
  }
  return v;
}

}  // namespace

ObserverSpec ObserverSpec::parse(std::string_view text) {
  ObserverSpec spec;
  if (text == "gabor") {
    spec.kind = Kind::Gabor;
  } else if (text == "random") {
    spec.kind = Kind::Random;
  } else if (text.starts_with("embedding:") && text.size() > 10) {
    spec.kind = Kind::Embedding;
    spec.manifest = std::string(text.substr(10));
  } else if (text == "synthetic" || text.starts_with("synthetic:")) {
    spec.kind = Kind::Synthetic;
    auto rest = text.size() > 10 ? text.substr(10) : std::string_view{};
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::InvalidParameter, "synthetic option needs key=value: '" + std::string(item) + "'");
      }
      const auto key = item.substr(0, eq);
      const auto value = parse_number(item.substr(eq + 1), key);
      if (key == "power") {
        if (!(value > 0.0)) throw Error(ErrorCode::InvalidParameter, "power must be > 0");
        spec.power = value;
      } else if (key == "sigma") {
        if (!(value >= 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma must be >= 0");
        spec.sigma = value;
      } else {
        throw Error(ErrorCode::InvalidParameter, "unknown synthetic option '" + std::string(key) + "'");
      }
    }
  } else {
    throw Error(ErrorCode::InvalidParameter, "unknown observer '" + std::string(text) +
                                                 "' (expected gabor, random, embedding:PATH, synthetic[:...])");
  }
  return spec;
}

std::unique_ptr<Observer> make_observer(const ObserverSpec& spec, std::uint64_t seed,
                                        const GaborBankConfig& gabor) {
  switch (spec.kind) {
    case ObserverSpec::Kind::Gabor:
      return std::make_unique<GaborObserver>(gabor);
    case ObserverSpec::Kind::Random:
      return std::make_unique<RandomObserver>(seed);
    case ObserverSpec::Kind::Embedding:
      return std::make_unique<EmbeddingObserver>(load_manifest(spec.manifest),
                                                 "embedding:" + spec.manifest.stem().string());
    case ObserverSpec::Kind::Synthetic:
      // PerceptualScale requires sigma > 0; the stored sigma is only metadata here.
      return std::make_unique<SyntheticObserver>(PerceptualScale::power(spec.power, 1.0), spec.sigma, seed);
  }
  throw Error(ErrorCode::InvalidParameter, "unknown observer kind");
}

}  // namespace psyscale
