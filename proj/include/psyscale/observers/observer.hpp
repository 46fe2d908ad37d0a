#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "psyscale/mlds/types.hpp"
#include "psyscale/observers/embedding.hpp"
#include "psyscale/observers/gabor.hpp"
#include "psyscale/random.hpp"
#include "psyscale/stimuli/sequence.hpp"

namespace psyscale {

/// Delta_1 = |e_i - e_j|, Delta_2 = |e_k - e_l|; FirstPairMoreSimilar iff
/// Delta_1 <= Delta_2 (exact ties go to the first pair).
Choice machine_choice(const Embedding& e_i, const Embedding& e_j, const Embedding& e_k,
                      const Embedding& e_l);
Choice machine_choice(const std::array<Embedding, kSequenceLength>& frames, const Quadruple& q);

/// Samples the Gaussian decision model: FirstPairMoreSimilar with probability
/// Phi((Delta_2 - Delta_1) / sigma). sigma == 0 compares deterministically,
/// treating gaps within 1e-12 of each other as ties (first pair wins).
/// Throws InvalidParameter for negative sigma.
Choice synthetic_choice(const PerceptualScale& true_scale, const Quadruple& q, double sigma, Rng& rng);

/// A 2AFC response source. choose() receives the quadruple as presented
/// (pairs possibly swapped or reversed) and answers in presented terms.
/// Observers that look at pixels get every sequence through add_sequence()
/// before the first trial; add_sequence() may be called concurrently.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual std::string id() const = 0;
  virtual bool needs_frames() const { return false; }
  virtual void add_sequence(const std::string& sequence_id, const InstanceSequence& seq) {
    (void)sequence_id;
    (void)seq;
  }
  virtual Choice choose(const std::string& sequence_id, const Quadruple& presented) = 0;
};

class RandomObserver final : public Observer {
 public:
  explicit RandomObserver(std::uint64_t seed) : rng_(seed) {}
  std::string id() const override { return "random"; }
  Choice choose(const std::string&, const Quadruple&) override {
    return rng_.coin() ? Choice::FirstPairMoreSimilar : Choice::SecondPairMoreSimilar;
  }

 private:
  Rng rng_;
};

class SyntheticObserver final : public Observer {
 public:
  SyntheticObserver(PerceptualScale scale, double sigma, std::uint64_t seed);
  std::string id() const override { return "synthetic"; }
  Choice choose(const std::string& sequence_id, const Quadruple& presented) override;

 private:
  PerceptualScale scale_;
  double sigma_;
  Rng rng_;
};

class GaborObserver final : public Observer {
 public:
  explicit GaborObserver(GaborBankConfig config = GaborBankConfig::defaults());
  std::string id() const override { return "gabor"; }
  bool needs_frames() const override { return true; }
  void add_sequence(const std::string& sequence_id, const InstanceSequence& seq) override;
  /// Throws MissingEmbedding if the sequence was never added.
  Choice choose(const std::string& sequence_id, const Quadruple& presented) override;

 private:
  GaborFeatureExtractor extractor_;
  std::mutex mutex_;
  std::map<std::string, std::array<Embedding, kSequenceLength>> features_;
};

/// l2 observer over a precomputed manifest keyed by frame_id().
class EmbeddingObserver final : public Observer {
 public:
  EmbeddingObserver(Manifest manifest, std::string observer_id);
  std::string id() const override { return id_; }
  /// Throws MissingEmbedding naming the first absent frame.
  Choice choose(const std::string& sequence_id, const Quadruple& presented) override;

 private:
  Manifest manifest_;
  std::string id_;
};

/// Parsed form of the CLI observer argument:
///   gabor | random | embedding:PATH | synthetic[:key=value,...]
/// Synthetic keys: power (scale exponent, default 1 = linear) and sigma
/// (decision noise, default 0.1).
struct ObserverSpec {
  enum class Kind { Gabor, Random, Embedding, Synthetic };
  Kind kind = Kind::Random;
  std::filesystem::path manifest;
  double power = 1.0;
  double sigma = 0.1;

  /// Throws InvalidParameter on an unknown form.
  static ObserverSpec parse(std::string_view text);
};

std::unique_ptr<Observer> make_observer(const ObserverSpec& spec, std::uint64_t seed,
                                        const GaborBankConfig& gabor = GaborBankConfig::defaults());

}  // namespace psyscale
