#include "psyscale/mlds/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psyscale/error.hpp"
#include "psyscale/random.hpp"

namespace psyscale {

namespace {

using detail::kFreeParameters;
using detail::ParameterVector;
using Matrix = std::array<std::array<double, kFreeParameters>, kFreeParameters>;

constexpr double kMinIncrement = 1e-9;
constexpr double kArmijo = 1e-4;
constexpr double kMaxStep = 4.0;
constexpr int kMaxHalvings = 60;
const double kInitialLogSigma = std::log(0.2);

double inf_norm(const ParameterVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const ParameterVector& a, const ParameterVector& b) {
  double s = 0.0;
  for (int i = 0; i < kFreeParameters; ++i) s += a[i] * b[i];
  return s;
}

Matrix identity() {
  Matrix h{};
  for (int i = 0; i < kFreeParameters; ++i) h[i][i] = 1.0;
  return h;
}

struct RunResult {
  ParameterVector theta{};
  double log_likelihood = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

// BFGS on f = -log-likelihood with an Armijo backtracking line search.
RunResult run_bfgs(ParameterVector x, const ResponseTable& table, const FitConfig& config) {
  RunResult out;
  ParameterVector g{};
  double f = -detail::log_likelihood_theta(x, table, &g);
  for (auto& gi : g) gi = -gi;
  if (!std::isfinite(f)) return out;

  Matrix h = identity();
  bool converged = inf_norm(g) < config.grad_tolerance;
  int iter = 0;
  while (!converged && iter < config.max_iterations) {
    ++iter;
    ParameterVector p{};
    for (int r = 0; r < kFreeParameters; ++r) {
      for (int c = 0; c < kFreeParameters; ++c) p[r] -= h[r][c] * g[c];
    }
    double slope = dot(g, p);
    if (!(slope < 0.0)) {
      h = identity();
      for (int i = 0; i < kFreeParameters; ++i) p[i] = -g[i];
      slope = dot(g, p);
    }

    double t = std::min(1.0, kMaxStep / std::max(inf_norm(p), 1e-300));
    ParameterVector x_new{};
    ParameterVector g_new{};
    double f_new = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < kMaxHalvings; ++halving, t *= 0.5) {
      for (int i = 0; i < kFreeParameters; ++i) x_new[i] = x[i] + t * p[i];
      f_new = -detail::log_likelihood_theta(x_new, table, &g_new);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    for (auto& gi : g_new) gi = -gi;

    ParameterVector s{};
    ParameterVector y{};
    for (int i = 0; i < kFreeParameters; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12) {
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      ParameterVector hy{};
      for (int r = 0; r < kFreeParameters; ++r) {
        for (int c = 0; c < kFreeParameters; ++c) hy[r] += h[r][c] * y[c];
      }
      const double yhy = dot(y, hy);
      for (int r = 0; r < kFreeParameters; ++r) {
        for (int c = 0; c < kFreeParameters; ++c) {
          h[r][c] += -rho * (hy[r] * s[c] + s[r] * hy[c]) + (rho * rho * yhy + rho) * s[r] * s[c];
        }
      }
    }

    const double change = std::abs(f_new - f);
    x = x_new;
    f = f_new;
    g = g_new;
    converged = change < config.ll_tolerance || inf_norm(g) < config.grad_tolerance;
  }

  out.theta = x;
  out.log_likelihood = -f;
  out.converged = converged;
  out.iterations = iter;
  return out;
}

ParameterVector starting_point(int restart, std::uint64_t seed) {
  ParameterVector theta{};
  theta[kFreeParameters - 1] = kInitialLogSigma;
  if (restart == 0) return theta;
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
  for (auto& t : theta) t += 0.5 * rng.normal();
  return theta;
}

}  // namespace

void FitConfig::validate() const {
  if (max_iterations < 1) throw Error(ErrorCode::InvalidParameter, "max_iterations must be >= 1");
  if (!(ll_tolerance > 0.0)) throw Error(ErrorCode::InvalidParameter, "ll_tolerance must be > 0");
  if (!(grad_tolerance > 0.0)) throw Error(ErrorCode::InvalidParameter, "grad_tolerance must be > 0");
  if (n_restarts < 1) throw Error(ErrorCode::InvalidParameter, "n_restarts must be >= 1");
}

namespace detail {

void unpack_parameters(const ParameterVector& theta, std::array<double, kSequenceLength>& values,
                       double& sigma) {
  // Increments e_1..e_5 = exp(theta_m), e_6 = 1; shifted by the max exponent
  // so large thetas do not overflow (the normalization cancels the shift).
  double shift = 0.0;
  for (int m = 0; m < 5; ++m) shift = std::max(shift, theta[m]);
  std::array<double, 6> e{};
  for (int m = 0; m < 5; ++m) e[m] = std::exp(theta[m] - shift);
  e[5] = std::exp(-shift);
  double total = 0.0;
  for (double x : e) total += x;
  double cumulative = 0.0;
  values[0] = 0.0;
  for (int k = 1; k < 6; ++k) {
    cumulative += e[k - 1];
    values[k] = std::min(cumulative / total, 1.0);
  }
  values[6] = 1.0;
  sigma = std::exp(theta[5]);
}

double log_likelihood_theta(const ParameterVector& theta, const ResponseTable& table,
                            ParameterVector* grad) {
  std::array<double, kSequenceLength> values{};
  double sigma = 0.0;
  unpack_parameters(theta, values, sigma);
  if (grad == nullptr) {
    return log_likelihood_raw(values, sigma, table, nullptr, nullptr);
  }

  std::array<double, kSequenceLength> gv{};
  double gs = 0.0;
  const double ll = log_likelihood_raw(values, sigma, table, &gv, &gs);

  // d psi_k / d theta_m = e_m / S * ([m <= k] - psi_k) for k = 1..5.
  double shift = 0.0;
  for (int m = 0; m < 5; ++m) shift = std::max(shift, theta[m]);
  double total = std::exp(-shift);
  std::array<double, 5> e{};
  for (int m = 0; m < 5; ++m) {
    e[m] = std::exp(theta[m] - shift);
    total += e[m];
  }
  for (int m = 0; m < 5; ++m) {
    double acc = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const double indicator = (m + 1 <= k) ? 1.0 : 0.0;
      acc += gv[k] * (indicator - values[k]);
    }
    (*grad)[m] = e[m] / total * acc;
  }
  (*grad)[5] = gs * sigma;
  return ll;
}

}  // namespace detail

FitResult fit_mlds(const ResponseTable& table, const FitConfig& config) {
  config.validate();
  if (table.n_responses() < config.min_responses) {
    throw Error(ErrorCode::InsufficientData,
                std::to_string(table.n_responses()) + " responses, need at least " +
                    std::to_string(config.min_responses));
  }
  if (table.n_strict_quadruples() < config.min_strict_quadruples) {
    throw Error(ErrorCode::InsufficientData,
                std::to_string(table.n_strict_quadruples()) +
                    " distinct strict quadruples covered, need at least " +
                    std::to_string(config.min_strict_quadruples));
  }

  RunResult best;
  bool any = false;
  for (int r = 0; r < config.n_restarts; ++r) {
    RunResult run = run_bfgs(starting_point(r, config.rng_seed), table, config);
    if (!std::isfinite(run.log_likelihood)) continue;
    if (!any || run.log_likelihood > best.log_likelihood) {
      best = run;
      any = true;
    }
  }
  if (!any) {
    throw Error(ErrorCode::NonConvergence, "every restart diverged");
  }

  std::array<double, kSequenceLength> values{};
  double sigma = 0.0;
  detail::unpack_parameters(best.theta, values, sigma);

  bool converged = best.converged;
  bool degenerate = false;
  for (int k = 1; k < kSequenceLength; ++k) {
    if (values[k] - values[k - 1] < kMinIncrement) degenerate = true;
  }
  if (degenerate) {
    // Clamp collapsed increments to the floor and renormalize.
    std::array<double, 6> inc{};
    double total = 0.0;
    for (int k = 1; k < kSequenceLength; ++k) {
      inc[k - 1] = std::max(values[k] - values[k - 1], kMinIncrement);
      total += inc[k - 1];
    }
    double cumulative = 0.0;
    for (int k = 1; k < 6; ++k) {
      cumulative += inc[k - 1];
      values[k] = std::min(cumulative / total, 1.0);
    }
    converged = false;
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    sigma = std::clamp(sigma, std::numeric_limits<double>::min(), std::numeric_limits<double>::max());
    converged = false;
  }

  PerceptualScale scale(values, sigma, table.n_responses());
  const double ll = log_likelihood(scale, table);
  return FitResult{scale, ll, converged, best.iterations};
}

FitResult fit_mlds(std::span<const TrialResponse> responses, const FitConfig& config) {
  if (responses.empty()) throw Error(ErrorCode::InsufficientData, "no responses");
  return fit_mlds(ResponseTable(responses), config);
}

}  // namespace psyscale
