#pragma once
// Beta-Bernoulli belief state with an exponential forgetting factor.
//
// A belief holds pseudo-counts (alpha, beta) of supporting and contradicting
// evidence. Each observed tick multiplies both counts by gamma before adding
// the new evidence, so the effective sample size alpha + beta converges to
// the equilibrium 1/(1 - gamma) instead of growing without bound, and the
// belief variance keeps a strictly positive floor. gamma = 1 recovers the
// classic conjugate update.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "beliefsim/types.hpp"

namespace beliefsim {

/// Counts never drop below this floor, so moments stay defined even after
/// extreme decay (gamma^dt denormalizes for huge dt).
inline constexpr double kMinCount = 1e-300;

/// gamma^ticks by binary exponentiation. Uses only IEEE multiplications, so
/// results are bit-reproducible (std::pow is not guaranteed to be).
inline double decay_factor(double gamma, Tick ticks) {
  if (gamma == 1.0 || ticks == 0) return 1.0;
  double result = 1.0;
  double base = gamma;
  while (ticks > 0) {
    if (ticks & 1u) result *= base;
    base *= base;
    ticks >>= 1u;
  }
  return result;
}

/// Equilibrium effective sample size 1/(1 - gamma) of the recurrence
/// N' = gamma * N + 1. Undefined for gamma = 1 (the static agent's counts
/// grow without bound); callers must branch.
inline double n_eq(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::domain_error("n_eq: no finite equilibrium for gamma outside (0, 1)");
  return 1.0 / (1.0 - gamma);
}

/// Degree of support in [0, 1]: 1 fully supports the proposition, 0 fully
/// contradicts it. Binary feedback uses the endpoints; fractional values
/// carry soft evidence (critic scores, partial agreement).
class Evidence {
 public:
  explicit Evidence(double y) : y_(y) {
    if (!(y >= 0.0 && y <= 1.0))
      throw std::invalid_argument("Evidence: y must lie in [0, 1], got " + std::to_string(y));
  }

  double y() const { return y_; }

 private:
  double y_;
};

class BetaBelief {
 public:
  /// Fresh belief from strictly positive prior counts.
  static BetaBelief prior(double alpha0, double beta0, double gamma) {
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0) || !(beta0 > 0.0) || !std::isfinite(beta0))
      throw std::invalid_argument("BetaBelief: prior counts must be finite and > 0");
    check_gamma(gamma);
    return BetaBelief(alpha0, beta0, gamma);
  }

  /// Rehydrate from raw counts (snapshots, stores). Counts may be tiny but
  /// their sum must be positive.
  static BetaBelief from_counts(double alpha, double beta, double gamma) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha) || !(beta >= 0.0) || !std::isfinite(beta) ||
        !(alpha + beta > 0.0))
      throw std::invalid_argument("BetaBelief: counts must be finite, nonnegative, with positive sum");
    check_gamma(gamma);
    return BetaBelief(std::max(alpha, kMinCount), std::max(beta, kMinCount), gamma);
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  double mean() const {
    assert(alpha_ + beta_ > 0.0);
    return alpha_ / (alpha_ + beta_);
  }

  /// Posterior variance alpha*beta / ((alpha+beta)^2 (alpha+beta+1)) — the
  /// epistemic-uncertainty score that query strategies rank on.
  double variance() const {
    const double n = alpha_ + beta_;
    assert(n > 0.0);
    return alpha_ * beta_ / (n * n * (n + 1.0));
  }

  /// Effective sample size alpha + beta.
  double n_eff() const { return alpha_ + beta_; }

  /// One observed tick: counts decay by gamma, then the evidence is added.
  [[nodiscard]] BetaBelief update(Evidence e) const {
    return BetaBelief(floor_count(gamma_ * alpha_ + e.y()),
                      floor_count(gamma_ * beta_ + (1.0 - e.y())), gamma_);
  }

  /// Evidence without a decay step. Used when the current tick's decay has
  /// already been applied to this belief (e.g. it was read earlier in the
  /// same tick); update() == decay(1-tick-worth) + add_evidence().
  [[nodiscard]] BetaBelief add_evidence(Evidence e) const {
    return BetaBelief(floor_count(alpha_ + e.y()), floor_count(beta_ + (1.0 - e.y())), gamma_);
  }

  /// dt unobserved ticks: both counts scale by gamma^dt. The mean is
  /// unchanged; variance rises as the effective sample size shrinks.
  [[nodiscard]] BetaBelief decay(Tick dt) const {
    const double f = decay_factor(gamma_, dt);
    return BetaBelief(floor_count(alpha_ * f), floor_count(beta_ * f), gamma_);
  }

  /// Predictive log-loss of the observation under the current mean:
  /// -[y ln(mu) + (1-y) ln(1-mu)]. High values flag observations the belief
  /// considered near-impossible.
  double surprisal(Evidence e) const {
    const double mu = mean();
    double s = 0.0;
    if (e.y() > 0.0) s -= e.y() * std::log(mu);
    if (e.y() < 1.0) s -= (1.0 - e.y()) * std::log1p(-mu);
    return s;
  }

  /// Mean-preserving rescale of the counts to n_eff = n_reset. Restores
  /// plasticity after a surprisal spike: the belief keeps its point estimate
  /// but behaves as if it had only n_reset observations behind it.
  [[nodiscard]] BetaBelief reset_plasticity(double n_reset) const {
    if (!(n_reset > 0.0) || !std::isfinite(n_reset))
      throw std::invalid_argument("reset_plasticity: n_reset must be finite and > 0");
    const double a = mean() * n_reset;
    return BetaBelief(floor_count(a), floor_count(n_reset - a), gamma_);
  }

 private:
  BetaBelief(double alpha, double beta, double gamma) : alpha_(alpha), beta_(beta), gamma_(gamma) {}

  static void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0))
      throw std::invalid_argument("BetaBelief: gamma must lie in (0, 1]");
  }

  static double floor_count(double c) { return c > kMinCount ? c : kMinCount; }

  double alpha_;
  double beta_;
  double gamma_;  // fixed for the lifetime of the belief
};

}  // namespace beliefsim
