#pragma once
// Query-selection policies: a random baseline, uncertainty sampling (engage
// the candidate whose belief variance is highest), and an optional surprisal
// reset wrapper that restores plasticity after an extreme prediction error.

#include <optional>
#include <stdexcept>
#include <vector>

#include "beliefsim/belief.hpp"
#include "beliefsim/rng.hpp"
#include "beliefsim/store.hpp"
#include "beliefsim/types.hpp"

namespace beliefsim {

struct ResetEvent {
  PropositionId id;
  double surprisal;
};

/// Position of the maximum value; positions within tie_epsilon of the max
/// form a tie set resolved by a uniform draw (so identical cold-start
/// candidates don't degenerate to always-pick-first). The rng is consumed
/// only when there is an actual tie.
inline std::size_t argmax_with_ties(const std::vector<double>& values, double tie_epsilon,
                                    Rng& rng) {
  if (values.empty()) throw std::invalid_argument("argmax_with_ties: empty values");
  double best = values[0];
  for (double v : values) best = v > best ? v : best;
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= best - tie_epsilon) ties.push_back(i);
  return ties.size() == 1 ? ties[0] : ties[rng.pick_index(ties.size())];
}

class Strategy {
 public:
  enum class Base { kRandom, kUncertainty };

  static Strategy random() { return Strategy(Base::kRandom); }

  static Strategy uncertainty(double tie_epsilon = 1e-12) {
    if (!(tie_epsilon >= 0.0)) throw std::invalid_argument("Strategy: tie_epsilon must be >= 0");
    Strategy s(Base::kUncertainty);
    s.tie_epsilon_ = tie_epsilon;
    return s;
  }

  /// Wrap a base policy with the surprisal reset: after each observation, if
  /// the pre-update belief's predictive log-loss exceeds tau, the stored
  /// belief is rescaled to n_eff = n_reset (mean preserved). At most one
  /// wrapping level.
  static Strategy with_surprisal_reset(Strategy inner, double tau, double n_reset) {
    if (inner.surprisal_reset_)
      throw std::invalid_argument("Strategy: surprisal reset wraps at most one level");
    if (!(tau > 0.0) || !(n_reset > 0.0))
      throw std::invalid_argument("Strategy: tau and n_reset must be > 0");
    inner.surprisal_reset_ = true;
    inner.tau_ = tau;
    inner.n_reset_ = n_reset;
    return inner;
  }

  Base base() const { return base_; }
  bool has_surprisal_reset() const { return surprisal_reset_; }
  double tie_epsilon() const { return tie_epsilon_; }
  double tau() const { return tau_; }
  double n_reset() const { return n_reset_; }

  /// Pick one candidate to engage. Random draws uniformly over the batch
  /// (duplicates weight by multiplicity, i.e. straight access sampling).
  /// Uncertainty ranks the candidates' decayed-to-now variances through the
  /// store, initializing unseen candidates at the prior.
  PropositionId select(const std::vector<PropositionId>& candidates, EpistemicStore& store,
                       Tick now, Rng& rng) const {
    if (candidates.empty()) throw std::invalid_argument("Strategy::select: empty candidate list");
    if (base_ == Base::kRandom) return candidates[rng.pick_index(candidates.size())];
    std::vector<double> variances;
    variances.reserve(candidates.size());
    for (PropositionId id : candidates)
      variances.push_back(store.get_or_init(id, now).variance());
    return candidates[argmax_with_ties(variances, tie_epsilon_, rng)];
  }

  /// Called once per completed observation, after the store has recorded it.
  /// `pre_update` is the belief as it stood when the prediction was made
  /// (snapshot taken by the engine before record()).
  std::optional<ResetEvent> after_observe(PropositionId id, Evidence ev,
                                          const BetaBelief& pre_update, EpistemicStore& store,
                                          Tick now) const {
    if (!surprisal_reset_) return std::nullopt;
    const double s = pre_update.surprisal(ev);
    if (!(s > tau_)) return std::nullopt;
    BetaBelief post = store.get_or_init(id, now);
    store.replace(id, post.reset_plasticity(n_reset_), now);
    return ResetEvent{id, s};
  }

  bool operator==(const Strategy&) const = default;

 private:
  explicit Strategy(Base base) : base_(base) {}

  Base base_;
  double tie_epsilon_ = 1e-12;
  bool surprisal_reset_ = false;
  double tau_ = 2.5;
  double n_reset_ = 2.0;
};

}  // namespace beliefsim
