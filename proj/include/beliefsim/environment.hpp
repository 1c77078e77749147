#pragma once
// The simulated feedback environment: piecewise-constant ground truth per
// proposition (with a scheduled consensus shift), uniform or Zipfian access
// skew over the proposition universe, candidate-batch generation, and
// Bernoulli feedback.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "beliefsim/belief.hpp"
#include "beliefsim/rng.hpp"
#include "beliefsim/types.hpp"

namespace beliefsim {

struct ScheduleSegment {
  Tick start_tick;
  double theta_star;
  bool operator==(const ScheduleSegment&) const = default;
};

/// theta*(t) as an ordered list of segments, each holding from its start
/// tick until the next segment begins. The base schedule applies to every
/// proposition unless a per-id override is installed.
class GroundTruthSchedule {
 public:
  explicit GroundTruthSchedule(std::vector<ScheduleSegment> segments) : base_(std::move(segments)) {
    validate_segments(base_);
  }

  static GroundTruthSchedule constant(double theta) {
    return GroundTruthSchedule({{1, theta}});
  }

  GroundTruthSchedule& add_override(PropositionId id, std::vector<ScheduleSegment> segments) {
    validate_segments(segments);
    overrides_[id] = std::move(segments);
    return *this;
  }

  double theta_star(PropositionId id, Tick t) const {
    auto ov = overrides_.find(id);
    const auto& segs = ov != overrides_.end() ? ov->second : base_;
    if (t < segs.front().start_tick)
      throw std::out_of_range("GroundTruthSchedule: tick " + std::to_string(t) +
                              " precedes the first segment");
    auto it = std::upper_bound(segs.begin(), segs.end(), t,
                               [](Tick v, const ScheduleSegment& s) { return v < s.start_tick; });
    return std::prev(it)->theta_star;
  }

  const std::vector<ScheduleSegment>& segments() const { return base_; }
  const std::map<PropositionId, std::vector<ScheduleSegment>>& overrides() const { return overrides_; }

  bool operator==(const GroundTruthSchedule&) const = default;

 private:
  static void validate_segments(const std::vector<ScheduleSegment>& segs) {
    if (segs.empty()) throw std::invalid_argument("GroundTruthSchedule: needs at least one segment");
    if (segs.front().start_tick != 1)
      throw std::invalid_argument("GroundTruthSchedule: first segment must start at tick 1");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (!(segs[i].theta_star >= 0.0 && segs[i].theta_star <= 1.0))
        throw std::invalid_argument("GroundTruthSchedule: theta_star must lie in [0, 1]");
      if (i > 0 && segs[i].start_tick <= segs[i - 1].start_tick)
        throw std::invalid_argument("GroundTruthSchedule: segments must be strictly ordered by start tick");
    }
  }

  std::vector<ScheduleSegment> base_;
  std::map<PropositionId, std::vector<ScheduleSegment>> overrides_;
};

enum class AccessKind { kUniform, kZipf };

/// Probability mass over the k propositions that drives which topics the
/// environment surfaces. Zipf assigns id i the rank i+1 mass r^(-s)/H, so id 0
/// is the head of the distribution.
class AccessDistribution {
 public:
  static AccessDistribution uniform(std::uint32_t k) {
    check_k(k);
    std::vector<double> pmf(k, 1.0 / static_cast<double>(k));
    return AccessDistribution(AccessKind::kUniform, k, 0.0, std::move(pmf));
  }

  static AccessDistribution zipf(std::uint32_t k, double s) {
    check_k(k);
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("AccessDistribution: zipf exponent must be finite and > 0");
    std::vector<double> pmf(k);
    double norm = 0.0;
    for (std::uint32_t r = 1; r <= k; ++r) norm += std::pow(static_cast<double>(r), -s);
    for (std::uint32_t r = 1; r <= k; ++r)
      pmf[r - 1] = std::pow(static_cast<double>(r), -s) / norm;
    return AccessDistribution(AccessKind::kZipf, k, s, std::move(pmf));
  }

  const std::vector<double>& pmf() const { return pmf_; }
  AccessKind kind() const { return kind_; }
  std::uint32_t universe_size() const { return k_; }
  double zipf_s() const { return s_; }

  /// One draw by inverse CDF over the precomputed cumulative masses.
  PropositionId draw(Rng& rng) const {
    const double u = rng.next_double();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.end()) --it;
    return static_cast<PropositionId>(it - cum_.begin());
  }

  /// m i.i.d. draws; duplicates are expected and meaningful.
  std::vector<PropositionId> draw_batch(std::size_t m, Rng& rng) const {
    if (m == 0) throw std::invalid_argument("draw_batch: m must be >= 1");
    std::vector<PropositionId> ids(m);
    for (auto& id : ids) id = draw(rng);
    return ids;
  }

  bool operator==(const AccessDistribution& o) const {
    return kind_ == o.kind_ && k_ == o.k_ && s_ == o.s_;
  }

 private:
  AccessDistribution(AccessKind kind, std::uint32_t k, double s, std::vector<double> pmf)
      : kind_(kind), k_(k), s_(s), pmf_(std::move(pmf)), cum_(pmf_.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
      acc += pmf_[i];
      cum_[i] = acc;
    }
    cum_.back() = 1.0;  // guard the top bucket against rounding
  }

  static void check_k(std::uint32_t k) {
    if (k == 0) throw std::invalid_argument("AccessDistribution: k must be > 0");
  }

  AccessKind kind_;
  std::uint32_t k_;
  double s_;  // zipf exponent; 0 for uniform
  std::vector<double> pmf_;
  std::vector<double> cum_;
};

/// One round of feedback: Bernoulli(theta*(id, t)).
inline Evidence observe(const GroundTruthSchedule& sched, PropositionId id, Tick t, Rng& rng) {
  return Evidence(rng.bernoulli(sched.theta_star(id, t)) ? 1.0 : 0.0);
}

}  // namespace beliefsim
