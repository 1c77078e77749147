#pragma once
// Bounded, decaying key-value store of beliefs over proposition ids.
//
// Decay is lazy: entries record the tick they were last touched, and any
// access rescales the counts by gamma^(elapsed ticks) in closed form —
// provably identical to decaying every entry every tick, without the O(n)
// per-tick cost. Eviction removes entries whose decayed effective sample
// size falls below n_min (their knowledge has faded back to the prior), and
// an optional capacity cap evicts the lowest-density entries first.
//
// Single-writer contract: all mutating calls come from one logical owner.
// Concurrent read-only use requires an explicit copy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "beliefsim/belief.hpp"
#include "beliefsim/csv.hpp"
#include "beliefsim/types.hpp"

namespace beliefsim {

struct StoreConfig {
  double gamma = 0.99;
  double n_min = 0.5;                    // eviction threshold; 0 disables sweeps
  std::optional<std::size_t> capacity;   // nullopt = unbounded
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
};

class EpistemicStore {
 public:
  EpistemicStore(std::uint32_t universe_size, StoreConfig cfg)
      : k_(universe_size), cfg_(cfg), ln_gamma_(std::log(cfg.gamma)) {
    if (universe_size == 0) throw std::invalid_argument("EpistemicStore: universe size must be > 0");
    if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0))
      throw std::invalid_argument("EpistemicStore: gamma must lie in (0, 1]");
    if (!(cfg.n_min >= 0.0) || !std::isfinite(cfg.n_min))
      throw std::invalid_argument("EpistemicStore: n_min must be finite and >= 0");
    if (cfg.gamma < 1.0 && cfg.n_min > 0.0 && !(cfg.n_min < n_eq(cfg.gamma)))
      throw std::invalid_argument(
          "EpistemicStore: n_min must be below n_eq(gamma), or every belief is "
          "eventually evicted even under constant observation");
    if (cfg.capacity && *cfg.capacity == 0)
      throw std::invalid_argument("EpistemicStore: capacity must be positive (omit for unbounded)");
    if (!(cfg.prior_alpha > 0.0) || !(cfg.prior_beta > 0.0) || !std::isfinite(cfg.prior_alpha) ||
        !std::isfinite(cfg.prior_beta))
      throw std::invalid_argument("EpistemicStore: prior counts must be finite and > 0");
  }

  /// Belief for `id` decayed to `now`. Misses insert the prior: an untracked
  /// proposition is indistinguishable from one we never learned about.
  /// Touches the entry (persists the decayed counts, last_touched = now).
  BetaBelief get_or_init(PropositionId id, Tick now) {
    check_id(id);
    advance_clock(now);
    auto it = entries_.find(id);
    if (it == entries_.end()) return insert_prior(id, now);
    Entry& e = it->second;
    if (e.last_touched < now) {
      index_.erase(key_of(id, e));
      BetaBelief b = belief_of(e).decay(now - e.last_touched);
      e.alpha = b.alpha();
      e.beta = b.beta();
      e.last_touched = now;
      index_.insert(key_of(id, e));
    }
    return belief_of(e);
  }

  /// Record evidence for `id` at tick `now`; equivalent to bringing the entry
  /// up to date and applying the belief update. Returns the updated belief.
  BetaBelief record(PropositionId id, Evidence ev, Tick now) {
    check_id(id);
    advance_clock(now);
    auto it = entries_.find(id);
    if (it == entries_.end()) {
      BetaBelief b = prior_belief().update(ev);
      return insert_entry(id, b, now);
    }
    Entry& e = it->second;
    index_.erase(key_of(id, e));
    BetaBelief b = belief_of(e);
    if (e.last_touched == now) {
      // This tick's decay was already applied by an earlier touch.
      b = b.add_evidence(ev);
    } else {
      b = b.decay(now - e.last_touched - 1).update(ev);
    }
    e.alpha = b.alpha();
    e.beta = b.beta();
    e.last_touched = now;
    index_.insert(key_of(id, e));
    return b;
  }

  /// Remove every entry whose decayed-to-now n_eff is below n_min; returns
  /// the evicted ids. Survivors are not touched.
  std::vector<PropositionId> sweep_evict(Tick now) {
    advance_clock(now);
    std::vector<PropositionId> evicted;
    if (cfg_.n_min <= 0.0 || entries_.empty()) return evicted;
    // Entries share gamma, so index order == decayed-n_eff order; scan the
    // low end and confirm each candidate with the exact comparison. The
    // slack covers log-rounding skew at the boundary.
    const double bound = std::log(cfg_.n_min) - static_cast<double>(now) * ln_gamma_ + 1e-9;
    auto it = index_.begin();
    while (it != index_.end() && it->score < bound) {
      const Entry& e = entries_.at(it->id);
      const double decayed =
          e.n_eff() * decay_factor(cfg_.gamma, now - e.last_touched);
      if (decayed < cfg_.n_min) {
        evicted.push_back(it->id);
        entries_.erase(it->id);
        it = index_.erase(it);
      } else {
        ++it;
      }
    }
    evictions_ += evicted.size();
    return evicted;
  }

  /// Evict lowest decayed-n_eff entries (ties: older last_touched, then
  /// smaller id) until the entry count fits the capacity. Runs automatically
  /// after every insertion.
  std::vector<PropositionId> enforce_capacity() {
    std::vector<PropositionId> evicted;
    if (!cfg_.capacity) return evicted;
    while (entries_.size() > *cfg_.capacity) {
      auto it = index_.begin();
      evicted.push_back(it->id);
      entries_.erase(it->id);
      index_.erase(it);
    }
    evictions_ += evicted.size();
    return evicted;
  }

  /// Entries whose decayed n_eff clears n_min, decayed to `now`, ascending
  /// id. Read-only: does not touch the stored entries.
  std::vector<std::pair<PropositionId, BetaBelief>> active_set(Tick now) const {
    std::vector<std::pair<PropositionId, BetaBelief>> out;
    out.reserve(entries_.size());
    for (const auto& [id, e] : entries_) {
      BetaBelief b = belief_of(e).decay(now >= e.last_touched ? now - e.last_touched : 0);
      if (b.n_eff() >= cfg_.n_min) out.emplace_back(id, b);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

  /// Decayed view of one entry without touching it; nullopt on miss.
  std::optional<BetaBelief> peek(PropositionId id, Tick now) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) return std::nullopt;
    const Entry& e = it->second;
    return belief_of(e).decay(now >= e.last_touched ? now - e.last_touched : 0);
  }

  /// Overwrite (or insert) the belief for `id`, e.g. a plasticity reset.
  void replace(PropositionId id, const BetaBelief& b, Tick now) {
    check_id(id);
    advance_clock(now);
    if (b.gamma() != cfg_.gamma)
      throw std::invalid_argument("EpistemicStore::replace: belief gamma differs from store gamma");
    auto it = entries_.find(id);
    if (it == entries_.end()) {
      insert_entry(id, b, now);
      return;
    }
    Entry& e = it->second;
    index_.erase(key_of(id, e));
    e.alpha = b.alpha();
    e.beta = b.beta();
    e.last_touched = now;
    index_.insert(key_of(id, e));
  }

  bool contains(PropositionId id) const { return entries_.count(id) != 0; }
  std::size_t size() const { return entries_.size(); }
  Tick clock() const { return clock_; }
  std::uint32_t universe_size() const { return k_; }
  const StoreConfig& config() const { return cfg_; }
  BetaBelief prior_belief() const {
    return BetaBelief::prior(cfg_.prior_alpha, cfg_.prior_beta, cfg_.gamma);
  }

  /// Cumulative counters since construction; insertions() always equals
  /// evictions() + size().
  std::uint64_t insertions() const { return insertions_; }
  std::uint64_t evictions() const { return evictions_; }

  /// Serialize raw entries as `id,alpha,beta,last_touched`, ascending id.
  void write_snapshot(std::ostream& os) const {
    os << "id,alpha,beta,last_touched\n";
    std::vector<PropositionId> ids;
    ids.reserve(entries_.size());
    for (const auto& [id, e] : entries_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (PropositionId id : ids) {
      const Entry& e = entries_.at(id);
      os << id << ',' << format_double(e.alpha) << ',' << format_double(e.beta) << ','
         << e.last_touched << '\n';
    }
  }

  /// Rebuild a store from a snapshot. The store clock resumes at the newest
  /// last_touched tick.
  static EpistemicStore read_snapshot(std::istream& is, std::uint32_t universe_size,
                                      StoreConfig cfg) {
    EpistemicStore store(universe_size, cfg);
    std::string line;
    if (!std::getline(is, line) || split_csv_line(line) != std::vector<std::string>{
                                       "id", "alpha", "beta", "last_touched"})
      throw std::runtime_error("snapshot: missing or malformed header");
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      auto fields = split_csv_line(line);
      if (fields.size() != 4) throw std::runtime_error("snapshot: expected 4 fields, got line '" + line + "'");
      auto id = static_cast<PropositionId>(parse_u64_field(fields[0], "id"));
      if (id >= universe_size) throw std::runtime_error("snapshot: id out of range: " + fields[0]);
      if (store.entries_.count(id)) throw std::runtime_error("snapshot: duplicate id " + fields[0]);
      double alpha = parse_double_field(fields[1], "alpha");
      double beta = parse_double_field(fields[2], "beta");
      Tick lt = parse_u64_field(fields[3], "last_touched");
      store.insert_entry(id, BetaBelief::from_counts(alpha, beta, cfg.gamma), lt);
      if (lt > store.clock_) store.clock_ = lt;
    }
    return store;
  }

 private:
  struct Entry {
    double alpha;
    double beta;
    Tick last_touched;
    double n_eff() const { return alpha + beta; }
  };

  // Decay-normalized ordering key: ln(n_eff) - last_touched * ln(gamma).
  // All entries share gamma, so at any single `now` this orders entries by
  // decayed n_eff without rescanning them as time passes.
  struct IndexKey {
    double score;
    Tick last_touched;
    PropositionId id;
    bool operator<(const IndexKey& o) const {
      if (score != o.score) return score < o.score;
      if (last_touched != o.last_touched) return last_touched < o.last_touched;
      return id < o.id;
    }
  };

  void check_id(PropositionId id) const {
    if (id >= k_)
      throw std::out_of_range("EpistemicStore: id " + std::to_string(id) + " outside universe of " +
                              std::to_string(k_));
  }

  void advance_clock(Tick now) {
    if (now < clock_)
      throw std::invalid_argument("EpistemicStore: time went backwards (now=" + std::to_string(now) +
                                  " < clock=" + std::to_string(clock_) + ")");
    clock_ = now;
  }

  IndexKey key_of(PropositionId id, const Entry& e) const {
    return IndexKey{std::log(e.n_eff()) - static_cast<double>(e.last_touched) * ln_gamma_,
                    e.last_touched, id};
  }

  BetaBelief belief_of(const Entry& e) const {
    return BetaBelief::from_counts(e.alpha, e.beta, cfg_.gamma);
  }

  BetaBelief insert_prior(PropositionId id, Tick now) {
    return insert_entry(id, prior_belief(), now);
  }

  BetaBelief insert_entry(PropositionId id, const BetaBelief& b, Tick now) {
    Entry e{b.alpha(), b.beta(), now};
    index_.insert(key_of(id, e));
    entries_.emplace(id, e);
    ++insertions_;
    enforce_capacity();  // may evict the entry it just admitted
    return b;
  }

  std::uint32_t k_;
  StoreConfig cfg_;
  double ln_gamma_;
  Tick clock_ = 0;
  std::uint64_t insertions_ = 0;
  std::uint64_t evictions_ = 0;
  std::unordered_map<PropositionId, Entry> entries_;
  std::set<IndexKey> index_;
};

}  // namespace beliefsim
