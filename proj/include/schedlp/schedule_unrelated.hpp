#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "schedlp/instance.hpp"
#include "schedlp/lp_scheduling.hpp"
#include "schedlp/rng.hpp"

namespace schedlp {

/// One random draw over all rectangles: per positive-mass edge (i, j), a
/// start sampled proportionally to x[i][j][.], a uniform point tau inside
/// the sampled rectangle, and the deterministic-given-the-start shift
/// theta = 0.2 (s + phi) + 0.4 y p.
struct RectSample {
  std::vector<std::vector<std::int64_t>> start;  // -1 where y == 0
  std::vector<std::vector<double>> tau;
  std::vector<std::vector<double>> shift;
};

inline RectSample sample_rectangles(const Instance& inst, const FracUnrelated& frac,
                                    Rng& rng) {
  const int m = frac.m, n = frac.n;
  RectSample sample;
  sample.start.assign(m, std::vector<std::int64_t>(n, -1));
  sample.tau.assign(m, std::vector<double>(n, 0.0));
  sample.shift.assign(m, std::vector<double>(n, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (frac.y[i][j] <= 0.0) continue;
      double pick = rng.next_open_closed() * frac.y[i][j];
      double cum = 0.0;
      std::int64_t s = -1;
      for (std::size_t c = 0; c < frac.x[i][j].size(); ++c) {
        if (frac.x[i][j][c] <= 0.0) continue;
        cum += frac.x[i][j][c];
        s = static_cast<std::int64_t>(c);
        if (cum >= pick) break;
      }
      double p = static_cast<double>(inst.pmatrix[i][j]);
      sample.start[i][j] = s;
      sample.tau[i][j] = static_cast<double>(s) + p * rng.next_open_closed();
      sample.shift[i][j] =
          0.2 * (static_cast<double>(s) + frac.phi[i][j]) + 0.4 * frac.y[i][j] * p;
    }
  }
  return sample;
}

/// good  <=>  phi + y p >= 0.01 p. Bad edges are the ones whose mass sits at
/// the very front of the horizon; only they enter the grouping machinery.
inline std::vector<std::vector<bool>> classify_good(const Instance& inst,
                                                    const FracUnrelated& frac) {
  std::vector<std::vector<bool>> good(frac.m, std::vector<bool>(frac.n, false));
  for (int i = 0; i < frac.m; ++i)
    for (int j = 0; j < frac.n; ++j) {
      if (frac.y[i][j] <= 0.0) continue;
      double p = static_cast<double>(inst.pmatrix[i][j]);
      good[i][j] = frac.phi[i][j] + frac.y[i][j] * p >= 0.01 * p;
    }
  return good;
}

constexpr int kNoBlock = INT32_MIN;

/// Dyadic block assignment for bad edges. The block containing tau is unique;
/// the edge lands there only if (2^a, 2^(a+1)] fits inside (10 phi, p] and the
/// shifted rectangle still covers the block (s + theta <= 2^a).
inline std::vector<std::vector<int>> assign_blocks(
    const Instance& inst, const FracUnrelated& frac, const RectSample& sample,
    const std::vector<std::vector<bool>>& good) {
  std::vector<std::vector<int>> block(frac.m, std::vector<int>(frac.n, kNoBlock));
  for (int i = 0; i < frac.m; ++i) {
    for (int j = 0; j < frac.n; ++j) {
      if (frac.y[i][j] <= 0.0 || good[i][j]) continue;
      double tau = sample.tau[i][j];
      if (tau <= 0.25) continue;  // below the lowest block (a >= -2)
      int a = -2;
      double hi = 0.5;
      while (tau > hi) {
        hi *= 2.0;
        ++a;
      }
      double lo = hi / 2.0;
      double p = static_cast<double>(inst.pmatrix[i][j]);
      if (lo < 10.0 * frac.phi[i][j]) continue;
      if (hi > p) continue;
      if (static_cast<double>(sample.start[i][j]) + sample.shift[i][j] > lo) continue;
      block[i][j] = a;
    }
  }
  return block;
}

/// Disjoint edge groups per machine, each with total y at most 1, produced
/// per (machine, block): greedy fill into sets closed once their weight
/// reaches 1/9, pad to exactly 10 sets, drop 2 uniformly at random, merge the
/// survivors. pre_drop_weights records every block's total weight before the
/// drop for diagnostics.
struct GroupingScheme {
  std::vector<std::vector<std::vector<int>>> groups;  // [machine][group] -> job ids
  std::vector<std::vector<double>> pre_drop_weights;  // [machine][block index]
};

inline GroupingScheme build_grouping(const FracUnrelated& frac, const RectSample& sample,
                                     const std::vector<std::vector<int>>& block,
                                     Rng& rng) {
  (void)sample;
  GroupingScheme scheme;
  scheme.groups.resize(frac.m);
  scheme.pre_drop_weights.resize(frac.m);
  for (int i = 0; i < frac.m; ++i) {
    // Blocks in ascending exponent order, edges in ascending job id.
    std::vector<int> exponents;
    for (int j = 0; j < frac.n; ++j)
      if (block[i][j] != kNoBlock) exponents.push_back(block[i][j]);
    std::sort(exponents.begin(), exponents.end());
    exponents.erase(std::unique(exponents.begin(), exponents.end()), exponents.end());

    for (int a : exponents) {
      std::vector<std::vector<int>> sets(1);
      std::vector<double> weight(1, 0.0);
      double total = 0.0;
      for (int j = 0; j < frac.n; ++j) {
        if (block[i][j] != a) continue;
        sets.back().push_back(j);
        weight.back() += frac.y[i][j];
        total += frac.y[i][j];
        if (weight.back() >= 1.0 / 9.0) {
          sets.emplace_back();
          weight.push_back(0.0);
        }
      }
      scheme.pre_drop_weights[i].push_back(total);
      if (sets.back().empty()) {
        sets.pop_back();
        weight.pop_back();
      }
      if (sets.empty()) continue;
      if (sets.size() > 10)
        throw std::runtime_error("build_grouping: more than 10 sets in a block");
      sets.resize(10);
      int d1 = static_cast<int>(rng.next_int(0, 9));
      int d2 = static_cast<int>(rng.next_int(0, 8));
      if (d2 >= d1) ++d2;
      std::vector<int> merged;
      double merged_weight = 0.0;
      for (int s = 0; s < 10; ++s) {
        if (s == d1 || s == d2) continue;
        for (int j : sets[s]) {
          merged.push_back(j);
          merged_weight += frac.y[i][j];
        }
      }
      if (merged_weight > 1.0 + 1e-9)
        throw std::runtime_error("build_grouping: group weight above 1");
      if (!merged.empty()) scheme.groups[i].push_back(std::move(merged));
    }
  }
  return scheme;
}

/// Randomized rounding of the fractional assignment y to one machine per
/// job, preserving every edge's marginal exactly and biasing edges that share
/// a group toward anti-correlation.
///
/// Two kinds of mass moves, both martingales on every coordinate:
///   - grouped move: edges e = (i, j), e' = (i, j') in one group move in
///     opposite directions, with each job's counterweight carried by another
///     of its fractional edges;
///   - job move: two fractional edges of one job trade mass.
/// Every move drives at least one touched edge to 0 or 1, so at most |E|
/// moves happen. Grouped moves run first, and job moves never make an
/// integral edge fractional again, so grouped pairs stay resolved.
class DependentRounder {
public:
  DependentRounder(const FracUnrelated& frac, const GroupingScheme& grouping)
      : m_(frac.m), n_(frac.n) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j)
        if (frac.y[i][j] > 0.0) {
          edge_machine_.push_back(i);
          edge_job_.push_back(j);
          // Repaired solutions can carry values a few ulp off the exact
          // bounds (e.g. 1 + 1e-16 after renormalization); treat those as
          // integral from the start.
          double v = frac.y[i][j];
          if (v > 1.0 - 1e-9) v = 1.0;
          if (v < 1e-9) v = 0.0;
          value_.push_back(v);
        }
    edges_of_job_.resize(n_);
    for (int e = 0; e < num_edges(); ++e) edges_of_job_[edge_job_[e]].push_back(e);
    for (int i = 0; i < m_; ++i) {
      for (const auto& group : grouping.groups[i]) {
        std::vector<int> members;
        for (int j : group) {
          int e = find_edge(i, j);
          if (e >= 0) members.push_back(e);
        }
        if (members.size() >= 2) groups_.push_back(std::move(members));
      }
    }
  }

  std::vector<int> round(Rng& rng) {
    int guard = 10 * num_edges() + 100;
    while (guard-- > 0) {
      if (grouped_move(rng)) continue;
      if (job_move(rng)) continue;
      if (resolve_lone_residue()) continue;
      break;
    }
    if (guard <= 0) throw std::runtime_error("dependent_round: did not converge");

    std::vector<int> machine_of(n_, -1);
    std::vector<double> sum(n_, 0.0);
    for (int e = 0; e < num_edges(); ++e) {
      sum[edge_job_[e]] += value_[e];
      if (value_[e] == 1.0) {
        if (machine_of[edge_job_[e]] >= 0)
          throw std::runtime_error("dependent_round: job assigned twice");
        machine_of[edge_job_[e]] = edge_machine_[e];
      } else if (value_[e] != 0.0) {
        throw std::runtime_error("dependent_round: fractional value survived");
      }
    }
    for (int j = 0; j < n_; ++j) {
      if (machine_of[j] < 0) throw std::runtime_error("dependent_round: unassigned job");
      // Well above snap noise, well below any genuine move-logic bug.
      if (std::abs(sum[j] - 1.0) > 1e-7)
        throw std::runtime_error("dependent_round: marginal drift");
    }
    return machine_of;
  }

private:
  int num_edges() const { return static_cast<int>(value_.size()); }

  int find_edge(int machine, int job) const {
    for (int e : edges_of_job_[job])
      if (edge_machine_[e] == machine) return e;
    return -1;
  }

  bool fractional(int e) const { return value_[e] > 0.0 && value_[e] < 1.0; }

  void snap(int e) {
    if (value_[e] < 1e-12) value_[e] = 0.0;
    if (value_[e] > 1.0 - 1e-12) value_[e] = 1.0;
  }

  /// A job whose other edges are all integral must itself be integral; any
  /// residue is accumulated float noise from the snapped moves. Anything
  /// beyond noise scale is a genuine marginal-preservation bug.
  bool resolve_lone_residue() {
    for (int j = 0; j < n_; ++j) {
      int lone = -1, count = 0;
      for (int e : edges_of_job_[j])
        if (fractional(e)) {
          lone = e;
          ++count;
        }
      if (count != 1) continue;
      if (value_[lone] > 1.0 - 1e-9)
        value_[lone] = 1.0;
      else if (value_[lone] < 1e-9)
        value_[lone] = 0.0;
      else
        throw std::runtime_error("dependent_round: marginal drift");
      return true;
    }
    return false;
  }

  /// Another fractional edge of the same job; edges on other machines are
  /// preferred so the counterweight stays out of the group being rounded.
  int counterweight(int e) const {
    int job = edge_job_[e], machine = edge_machine_[e];
    int fallback = -1;
    for (int cand : edges_of_job_[job]) {
      if (cand == e || !fractional(cand)) continue;
      if (edge_machine_[cand] != machine) return cand;
      if (fallback < 0) fallback = cand;
    }
    return fallback;
  }

  void apply(int e, int f, int ep, int fp, double delta) {
    value_[e] += delta;
    value_[f] -= delta;
    value_[ep] -= delta;
    value_[fp] += delta;
    snap(e);
    snap(f);
    snap(ep);
    snap(fp);
  }

  bool grouped_move(Rng& rng) {
    for (const auto& group : groups_) {
      int e = -1, ep = -1;
      for (int cand : group) {
        if (!fractional(cand)) continue;
        if (e < 0) {
          e = cand;
        } else {
          ep = cand;
          break;
        }
      }
      if (ep < 0) continue;
      int f = counterweight(e), fp = counterweight(ep);
      if (f < 0 || fp < 0)
        throw std::runtime_error("dependent_round: lone fractional edge");
      double up = std::min(std::min(1.0 - value_[e], value_[f]),
                           std::min(value_[ep], 1.0 - value_[fp]));
      double down = std::min(std::min(value_[e], 1.0 - value_[f]),
                             std::min(1.0 - value_[ep], value_[fp]));
      if (rng.next_closed_open() < down / (up + down))
        apply(e, f, ep, fp, up);
      else
        apply(e, f, ep, fp, -down);
      return true;
    }
    return false;
  }

  bool job_move(Rng& rng) {
    for (int j = 0; j < n_; ++j) {
      int e = -1, ep = -1;
      for (int cand : edges_of_job_[j]) {
        if (!fractional(cand)) continue;
        if (e < 0) {
          e = cand;
        } else {
          ep = cand;
          break;
        }
      }
      if (ep < 0) continue;
      double up = std::min(1.0 - value_[e], value_[ep]);
      double down = std::min(value_[e], 1.0 - value_[ep]);
      double delta;
      if (rng.next_closed_open() < down / (up + down))
        delta = up;
      else
        delta = -down;
      value_[e] += delta;
      value_[ep] -= delta;
      snap(e);
      snap(ep);
      return true;
    }
    return false;
  }

  int m_, n_;
  std::vector<int> edge_machine_, edge_job_;
  std::vector<double> value_;
  std::vector<std::vector<int>> edges_of_job_;
  std::vector<std::vector<int>> groups_;
};

inline std::vector<int> dependent_round(const FracUnrelated& frac,
                                        const GroupingScheme& grouping, Rng& rng) {
  DependentRounder rounder(frac, grouping);
  return rounder.round(rng);
}

namespace detail {

/// Back-to-back packing from time zero, per machine, in the given key order
/// (ties by job id).
inline Schedule pack_by_order(const Instance& inst, const std::vector<int>& machine_of,
                              const std::vector<std::vector<double>>& order_key) {
  const int n = inst.n();
  Schedule sched;
  sched.placements.resize(n);
  for (int i = 0; i < inst.m; ++i) {
    std::vector<int> jobs;
    for (int j = 0; j < n; ++j)
      if (machine_of[j] == i) jobs.push_back(j);
    std::sort(jobs.begin(), jobs.end(), [&](int a, int b) {
      if (order_key[i][a] != order_key[i][b]) return order_key[i][a] < order_key[i][b];
      return a < b;
    });
    Rational clock(0);
    for (int j : jobs) {
      Rational end = clock + Rational(inst.pmatrix[i][j]);
      sched.placements[j] = Placement{i, clock, end};
      clock = end;
    }
  }
  return sched;
}

}  // namespace detail

/// Baseline rounding: per job, pick one rectangle with probability equal to
/// its height, order each machine's jobs by the uniform point inside the
/// chosen rectangle, pack from time zero.
inline Schedule independent_round(const Instance& inst, const FracUnrelated& frac,
                                  std::uint64_t seed) {
  if (inst.model != Model::Unrelated)
    throw std::invalid_argument("independent_round: wrong model");
  Rng rng(seed);
  const int n = frac.n, m = frac.m;
  std::vector<int> machine_of(n, -1);
  std::vector<std::vector<double>> tau(m, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    double pick = rng.next_open_closed();
    double cum = 0.0;
    int mi = -1;
    std::int64_t si = -1;
    for (int i = 0; i < m && cum < pick; ++i) {
      for (std::size_t s = 0; s < frac.x[i][j].size(); ++s) {
        if (frac.x[i][j][s] <= 0.0) continue;
        cum += frac.x[i][j][s];
        mi = i;
        si = static_cast<std::int64_t>(s);
        if (cum >= pick) break;
      }
    }
    machine_of[j] = mi;
    tau[mi][j] = static_cast<double>(si) +
                 static_cast<double>(inst.pmatrix[mi][j]) * rng.next_open_closed();
  }
  return detail::pack_by_order(inst, machine_of, tau);
}

struct UnrelatedTrial {
  int trial = 0;
  Rational cost;
  int num_bad_edges = 0;
  int num_groups = 0;
  std::uint64_t seed = 0;
};

struct UnrelatedRunResult {
  Schedule best;
  Rational best_cost;
  std::vector<UnrelatedTrial> trials;
};

/// Full pipeline, one trial: sample rectangles, classify, assign blocks,
/// build the grouping, run the dependent rounding, then order each machine's
/// jobs by tau + theta and pack from zero.
inline Schedule unrelated_round_once(const Instance& inst, const FracUnrelated& frac,
                                     Rng& rng, UnrelatedTrial* stats = nullptr) {
  RectSample sample = sample_rectangles(inst, frac, rng);
  auto good = classify_good(inst, frac);
  auto blocks = assign_blocks(inst, frac, sample, good);
  GroupingScheme grouping = build_grouping(frac, sample, blocks, rng);
  std::vector<int> machine_of = dependent_round(frac, grouping, rng);

  std::vector<std::vector<double>> key(frac.m, std::vector<double>(frac.n, 0.0));
  for (int i = 0; i < frac.m; ++i)
    for (int j = 0; j < frac.n; ++j)
      if (sample.start[i][j] >= 0) key[i][j] = sample.tau[i][j] + sample.shift[i][j];

  if (stats) {
    stats->num_bad_edges = 0;
    stats->num_groups = 0;
    for (int i = 0; i < frac.m; ++i) {
      for (int j = 0; j < frac.n; ++j)
        if (frac.y[i][j] > 0.0 && !good[i][j]) ++stats->num_bad_edges;
      stats->num_groups += static_cast<int>(grouping.groups[i].size());
    }
  }
  return detail::pack_by_order(inst, machine_of, key);
}

inline UnrelatedRunResult schedule_unrelated_wc(const Instance& inst,
                                                const FracUnrelated& frac,
                                                std::uint64_t seed, int trials) {
  if (inst.model != Model::Unrelated)
    throw std::invalid_argument("schedule_unrelated_wc: wrong model");
  if (trials <= 0) throw std::invalid_argument("trials must be positive");
  UnrelatedRunResult out;
  bool have_best = false;
  for (int trial = 0; trial < trials; ++trial) {
    std::uint64_t trial_seed = split_seed(seed, static_cast<std::uint64_t>(trial));
    Rng rng(trial_seed);
    UnrelatedTrial stats;
    stats.trial = trial;
    stats.seed = trial_seed;
    Schedule sched = unrelated_round_once(inst, frac, rng, &stats);
    stats.cost = objective(inst, sched).weighted_completion;
    out.trials.push_back(stats);
    if (!have_best || stats.cost < out.best_cost) {
      have_best = true;
      out.best_cost = stats.cost;
      out.best = std::move(sched);
    }
  }
  return out;
}

/// Best-of-trials independent rounding, same trial-seed splitting as the
/// dependent pipeline.
inline UnrelatedRunResult schedule_unrelated_independent(const Instance& inst,
                                                         const FracUnrelated& frac,
                                                         std::uint64_t seed, int trials) {
  if (inst.model != Model::Unrelated)
    throw std::invalid_argument("schedule_unrelated_independent: wrong model");
  if (trials <= 0) throw std::invalid_argument("trials must be positive");
  UnrelatedRunResult out;
  bool have_best = false;
  for (int trial = 0; trial < trials; ++trial) {
    std::uint64_t trial_seed = split_seed(seed, static_cast<std::uint64_t>(trial));
    Schedule sched = independent_round(inst, frac, trial_seed);
    UnrelatedTrial stats;
    stats.trial = trial;
    stats.seed = trial_seed;
    stats.cost = objective(inst, sched).weighted_completion;
    out.trials.push_back(stats);
    if (!have_best || stats.cost < out.best_cost) {
      have_best = true;
      out.best_cost = stats.cost;
      out.best = std::move(sched);
    }
  }
  return out;
}

/// Total rectangle area on machine i before time tau, directly from the
/// fractional solution. Feasible solutions keep this at or below tau.
inline double rectangle_area_before(const Instance& inst, const FracUnrelated& frac,
                                    int machine, double tau) {
  double area = 0.0;
  for (int j = 0; j < frac.n; ++j) {
    std::int64_t p = inst.pmatrix[machine][j];
    for (std::size_t s = 0; s < frac.x[machine][j].size(); ++s) {
      double v = frac.x[machine][j][s];
      if (v <= 0.0) continue;
      double overlap = std::min(tau, static_cast<double>(s + p)) - static_cast<double>(s);
      if (overlap > 0.0) area += v * overlap;
    }
  }
  return area;
}

}  // namespace schedlp
