#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "schedlp/instance.hpp"
#include "schedlp/lp_scheduling.hpp"
#include "schedlp/rng.hpp"

namespace schedlp {

/// Per-job priorities for job-driven list scheduling. The scheduler requires
/// keys to respect precedence: a successor must never sort before its
/// predecessor once ties are broken.
struct OrderKeys {
  std::vector<double> key;
};

namespace detail {

/// Exact solutions give monotone keys along every edge; float noise can
/// invert a near-tie by ~eps. Raising each key to its predecessors' level is
/// a no-op on exact data and repairs the noise case, after which equal keys
/// fall to the topological tie-break.
inline void repair_edge_order(const Instance& inst, OrderKeys& keys) {
  std::vector<int> topo = inst.dag.topological_order();
  auto preds = inst.dag.predecessors();
  for (int j : topo)
    for (int p : preds[j]) keys.key[j] = std::max(keys.key[j], keys.key[p]);
}

}  // namespace detail

/// key_j = C_j - (1 - theta) * p_j for theta in (0, 1/2]. Strictly increasing
/// along every edge because extracted solutions satisfy C_j + p_k <= C_k.
inline OrderKeys order_keys_general(const Instance& inst, const FracIdentical& frac,
                                    double theta) {
  if (!(theta > 0.0 && theta <= 0.5))
    throw std::invalid_argument("order_keys_general: theta outside (0, 1/2]");
  OrderKeys keys;
  keys.key.resize(inst.n());
  for (int j = 0; j < inst.n(); ++j)
    keys.key[j] = frac.completion[j] -
                  (1.0 - theta) * static_cast<double>(inst.jobs[j].size);
  detail::repair_edge_order(inst, keys);
  return keys;
}

/// Unit-size rule: key_j = smallest t whose cumulative mass reaches theta.
/// The small slack absorbs solver round-off sitting exactly at thresholds.
inline OrderKeys order_keys_unit_quantile(const Instance& inst, const FracIdentical& frac,
                                          double theta, double eps_feas = 1e-7) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("order_keys_unit_quantile: theta outside (0, 1]");
  for (const Job& j : inst.jobs)
    if (j.size != 1) throw std::invalid_argument("order_keys_unit_quantile: sizes must be 1");
  OrderKeys keys;
  keys.key.resize(inst.n());
  for (int j = 0; j < inst.n(); ++j) {
    double cum = 0.0;
    std::int64_t hit = frac.T;
    for (std::int64_t t = 1; t <= frac.T; ++t) {
      cum += frac.x[j][t];
      if (cum >= theta - eps_feas) {
        hit = t;
        break;
      }
    }
    keys.key[j] = static_cast<double>(hit);
  }
  detail::repair_edge_order(inst, keys);
  return keys;
}

/// Job-driven list scheduling: jobs are inserted in nondecreasing key order
/// (ties broken by a topological rank, so equal-key chains stay valid); each
/// job takes the smallest integer start >= its predecessors' completion that
/// keeps the interval congestion within m. The machine assignment is the
/// greedy interval sweep.
inline Schedule list_schedule(const Instance& inst, const OrderKeys& keys) {
  if (inst.model != Model::Identical)
    throw std::invalid_argument("list_schedule: identical model only");
  const int n = inst.n();
  if (static_cast<int>(keys.key.size()) != n)
    throw std::invalid_argument("list_schedule: key count mismatch");

  std::vector<int> topo = inst.dag.topological_order();
  if (n > 0 && topo.empty()) throw std::invalid_argument("list_schedule: dag has a cycle");
  std::vector<int> rank(n, 0);
  for (int r = 0; r < n; ++r) rank[topo[r]] = r;

  std::vector<int> order(n);
  for (int j = 0; j < n; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (keys.key[a] != keys.key[b]) return keys.key[a] < keys.key[b];
    return rank[a] < rank[b];
  });

  auto preds = inst.dag.predecessors();
  std::int64_t total = 0;
  for (const Job& j : inst.jobs) total += j.size;

  std::vector<std::int64_t> usage(static_cast<std::size_t>(total) + 1, 0);
  std::vector<std::int64_t> end_time(n, -1);
  IntervalSet ivals;

  for (int j : order) {
    std::int64_t t = 0;
    for (int p : preds[j]) {
      if (end_time[p] < 0)
        throw std::runtime_error("list_schedule: order contract violated at job " +
                                 std::to_string(j));
      t = std::max(t, end_time[p]);
    }
    std::int64_t p = inst.jobs[j].size;
    std::int64_t s = t;
    for (;; ++s) {
      bool fits = true;
      for (std::int64_t u = s; u < s + p && fits; ++u)
        fits = usage[u] < inst.m;
      if (fits) break;
    }
    for (std::int64_t u = s; u < s + p; ++u) ++usage[u];
    end_time[j] = s + p;
    ivals.entries.push_back({j, s, s + p});
  }
  return intervals_to_machines(ivals, inst.m);
}

struct IdenticalTrial {
  int trial = 0;
  double theta = 0.0;
  Rational cost;
};

struct IdenticalRunResult {
  Schedule best;
  Rational best_cost;
  std::vector<IdenticalTrial> trials;
};

enum class ThetaMode { Random, Grid };

namespace detail {

template <typename KeyFn>
IdenticalRunResult run_identical_trials(const Instance& inst, std::uint64_t seed,
                                        int trials, double theta_range, ThetaMode mode,
                                        KeyFn&& make_keys) {
  if (trials <= 0) throw std::invalid_argument("trials must be positive");
  IdenticalRunResult out;
  bool have_best = false;
  for (int trial = 0; trial < trials; ++trial) {
    double theta;
    if (mode == ThetaMode::Grid) {
      theta = theta_range * static_cast<double>(trial + 1) / static_cast<double>(trials);
    } else {
      Rng rng(split_seed(seed, static_cast<std::uint64_t>(trial)));
      theta = theta_range * rng.next_open_closed();
    }
    Schedule sched = list_schedule(inst, make_keys(theta));
    Rational cost = objective(inst, sched).weighted_completion;
    out.trials.push_back({trial, theta, cost});
    if (!have_best || cost < out.best_cost) {
      have_best = true;
      out.best_cost = cost;
      out.best = std::move(sched);
    }
  }
  return out;
}

}  // namespace detail

/// General sizes: theta uniform on (0, 1/2] per trial, order keys from
/// order_keys_general, best-of-trials returned.
inline IdenticalRunResult schedule_identical_wc(const Instance& inst,
                                                const FracIdentical& frac,
                                                std::uint64_t seed, int trials,
                                                ThetaMode mode = ThetaMode::Random) {
  if (inst.model != Model::Identical)
    throw std::invalid_argument("schedule_identical_wc: wrong model");
  return detail::run_identical_trials(
      inst, seed, trials, 0.5, mode,
      [&](double theta) { return order_keys_general(inst, frac, theta); });
}

/// Unit sizes: theta uniform on (0, 1] per trial with quantile order keys.
inline IdenticalRunResult schedule_identical_unit_wc(const Instance& inst,
                                                     const FracIdentical& frac,
                                                     std::uint64_t seed, int trials,
                                                     ThetaMode mode = ThetaMode::Random) {
  if (inst.model != Model::Identical)
    throw std::invalid_argument("schedule_identical_unit_wc: wrong model");
  for (const Job& j : inst.jobs)
    if (j.size != 1)
      throw std::invalid_argument("schedule_identical_unit_wc: sizes must be 1");
  return detail::run_identical_trials(
      inst, seed, trials, 1.0, mode,
      [&](double theta) { return order_keys_unit_quantile(inst, frac, theta); });
}

}  // namespace schedlp
