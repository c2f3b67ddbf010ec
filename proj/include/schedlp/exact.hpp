#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "schedlp/instance.hpp"

namespace schedlp {

struct ExactResult {
  Rational opt_value;
  Schedule witness;
  std::int64_t nodes_explored = 0;
};

enum class ExactObjective { WeightedCompletion, Makespan };

namespace detail {

struct IdenticalSearch {
  const Instance& inst;
  int n;
  std::int64_t total;
  std::vector<std::vector<int>> preds;
  std::vector<std::int64_t> usage;
  std::vector<std::int64_t> end_time;
  std::vector<std::int64_t> start_time;
  std::vector<int> indeg;
  std::vector<int> topo;
  std::vector<Rational> chain_bound;  // longest size-chain ending at j
  Rational best_cost;
  std::vector<std::pair<std::int64_t, std::int64_t>> best_intervals;
  bool have_best = false;
  std::int64_t nodes = 0;
  bool all_starts;  // list placement only vs. every integer start

  explicit IdenticalSearch(const Instance& instance, bool enumerate_all_starts)
      : inst(instance),
        n(instance.n()),
        preds(instance.dag.predecessors()),
        end_time(instance.n(), -1),
        start_time(instance.n(), -1),
        indeg(instance.n(), 0),
        topo(instance.dag.topological_order()),
        all_starts(enumerate_all_starts) {
    total = 0;
    for (const Job& j : inst.jobs) total += j.size;
    usage.assign(static_cast<std::size_t>(total) + 1, 0);
    for (auto [a, b] : inst.dag.edges) ++indeg[b];
    chain_bound.assign(n, Rational(0));
    for (int j : inst.dag.topological_order()) {
      Rational longest(0);
      for (int p : preds[j]) longest = max(longest, chain_bound[p]);
      chain_bound[j] = longest + Rational(inst.jobs[j].size);
    }
  }

  bool fits(std::int64_t s, std::int64_t p) const {
    for (std::int64_t u = s; u < s + p; ++u)
      if (usage[u] >= inst.m) return false;
    return true;
  }

  void place(int j, std::int64_t s) {
    std::int64_t p = inst.jobs[j].size;
    for (std::int64_t u = s; u < s + p; ++u) ++usage[u];
    start_time[j] = s;
    end_time[j] = s + p;
  }

  void unplace(int j) {
    std::int64_t p = inst.jobs[j].size, s = start_time[j];
    for (std::int64_t u = s; u < s + p; ++u) --usage[u];
    start_time[j] = end_time[j] = -1;
  }

  void dfs(int placed, const Rational& cost_so_far) {
    ++nodes;
    if (placed == n) {
      if (!have_best || cost_so_far < best_cost) {
        have_best = true;
        best_cost = cost_so_far;
        best_intervals.resize(n);
        for (int j = 0; j < n; ++j) best_intervals[j] = {start_time[j], end_time[j]};
      }
      return;
    }
    if (have_best) {
      Rational lb = cost_so_far;
      for (int j = 0; j < n; ++j)
        if (end_time[j] < 0) lb += Rational(inst.jobs[j].weight) * chain_bound[j];
      if (lb >= best_cost) return;
    }
    // List mode searches over which ready job is inserted next (earliest
    // feasible start each). All-starts mode fixes one topological insertion
    // order and searches over start values instead, so every start tuple is
    // visited exactly once.
    for (int j : topo) {
      if (end_time[j] >= 0) continue;
      if (all_starts) {
        try_job(j, placed, cost_so_far);
        return;
      }
      if (indeg[j] == 0) try_job(j, placed, cost_so_far);
    }
  }

  void try_job(int j, int placed, const Rational& cost_so_far) {
    std::int64_t ready = 0;
    for (int p : preds[j]) ready = std::max(ready, end_time[p]);
    std::int64_t p = inst.jobs[j].size;
    for (std::int64_t s = ready; s <= total - p; ++s) {
      if (!fits(s, p)) continue;
      place(j, s);
      for (auto [a, b] : inst.dag.edges)
        if (a == j) --indeg[b];
      dfs(placed + 1, cost_so_far + Rational(inst.jobs[j].weight) * Rational(s + p));
      for (auto [a, b] : inst.dag.edges)
        if (a == j) ++indeg[b];
      unplace(j);
      if (!all_starts) break;  // list placement: earliest feasible start only
    }
  }
};

}  // namespace detail

/// Exact optimum for identical machines: branch and bound over precedence-
/// respecting insertion orders with earliest-feasible placement. Some optimal
/// schedule has this form; exact_identical_all_starts below removes the
/// restriction and is used to cross-check that claim.
inline ExactResult exact_identical(const Instance& inst, int cap = 9) {
  if (inst.model != Model::Identical)
    throw std::invalid_argument("exact_identical: wrong model");
  if (inst.n() > cap) throw std::invalid_argument("exact_identical: instance above cap");
  detail::IdenticalSearch search(inst, false);
  search.dfs(0, Rational(0));
  if (!search.have_best) throw std::runtime_error("exact_identical: no schedule found");
  ExactResult out;
  out.opt_value = search.best_cost;
  out.nodes_explored = search.nodes;
  IntervalSet ivals;
  for (int j = 0; j < inst.n(); ++j)
    ivals.entries.push_back({j, search.best_intervals[j].first, search.best_intervals[j].second});
  out.witness = intervals_to_machines(ivals, inst.m);
  return out;
}

/// Exhaustive variant enumerating every integer start tuple; exponentially
/// slower, only for cross-checks at very small n.
inline ExactResult exact_identical_all_starts(const Instance& inst, int cap = 6) {
  if (inst.model != Model::Identical)
    throw std::invalid_argument("exact_identical_all_starts: wrong model");
  if (inst.n() > cap)
    throw std::invalid_argument("exact_identical_all_starts: instance above cap");
  detail::IdenticalSearch search(inst, true);
  search.dfs(0, Rational(0));
  if (!search.have_best)
    throw std::runtime_error("exact_identical_all_starts: no schedule found");
  ExactResult out;
  out.opt_value = search.best_cost;
  out.nodes_explored = search.nodes;
  IntervalSet ivals;
  for (int j = 0; j < inst.n(); ++j)
    ivals.entries.push_back({j, search.best_intervals[j].first, search.best_intervals[j].second});
  out.witness = intervals_to_machines(ivals, inst.m);
  return out;
}

namespace detail {

struct RelatedSearch {
  const Instance& inst;
  ExactObjective objv;
  int n;
  std::vector<std::vector<int>> preds;
  std::vector<int> indeg;
  std::vector<Rational> machine_free;
  std::vector<Rational> end_time;
  std::vector<bool> placed;
  std::vector<int> machine_of;
  Rational fastest;
  Rational best_cost;
  Schedule best_schedule;
  bool have_best = false;
  std::int64_t nodes = 0;

  RelatedSearch(const Instance& instance, ExactObjective o)
      : inst(instance),
        objv(o),
        n(instance.n()),
        preds(instance.dag.predecessors()),
        indeg(instance.n(), 0),
        machine_free(instance.m, Rational(0)),
        end_time(instance.n(), Rational(0)),
        placed(instance.n(), false),
        machine_of(instance.n(), -1) {
    for (auto [a, b] : inst.dag.edges) ++indeg[b];
    fastest = Rational(0);
    for (const Rational& s : inst.speeds) fastest = max(fastest, s);
  }

  void dfs(int count, const Rational& cost, const Rational& makespan) {
    ++nodes;
    Rational measure = objv == ExactObjective::Makespan ? makespan : cost;
    if (have_best && measure >= best_cost) return;
    if (count == n) {
      best_cost = measure;
      have_best = true;
      best_schedule.placements.resize(n);
      for (int j = 0; j < n; ++j) {
        Rational dur = inst.duration(machine_of[j], j);
        best_schedule.placements[j] =
            Placement{machine_of[j], end_time[j] - dur, end_time[j]};
      }
      return;
    }
    if (have_best && objv == ExactObjective::WeightedCompletion) {
      Rational lb = cost;
      for (int j = 0; j < n; ++j)
        if (!placed[j])
          lb += Rational(inst.jobs[j].weight) * (Rational(inst.jobs[j].size) / fastest);
      if (lb >= best_cost) return;
    }
    for (int j = 0; j < n; ++j) {
      if (placed[j] || indeg[j] != 0) continue;
      Rational ready(0);
      for (int p : preds[j]) ready = max(ready, end_time[p]);
      for (int i = 0; i < inst.m; ++i) {
        Rational start = max(ready, machine_free[i]);
        Rational end = start + inst.duration(i, j);
        Rational saved_free = machine_free[i];
        machine_free[i] = end;
        end_time[j] = end;
        placed[j] = true;
        machine_of[j] = i;
        for (auto [a, b] : inst.dag.edges)
          if (a == j) --indeg[b];
        dfs(count + 1, cost + Rational(inst.jobs[j].weight) * end, max(makespan, end));
        for (auto [a, b] : inst.dag.edges)
          if (a == j) ++indeg[b];
        placed[j] = false;
        machine_of[j] = -1;
        machine_free[i] = saved_free;
      }
    }
  }
};

}  // namespace detail

/// Exact optimum for related machines: every machine assignment crossed with
/// every precedence-respecting order, earliest-start placement.
inline ExactResult exact_related(const Instance& inst, ExactObjective objv,
                                 int cap = 8) {
  if (inst.model != Model::Related)
    throw std::invalid_argument("exact_related: wrong model");
  if (inst.n() > cap) throw std::invalid_argument("exact_related: instance above cap");
  detail::RelatedSearch search(inst, objv);
  search.dfs(0, Rational(0), Rational(0));
  if (!search.have_best) throw std::runtime_error("exact_related: no schedule found");
  ExactResult out;
  out.opt_value = search.best_cost;
  out.witness = search.best_schedule;
  out.nodes_explored = search.nodes;
  return out;
}

/// Weighted-completion-optimal order of one machine's jobs: ratio w/p
/// nonincreasing, ties by id. Comparisons are exact cross-products.
inline std::vector<int> smith_order(const std::vector<int>& jobs,
                                    const std::vector<std::int64_t>& weight,
                                    const std::vector<std::int64_t>& ptime) {
  std::vector<int> order = jobs;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    __int128 lhs = static_cast<__int128>(weight[a]) * ptime[b];
    __int128 rhs = static_cast<__int128>(weight[b]) * ptime[a];
    if (lhs != rhs) return lhs > rhs;
    return a < b;
  });
  return order;
}

/// Exact optimum for unrelated machines: enumerate job-to-machine maps, order
/// each machine by the weight-over-size rule.
inline ExactResult exact_unrelated(const Instance& inst, int cap = 9) {
  if (inst.model != Model::Unrelated)
    throw std::invalid_argument("exact_unrelated: wrong model");
  const int n = inst.n(), m = inst.m;
  if (n > cap) throw std::invalid_argument("exact_unrelated: instance above cap");

  ExactResult out;
  bool have_best = false;
  std::vector<int> map(n, -1), best_map;

  std::vector<std::int64_t> weight(n);
  for (int j = 0; j < n; ++j) weight[j] = inst.jobs[j].weight;

  auto evaluate = [&](const std::vector<int>& assignment) -> Rational {
    Rational total(0);
    for (int i = 0; i < m; ++i) {
      std::vector<int> jobs;
      for (int j = 0; j < n; ++j)
        if (assignment[j] == i) jobs.push_back(j);
      std::vector<std::int64_t> pt(n, 0);
      for (int j : jobs) pt[j] = inst.pmatrix[i][j];
      std::vector<int> order = smith_order(jobs, weight, pt);
      std::int64_t clock = 0;
      for (int j : order) {
        clock += inst.pmatrix[i][j];
        total += Rational(inst.jobs[j].weight) * Rational(clock);
      }
    }
    return total;
  };

  std::int64_t explored = 0;
  auto dfs = [&](auto&& self, int j) -> void {
    if (j == n) {
      ++explored;
      Rational cost = evaluate(map);
      if (!have_best || cost < out.opt_value) {
        have_best = true;
        out.opt_value = cost;
        best_map = map;
      }
      return;
    }
    for (int i = 0; i < m; ++i) {
      if (inst.pmatrix[i][j] == 0) continue;
      map[j] = i;
      self(self, j + 1);
      map[j] = -1;
    }
  };
  dfs(dfs, 0);
  if (!have_best) throw std::runtime_error("exact_unrelated: no feasible assignment");
  out.nodes_explored = explored;

  out.witness.placements.resize(n);
  for (int i = 0; i < m; ++i) {
    std::vector<int> jobs;
    for (int j = 0; j < n; ++j)
      if (best_map[j] == i) jobs.push_back(j);
    std::vector<std::int64_t> pt(n, 0);
    for (int j : jobs) pt[j] = inst.pmatrix[i][j];
    std::vector<int> order = smith_order(jobs, weight, pt);
    Rational clock(0);
    for (int j : order) {
      Rational end = clock + Rational(inst.pmatrix[i][j]);
      out.witness.placements[j] = Placement{i, clock, end};
      clock = end;
    }
  }
  return out;
}

/// Reference for the single-machine rule: all n! orders. Cross-check only.
inline Rational single_machine_best_by_permutations(const std::vector<int>& jobs,
                                                    const std::vector<std::int64_t>& weight,
                                                    const std::vector<std::int64_t>& ptime) {
  std::vector<int> order = jobs;
  std::sort(order.begin(), order.end());
  bool have = false;
  Rational best(0);
  do {
    std::int64_t clock = 0;
    Rational cost(0);
    for (int j : order) {
      clock += ptime[j];
      cost += Rational(weight[j]) * Rational(clock);
    }
    if (!have || cost < best) {
      have = true;
      best = cost;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

}  // namespace schedlp
