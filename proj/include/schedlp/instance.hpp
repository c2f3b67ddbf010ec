#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schedlp/rational.hpp"

namespace schedlp {

enum class Model { Identical, Related, Unrelated };

inline std::string model_name(Model m) {
  switch (m) {
    case Model::Identical: return "identical";
    case Model::Related: return "related";
    case Model::Unrelated: return "unrelated";
  }
  return "?";
}

inline std::optional<Model> model_from_name(const std::string& s) {
  if (s == "identical") return Model::Identical;
  if (s == "related") return Model::Related;
  if (s == "unrelated") return Model::Unrelated;
  return std::nullopt;
}

struct Job {
  int id = 0;
  std::int64_t weight = 1;  // w_j >= 1
  std::int64_t size = 1;    // p_j >= 1; unused for the unrelated model

  friend bool operator==(const Job&, const Job&) = default;
};

/// Precedence DAG on jobs [0, n). An edge (j, k) means j must complete
/// before k starts.
struct PrecedenceDag {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  friend bool operator==(const PrecedenceDag&, const PrecedenceDag&) = default;

  std::vector<std::vector<int>> successors() const {
    std::vector<std::vector<int>> out(n);
    for (auto [a, b] : edges) out[a].push_back(b);
    return out;
  }
  std::vector<std::vector<int>> predecessors() const {
    std::vector<std::vector<int>> in(n);
    for (auto [a, b] : edges) in[b].push_back(a);
    return in;
  }

  /// Kahn order picking the smallest ready job id first. Empty result when
  /// a cycle prevents a full order. Used as the deterministic tie-break
  /// order throughout the schedulers.
  std::vector<int> topological_order() const {
    std::vector<int> indeg(n, 0);
    auto succ = successors();
    for (auto [a, b] : edges) ++indeg[b];
    std::vector<int> ready;
    for (int j = 0; j < n; ++j)
      if (indeg[j] == 0) ready.push_back(j);
    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
      auto it = std::min_element(ready.begin(), ready.end());
      int j = *it;
      ready.erase(it);
      order.push_back(j);
      for (int k : succ[j])
        if (--indeg[k] == 0) ready.push_back(k);
    }
    if (static_cast<int>(order.size()) != n) return {};
    return order;
  }

  bool is_acyclic() const { return n == 0 || !topological_order().empty(); }
};

/// A scheduling instance for one of the three machine models.
///  - Identical: jobs carry sizes, speeds/pmatrix unused.
///  - Related:   jobs carry sizes, speeds holds one positive rational per machine.
///  - Unrelated: sizes live in pmatrix[i][j] (0 encodes "cannot run there"),
///               dag must be empty.
struct Instance {
  Model model = Model::Identical;
  std::vector<Job> jobs;
  PrecedenceDag dag;
  int m = 1;
  std::vector<Rational> speeds;                 // Related only
  std::vector<std::vector<std::int64_t>> pmatrix;  // Unrelated only, m x n, 0 = absent
  std::int64_t horizon = 0;                     // T

  friend bool operator==(const Instance&, const Instance&) = default;

  int n() const { return static_cast<int>(jobs.size()); }

  std::int64_t ptime_unrelated(int machine, int job) const {
    return pmatrix[machine][job];
  }

  /// Processing time of `job` on `machine` as an exact rational.
  Rational duration(int machine, int job) const {
    switch (model) {
      case Model::Identical: return Rational(jobs[job].size);
      case Model::Related: return Rational(jobs[job].size) / speeds[machine];
      case Model::Unrelated: return Rational(pmatrix[machine][job]);
    }
    return Rational(0);
  }

  /// The horizon rule the file format and generators adhere to:
  /// sum of sizes (identical/related), or sum over jobs of the largest
  /// finite row entry (unrelated).
  std::int64_t canonical_horizon() const {
    std::int64_t total = 0;
    if (model == Model::Unrelated) {
      for (int j = 0; j < n(); ++j) {
        std::int64_t best = 0;
        for (int i = 0; i < m; ++i) best = std::max(best, pmatrix[i][j]);
        total += best;
      }
    } else {
      for (const Job& job : jobs) total += job.size;
    }
    return total;
  }
};

/// One scheduled job: machine index plus an exact time interval (start, end].
struct Placement {
  int machine = 0;
  Rational start;
  Rational end;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// A complete schedule, indexed by job id.
struct Schedule {
  std::vector<Placement> placements;

  friend bool operator==(const Schedule&, const Schedule&) = default;

  int n() const { return static_cast<int>(placements.size()); }
};

/// Machine-free intermediate for the identical model: per-job intervals
/// awaiting assignment to concrete machines.
struct IntervalSet {
  struct Entry {
    int job = 0;
    std::int64_t start = 0;
    std::int64_t end = 0;
  };
  std::vector<Entry> entries;
};

/// Max number of intervals whose open interior covers any time point.
inline int congestion(const IntervalSet& ivals) {
  // +1 at start, -1 at end; ends sort before starts at equal coordinates so
  // that (a, b] and (b, c] never stack.
  std::vector<std::pair<std::int64_t, int>> events;
  events.reserve(ivals.entries.size() * 2);
  for (const auto& e : ivals.entries) {
    events.emplace_back(e.start, +1);
    events.emplace_back(e.end, -1);
  }
  std::sort(events.begin(), events.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return a.second < b.second;
            });
  int cur = 0, best = 0;
  for (const auto& [t, d] : events) {
    cur += d;
    best = std::max(best, cur);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> bad;
  const int n = inst.n();
  if (inst.m <= 0) bad.push_back("machine count must be positive");
  for (int j = 0; j < n; ++j) {
    if (inst.jobs[j].id != j) bad.push_back("job ids must be 0..n-1 in order");
    if (inst.jobs[j].weight < 1)
      bad.push_back("job " + std::to_string(j) + ": nonpositive weight");
    if (inst.model != Model::Unrelated && inst.jobs[j].size < 1)
      bad.push_back("job " + std::to_string(j) + ": nonpositive size");
  }
  if (inst.dag.n != n) bad.push_back("dag job count mismatch");
  for (auto [a, b] : inst.dag.edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      bad.push_back("dag edge index out of range");
    } else if (a == b) {
      bad.push_back("dag self-loop at job " + std::to_string(a));
    }
  }
  if (inst.dag.n == n && !inst.dag.is_acyclic()) bad.push_back("cycle in dag");

  switch (inst.model) {
    case Model::Identical:
      if (!inst.speeds.empty()) bad.push_back("identical model carries speeds");
      if (!inst.pmatrix.empty()) bad.push_back("identical model carries pmatrix");
      break;
    case Model::Related:
      if (static_cast<int>(inst.speeds.size()) != inst.m) {
        bad.push_back("speed count != machine count");
      } else {
        for (int i = 0; i < inst.m; ++i)
          if (!(inst.speeds[i] > Rational(0)))
            bad.push_back("machine " + std::to_string(i) + ": nonpositive speed");
      }
      if (!inst.pmatrix.empty()) bad.push_back("related model carries pmatrix");
      break;
    case Model::Unrelated: {
      if (!inst.dag.edges.empty()) bad.push_back("unrelated model must have empty dag");
      if (static_cast<int>(inst.pmatrix.size()) != inst.m) {
        bad.push_back("pmatrix row count != machine count");
        break;
      }
      for (int i = 0; i < inst.m; ++i) {
        if (static_cast<int>(inst.pmatrix[i].size()) != n) {
          bad.push_back("pmatrix row " + std::to_string(i) + " has wrong length");
          return bad;
        }
        for (int j = 0; j < n; ++j)
          if (inst.pmatrix[i][j] < 0)
            bad.push_back("negative processing time at machine " +
                          std::to_string(i) + ", job " + std::to_string(j));
      }
      for (int j = 0; j < n; ++j) {
        bool any = false;
        for (int i = 0; i < inst.m; ++i) any = any || inst.pmatrix[i][j] > 0;
        if (!any) bad.push_back("job " + std::to_string(j) + " unschedulable (no finite entry)");
      }
      break;
    }
  }

  if (inst.model != Model::Related && bad.empty() &&
      inst.horizon != inst.canonical_horizon()) {
    bad.push_back("horizon T does not match the model rule");
  }
  if (inst.model == Model::Related && inst.horizon < inst.canonical_horizon()) {
    bad.push_back("horizon T below total size");
  }
  return bad;
}

inline std::vector<std::string> validate_schedule(const Instance& inst,
                                                  const Schedule& sched) {
  std::vector<std::string> bad;
  const int n = inst.n();
  if (sched.n() != n) {
    bad.push_back("schedule covers " + std::to_string(sched.n()) + " jobs, instance has " +
                  std::to_string(n));
    return bad;
  }
  for (int j = 0; j < n; ++j) {
    const Placement& pl = sched.placements[j];
    if (pl.machine < 0 || pl.machine >= inst.m) {
      bad.push_back("job " + std::to_string(j) + ": machine index out of range");
      continue;
    }
    if (pl.start < Rational(0))
      bad.push_back("job " + std::to_string(j) + ": negative start");
    if (inst.model == Model::Unrelated && inst.pmatrix[pl.machine][j] == 0) {
      bad.push_back("job " + std::to_string(j) + ": scheduled on machine with no finite time");
      continue;
    }
    if (pl.end - pl.start != inst.duration(pl.machine, j))
      bad.push_back("job " + std::to_string(j) + ": duration mismatch");
  }
  // Machine non-overlap on open interiors.
  for (int i = 0; i < inst.m; ++i) {
    std::vector<int> on;
    for (int j = 0; j < n; ++j)
      if (sched.placements[j].machine == i) on.push_back(j);
    std::sort(on.begin(), on.end(), [&](int a, int b) {
      if (sched.placements[a].start != sched.placements[b].start)
        return sched.placements[a].start < sched.placements[b].start;
      return a < b;
    });
    for (std::size_t k = 1; k < on.size(); ++k) {
      if (sched.placements[on[k]].start < sched.placements[on[k - 1]].end) {
        bad.push_back("overlap on machine " + std::to_string(i) + ": jobs " +
                      std::to_string(on[k - 1]) + " and " + std::to_string(on[k]));
      }
    }
  }
  for (auto [a, b] : inst.dag.edges) {
    if (sched.placements[b].start < sched.placements[a].end)
      bad.push_back("precedence violated: " + std::to_string(a) + " before " +
                    std::to_string(b));
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

struct ObjectiveValue {
  Rational weighted_completion;
  Rational makespan;
};

inline ObjectiveValue objective(const Instance& inst, const Schedule& sched) {
  ObjectiveValue out;
  for (int j = 0; j < inst.n(); ++j) {
    out.weighted_completion += Rational(inst.jobs[j].weight) * sched.placements[j].end;
    out.makespan = max(out.makespan, sched.placements[j].end);
  }
  return out;
}

// ---------------------------------------------------------------------------
// DAG depth
// ---------------------------------------------------------------------------

/// depth[j] = number of jobs on the longest chain ending at j (>= 1).
inline std::vector<int> depth(const PrecedenceDag& dag) {
  std::vector<int> order = dag.topological_order();
  if (dag.n > 0 && order.empty()) throw std::invalid_argument("depth: dag has a cycle");
  auto preds = dag.predecessors();
  std::vector<int> a(dag.n, 1);
  for (int j : order) {
    for (int p : preds[j]) a[j] = std::max(a[j], a[p] + 1);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Interval to machine assignment
// ---------------------------------------------------------------------------

/// Greedy sweep by (start, job id); each interval takes the lowest-indexed
/// machine whose previous interval has ended. Fails when the intervals'
/// congestion exceeds m.
inline Schedule intervals_to_machines(const IntervalSet& ivals, int m) {
  if (congestion(ivals) > m) {
    throw std::runtime_error("intervals_to_machines: congestion exceeded");
  }
  std::vector<IntervalSet::Entry> order = ivals.entries;
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.job < b.job;
  });
  int njobs = 0;
  for (const auto& e : order) njobs = std::max(njobs, e.job + 1);
  Schedule sched;
  sched.placements.resize(njobs);
  std::vector<std::int64_t> free_at(m, 0);
  for (const auto& e : order) {
    int chosen = -1;
    for (int i = 0; i < m; ++i) {
      if (free_at[i] <= e.start) {
        chosen = i;
        break;
      }
    }
    if (chosen < 0) throw std::runtime_error("intervals_to_machines: congestion exceeded");
    free_at[chosen] = e.end;
    sched.placements[e.job] = Placement{chosen, Rational(e.start), Rational(e.end)};
  }
  return sched;
}

}  // namespace schedlp
