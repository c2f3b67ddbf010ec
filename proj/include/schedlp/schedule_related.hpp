#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "schedlp/instance.hpp"
#include "schedlp/lp_scheduling.hpp"

namespace schedlp {

/// Output of the slow-machine removal step: assignment mass moved to the
/// fastest machine, the makespan bound doubled to keep the point feasible,
/// and speeds rescaled so every retained machine has scaled speed in [1, m).
struct RelatedPreprocessed {
  FracRelated frac;
  double makespan_bound = 0.0;         // doubled bound D'
  std::vector<bool> retained;
  std::vector<Rational> scaled_speeds; // zero for discarded machines
};

inline RelatedPreprocessed preprocess_related(const Instance& inst, const FracRelated& frac,
                                              double eps_feas = 1e-7) {
  if (inst.model != Model::Related)
    throw std::invalid_argument("preprocess_related: wrong model");
  const int m = inst.m, n = inst.n();

  int fastest = 0;
  for (int i = 1; i < m; ++i)
    if (inst.speeds[i] > inst.speeds[fastest]) fastest = i;

  RelatedPreprocessed out;
  out.frac = frac;
  out.retained.assign(m, true);
  for (int i = 0; i < m; ++i) {
    if (i == fastest) continue;
    // Discard when s_i <= s_max / m, exactly.
    if (inst.speeds[i] * Rational(m) <= inst.speeds[fastest]) {
      out.retained[i] = false;
      for (int j = 0; j < n; ++j) {
        out.frac.x[fastest][j] += out.frac.x[i][j];
        out.frac.x[i][j] = 0.0;
      }
    }
  }
  out.frac.makespan_bound = 2.0 * frac.makespan_bound;
  out.makespan_bound = out.frac.makespan_bound;

  // The moved point must still satisfy the original constraint rows with the
  // doubled bound.
  RelatedLp built = build_lp_related_cmax(inst);
  double viol = max_violation(built.lp, related_point(built, out.frac));
  if (viol > 1e-6 * (1.0 + out.makespan_bound) + n * eps_feas)
    throw std::runtime_error("preprocess_related: moved solution infeasible");

  Rational slowest(0);
  for (int i = 0; i < m; ++i) {
    if (!out.retained[i]) continue;
    if (slowest.is_zero() || inst.speeds[i] < slowest) slowest = inst.speeds[i];
  }
  out.scaled_speeds.assign(m, Rational(0));
  for (int i = 0; i < m; ++i)
    if (out.retained[i]) out.scaled_speeds[i] = inst.speeds[i] / slowest;
  return out;
}

/// Machines bucketed by scaled speed into bands [gamma^(k-1), gamma^k),
/// k = 1..K. Empty bands keep their index so band arithmetic lines up.
struct SpeedGroups {
  double gamma = 2.0;
  int K = 1;
  std::vector<int> group_of;              // per machine, 0 for discarded
  std::vector<std::vector<int>> members;  // index 1..K
  std::vector<Rational> group_speed;      // total original speed per group
};

/// The band ratio grows like log m / log log m; the clamps keep it sane for
/// small m, where the raw expression is useless or undefined.
inline double speed_band_ratio(int m) {
  double lm = std::log(static_cast<double>(m));
  return std::max(2.0, lm / std::max(1.0, std::log(lm)));
}

inline SpeedGroups make_groups(const Instance& inst, const RelatedPreprocessed& pre) {
  SpeedGroups groups;
  groups.gamma = speed_band_ratio(inst.m);
  groups.group_of.assign(inst.m, 0);
  groups.K = 1;
  for (int i = 0; i < inst.m; ++i) {
    if (!pre.retained[i]) continue;
    double s = pre.scaled_speeds[i].to_double();
    int k = 1;
    double hi = groups.gamma;
    while (s >= hi) {
      hi *= groups.gamma;
      ++k;
    }
    groups.group_of[i] = k;
    groups.K = std::max(groups.K, k);
  }
  groups.members.assign(groups.K + 1, {});
  groups.group_speed.assign(groups.K + 1, Rational(0));
  for (int i = 0; i < inst.m; ++i) {
    if (groups.group_of[i] == 0) continue;
    groups.members[groups.group_of[i]].push_back(i);
    groups.group_speed[groups.group_of[i]] += inst.speeds[i];
  }
  return groups;
}

/// Per job: ell = largest band index whose suffix captures at least half the
/// job's assignment mass; k = the fastest-in-total band at or above ell.
struct GroupAssignment {
  std::vector<int> ell;
  std::vector<int> k;
};

inline GroupAssignment assign_groups(const FracRelated& frac, const SpeedGroups& groups,
                                     double eps_feas = 1e-7) {
  const int n = frac.n;
  GroupAssignment out;
  out.ell.resize(n);
  out.k.resize(n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> band_mass(groups.K + 1, 0.0);
    double total = 0.0;
    for (int k = 1; k <= groups.K; ++k)
      for (int i : groups.members[k]) {
        band_mass[k] += frac.x[i][j];
        total += frac.x[i][j];
      }
    if (total <= eps_feas)
      throw std::runtime_error("assign_groups: job " + std::to_string(j) +
                               " has no assignment mass");
    int ell = 1;
    double suffix = 0.0;
    for (int k = groups.K; k >= 1; --k) {
      suffix += band_mass[k];
      if (suffix >= 0.5 - eps_feas) {
        ell = k;
        break;
      }
    }
    int best = ell;
    for (int k = ell + 1; k <= groups.K; ++k)
      if (groups.group_speed[k] > groups.group_speed[best]) best = k;
    out.ell[j] = ell;
    out.k[j] = best;
  }
  return out;
}

/// Machine-driven list scheduling in exact rational time. At time zero and
/// at every completion, idle machines (ascending speed then id) pick the
/// lowest-id unstarted job that is assigned to their band and whose
/// predecessors have completed.
inline Schedule machine_list_schedule(const Instance& inst, const SpeedGroups& groups,
                                      const GroupAssignment& assign) {
  const int n = inst.n(), m = inst.m;
  auto preds = inst.dag.predecessors();

  std::vector<int> machine_order;
  for (int i = 0; i < m; ++i)
    if (groups.group_of[i] != 0) machine_order.push_back(i);
  std::sort(machine_order.begin(), machine_order.end(), [&](int a, int b) {
    if (inst.speeds[a] != inst.speeds[b]) return inst.speeds[a] < inst.speeds[b];
    return a < b;
  });

  Schedule sched;
  sched.placements.resize(n);
  std::vector<bool> started(n, false), done(n, false);
  std::vector<int> running_on(m, -1);
  std::vector<Rational> busy_until(m);
  int remaining = n;
  Rational now(0);

  auto ready = [&](int j) {
    if (started[j]) return false;
    for (int p : preds[j])
      if (!done[p]) return false;
    return true;
  };

  while (remaining > 0) {
    int running = 0;
    for (int i : machine_order) {
      if (running_on[i] >= 0) {
        ++running;
        continue;
      }
      int pick = -1;
      for (int j = 0; j < n && pick < 0; ++j)
        if (assign.k[j] == groups.group_of[i] && ready(j)) pick = j;
      if (pick < 0) continue;
      started[pick] = true;
      running_on[i] = pick;
      Rational end = now + inst.duration(i, pick);
      busy_until[i] = end;
      sched.placements[pick] = Placement{i, now, end};
      ++running;
    }
    if (running == 0)
      throw std::runtime_error("machine_list_schedule: job assigned to an empty band");

    Rational next;
    bool first = true;
    for (int i : machine_order)
      if (running_on[i] >= 0 && (first || busy_until[i] < next)) {
        next = busy_until[i];
        first = false;
      }
    now = next;
    for (int i : machine_order) {
      if (running_on[i] >= 0 && busy_until[i] == now) {
        done[running_on[i]] = true;
        running_on[i] = -1;
        --remaining;
      }
    }
  }
  return sched;
}

/// Makespan certificate for one pipeline run; `bound` is 2 (gamma + K) times
/// the doubled LP bound, and the constructor-level check that
/// makespan <= bound runs on every invocation.
struct RelatedCertificate {
  double d_lp = 0.0;
  double gamma = 0.0;
  int K = 0;
  Rational makespan;
  double bound = 0.0;

  std::string text() const {
    std::ostringstream out;
    out << "D_lp=" << d_lp << " gamma=" << gamma << " K=" << K
        << " makespan=" << makespan.str() << " bound=" << bound;
    return out.str();
  }
};

struct RelatedCmaxResult {
  Schedule schedule;
  RelatedCertificate certificate;
};

inline RelatedCmaxResult schedule_related_cmax(const Instance& inst,
                                               const SolverConfig& cfg = {}) {
  if (inst.model != Model::Related)
    throw std::invalid_argument("schedule_related_cmax: wrong model");
  RelatedLp built = build_lp_related_cmax(inst);
  SolveResult sol = solve_lp(built.lp, cfg);
  if (sol.status != SolveStatus::Optimal)
    throw std::runtime_error("schedule_related_cmax: LP not solved to optimality");
  FracRelated frac = extract_related(inst, built, sol.x, cfg.eps_feas);
  RelatedPreprocessed pre = preprocess_related(inst, frac, cfg.eps_feas);
  SpeedGroups groups = make_groups(inst, pre);
  GroupAssignment assign = assign_groups(pre.frac, groups, cfg.eps_feas);

  RelatedCmaxResult out;
  out.schedule = machine_list_schedule(inst, groups, assign);
  out.certificate.d_lp = frac.makespan_bound;
  out.certificate.gamma = groups.gamma;
  out.certificate.K = groups.K;
  out.certificate.makespan = objective(inst, out.schedule).makespan;
  out.certificate.bound =
      2.0 * (groups.gamma + groups.K) * pre.makespan_bound;
  double mk = out.certificate.makespan.to_double();
  if (mk > out.certificate.bound * (1.0 + 1e-9) + 1e-9)
    throw std::runtime_error("schedule_related_cmax: certificate bound violated: " +
                             out.certificate.text());
  return out;
}

/// Weighted-completion wrapper: one solve of the same constraint system under
/// the weighted-completion objective supplies fractional completion times;
/// jobs are split into geometric deadline blocks (2^0, 2^1, ...) by those
/// times, each block is scheduled by the makespan pipeline, and blocks are
/// concatenated. Predecessors always land in the same or an earlier block, so
/// the result is feasible by construction.
inline Schedule schedule_related_wc(const Instance& inst, const SolverConfig& cfg = {}) {
  if (inst.model != Model::Related)
    throw std::invalid_argument("schedule_related_wc: wrong model");
  const int n = inst.n();
  RelatedLp built = build_lp_related_cmax(inst, RelatedObjective::WeightedCompletion);
  SolveResult sol = solve_lp(built.lp, cfg);
  if (sol.status != SolveStatus::Optimal)
    throw std::runtime_error("schedule_related_wc: LP not solved to optimality");
  FracRelated frac = extract_related(inst, built, sol.x, cfg.eps_feas);

  std::vector<int> block(n, 0);
  int max_block = 0;
  for (int j = 0; j < n; ++j) {
    double deadline = 1.0;
    int u = 0;
    while (frac.completion[j] > deadline * (1.0 + 1e-9)) {
      deadline *= 2.0;
      ++u;
    }
    block[j] = u;
    max_block = std::max(max_block, u);
  }

  Schedule sched;
  sched.placements.resize(n);
  Rational offset(0);
  for (int u = 0; u <= max_block; ++u) {
    std::vector<int> members;
    for (int j = 0; j < n; ++j)
      if (block[j] == u) members.push_back(j);
    if (members.empty()) continue;

    Instance sub;
    sub.model = Model::Related;
    sub.m = inst.m;
    sub.speeds = inst.speeds;
    std::vector<int> local(n, -1);
    for (std::size_t idx = 0; idx < members.size(); ++idx) {
      int j = members[idx];
      local[j] = static_cast<int>(idx);
      Job job = inst.jobs[j];
      job.id = static_cast<int>(idx);
      sub.jobs.push_back(job);
    }
    sub.dag.n = static_cast<int>(members.size());
    for (auto [a, b] : inst.dag.edges)
      if (local[a] >= 0 && local[b] >= 0) sub.dag.edges.emplace_back(local[a], local[b]);
    sub.horizon = sub.canonical_horizon();

    Schedule part = schedule_related_cmax(sub, cfg).schedule;
    Rational block_end = offset;
    for (std::size_t idx = 0; idx < members.size(); ++idx) {
      Placement p = part.placements[idx];
      p.start += offset;
      p.end += offset;
      sched.placements[members[idx]] = p;
      block_end = max(block_end, p.end);
    }
    offset = block_end;
  }
  return sched;
}

}  // namespace schedlp
