#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "schedlp/instance.hpp"
#include "schedlp/lp.hpp"

namespace schedlp {

// ---------------------------------------------------------------------------
// Time-indexed LP for identical machines with precedence.
//
// Variable x[j][t], t in [p_j, T], means job j runs in (t - p_j, t].
// Rows, in build order:
//   per job:            sum_t x[j][t] = 1
//   per time t' in [T]: sum over x[j][t] covering t' <= m
//   per edge (j,k), t': sum_{t < t' + p_k} x[k][t] <= sum_{t < t'} x[j][t]
// Starts before p_j are excluded by variable omission.
// ---------------------------------------------------------------------------

struct IdenticalLp {
  LinearProgram lp;
  std::int64_t T = 0;
  std::vector<int> var_base;  // per job, index of x[j][p_j]

  int var(int job, std::int64_t t, std::int64_t p) const {
    return var_base[job] + static_cast<int>(t - p);
  }
};

inline IdenticalLp build_lp_identical(const Instance& inst) {
  if (inst.model != Model::Identical)
    throw std::invalid_argument("build_lp_identical: wrong model");
  const int n = inst.n();
  const std::int64_t T = inst.horizon;
  for (const Job& j : inst.jobs)
    if (j.size > T) throw std::runtime_error("build_lp_identical: horizon below largest job");

  IdenticalLp out;
  out.T = T;
  out.var_base.resize(n);
  for (int j = 0; j < n; ++j) {
    out.var_base[j] = out.lp.num_vars;
    for (std::int64_t t = inst.jobs[j].size; t <= T; ++t)
      out.lp.add_var(static_cast<double>(inst.jobs[j].weight) * static_cast<double>(t));
  }

  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> coefs;
    for (std::int64_t t = inst.jobs[j].size; t <= T; ++t)
      coefs.emplace_back(out.var(j, t, inst.jobs[j].size), 1.0);
    out.lp.add_row(std::move(coefs), Rel::Eq, 1.0);
  }

  for (std::int64_t tp = 1; tp <= T; ++tp) {
    std::vector<std::pair<int, double>> coefs;
    for (int j = 0; j < n; ++j) {
      std::int64_t p = inst.jobs[j].size;
      std::int64_t lo = std::max(tp, p), hi = std::min(tp + p - 1, T);
      for (std::int64_t t = lo; t <= hi; ++t) coefs.emplace_back(out.var(j, t, p), 1.0);
    }
    out.lp.add_row(std::move(coefs), Rel::Le, static_cast<double>(inst.m));
  }

  std::vector<std::pair<int, int>> edges = inst.dag.edges;
  std::sort(edges.begin(), edges.end());
  for (auto [j, k] : edges) {
    std::int64_t pj = inst.jobs[j].size, pk = inst.jobs[k].size;
    for (std::int64_t tp = 1; tp <= T; ++tp) {
      std::vector<std::pair<int, double>> coefs;
      for (std::int64_t t = pk; t <= std::min(tp + pk - 1, T); ++t)
        coefs.emplace_back(out.var(k, t, pk), 1.0);
      for (std::int64_t t = pj; t <= std::min(tp - 1, T); ++t)
        coefs.emplace_back(out.var(j, t, pj), -1.0);
      out.lp.add_row(std::move(coefs), Rel::Le, 0.0);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assignment LP for related machines, makespan or weighted-completion
// objective over the same constraint system:
//   per job:         sum_i x[i][j] = 1
//   per job:         p_j * sum_i x[i][j]/s_i <= C_j
//   per edge (j,k):  C_j + p_k * sum_i x[i][k]/s_i <= C_k
//   per machine:     sum_j p_j x[i][j] / s_i <= D
//   per job:         C_j <= D
// Integral solutions are machine assignments, not full schedules.
// ---------------------------------------------------------------------------

enum class RelatedObjective { Makespan, WeightedCompletion };

struct RelatedLp {
  LinearProgram lp;
  int n = 0, m = 0;

  int xvar(int machine, int job) const { return machine * n + job; }
  int cvar(int job) const { return m * n + job; }
  int dvar() const { return m * n + n; }
};

inline RelatedLp build_lp_related_cmax(const Instance& inst,
                                       RelatedObjective obj = RelatedObjective::Makespan) {
  if (inst.model != Model::Related)
    throw std::invalid_argument("build_lp_related_cmax: wrong model");
  const int n = inst.n(), m = inst.m;

  RelatedLp out;
  out.n = n;
  out.m = m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.lp.add_var(0.0);
  for (int j = 0; j < n; ++j)
    out.lp.add_var(obj == RelatedObjective::WeightedCompletion
                       ? static_cast<double>(inst.jobs[j].weight)
                       : 0.0);
  out.lp.add_var(obj == RelatedObjective::Makespan ? 1.0 : 0.0);

  std::vector<double> inv_speed(m);
  for (int i = 0; i < m; ++i) inv_speed[i] = (Rational(1) / inst.speeds[i]).to_double();

  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> coefs;
    for (int i = 0; i < m; ++i) coefs.emplace_back(out.xvar(i, j), 1.0);
    out.lp.add_row(std::move(coefs), Rel::Eq, 1.0);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> coefs;
    for (int i = 0; i < m; ++i)
      coefs.emplace_back(out.xvar(i, j), static_cast<double>(inst.jobs[j].size) * inv_speed[i]);
    coefs.emplace_back(out.cvar(j), -1.0);
    out.lp.add_row(std::move(coefs), Rel::Le, 0.0);
  }
  std::vector<std::pair<int, int>> edges = inst.dag.edges;
  std::sort(edges.begin(), edges.end());
  for (auto [j, k] : edges) {
    std::vector<std::pair<int, double>> coefs;
    coefs.emplace_back(out.cvar(j), 1.0);
    for (int i = 0; i < m; ++i)
      coefs.emplace_back(out.xvar(i, k), static_cast<double>(inst.jobs[k].size) * inv_speed[i]);
    coefs.emplace_back(out.cvar(k), -1.0);
    out.lp.add_row(std::move(coefs), Rel::Le, 0.0);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> coefs;
    for (int j = 0; j < n; ++j)
      coefs.emplace_back(out.xvar(i, j), static_cast<double>(inst.jobs[j].size) * inv_speed[i]);
    coefs.emplace_back(out.dvar(), -1.0);
    out.lp.add_row(std::move(coefs), Rel::Le, 0.0);
  }
  for (int j = 0; j < n; ++j) {
    out.lp.add_row({{out.cvar(j), 1.0}, {out.dvar(), -1.0}}, Rel::Le, 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Start-indexed LP for unrelated machines.
//
// Variable x[i][j][s], s in [0, T - p_ij], only where p_ij is finite:
//   per job:               sum_{i,s} x = 1
//   per machine, t in [T]: sum over x covering time t <= 1
// Late starts and absent entries are excluded by variable omission.
// ---------------------------------------------------------------------------

struct UnrelatedLp {
  LinearProgram lp;
  std::int64_t T = 0;
  std::vector<std::vector<int>> var_base;  // [i][j] -> index of x[i][j][0], or -1

  int var(int machine, int job, std::int64_t s) const {
    return var_base[machine][job] + static_cast<int>(s);
  }
};

inline UnrelatedLp build_lp_unrelated(const Instance& inst) {
  if (inst.model != Model::Unrelated)
    throw std::invalid_argument("build_lp_unrelated: wrong model");
  const int n = inst.n(), m = inst.m;
  const std::int64_t T = inst.horizon;

  UnrelatedLp out;
  out.T = T;
  out.var_base.assign(m, std::vector<int>(n, -1));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      std::int64_t p = inst.pmatrix[i][j];
      if (p == 0 || p > T) continue;
      out.var_base[i][j] = out.lp.num_vars;
      for (std::int64_t s = 0; s + p <= T; ++s)
        out.lp.add_var(static_cast<double>(inst.jobs[j].weight) * static_cast<double>(s + p));
    }
  }

  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> coefs;
    for (int i = 0; i < m; ++i) {
      if (out.var_base[i][j] < 0) continue;
      std::int64_t p = inst.pmatrix[i][j];
      for (std::int64_t s = 0; s + p <= T; ++s) coefs.emplace_back(out.var(i, j, s), 1.0);
    }
    if (coefs.empty())
      throw std::runtime_error("build_lp_unrelated: job " + std::to_string(j) +
                               " has no feasible start");
    out.lp.add_row(std::move(coefs), Rel::Eq, 1.0);
  }

  for (int i = 0; i < m; ++i) {
    for (std::int64_t t = 1; t <= T; ++t) {
      std::vector<std::pair<int, double>> coefs;
      for (int j = 0; j < n; ++j) {
        if (out.var_base[i][j] < 0) continue;
        std::int64_t p = inst.pmatrix[i][j];
        std::int64_t lo = std::max<std::int64_t>(0, t - p), hi = std::min(t - 1, T - p);
        for (std::int64_t s = lo; s <= hi; ++s) coefs.emplace_back(out.var(i, j, s), 1.0);
      }
      out.lp.add_row(std::move(coefs), Rel::Le, 1.0);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extracted fractional solutions. Extraction repairs solver output: tiny
// negatives are clamped, each job's assignment mass is renormalized to
// exactly 1, and derived quantities are recomputed from the repaired x.
// All rounding code consumes these, never raw solver points.
// ---------------------------------------------------------------------------

struct FracIdentical {
  int n = 0;
  std::int64_t T = 0;
  std::vector<std::vector<double>> x;  // x[j][t], t in [0, T], entries below p_j zero
  std::vector<double> completion;     // C_j = sum_t x[j][t] * t
  double lp_value = 0.0;
};

struct FracRelated {
  int n = 0, m = 0;
  std::vector<std::vector<double>> x;  // x[i][j]
  std::vector<double> completion;
  double makespan_bound = 0.0;  // D
};

struct FracUnrelated {
  int n = 0, m = 0;
  std::int64_t T = 0;
  std::vector<std::vector<std::vector<double>>> x;  // x[i][j][s], empty when absent
  std::vector<std::vector<double>> y;               // y[i][j] = sum_s x
  std::vector<std::vector<double>> phi;             // mean start, 0 when y == 0
  std::vector<double> completion;
  double lp_value = 0.0;
};

namespace detail {

/// Clamp small negatives and scale a job's coordinates so they sum to 1.
/// `coords` holds pointers to every coordinate of one job's distribution.
inline void repair_distribution(std::vector<double*>& coords, double eps_feas) {
  const double cap = 10.0 * eps_feas;
  for (double* c : coords) {
    if (*c < 0.0) {
      if (*c < -cap) throw std::runtime_error("extract: solution too infeasible");
      *c = 0.0;
    }
  }
  double mass = 0.0;
  for (double* c : coords) mass += *c;
  if (mass <= 0.0) throw std::runtime_error("extract: job with no assignment mass");
  double scale = 1.0 / mass;
  for (double* c : coords) {
    if (std::abs(*c * (scale - 1.0)) > cap)
      throw std::runtime_error("extract: solution too infeasible");
  }
  for (double* c : coords) *c *= scale;
}

}  // namespace detail

inline FracIdentical extract_identical(const Instance& inst, const IdenticalLp& built,
                                       const std::vector<double>& point,
                                       double eps_feas = 1e-7) {
  const int n = inst.n();
  FracIdentical frac;
  frac.n = n;
  frac.T = built.T;
  frac.x.assign(n, std::vector<double>(built.T + 1, 0.0));
  for (int j = 0; j < n; ++j) {
    std::int64_t p = inst.jobs[j].size;
    for (std::int64_t t = p; t <= built.T; ++t)
      frac.x[j][t] = point[built.var(j, t, p)];
    std::vector<double*> coords;
    for (std::int64_t t = p; t <= built.T; ++t) coords.push_back(&frac.x[j][t]);
    detail::repair_distribution(coords, eps_feas);
  }
  frac.completion.assign(n, 0.0);
  frac.lp_value = 0.0;
  for (int j = 0; j < n; ++j) {
    for (std::int64_t t = 1; t <= built.T; ++t)
      frac.completion[j] += frac.x[j][t] * static_cast<double>(t);
    frac.lp_value += static_cast<double>(inst.jobs[j].weight) * frac.completion[j];
  }
  // Precedence gap implied by the LP rows; a failure here means the point
  // did not actually solve this LP.
  for (auto [j, k] : inst.dag.edges) {
    if (frac.completion[j] + static_cast<double>(inst.jobs[k].size) >
        frac.completion[k] + n * eps_feas)
      throw std::runtime_error("extract_identical: precedence completion gap violated");
  }
  return frac;
}

inline FracRelated extract_related(const Instance& inst, const RelatedLp& built,
                                   const std::vector<double>& point,
                                   double eps_feas = 1e-7) {
  const int n = inst.n(), m = inst.m;
  FracRelated frac;
  frac.n = n;
  frac.m = m;
  frac.x.assign(m, std::vector<double>(n, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) frac.x[i][j] = point[built.xvar(i, j)];
  for (int j = 0; j < n; ++j) {
    std::vector<double*> coords;
    for (int i = 0; i < m; ++i) coords.push_back(&frac.x[i][j]);
    detail::repair_distribution(coords, eps_feas);
  }
  frac.completion.assign(n, 0.0);
  for (int j = 0; j < n; ++j) frac.completion[j] = std::max(0.0, point[built.cvar(j)]);
  frac.makespan_bound = std::max(0.0, point[built.dvar()]);
  return frac;
}

inline FracUnrelated extract_unrelated(const Instance& inst, const UnrelatedLp& built,
                                       const std::vector<double>& point,
                                       double eps_feas = 1e-7) {
  const int n = inst.n(), m = inst.m;
  FracUnrelated frac;
  frac.n = n;
  frac.m = m;
  frac.T = built.T;
  frac.x.assign(m, std::vector<std::vector<double>>(n));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (built.var_base[i][j] < 0) continue;
      std::int64_t p = inst.pmatrix[i][j];
      frac.x[i][j].resize(built.T - p + 1);
      for (std::int64_t s = 0; s + p <= built.T; ++s)
        frac.x[i][j][s] = point[built.var(i, j, s)];
    }
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double*> coords;
    for (int i = 0; i < m; ++i)
      for (double& v : frac.x[i][j]) coords.push_back(&v);
    detail::repair_distribution(coords, eps_feas);
  }
  frac.y.assign(m, std::vector<double>(n, 0.0));
  frac.phi.assign(m, std::vector<double>(n, 0.0));
  frac.completion.assign(n, 0.0);
  frac.lp_value = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double mass = 0.0, moment = 0.0;
      for (std::size_t s = 0; s < frac.x[i][j].size(); ++s) {
        mass += frac.x[i][j][s];
        moment += frac.x[i][j][s] * static_cast<double>(s);
      }
      frac.y[i][j] = mass;
      frac.phi[i][j] = mass > 0.0 ? moment / mass : 0.0;
      std::int64_t p = inst.pmatrix[i][j];
      for (std::size_t s = 0; s < frac.x[i][j].size(); ++s)
        frac.completion[j] += frac.x[i][j][s] * static_cast<double>(s + p);
    }
  }
  for (int j = 0; j < n; ++j)
    frac.lp_value += static_cast<double>(inst.jobs[j].weight) * frac.completion[j];
  return frac;
}

/// Reassemble an LP point from a related-machines fractional solution, for
/// checking it against the constraint rows.
inline std::vector<double> related_point(const RelatedLp& built, const FracRelated& frac) {
  std::vector<double> point(built.lp.num_vars, 0.0);
  for (int i = 0; i < built.m; ++i)
    for (int j = 0; j < built.n; ++j) point[built.xvar(i, j)] = frac.x[i][j];
  for (int j = 0; j < built.n; ++j) point[built.cvar(j)] = frac.completion[j];
  point[built.dvar()] = frac.makespan_bound;
  return point;
}

}  // namespace schedlp
