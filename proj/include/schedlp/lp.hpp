#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace schedlp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Rel { Le, Eq, Ge };

struct LpRow {
  std::vector<std::pair<int, double>> coefs;  // (variable index, coefficient)
  Rel rel = Rel::Le;
  double rhs = 0.0;
};

/// Sparse minimization LP with per-variable bounds (default [0, +inf)).
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpRow> rows;

  int add_var(double cost, double lo = 0.0, double hi = kInf) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    return num_vars++;
  }

  void add_row(std::vector<std::pair<int, double>> coefs, Rel rel, double rhs) {
    rows.push_back(LpRow{std::move(coefs), rel, rhs});
  }

  bool well_formed() const {
    if (static_cast<int>(objective.size()) != num_vars) return false;
    for (const LpRow& r : rows) {
      if (!std::isfinite(r.rhs)) return false;
      for (auto [v, c] : r.coefs)
        if (v < 0 || v >= num_vars || !std::isfinite(c)) return false;
    }
    return true;
  }
};

struct SolverConfig {
  double eps_feas = 1e-7;   // allowed constraint violation in returned points
  double eps_opt = 1e-9;    // reduced-cost threshold
  int max_iterations = 50000;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;  // structural variable values (best point found)
  double value = 0.0;
  bool feasible = false;  // x satisfies rows and bounds within eps_feas
  int iterations = 0;
};

/// Largest violation of any row or bound at the point x.
inline double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (int v = 0; v < lp.num_vars; ++v) {
    worst = std::max(worst, lp.lower[v] - x[v]);
    worst = std::max(worst, x[v] - lp.upper[v]);
  }
  for (const LpRow& row : lp.rows) {
    double lhs = 0.0;
    for (auto [v, c] : row.coefs) lhs += c * x[v];
    switch (row.rel) {
      case Rel::Le: worst = std::max(worst, lhs - row.rhs); break;
      case Rel::Ge: worst = std::max(worst, row.rhs - lhs); break;
      case Rel::Eq: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

/// Pluggable solver surface; the bundled simplex below is the default and an
/// external solver can be dropped in behind the same contract.
class LpSolver {
public:
  virtual ~LpSolver() = default;
  virtual SolveResult solve(const LinearProgram& lp, const SolverConfig& cfg) = 0;
};

/// Bounded-variable primal revised simplex, dense basis inverse, two phases.
///
/// Every row gets a logical variable whose bounds encode the relation
/// (<=: [0,inf), >=: (-inf,0], =: [0,0]), so the working system is
/// A x + s = b with simple bounds on everything. Phase 1 minimizes the sum
/// of bound violations of basic variables (costs -1/+1 assigned row-wise),
/// phase 2 the real objective. Pricing is Dantzig with a permanent switch
/// to Bland's rule after a stall, which also rules out cycling.
class SimplexSolver : public LpSolver {
public:
  SolveResult solve(const LinearProgram& lp, const SolverConfig& cfg) override {
    if (!lp.well_formed()) throw std::invalid_argument("solve: malformed LP");
    init(lp);

    SolveResult res;
    const double tol = kBoundTol;
    int stall = 0;
    double last_phase_obj = kInf;
    bool last_phase1 = true;
    bool bland = false;

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
      if (refactor_countdown_-- <= 0) refactorize();

      bool phase1 = assign_phase_costs();
      double phase_obj = phase1 ? infeasibility_sum() : current_objective();
      if (phase1 != last_phase1 || phase_obj < last_phase_obj - 1e-12) {
        stall = 0;
      } else if (++stall > 400) {
        bland = true;
      }
      last_phase_obj = phase_obj;
      last_phase1 = phase1;

      btran_costs();
      int entering = -1, direction = 0;
      price(entering, direction, phase1, bland, cfg.eps_opt);

      if (entering < 0) {
        if (!phase1) {
          finish(lp, res, cfg, SolveStatus::Optimal, iter);
          return res;
        }
        if (infeasibility_sum() > 1e-7 * (1.0 + bscale_)) {
          finish(lp, res, cfg, SolveStatus::Infeasible, iter);
          return res;
        }
        // Residual violations are below tolerance; keep pivoting on the
        // real objective from here.
        last_phase_obj = kInf;
        force_phase2_ = true;
        continue;
      }

      ftran_column(entering);

      // Ratio test. leave_row == -1 with finite step means a bound flip.
      double step = kInf;
      int leave_row = -1;
      bool leave_at_upper = false;
      double own_range = ub_[entering] - lb_[entering];
      if (std::isfinite(own_range)) step = own_range;

      for (int r = 0; r < nrows_; ++r) {
        double g = direction * w_[r];
        if (std::abs(g) < kPivotTol) continue;
        int v = basic_[r];
        double x = xb_[r], l = lb_[v], u = ub_[v], t = kInf;
        bool at_up = false;
        if (g > 0) {  // basic value decreasing
          if (x > u + tol && std::isfinite(u)) {
            t = (x - u) / g;
            at_up = true;
          } else if (x >= l - tol && std::isfinite(l)) {
            t = (x - l) / g;
          }
        } else {  // increasing
          if (x < l - tol && std::isfinite(l)) {
            t = (l - x) / (-g);
          } else if (x <= u + tol && std::isfinite(u)) {
            t = (u - x) / (-g);
            at_up = true;
          }
        }
        if (t < -tol) t = 0.0;
        t = std::max(t, 0.0);
        if (t < step - kRatioTol ||
            (t < step + kRatioTol && leave_row >= 0 &&
             (bland ? basic_[r] < basic_[leave_row]
                    : std::abs(w_[r]) > std::abs(w_[leave_row])))) {
          step = t;
          leave_row = r;
          leave_at_upper = at_up;
        }
      }

      if (!std::isfinite(step)) {
        if (phase1 && !force_phase2_) {
          // A descent direction for the infeasibility always hits a bound;
          // reaching this point means numerical trouble.
          finish(lp, res, cfg, SolveStatus::Infeasible, iter);
          return res;
        }
        finish(lp, res, cfg, SolveStatus::Unbounded, iter);
        return res;
      }

      apply_step(entering, direction, step, leave_row, leave_at_upper);
    }

    finish(lp, res, cfg, SolveStatus::IterationLimit, cfg.max_iterations);
    return res;
  }

private:
  static constexpr double kBoundTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kRatioTol = 1e-9;

  int nrows_ = 0, nstruct_ = 0, ntotal_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;  // structural columns
  std::vector<double> b_, lb_, ub_, cost_;
  std::vector<int> basic_;        // row -> variable
  std::vector<int> basis_pos_;    // variable -> row or -1
  std::vector<double> xval_;      // resting value of nonbasic variables
  std::vector<double> xb_;        // basic values by row
  std::vector<double> binv_;      // dense row-major basis inverse
  std::vector<double> y_, w_, cb_;
  double bscale_ = 1.0;
  int refactor_countdown_ = 0;
  bool force_phase2_ = false;

  double& binv(int r, int c) { return binv_[static_cast<std::size_t>(r) * nrows_ + c]; }

  const std::vector<std::pair<int, double>>& column(int v) const { return cols_[v]; }

  void init(const LinearProgram& lp) {
    nrows_ = static_cast<int>(lp.rows.size());
    nstruct_ = lp.num_vars;
    ntotal_ = nstruct_ + nrows_;
    force_phase2_ = false;

    cols_.assign(ntotal_, {});
    for (int r = 0; r < nrows_; ++r)
      for (auto [v, c] : lp.rows[r].coefs) cols_[v].emplace_back(r, c);
    for (int r = 0; r < nrows_; ++r) cols_[nstruct_ + r] = {{r, 1.0}};

    b_.resize(nrows_);
    lb_.assign(ntotal_, 0.0);
    ub_.assign(ntotal_, kInf);
    cost_.assign(ntotal_, 0.0);
    bscale_ = 1.0;
    for (int v = 0; v < nstruct_; ++v) {
      lb_[v] = lp.lower[v];
      ub_[v] = lp.upper[v];
      cost_[v] = lp.objective[v];
    }
    for (int r = 0; r < nrows_; ++r) {
      b_[r] = lp.rows[r].rhs;
      bscale_ = std::max(bscale_, std::abs(b_[r]));
      switch (lp.rows[r].rel) {
        case Rel::Le: lb_[nstruct_ + r] = 0.0; ub_[nstruct_ + r] = kInf; break;
        case Rel::Ge: lb_[nstruct_ + r] = -kInf; ub_[nstruct_ + r] = 0.0; break;
        case Rel::Eq: lb_[nstruct_ + r] = 0.0; ub_[nstruct_ + r] = 0.0; break;
      }
    }

    basic_.resize(nrows_);
    basis_pos_.assign(ntotal_, -1);
    xval_.assign(ntotal_, 0.0);
    for (int v = 0; v < nstruct_; ++v) {
      if (std::isfinite(lb_[v]))
        xval_[v] = lb_[v];
      else if (std::isfinite(ub_[v]))
        xval_[v] = ub_[v];
      else
        xval_[v] = 0.0;
    }
    for (int r = 0; r < nrows_; ++r) {
      basic_[r] = nstruct_ + r;
      basis_pos_[nstruct_ + r] = r;
    }
    binv_.assign(static_cast<std::size_t>(nrows_) * nrows_, 0.0);
    for (int r = 0; r < nrows_; ++r) binv(r, r) = 1.0;
    recompute_basics();
    refactor_countdown_ = 64;
    y_.resize(nrows_);
    w_.resize(nrows_);
    cb_.resize(nrows_);
  }

  void recompute_basics() {
    // xb = Binv (b - sum over nonbasic of A_v * xval_v)
    std::vector<double> rhs = b_;
    for (int v = 0; v < ntotal_; ++v) {
      if (basis_pos_[v] >= 0 || xval_[v] == 0.0) continue;
      for (auto [r, c] : cols_[v]) rhs[r] -= c * xval_[v];
    }
    xb_.assign(nrows_, 0.0);
    for (int r = 0; r < nrows_; ++r) {
      double s = 0.0;
      for (int k = 0; k < nrows_; ++k) s += binv(r, k) * rhs[k];
      xb_[r] = s;
    }
  }

  void refactorize() {
    // Gauss-Jordan inverse of the basis matrix with partial pivoting.
    std::vector<double> mat(static_cast<std::size_t>(nrows_) * nrows_, 0.0);
    auto at = [&](int r, int c) -> double& {
      return mat[static_cast<std::size_t>(r) * nrows_ + c];
    };
    for (int c = 0; c < nrows_; ++c)
      for (auto [r, coef] : cols_[basic_[c]]) at(r, c) = coef;
    std::vector<double> inv(static_cast<std::size_t>(nrows_) * nrows_, 0.0);
    for (int r = 0; r < nrows_; ++r) inv[static_cast<std::size_t>(r) * nrows_ + r] = 1.0;
    auto ai = [&](int r, int c) -> double& {
      return inv[static_cast<std::size_t>(r) * nrows_ + c];
    };
    for (int col = 0; col < nrows_; ++col) {
      int piv = col;
      for (int r = col + 1; r < nrows_; ++r)
        if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
      if (std::abs(at(piv, col)) < 1e-12)
        throw std::runtime_error("simplex: singular basis");
      if (piv != col) {
        for (int c = 0; c < nrows_; ++c) {
          std::swap(at(piv, c), at(col, c));
          std::swap(ai(piv, c), ai(col, c));
        }
      }
      double p = at(col, col);
      for (int c = 0; c < nrows_; ++c) {
        at(col, c) /= p;
        ai(col, c) /= p;
      }
      for (int r = 0; r < nrows_; ++r) {
        if (r == col) continue;
        double f = at(r, col);
        if (f == 0.0) continue;
        for (int c = 0; c < nrows_; ++c) {
          at(r, c) -= f * at(col, c);
          ai(r, c) -= f * ai(col, c);
        }
      }
    }
    binv_ = std::move(inv);
    recompute_basics();
    refactor_countdown_ = 64;
  }

  /// Returns true when any basic variable violates its bounds (phase 1).
  bool assign_phase_costs() {
    bool any = false;
    for (int r = 0; r < nrows_; ++r) {
      int v = basic_[r];
      if (xb_[r] < lb_[v] - kBoundTol) {
        cb_[r] = -1.0;
        any = true;
      } else if (xb_[r] > ub_[v] + kBoundTol) {
        cb_[r] = 1.0;
        any = true;
      } else {
        cb_[r] = 0.0;
      }
    }
    if (any && !force_phase2_) return true;
    for (int r = 0; r < nrows_; ++r) cb_[r] = cost_[basic_[r]];
    return false;
  }

  double infeasibility_sum() const {
    double s = 0.0;
    for (int r = 0; r < nrows_; ++r) {
      int v = basic_[r];
      s += std::max(0.0, lb_[v] - xb_[r]);
      s += std::max(0.0, xb_[r] - ub_[v]);
    }
    return s;
  }

  double current_objective() const {
    double s = 0.0;
    for (int v = 0; v < ntotal_; ++v)
      if (basis_pos_[v] < 0) s += cost_[v] * xval_[v];
    for (int r = 0; r < nrows_; ++r) s += cost_[basic_[r]] * xb_[r];
    return s;
  }

  void btran_costs() {
    for (int k = 0; k < nrows_; ++k) {
      double s = 0.0;
      for (int r = 0; r < nrows_; ++r) s += cb_[r] * binv(r, k);
      y_[k] = s;
    }
  }

  double reduced_cost(int v, bool phase1) const {
    double d = phase1 ? 0.0 : cost_[v];
    for (auto [r, c] : cols_[v]) d -= y_[r] * c;
    return d;
  }

  void price(int& entering, int& direction, bool phase1, bool bland, double eps_opt) {
    entering = -1;
    direction = 0;
    double best = eps_opt;
    for (int v = 0; v < ntotal_; ++v) {
      if (basis_pos_[v] >= 0) continue;
      bool at_lower = std::isfinite(lb_[v]) && xval_[v] <= lb_[v] + kBoundTol;
      bool at_upper = std::isfinite(ub_[v]) && xval_[v] >= ub_[v] - kBoundTol;
      if (at_lower && at_upper) continue;  // fixed variable
      double d = reduced_cost(v, phase1);
      int dir = 0;
      if (!at_lower && !at_upper) {  // free, or resting strictly inside
        if (d < -eps_opt) dir = 1;
        else if (d > eps_opt) dir = -1;
      } else if (at_lower) {
        if (d < -eps_opt) dir = 1;
      } else {
        if (d > eps_opt) dir = -1;
      }
      if (dir == 0) continue;
      if (bland) {
        entering = v;
        direction = dir;
        return;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = v;
        direction = dir;
      }
    }
  }

  void ftran_column(int v) {
    std::fill(w_.begin(), w_.end(), 0.0);
    for (auto [r, c] : cols_[v]) {
      if (c == 0.0) continue;
      for (int i = 0; i < nrows_; ++i) w_[i] += binv(i, r) * c;
    }
  }

  void apply_step(int entering, int direction, double step, int leave_row,
                  bool leave_at_upper) {
    for (int r = 0; r < nrows_; ++r) xb_[r] -= step * direction * w_[r];
    double enter_value = xval_[entering] + step * direction;

    if (leave_row < 0) {
      // Bound flip, no basis change.
      xval_[entering] = direction > 0 ? ub_[entering] : lb_[entering];
      return;
    }

    int leaving = basic_[leave_row];
    xval_[leaving] = leave_at_upper ? ub_[leaving] : lb_[leaving];
    basis_pos_[leaving] = -1;
    basic_[leave_row] = entering;
    basis_pos_[entering] = leave_row;
    xb_[leave_row] = enter_value;

    // Product-form update of the dense inverse.
    double piv = w_[leave_row];
    double* prow = &binv_[static_cast<std::size_t>(leave_row) * nrows_];
    for (int c = 0; c < nrows_; ++c) prow[c] /= piv;
    for (int r = 0; r < nrows_; ++r) {
      if (r == leave_row) continue;
      double f = w_[r];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<std::size_t>(r) * nrows_];
      for (int c = 0; c < nrows_; ++c) row[c] -= f * prow[c];
    }
  }

  void finish(const LinearProgram& lp, SolveResult& res, const SolverConfig& cfg,
              SolveStatus status, int iterations) {
    res.status = status;
    res.iterations = iterations;
    res.x.assign(nstruct_, 0.0);
    for (int v = 0; v < nstruct_; ++v)
      res.x[v] = basis_pos_[v] >= 0 ? xb_[basis_pos_[v]] : xval_[v];
    res.value = 0.0;
    for (int v = 0; v < nstruct_; ++v) res.value += lp.objective[v] * res.x[v];
    res.feasible = max_violation(lp, res.x) <= cfg.eps_feas;
    if (status == SolveStatus::Optimal && !res.feasible) {
      // One clean refactorization pass usually removes accumulated drift.
      refactorize();
      for (int v = 0; v < nstruct_; ++v)
        res.x[v] = basis_pos_[v] >= 0 ? xb_[basis_pos_[v]] : xval_[v];
      res.value = 0.0;
      for (int v = 0; v < nstruct_; ++v) res.value += lp.objective[v] * res.x[v];
      res.feasible = max_violation(lp, res.x) <= cfg.eps_feas;
    }
  }
};

inline SolveResult solve_lp(const LinearProgram& lp, const SolverConfig& cfg = {}) {
  SimplexSolver solver;
  return solver.solve(lp, cfg);
}

/// Fixed MPS layout (free-format columns, one entry per line) for
/// cross-checking against external solvers. Row i is named R<i>, variable
/// v is X<v>, the objective row is COST.
inline std::string write_mps(const LinearProgram& lp, const std::string& name = "SCHEDLP") {
  std::ostringstream out;
  out << "NAME " << name << "\n";
  out << "ROWS\n N COST\n";
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    char t = lp.rows[r].rel == Rel::Le ? 'L' : lp.rows[r].rel == Rel::Ge ? 'G' : 'E';
    out << ' ' << t << " R" << r << "\n";
  }
  out << "COLUMNS\n";
  for (int v = 0; v < lp.num_vars; ++v) {
    if (lp.objective[v] != 0.0)
      out << " X" << v << " COST " << lp.objective[v] << "\n";
    for (std::size_t r = 0; r < lp.rows.size(); ++r)
      for (auto [var, c] : lp.rows[r].coefs)
        if (var == v) out << " X" << v << " R" << r << ' ' << c << "\n";
  }
  out << "RHS\n";
  for (std::size_t r = 0; r < lp.rows.size(); ++r)
    if (lp.rows[r].rhs != 0.0) out << " RHS R" << r << ' ' << lp.rows[r].rhs << "\n";
  out << "BOUNDS\n";
  for (int v = 0; v < lp.num_vars; ++v) {
    bool lo_zero = lp.lower[v] == 0.0;
    bool up_inf = !std::isfinite(lp.upper[v]);
    if (lo_zero && up_inf) continue;
    if (!std::isfinite(lp.lower[v]))
      out << " MI BND X" << v << "\n";
    else if (!lo_zero)
      out << " LO BND X" << v << ' ' << lp.lower[v] << "\n";
    if (!up_inf) out << " UP BND X" << v << ' ' << lp.upper[v] << "\n";
  }
  out << "ENDATA\n";
  return out.str();
}

}  // namespace schedlp
