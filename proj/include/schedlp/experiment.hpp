#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "schedlp/exact.hpp"
#include "schedlp/generate.hpp"
#include "schedlp/instance.hpp"
#include "schedlp/lp_scheduling.hpp"
#include "schedlp/schedule_identical.hpp"
#include "schedlp/schedule_related.hpp"
#include "schedlp/schedule_unrelated.hpp"

namespace schedlp {

enum class Algorithm {
  IdenticalWc,
  IdenticalUnitWc,
  RelatedCmax,
  RelatedWc,
  UnrelatedIndep,
  UnrelatedDep,
};

inline std::optional<Algorithm> algorithm_from_name(const std::string& s) {
  if (s == "identical-wc") return Algorithm::IdenticalWc;
  if (s == "identical-unit-wc") return Algorithm::IdenticalUnitWc;
  if (s == "related-cmax") return Algorithm::RelatedCmax;
  if (s == "related-wc") return Algorithm::RelatedWc;
  if (s == "unrelated-indep") return Algorithm::UnrelatedIndep;
  if (s == "unrelated-dep") return Algorithm::UnrelatedDep;
  return std::nullopt;
}

inline std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::IdenticalWc: return "identical-wc";
    case Algorithm::IdenticalUnitWc: return "identical-unit-wc";
    case Algorithm::RelatedCmax: return "related-cmax";
    case Algorithm::RelatedWc: return "related-wc";
    case Algorithm::UnrelatedIndep: return "unrelated-indep";
    case Algorithm::UnrelatedDep: return "unrelated-dep";
  }
  return "?";
}

inline Algorithm default_algorithm(Model model) {
  switch (model) {
    case Model::Identical: return Algorithm::IdenticalWc;
    case Model::Related: return Algorithm::RelatedCmax;
    case Model::Unrelated: return Algorithm::UnrelatedDep;
  }
  return Algorithm::IdenticalWc;
}

/// %.12g rendering used for every floating-point cell, so equal runs
/// produce equal bytes.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

struct ExperimentConfig {
  GeneratorConfig gen;
  Algorithm alg = Algorithm::IdenticalWc;
  int instances = 10;
  int trials = 50;
  std::uint64_t seed = 1;
  bool with_exact = true;
  int exact_cap = 8;
  bool timings = false;  // off by default: reports must be reproducible bytes
  int workers = 0;       // 0 = SCHEDLP_WORKERS env or hardware concurrency
};

struct ExperimentRow {
  int instance_id = 0;
  int n = 0, m = 0;
  bool has_lp = false;
  double lp_value = 0.0;
  bool has_opt = false;
  Rational opt_value;
  bool has_cost = false;
  double cost_mean = 0.0;
  Rational cost_best;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
  std::string error;
};

struct ExperimentReport {
  bool timings = false;
  std::vector<ExperimentRow> rows;

  static std::string header() {
    return "instance_id,n,m,lp_value,opt_value,opt_value_exact,alg_cost_mean,"
           "alg_cost_best,alg_cost_best_exact,ratio_vs_lp,ratio_vs_opt,seed,"
           "wall_time,error";
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << header() << '\n';
    for (const ExperimentRow& r : rows) {
      out << r.instance_id << ',' << r.n << ',' << r.m << ',';
      if (r.has_lp) out << fmt_double(r.lp_value);
      out << ',';
      if (r.has_opt) out << fmt_double(r.opt_value.to_double());
      out << ',';
      if (r.has_opt) out << r.opt_value.str();
      out << ',';
      if (r.has_cost) out << fmt_double(r.cost_mean);
      out << ',';
      if (r.has_cost) out << fmt_double(r.cost_best.to_double());
      out << ',';
      if (r.has_cost) out << r.cost_best.str();
      out << ',';
      if (r.has_cost && r.has_lp && r.lp_value > 0.0)
        out << fmt_double(r.cost_best.to_double() / r.lp_value);
      out << ',';
      if (r.has_cost && r.has_opt && !r.opt_value.is_zero())
        out << fmt_double((r.cost_best / r.opt_value).to_double());
      out << ',';
      out << r.seed << ',';
      if (timings) out << fmt_double(r.wall_time);
      out << ',' << r.error << '\n';
    }
    return out.str();
  }
};

namespace detail {

inline ExperimentRow run_one_instance(const ExperimentConfig& cfg, int index) {
  ExperimentRow row;
  row.instance_id = index;
  // Seed tree: instance seed from the master seed and index, algorithm seed
  // one split below the instance seed.
  row.seed = split_seed(cfg.seed, static_cast<std::uint64_t>(index));
  std::uint64_t alg_seed = split_seed(row.seed, 1);
  auto started = std::chrono::steady_clock::now();
  try {
    Instance inst = generate(cfg.gen, row.seed);
    row.n = inst.n();
    row.m = inst.m;

    switch (cfg.alg) {
      case Algorithm::IdenticalWc:
      case Algorithm::IdenticalUnitWc: {
        IdenticalLp built = build_lp_identical(inst);
        SolveResult sol = solve_lp(built.lp);
        if (sol.status != SolveStatus::Optimal) throw std::runtime_error("LP solve failed");
        FracIdentical frac = extract_identical(inst, built, sol.x);
        row.lp_value = frac.lp_value;
        row.has_lp = true;
        IdenticalRunResult run =
            cfg.alg == Algorithm::IdenticalUnitWc
                ? schedule_identical_unit_wc(inst, frac, alg_seed, cfg.trials)
                : schedule_identical_wc(inst, frac, alg_seed, cfg.trials);
        double total = 0.0;
        for (const auto& t : run.trials) total += t.cost.to_double();
        row.cost_mean = total / static_cast<double>(run.trials.size());
        row.cost_best = run.best_cost;
        row.has_cost = true;
        if (cfg.with_exact && inst.n() <= cfg.exact_cap) {
          row.opt_value = exact_identical(inst, cfg.exact_cap).opt_value;
          row.has_opt = true;
        }
        break;
      }
      case Algorithm::RelatedCmax: {
        RelatedCmaxResult res = schedule_related_cmax(inst);
        row.lp_value = res.certificate.d_lp;
        row.has_lp = true;
        row.cost_best = res.certificate.makespan;
        row.cost_mean = row.cost_best.to_double();
        row.has_cost = true;
        if (cfg.with_exact && inst.n() <= cfg.exact_cap) {
          row.opt_value = exact_related(inst, ExactObjective::Makespan, cfg.exact_cap).opt_value;
          row.has_opt = true;
        }
        break;
      }
      case Algorithm::RelatedWc: {
        RelatedLp built = build_lp_related_cmax(inst, RelatedObjective::WeightedCompletion);
        SolveResult sol = solve_lp(built.lp);
        if (sol.status != SolveStatus::Optimal) throw std::runtime_error("LP solve failed");
        row.lp_value = sol.value;
        row.has_lp = true;
        Schedule sched = schedule_related_wc(inst);
        row.cost_best = objective(inst, sched).weighted_completion;
        row.cost_mean = row.cost_best.to_double();
        row.has_cost = true;
        if (cfg.with_exact && inst.n() <= cfg.exact_cap) {
          row.opt_value =
              exact_related(inst, ExactObjective::WeightedCompletion, cfg.exact_cap).opt_value;
          row.has_opt = true;
        }
        break;
      }
      case Algorithm::UnrelatedIndep:
      case Algorithm::UnrelatedDep: {
        UnrelatedLp built = build_lp_unrelated(inst);
        SolveResult sol = solve_lp(built.lp);
        if (sol.status != SolveStatus::Optimal) throw std::runtime_error("LP solve failed");
        FracUnrelated frac = extract_unrelated(inst, built, sol.x);
        row.lp_value = frac.lp_value;
        row.has_lp = true;
        UnrelatedRunResult run =
            cfg.alg == Algorithm::UnrelatedDep
                ? schedule_unrelated_wc(inst, frac, alg_seed, cfg.trials)
                : schedule_unrelated_independent(inst, frac, alg_seed, cfg.trials);
        double total = 0.0;
        for (const auto& t : run.trials) total += t.cost.to_double();
        row.cost_mean = total / static_cast<double>(run.trials.size());
        row.cost_best = run.best_cost;
        row.has_cost = true;
        if (cfg.with_exact && inst.n() <= cfg.exact_cap) {
          row.opt_value = exact_unrelated(inst, cfg.exact_cap).opt_value;
          row.has_opt = true;
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    row.error = e.what();
    for (char& c : row.error)
      if (c == ',' || c == '\n') c = ';';
  }
  row.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return row;
}

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SCHEDLP_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

/// Runs the instance matrix on a small worker pool. Rows land in instance
/// order regardless of completion order, and all randomness flows from the
/// per-instance seed, so reports do not depend on the pool size.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.instances < 0) throw std::invalid_argument("run_experiment: negative instance count");
  ExperimentReport report;
  report.timings = cfg.timings;
  report.rows.resize(cfg.instances);

  int workers = std::min(detail::resolve_workers(cfg.workers), std::max(cfg.instances, 1));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int idx = next.fetch_add(1);
      if (idx >= cfg.instances) return;
      report.rows[idx] = detail::run_one_instance(cfg, idx);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return report;
}

}  // namespace schedlp
