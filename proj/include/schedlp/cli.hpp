#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schedlp/exact.hpp"
#include "schedlp/experiment.hpp"
#include "schedlp/generate.hpp"
#include "schedlp/instance.hpp"
#include "schedlp/lp_scheduling.hpp"
#include "schedlp/schedule_identical.hpp"
#include "schedlp/schedule_related.hpp"
#include "schedlp/schedule_unrelated.hpp"
#include "schedlp/text_io.hpp"

namespace schedlp {

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

struct GenFlags {
  std::string model = "identical";
  GeneratorConfig cfg;
};

inline void add_gen_options(CLI::App* cmd, GenFlags& flags) {
  cmd->add_option("--model", flags.model, "identical | related | unrelated")
      ->check(CLI::IsMember({"identical", "related", "unrelated"}));
  cmd->add_option("--n", flags.cfg.n, "job count");
  cmd->add_option("--m", flags.cfg.m, "machine count");
  cmd->add_option("--pmin", flags.cfg.size_min, "min size");
  cmd->add_option("--pmax", flags.cfg.size_max, "max size");
  cmd->add_option("--wmin", flags.cfg.weight_min, "min weight");
  cmd->add_option("--wmax", flags.cfg.weight_max, "max weight");
  cmd->add_option("--density", flags.cfg.density, "edge probability");
  cmd->add_option("--layers", flags.cfg.layers, "layered dag with this many layers");
  cmd->add_option("--speed-min", flags.cfg.speed_min, "min speed (related)");
  cmd->add_option("--speed-max", flags.cfg.speed_max, "max speed (related)");
  cmd->add_option("--speed-halves", flags.cfg.speed_halves,
                  "speed denominator range (related)");
  cmd->add_option("--sparsity", flags.cfg.sparsity, "finite-entry probability (unrelated)");
  cmd->add_flag("--unit", flags.cfg.unit_sizes, "force unit sizes");
}

inline GeneratorConfig resolve_gen(const GenFlags& flags) {
  GeneratorConfig cfg = flags.cfg;
  cfg.model = *model_from_name(flags.model);
  return cfg;
}

inline Instance load_instance(const std::string& path) {
  Instance inst = read_instance(read_file(path));
  std::vector<std::string> bad = validate_instance(inst);
  if (!bad.empty()) {
    std::string msg = "invalid instance " + path + ":";
    for (const std::string& b : bad) msg += "\n  " + b;
    throw std::runtime_error(msg);
  }
  return inst;
}

struct RoundOutcome {
  Rational best_cost;
  double mean_cost = 0.0;
  Schedule best;
  std::string certificate;
  std::string trial_log;
};

inline RoundOutcome run_round(const Instance& inst, Algorithm alg, std::uint64_t seed,
                              int trials, bool grid) {
  RoundOutcome out;
  switch (alg) {
    case Algorithm::IdenticalWc:
    case Algorithm::IdenticalUnitWc: {
      IdenticalLp built = build_lp_identical(inst);
      SolveResult sol = solve_lp(built.lp);
      if (sol.status != SolveStatus::Optimal) throw std::runtime_error("LP solve failed");
      FracIdentical frac = extract_identical(inst, built, sol.x);
      ThetaMode mode = grid ? ThetaMode::Grid : ThetaMode::Random;
      IdenticalRunResult run = alg == Algorithm::IdenticalUnitWc
                                   ? schedule_identical_unit_wc(inst, frac, seed, trials, mode)
                                   : schedule_identical_wc(inst, frac, seed, trials, mode);
      out.best = run.best;
      out.best_cost = run.best_cost;
      double total = 0.0;
      std::ostringstream log;
      log << "trial,theta,cost\n";
      for (const auto& t : run.trials) {
        total += t.cost.to_double();
        log << t.trial << ',' << fmt_double(t.theta) << ',' << t.cost.str() << '\n';
      }
      out.mean_cost = total / static_cast<double>(run.trials.size());
      out.trial_log = log.str();
      break;
    }
    case Algorithm::RelatedCmax: {
      RelatedCmaxResult res = schedule_related_cmax(inst);
      out.best = res.schedule;
      out.best_cost = objective(inst, res.schedule).weighted_completion;
      out.mean_cost = out.best_cost.to_double();
      out.certificate = res.certificate.text();
      break;
    }
    case Algorithm::RelatedWc: {
      Schedule sched = schedule_related_wc(inst);
      out.best = sched;
      out.best_cost = objective(inst, sched).weighted_completion;
      out.mean_cost = out.best_cost.to_double();
      break;
    }
    case Algorithm::UnrelatedIndep:
    case Algorithm::UnrelatedDep: {
      UnrelatedLp built = build_lp_unrelated(inst);
      SolveResult sol = solve_lp(built.lp);
      if (sol.status != SolveStatus::Optimal) throw std::runtime_error("LP solve failed");
      FracUnrelated frac = extract_unrelated(inst, built, sol.x);
      UnrelatedRunResult run = alg == Algorithm::UnrelatedDep
                                   ? schedule_unrelated_wc(inst, frac, seed, trials)
                                   : schedule_unrelated_independent(inst, frac, seed, trials);
      out.best = run.best;
      out.best_cost = run.best_cost;
      double total = 0.0;
      std::ostringstream log;
      log << "trial,cost,num_bad_edges,num_groups,seed\n";
      for (const auto& t : run.trials) {
        total += t.cost.to_double();
        log << t.trial << ',' << t.cost.str() << ',' << t.num_bad_edges << ','
            << t.num_groups << ',' << t.seed << '\n';
      }
      out.mean_cost = total / static_cast<double>(run.trials.size());
      out.trial_log = log.str();
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Entry point shared by the binary and the test suites; returns the process
/// exit code. 0 = success, 1 = domain failure (invalid input, violations),
/// 2 = usage error.
inline int cli_main(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"time-indexed scheduling LPs, rounding algorithms, and benchmarks"};
  app.require_subcommand(1);

  // generate
  auto* cmd_gen = app.add_subcommand("generate", "write random instance files");
  detail::GenFlags gen_flags;
  detail::add_gen_options(cmd_gen, gen_flags);
  int gen_count = 1;
  std::uint64_t gen_seed = 1;
  std::string gen_out = ".";
  std::string gen_prefix = "instance";
  cmd_gen->add_option("--count", gen_count, "number of instances");
  cmd_gen->add_option("--seed", gen_seed, "master seed");
  cmd_gen->add_option("--out", gen_out, "output directory");
  cmd_gen->add_option("--prefix", gen_prefix, "file name prefix");

  // lp
  auto* cmd_lp = app.add_subcommand("lp", "build and solve the model's LP");
  std::string lp_file;
  bool lp_solution = false;
  std::string lp_mps;
  cmd_lp->add_option("instance", lp_file, "instance file")->required();
  cmd_lp->add_flag("--solution", lp_solution, "print nonzero variables");
  cmd_lp->add_option("--export-mps", lp_mps, "write the LP in MPS layout");

  // round
  auto* cmd_round = app.add_subcommand("round", "run a rounding algorithm");
  std::string round_file, round_alg = "identical-wc", round_out, round_log;
  std::uint64_t round_seed = 1;
  int round_trials = 1;
  bool round_grid = false;
  cmd_round->add_option("instance", round_file, "instance file")->required();
  cmd_round->add_option("--alg", round_alg, "algorithm")
      ->check(CLI::IsMember({"identical-wc", "identical-unit-wc", "related-cmax",
                             "related-wc", "unrelated-indep", "unrelated-dep"}));
  cmd_round->add_option("--seed", round_seed, "master seed");
  cmd_round->add_option("--trials", round_trials, "number of randomized trials");
  cmd_round->add_flag("--grid", round_grid, "deterministic theta grid instead of draws");
  cmd_round->add_option("--out", round_out, "write the best schedule here");
  cmd_round->add_option("--trial-log", round_log, "write per-trial CSV here");

  // exact
  auto* cmd_exact = app.add_subcommand("exact", "brute-force optimum");
  std::string exact_file, exact_obj = "wc", exact_out;
  int exact_cap = 9;
  cmd_exact->add_option("instance", exact_file, "instance file")->required();
  cmd_exact->add_option("--objective", exact_obj, "wc | cmax (related only)")
      ->check(CLI::IsMember({"wc", "cmax"}));
  cmd_exact->add_option("--cap", exact_cap, "max job count");
  cmd_exact->add_option("--out", exact_out, "write the witness schedule here");

  // validate
  auto* cmd_val = app.add_subcommand("validate", "check a schedule against an instance");
  std::string val_inst, val_sched;
  cmd_val->add_option("instance", val_inst, "instance file")->required();
  cmd_val->add_option("schedule", val_sched, "schedule file")->required();

  // experiment
  auto* cmd_exp = app.add_subcommand("experiment", "run the benchmark matrix");
  detail::GenFlags exp_flags;
  detail::add_gen_options(cmd_exp, exp_flags);
  ExperimentConfig exp_cfg;
  std::string exp_alg, exp_out;
  bool exp_no_exact = false;
  cmd_exp->add_option("--instances", exp_cfg.instances, "instance count");
  cmd_exp->add_option("--trials", exp_cfg.trials, "trials per instance");
  cmd_exp->add_option("--seed", exp_cfg.seed, "master seed");
  cmd_exp->add_option("--alg", exp_alg, "algorithm (defaults by model)");
  cmd_exp->add_flag("--no-exact", exp_no_exact, "skip the brute-force column");
  cmd_exp->add_option("--exact-cap", exp_cfg.exact_cap, "skip exact above this n");
  cmd_exp->add_flag("--timings", exp_cfg.timings,
                    "emit wall times (makes reports non-reproducible)");
  cmd_exp->add_option("--workers", exp_cfg.workers, "worker threads (0 = auto)");
  cmd_exp->add_option("--out", exp_out, "report CSV path")->required();

  std::vector<const char*> argv;
  argv.push_back("schedlp");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_gen->parsed()) {
      GeneratorConfig cfg = detail::resolve_gen(gen_flags);
      for (int k = 0; k < gen_count; ++k) {
        Instance inst = generate(cfg, split_seed(gen_seed, static_cast<std::uint64_t>(k)));
        std::string path = gen_out + "/" + gen_prefix + "_" + std::to_string(k) + ".txt";
        detail::write_file(path, write_instance(inst));
        out << path << '\n';
      }
      return 0;
    }

    if (cmd_lp->parsed()) {
      Instance inst = detail::load_instance(lp_file);
      switch (inst.model) {
        case Model::Identical: {
          IdenticalLp built = build_lp_identical(inst);
          if (!lp_mps.empty()) detail::write_file(lp_mps, write_mps(built.lp));
          SolveResult sol = solve_lp(built.lp);
          if (sol.status != SolveStatus::Optimal)
            throw std::runtime_error("LP solve failed");
          FracIdentical frac = extract_identical(inst, built, sol.x);
          out << "lp_value " << fmt_double(frac.lp_value) << '\n';
          if (lp_solution) {
            for (int j = 0; j < frac.n; ++j)
              for (std::int64_t t = 1; t <= frac.T; ++t)
                if (frac.x[j][t] > 1e-12)
                  out << "x " << j << ' ' << t << ' ' << fmt_double(frac.x[j][t]) << '\n';
          }
          break;
        }
        case Model::Related: {
          RelatedLp built = build_lp_related_cmax(inst);
          if (!lp_mps.empty()) detail::write_file(lp_mps, write_mps(built.lp));
          SolveResult sol = solve_lp(built.lp);
          if (sol.status != SolveStatus::Optimal)
            throw std::runtime_error("LP solve failed");
          FracRelated frac = extract_related(inst, built, sol.x);
          out << "lp_value " << fmt_double(frac.makespan_bound) << '\n';
          if (lp_solution) {
            for (int i = 0; i < frac.m; ++i)
              for (int j = 0; j < frac.n; ++j)
                if (frac.x[i][j] > 1e-12)
                  out << "x " << i << ' ' << j << ' ' << fmt_double(frac.x[i][j]) << '\n';
            for (int j = 0; j < frac.n; ++j)
              out << "C " << j << ' ' << fmt_double(frac.completion[j]) << '\n';
            out << "D " << fmt_double(frac.makespan_bound) << '\n';
          }
          break;
        }
        case Model::Unrelated: {
          UnrelatedLp built = build_lp_unrelated(inst);
          if (!lp_mps.empty()) detail::write_file(lp_mps, write_mps(built.lp));
          SolveResult sol = solve_lp(built.lp);
          if (sol.status != SolveStatus::Optimal)
            throw std::runtime_error("LP solve failed");
          FracUnrelated frac = extract_unrelated(inst, built, sol.x);
          out << "lp_value " << fmt_double(frac.lp_value) << '\n';
          if (lp_solution) {
            for (int i = 0; i < frac.m; ++i)
              for (int j = 0; j < frac.n; ++j)
                for (std::size_t s = 0; s < frac.x[i][j].size(); ++s)
                  if (frac.x[i][j][s] > 1e-12)
                    out << "x " << i << ' ' << j << ' ' << s << ' '
                        << fmt_double(frac.x[i][j][s]) << '\n';
          }
          break;
        }
      }
      return 0;
    }

    if (cmd_round->parsed()) {
      Instance inst = detail::load_instance(round_file);
      Algorithm alg = *algorithm_from_name(round_alg);
      detail::RoundOutcome res =
          detail::run_round(inst, alg, round_seed, round_trials, round_grid);
      std::vector<std::string> bad = validate_schedule(inst, res.best);
      if (!bad.empty()) throw std::runtime_error("produced schedule failed validation");
      out << "best_cost " << res.best_cost.str() << '\n';
      out << "mean_cost " << fmt_double(res.mean_cost) << '\n';
      if (!res.certificate.empty()) out << "certificate " << res.certificate << '\n';
      if (!round_out.empty()) detail::write_file(round_out, write_schedule(res.best));
      if (!round_log.empty()) {
        if (res.trial_log.empty())
          throw std::runtime_error("--trial-log not available for this algorithm");
        detail::write_file(round_log, res.trial_log);
      }
      return 0;
    }

    if (cmd_exact->parsed()) {
      Instance inst = detail::load_instance(exact_file);
      ExactResult res;
      switch (inst.model) {
        case Model::Identical: res = exact_identical(inst, exact_cap); break;
        case Model::Related:
          res = exact_related(inst,
                              exact_obj == "cmax" ? ExactObjective::Makespan
                                                  : ExactObjective::WeightedCompletion,
                              exact_cap);
          break;
        case Model::Unrelated: res = exact_unrelated(inst, exact_cap); break;
      }
      out << "opt_value " << res.opt_value.str() << '\n';
      out << "nodes " << res.nodes_explored << '\n';
      if (!exact_out.empty()) detail::write_file(exact_out, write_schedule(res.witness));
      return 0;
    }

    if (cmd_val->parsed()) {
      Instance inst = detail::load_instance(val_inst);
      Schedule sched = read_schedule(detail::read_file(val_sched));
      std::vector<std::string> bad = validate_schedule(inst, sched);
      if (bad.empty()) {
        ObjectiveValue value = objective(inst, sched);
        out << "ok\n";
        out << "objective " << value.weighted_completion.str() << '\n';
        out << "makespan " << value.makespan.str() << '\n';
        return 0;
      }
      for (const std::string& b : bad) out << "violation: " << b << '\n';
      return 1;
    }

    if (cmd_exp->parsed()) {
      ExperimentConfig cfg = exp_cfg;
      cfg.gen = detail::resolve_gen(exp_flags);
      cfg.with_exact = !exp_no_exact;
      if (exp_alg.empty()) {
        cfg.alg = default_algorithm(cfg.gen.model);
      } else {
        auto alg = algorithm_from_name(exp_alg);
        if (!alg) throw std::runtime_error("unknown algorithm " + exp_alg);
        cfg.alg = *alg;
      }
      ExperimentReport report = run_experiment(cfg);
      detail::write_file(exp_out, report.to_csv());
      out << "rows " << report.rows.size() << '\n';
      out << "report " << exp_out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace schedlp
