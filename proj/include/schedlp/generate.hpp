#pragma once

#include <stdexcept>

#include "schedlp/instance.hpp"
#include "schedlp/rng.hpp"

namespace schedlp {

/// Random-instance recipe. One seed, one instance; re-running with the
/// same config and seed reproduces the instance bit for bit.
struct GeneratorConfig {
  Model model = Model::Identical;
  int n = 5;
  int m = 2;
  std::int64_t size_min = 1, size_max = 3;
  std::int64_t weight_min = 1, weight_max = 9;
  double density = 0.3;   // edge probability (identical/related)
  int layers = 0;         // > 0: layered dag, edges only between adjacent layers
  std::int64_t speed_min = 1, speed_max = 4;  // related
  int speed_halves = 1;   // 1: integer speeds; 2: allow halves
  double sparsity = 1.0;  // unrelated: probability an entry is finite
  bool unit_sizes = false;
};

inline Instance generate(const GeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.n <= 0) throw std::invalid_argument("generate: need at least one job");
  if (cfg.m <= 0) throw std::invalid_argument("generate: need at least one machine");
  if (cfg.size_min < 1 || cfg.size_min > cfg.size_max)
    throw std::invalid_argument("generate: bad size range");
  if (cfg.weight_min < 1 || cfg.weight_min > cfg.weight_max)
    throw std::invalid_argument("generate: bad weight range");

  Rng rng(seed);
  Instance inst;
  inst.model = cfg.model;
  inst.m = cfg.m;
  inst.dag.n = cfg.n;

  for (int j = 0; j < cfg.n; ++j) {
    Job job;
    job.id = j;
    job.weight = rng.next_int(cfg.weight_min, cfg.weight_max);
    // Unrelated sizes live in the matrix; the job field stays at its default.
    if (cfg.model != Model::Unrelated)
      job.size = cfg.unit_sizes ? 1 : rng.next_int(cfg.size_min, cfg.size_max);
    inst.jobs.push_back(job);
  }

  if (cfg.model == Model::Unrelated) {
    inst.pmatrix.assign(cfg.m, std::vector<std::int64_t>(cfg.n, 0));
    for (int j = 0; j < cfg.n; ++j) {
      bool any = false;
      for (int i = 0; i < cfg.m; ++i) {
        if (rng.next_bernoulli(cfg.sparsity)) {
          inst.pmatrix[i][j] = rng.next_int(cfg.size_min, cfg.size_max);
          any = true;
        }
      }
      if (!any) {
        int i = static_cast<int>(rng.next_int(0, cfg.m - 1));
        inst.pmatrix[i][j] = rng.next_int(cfg.size_min, cfg.size_max);
      }
    }
  } else {
    // Edges always point from lower to higher id, so the dag is acyclic by
    // construction.
    if (cfg.layers > 0) {
      std::vector<int> layer_of(cfg.n);
      for (int j = 0; j < cfg.n; ++j)
        layer_of[j] = static_cast<int>(rng.next_int(0, cfg.layers - 1));
      for (int a = 0; a < cfg.n; ++a)
        for (int b = a + 1; b < cfg.n; ++b)
          if (layer_of[b] == layer_of[a] + 1 && rng.next_bernoulli(cfg.density))
            inst.dag.edges.emplace_back(a, b);
    } else {
      for (int a = 0; a < cfg.n; ++a)
        for (int b = a + 1; b < cfg.n; ++b)
          if (rng.next_bernoulli(cfg.density)) inst.dag.edges.emplace_back(a, b);
    }
  }

  if (cfg.model == Model::Related) {
    if (cfg.speed_min < 1 || cfg.speed_min > cfg.speed_max)
      throw std::invalid_argument("generate: bad speed range");
    for (int i = 0; i < cfg.m; ++i) {
      std::int64_t den = rng.next_int(1, cfg.speed_halves);
      std::int64_t num = rng.next_int(cfg.speed_min * den, cfg.speed_max * den);
      inst.speeds.emplace_back(num, den);
    }
  }

  inst.horizon = inst.canonical_horizon();
  return inst;
}

}  // namespace schedlp
