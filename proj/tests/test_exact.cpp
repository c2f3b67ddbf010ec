#include <doctest.h>

#include "schedlp/exact.hpp"
#include "schedlp/generate.hpp"

using namespace schedlp;

namespace {

Instance make_identical(std::vector<Job> jobs, std::vector<std::pair<int, int>> edges, int m) {
  Instance inst;
  inst.model = Model::Identical;
  inst.jobs = std::move(jobs);
  inst.dag.n = inst.n();
  inst.dag.edges = std::move(edges);
  inst.m = m;
  inst.horizon = inst.canonical_horizon();
  return inst;
}

}  // namespace

TEST_CASE("exact_identical pinned values") {
  SUBCASE("weight-over-size order on one machine") {
    Instance inst = make_identical({{0, 2, 1}, {1, 1, 2}}, {}, 1);
    ExactResult res = exact_identical(inst);
    CHECK(res.opt_value == Rational(5));
    CHECK(validate_schedule(inst, res.witness).empty());
    CHECK(objective(inst, res.witness).weighted_completion == res.opt_value);
  }
  SUBCASE("unit chain on two machines") {
    Instance inst = make_identical({{0, 1, 1}, {1, 1, 1}}, {{0, 1}}, 2);
    CHECK(exact_identical(inst).opt_value == Rational(3));
  }
  SUBCASE("single job") {
    Instance inst = make_identical({{0, 3, 4}}, {}, 2);
    CHECK(exact_identical(inst).opt_value == Rational(12));
  }
  SUBCASE("cap is enforced") {
    GeneratorConfig cfg;
    cfg.n = 5;
    Instance inst = generate(cfg, 1);
    CHECK_THROWS(exact_identical(inst, 4));
  }
}

TEST_CASE("exact_related pinned values") {
  Instance inst;
  inst.model = Model::Related;
  inst.jobs = {{0, 1, 2}};
  inst.dag.n = 1;
  inst.m = 2;
  inst.speeds = {Rational(1), Rational(2)};
  inst.horizon = 2;
  SUBCASE("one job rides the fast machine") {
    CHECK(exact_related(inst, ExactObjective::Makespan).opt_value == Rational(1));
  }
  SUBCASE("two independent unit jobs on equal machines") {
    Instance two;
    two.model = Model::Related;
    two.jobs = {{0, 1, 1}, {1, 1, 1}};
    two.dag.n = 2;
    two.m = 2;
    two.speeds = {Rational(1), Rational(1)};
    two.horizon = 2;
    CHECK(exact_related(two, ExactObjective::Makespan).opt_value == Rational(1));
  }
  SUBCASE("a unit chain prefers the fast machine twice") {
    Instance chain;
    chain.model = Model::Related;
    chain.jobs = {{0, 1, 1}, {1, 1, 1}};
    chain.dag.n = 2;
    chain.dag.edges = {{0, 1}};
    chain.m = 2;
    chain.speeds = {Rational(1), Rational(2)};
    chain.horizon = 2;
    ExactResult res = exact_related(chain, ExactObjective::Makespan);
    CHECK(res.opt_value == Rational(1));
    CHECK(validate_schedule(chain, res.witness).empty());
  }
}

TEST_CASE("exact_unrelated pinned values") {
  SUBCASE("single job picks the smaller entry") {
    Instance inst;
    inst.model = Model::Unrelated;
    inst.jobs = {{0, 1, 1}};
    inst.dag.n = 1;
    inst.m = 2;
    inst.pmatrix = {{4}, {2}};
    inst.horizon = 4;
    ExactResult res = exact_unrelated(inst);
    CHECK(res.opt_value == Rational(2));
    CHECK(res.witness.placements[0].machine == 1);
  }
  SUBCASE("heavier job first on a shared machine") {
    Instance inst;
    inst.model = Model::Unrelated;
    inst.jobs = {{0, 1, 1}, {1, 2, 1}};
    inst.dag.n = 2;
    inst.m = 1;
    inst.pmatrix = {{1, 1}};
    inst.horizon = 2;
    CHECK(exact_unrelated(inst).opt_value == Rational(4));
  }
  SUBCASE("two jobs spread over two unit machines") {
    Instance inst;
    inst.model = Model::Unrelated;
    inst.jobs = {{0, 1, 1}, {1, 1, 1}};
    inst.dag.n = 2;
    inst.m = 2;
    inst.pmatrix = {{1, 1}, {1, 1}};
    inst.horizon = 2;
    CHECK(exact_unrelated(inst).opt_value == Rational(2));
  }
}

TEST_CASE("witnesses validate and attain the optimum") {
  Rng seeds(91);
  for (int round = 0; round < 9; ++round) {
    GeneratorConfig cfg;
    cfg.n = static_cast<int>(seeds.next_int(1, 5));
    cfg.m = static_cast<int>(seeds.next_int(1, 3));
    cfg.density = 0.4;
    switch (round % 3) {
      case 0: {
        cfg.model = Model::Identical;
        Instance inst = generate(cfg, seeds.next_u64());
        ExactResult res = exact_identical(inst);
        CHECK(validate_schedule(inst, res.witness).empty());
        CHECK(objective(inst, res.witness).weighted_completion == res.opt_value);
        break;
      }
      case 1: {
        cfg.model = Model::Related;
        cfg.speed_halves = 2;
        Instance inst = generate(cfg, seeds.next_u64());
        ExactResult res = exact_related(inst, ExactObjective::WeightedCompletion);
        CHECK(validate_schedule(inst, res.witness).empty());
        CHECK(objective(inst, res.witness).weighted_completion == res.opt_value);
        ExactResult cm = exact_related(inst, ExactObjective::Makespan);
        CHECK(objective(inst, cm.witness).makespan == cm.opt_value);
        break;
      }
      default: {
        cfg.model = Model::Unrelated;
        cfg.sparsity = 0.8;
        Instance inst = generate(cfg, seeds.next_u64());
        ExactResult res = exact_unrelated(inst);
        CHECK(validate_schedule(inst, res.witness).empty());
        CHECK(objective(inst, res.witness).weighted_completion == res.opt_value);
        break;
      }
    }
  }
}

TEST_CASE("list placement matches full start enumeration") {
  Rng seeds(92);
  for (int round = 0; round < 8; ++round) {
    GeneratorConfig cfg;
    cfg.model = Model::Identical;
    cfg.n = static_cast<int>(seeds.next_int(2, 4));
    cfg.m = static_cast<int>(seeds.next_int(1, 2));
    cfg.size_max = 2;
    cfg.density = 0.4;
    Instance inst = generate(cfg, seeds.next_u64());
    CHECK(exact_identical(inst).opt_value == exact_identical_all_starts(inst).opt_value);
  }
}

TEST_CASE("the single-machine ratio rule matches permutation search") {
  Rng seeds(93);
  for (int round = 0; round < 12; ++round) {
    int k = static_cast<int>(seeds.next_int(1, 7));
    std::vector<int> jobs(k);
    std::vector<std::int64_t> weight(k), ptime(k);
    for (int j = 0; j < k; ++j) {
      jobs[j] = j;
      weight[j] = seeds.next_int(1, 9);
      ptime[j] = seeds.next_int(1, 5);
    }
    std::vector<int> order = smith_order(jobs, weight, ptime);
    std::int64_t clock = 0;
    Rational cost(0);
    for (int j : order) {
      clock += ptime[j];
      cost += Rational(weight[j]) * Rational(clock);
    }
    CHECK(cost == single_machine_best_by_permutations(jobs, weight, ptime));
  }
}
