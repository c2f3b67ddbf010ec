#include <doctest.h>

#include <cmath>

#include "schedlp/exact.hpp"
#include "schedlp/generate.hpp"
#include "schedlp/schedule_unrelated.hpp"

using namespace schedlp;

namespace {

Instance make_unrelated(std::vector<Job> jobs, std::vector<std::vector<std::int64_t>> pm) {
  Instance inst;
  inst.model = Model::Unrelated;
  inst.jobs = std::move(jobs);
  inst.dag.n = inst.n();
  inst.pmatrix = std::move(pm);
  inst.m = static_cast<int>(inst.pmatrix.size());
  inst.horizon = inst.canonical_horizon();
  return inst;
}

FracUnrelated solve_unrelated(const Instance& inst) {
  UnrelatedLp built = build_lp_unrelated(inst);
  SolveResult res = solve_lp(built.lp);
  REQUIRE(res.status == SolveStatus::Optimal);
  return extract_unrelated(inst, built, res.x);
}

/// Hand-built fractional solution; x[i][j] maps start -> mass.
FracUnrelated manual_frac(const Instance& inst,
                          std::vector<std::vector<std::vector<double>>> x) {
  FracUnrelated frac;
  frac.n = inst.n();
  frac.m = inst.m;
  frac.T = inst.horizon;
  frac.x = std::move(x);
  frac.y.assign(frac.m, std::vector<double>(frac.n, 0.0));
  frac.phi.assign(frac.m, std::vector<double>(frac.n, 0.0));
  frac.completion.assign(frac.n, 0.0);
  for (int i = 0; i < frac.m; ++i)
    for (int j = 0; j < frac.n; ++j) {
      double mass = 0.0, moment = 0.0;
      for (std::size_t s = 0; s < frac.x[i][j].size(); ++s) {
        mass += frac.x[i][j][s];
        moment += frac.x[i][j][s] * static_cast<double>(s);
      }
      frac.y[i][j] = mass;
      frac.phi[i][j] = mass > 0.0 ? moment / mass : 0.0;
    }
  return frac;
}

}  // namespace

TEST_CASE("independent rounding") {
  SUBCASE("one job, integral solution") {
    Instance inst = make_unrelated({{0, 1, 1}}, {{3}});
    FracUnrelated frac = solve_unrelated(inst);
    Schedule s = independent_round(inst, frac, 5);
    CHECK(s.placements[0].machine == 0);
    CHECK(s.placements[0].end == Rational(3));
  }
  SUBCASE("two stacked unit rectangles keep their order") {
    Instance inst = make_unrelated({{0, 1, 1}, {1, 1, 1}}, {{1, 1}});
    FracUnrelated frac = solve_unrelated(inst);
    // Optimal LP: one job at s=0, the other at s=1; tau ordering follows.
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Schedule s = independent_round(inst, frac, seed);
      CHECK(validate_schedule(inst, s).empty());
      Rational cost = objective(inst, s).weighted_completion;
      CHECK(cost.to_double() == doctest::Approx(frac.lp_value));
    }
  }
}

TEST_CASE("good/bad classification") {
  Instance inst = make_unrelated({{0, 1, 1}}, {{10}});
  SUBCASE("comfortably good") {
    FracUnrelated frac = manual_frac(inst, {{{0.2, 0, 0, 0, 0, 0.2}}});
    // y = 0.4, phi = 2.5: 2.5 + 4 >= 0.1
    CHECK(classify_good(inst, frac)[0][0]);
  }
  SUBCASE("boundary equality counts as good") {
    // y = 0.01, mass all at s = 0: phi + y p = 0.1 = 0.01 * p exactly.
    FracUnrelated frac = manual_frac(inst, {{{0.01}}});
    CHECK(classify_good(inst, frac)[0][0]);
  }
  SUBCASE("tiny early mass is bad") {
    Instance big = make_unrelated({{0, 1, 1}}, {{1000}});
    std::vector<double> xs(2, 0.0);
    xs[0] = 0.004;
    xs[1] = 0.001;
    FracUnrelated frac = manual_frac(big, {{xs}});
    // phi = 0.2, y = 0.005: 0.2 + 5 < 10
    CHECK_FALSE(classify_good(big, frac)[0][0]);
  }
}

TEST_CASE("dyadic block assignment") {
  Instance inst = make_unrelated({{0, 1, 1}}, {{100}});
  std::vector<double> xs(51, 0.0);
  xs[0] = 0.002;
  xs[1] = 0.002;
  FracUnrelated frac = manual_frac(inst, {{xs}});
  // y = 0.004, phi = 0.5: 0.5 + 0.4 < 1, so the edge is bad.
  auto good = classify_good(inst, frac);
  REQUIRE_FALSE(good[0][0]);

  RectSample sample;
  sample.start = {{0}};
  sample.tau = {{10.0}};
  sample.shift = {{1.0}};

  SUBCASE("a = 3 satisfies all three properties") {
    auto block = assign_blocks(inst, frac, sample, good);
    CHECK(block[0][0] == 3);  // (8, 16] inside (5, 100], s + theta <= 8, tau inside
  }
  SUBCASE("tau outside every admissible block") {
    sample.tau = {{0.2}};  // below the lowest block
    CHECK(assign_blocks(inst, frac, sample, good)[0][0] == kNoBlock);
  }
  SUBCASE("shift pushing past the block start disqualifies") {
    sample.shift = {{9.0}};
    CHECK(assign_blocks(inst, frac, sample, good)[0][0] == kNoBlock);
  }
  SUBCASE("phi at p/10 leaves no room") {
    frac.phi[0][0] = 10.0;  // (10 phi, p] = (100, 100]
    auto block = assign_blocks(inst, frac, sample, good);
    CHECK(block[0][0] == kNoBlock);
  }
}

TEST_CASE("grouping greedy fill and drop") {
  // Five bad edges of weight 0.05 assigned to one block on one machine.
  Instance inst = make_unrelated(
      {{0, 1, 1}, {1, 1, 1}, {2, 1, 1}, {3, 1, 1}, {4, 1, 1}},
      {{1000, 1000, 1000, 1000, 1000}});
  std::vector<std::vector<std::vector<double>>> x(1);
  x[0].assign(5, std::vector<double>(1, 0.05));
  FracUnrelated frac = manual_frac(inst, x);
  std::vector<std::vector<int>> block(1, std::vector<int>(5, 4));
  RectSample sample;  // unused by the grouping

  SUBCASE("pre-drop weight is the block total and groups stay under 1") {
    Rng rng(3);
    GroupingScheme scheme = build_grouping(frac, sample, block, rng);
    REQUIRE(scheme.pre_drop_weights[0].size() == 1);
    CHECK(scheme.pre_drop_weights[0][0] == doctest::Approx(0.25));
    double total = 0.0;
    for (const auto& group : scheme.groups[0])
      for (int j : group) total += frac.y[0][j];
    CHECK(total <= 1.0 + 1e-9);
  }
  SUBCASE("greedy fill closes a set at 0.15, leaving 0.15/0.10 splits") {
    // Two nonempty sets of weights 0.15 and 0.10; dropping two of ten
    // uniformly keeps each with probability 8/10, so over many draws the
    // surviving weight hits exactly {0.25, 0.15, 0.10, 0}.
    int seen25 = 0, seen15 = 0, seen10 = 0, seen0 = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
      Rng rng(seed);
      GroupingScheme scheme = build_grouping(frac, sample, block, rng);
      double w = 0.0;
      for (const auto& group : scheme.groups[0])
        for (int j : group) w += frac.y[0][j];
      if (std::abs(w - 0.25) < 1e-12) ++seen25;
      else if (std::abs(w - 0.15) < 1e-12) ++seen15;
      else if (std::abs(w - 0.10) < 1e-12) ++seen10;
      else if (w == 0.0) ++seen0;
      else FAIL("unexpected surviving weight ", w);
    }
    CHECK(seen25 > 200);  // both sets survive with probability 28/45
    CHECK(seen15 > 20);
    CHECK(seen10 > 20);
    CHECK(seen0 >= 0);
  }
  SUBCASE("no bad edges, no groups") {
    std::vector<std::vector<int>> none(1, std::vector<int>(5, kNoBlock));
    Rng rng(9);
    GroupingScheme scheme = build_grouping(frac, sample, none, rng);
    CHECK(scheme.groups[0].empty());
  }
}

TEST_CASE("pre-drop block weights stay under 10/9 across random solutions") {
  Rng seeds(61);
  for (int round = 0; round < 6; ++round) {
    GeneratorConfig cfg;
    cfg.model = Model::Unrelated;
    cfg.n = static_cast<int>(seeds.next_int(3, 6));
    cfg.m = static_cast<int>(seeds.next_int(2, 3));
    cfg.sparsity = 0.8;
    Instance inst = generate(cfg, seeds.next_u64());
    FracUnrelated frac = solve_unrelated(inst);
    auto good = classify_good(inst, frac);
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
      Rng rng(split_seed(round, trial));
      RectSample sample = sample_rectangles(inst, frac, rng);
      auto block = assign_blocks(inst, frac, sample, good);
      GroupingScheme scheme = build_grouping(frac, sample, block, rng);
      for (const auto& weights : scheme.pre_drop_weights)
        for (double w : weights) CHECK(w <= 10.0 / 9.0 + 1e-9);
    }
  }
}

TEST_CASE("dependent rounding properties") {
  SUBCASE("integral input is returned as-is") {
    Instance inst = make_unrelated({{0, 1, 1}, {1, 1, 1}}, {{2, 3}, {4, 5}});
    FracUnrelated frac = manual_frac(
        inst, {{{1.0}, {}}, {{}, {1.0}}});
    frac.x[0][1] = {};
    frac.x[1][0] = {};
    GroupingScheme scheme;
    scheme.groups.resize(2);
    Rng rng(1);
    std::vector<int> got = dependent_round(frac, scheme, rng);
    CHECK(got == std::vector<int>{0, 1});
  }
  SUBCASE("half-half marginals on one job") {
    Instance inst = make_unrelated({{0, 1, 1}}, {{2}, {2}});
    FracUnrelated frac = manual_frac(inst, {{{0.5}}, {{0.5}}});
    GroupingScheme scheme;
    scheme.groups.resize(2);
    int first = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
      Rng rng(split_seed(99, t));
      std::vector<int> got = dependent_round(frac, scheme, rng);
      if (got[0] == 0) ++first;
    }
    CHECK(std::abs(first / double(trials) - 0.5) < 0.02);
  }
  SUBCASE("same-group pair is anti-correlated") {
    // Jobs 0 and 1 each put half their mass on machine 0; the pair forms one
    // group there. Independent rounding would collide with probability 1/4.
    Instance inst =
        make_unrelated({{0, 1, 1}, {1, 1, 1}}, {{4, 4}, {4, 0}, {0, 4}});
    FracUnrelated frac = manual_frac(
        inst, {{{0.5}, {0.5}}, {{0.5}, {}}, {{}, {0.5}}});
    GroupingScheme scheme;
    scheme.groups.resize(3);
    scheme.groups[0].push_back({0, 1});
    int both = 0, j0 = 0, j1 = 0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
      Rng rng(split_seed(7, t));
      std::vector<int> got = dependent_round(frac, scheme, rng);
      if (got[0] == 0) ++j0;
      if (got[1] == 0) ++j1;
      if (got[0] == 0 && got[1] == 0) ++both;
    }
    // Marginals intact...
    CHECK(std::abs(j0 / double(trials) - 0.5) < 0.015);
    CHECK(std::abs(j1 / double(trials) - 0.5) < 0.015);
    // ...and the joint probability beats the independent 1/4 by at least the
    // advertised negative-correlation factor.
    double target = 0.25 * (1.0 - 1.0 / 108.0);
    double se = std::sqrt(0.25 / trials);
    CHECK(both / double(trials) <= target + 3.0 * se);
  }
  SUBCASE("marginals hold through a real pipeline grouping") {
    Instance inst = make_unrelated({{0, 2, 1}, {1, 1, 1}, {2, 3, 1}},
                                   {{2, 3, 1}, {2, 1, 4}});
    FracUnrelated frac = solve_unrelated(inst);
    std::vector<std::vector<int>> hits(inst.m, std::vector<int>(inst.n(), 0));
    const int trials = 20000;
    auto good = classify_good(inst, frac);
    for (int t = 0; t < trials; ++t) {
      Rng rng(split_seed(1234, t));
      RectSample sample = sample_rectangles(inst, frac, rng);
      auto block = assign_blocks(inst, frac, sample, good);
      GroupingScheme scheme = build_grouping(frac, sample, block, rng);
      std::vector<int> got = dependent_round(frac, scheme, rng);
      for (int j = 0; j < inst.n(); ++j) ++hits[got[j]][j];
    }
    for (int i = 0; i < inst.m; ++i)
      for (int j = 0; j < inst.n(); ++j) {
        double y = frac.y[i][j];
        double freq = hits[i][j] / double(trials);
        double se = std::sqrt(std::max(y * (1.0 - y), 1e-6) / trials);
        CHECK(std::abs(freq - y) <= 4.0 * se + 1e-3);
      }
  }
}

TEST_CASE("block assignments of distinct jobs are independent") {
  Instance inst = make_unrelated({{0, 1, 1}, {1, 1, 1}}, {{1000, 1000}});
  std::vector<double> xs(2, 0.0);
  xs[0] = 0.004;
  xs[1] = 0.001;
  FracUnrelated frac = manual_frac(inst, {{xs, xs}});
  auto good = classify_good(inst, frac);
  REQUIRE_FALSE(good[0][0]);
  REQUIRE_FALSE(good[0][1]);

  const int trials = 50000;
  int hit0 = 0, hit1 = 0, hit_both = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(split_seed(31337, t));
    RectSample sample = sample_rectangles(inst, frac, rng);
    auto block = assign_blocks(inst, frac, sample, good);
    bool b0 = block[0][0] != kNoBlock;
    bool b1 = block[0][1] != kNoBlock;
    hit0 += b0;
    hit1 += b1;
    hit_both += b0 && b1;
  }
  double p0 = hit0 / double(trials), p1 = hit1 / double(trials);
  double joint = hit_both / double(trials);
  CHECK(p0 > 0.3);  // the events are non-trivial
  CHECK(joint == doctest::Approx(p0 * p1).epsilon(0.05));
}

TEST_CASE("rectangle area before tau never exceeds tau") {
  Rng seeds(71);
  for (int round = 0; round < 6; ++round) {
    GeneratorConfig cfg;
    cfg.model = Model::Unrelated;
    cfg.n = static_cast<int>(seeds.next_int(2, 6));
    cfg.m = static_cast<int>(seeds.next_int(1, 3));
    cfg.sparsity = 0.9;
    Instance inst = generate(cfg, seeds.next_u64());
    FracUnrelated frac = solve_unrelated(inst);
    Rng taus(round);
    for (int i = 0; i < inst.m; ++i)
      for (int k = 0; k < 50; ++k) {
        double tau = taus.next_closed_open() * static_cast<double>(inst.horizon);
        CHECK(rectangle_area_before(inst, frac, i, tau) <= tau + 1e-6 * (1.0 + tau));
      }
  }
}

TEST_CASE("full pipeline trials") {
  SUBCASE("single job integral solution costs the LP value") {
    Instance inst = make_unrelated({{0, 2, 1}}, {{5}, {3}});
    FracUnrelated frac = solve_unrelated(inst);
    UnrelatedRunResult run = schedule_unrelated_wc(inst, frac, 4, 10);
    CHECK(run.best_cost == Rational(6));
    for (const auto& t : run.trials) CHECK(t.cost == Rational(6));
  }
  SUBCASE("every trial validates and the log is reproducible") {
    Rng seeds(72);
    for (int round = 0; round < 4; ++round) {
      GeneratorConfig cfg;
      cfg.model = Model::Unrelated;
      cfg.n = static_cast<int>(seeds.next_int(3, 6));
      cfg.m = static_cast<int>(seeds.next_int(2, 3));
      cfg.sparsity = 0.8;
      Instance inst = generate(cfg, seeds.next_u64());
      FracUnrelated frac = solve_unrelated(inst);
      for (int t = 0; t < 30; ++t) {
        Rng rng(split_seed(round, t));
        Schedule sched = unrelated_round_once(inst, frac, rng);
        CHECK(validate_schedule(inst, sched).empty());
      }
      UnrelatedRunResult a = schedule_unrelated_wc(inst, frac, 17, 25);
      UnrelatedRunResult b = schedule_unrelated_wc(inst, frac, 17, 25);
      REQUIRE(a.trials.size() == b.trials.size());
      for (std::size_t k = 0; k < a.trials.size(); ++k) {
        CHECK(a.trials[k].cost == b.trials[k].cost);
        CHECK(a.trials[k].num_bad_edges == b.trials[k].num_bad_edges);
        CHECK(a.trials[k].num_groups == b.trials[k].num_groups);
        CHECK(a.trials[k].seed == b.trials[k].seed);
      }
      CHECK(a.best == b.best);
    }
  }
  SUBCASE("independent rounding wrapper mirrors the trial contract") {
    Instance inst = make_unrelated({{0, 1, 1}, {1, 2, 1}}, {{2, 2}, {3, 1}});
    FracUnrelated frac = solve_unrelated(inst);
    UnrelatedRunResult run = schedule_unrelated_independent(inst, frac, 11, 40);
    CHECK(validate_schedule(inst, run.best).empty());
    Rational lowest = run.trials[0].cost;
    for (const auto& t : run.trials) lowest = min(lowest, t.cost);
    CHECK(run.best_cost == lowest);
  }
}
