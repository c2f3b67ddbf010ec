#include <doctest.h>

#include "schedlp/generate.hpp"
#include "schedlp/instance.hpp"
#include "schedlp/text_io.hpp"

#include "oracles.hpp"

using namespace schedlp;

namespace {

Instance chain2_one_machine() {
  Instance inst;
  inst.model = Model::Identical;
  inst.jobs = {{0, 1, 1}, {1, 1, 1}};
  inst.dag.n = 2;
  inst.dag.edges = {{0, 1}};
  inst.m = 1;
  inst.horizon = 2;
  return inst;
}

bool mentions(const std::vector<std::string>& msgs, const std::string& needle) {
  for (const std::string& msg : msgs)
    if (msg.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validate_instance basics") {
  Instance inst;
  inst.model = Model::Identical;
  inst.jobs = {{0, 1, 1}};
  inst.dag.n = 1;
  inst.m = 1;
  inst.horizon = 1;
  CHECK(validate_instance(inst).empty());

  Instance cyc = chain2_one_machine();
  cyc.dag.edges = {{0, 1}, {1, 0}};
  CHECK(mentions(validate_instance(cyc), "cycle"));

  Instance unrel;
  unrel.model = Model::Unrelated;
  unrel.jobs = {{0, 1, 1}};
  unrel.dag.n = 1;
  unrel.m = 2;
  unrel.pmatrix = {{0}, {0}};
  unrel.horizon = 0;
  CHECK(mentions(validate_instance(unrel), "unschedulable"));
}

TEST_CASE("validate_schedule catches overlap, precedence, duration") {
  Instance inst = chain2_one_machine();
  Schedule ok;
  ok.placements = {{0, Rational(0), Rational(1)}, {0, Rational(1), Rational(2)}};
  CHECK(validate_schedule(inst, ok).empty());

  Schedule bad;
  bad.placements = {{0, Rational(0), Rational(1)}, {0, Rational(0), Rational(1)}};
  auto msgs = validate_schedule(inst, bad);
  CHECK(mentions(msgs, "overlap"));
  CHECK(mentions(msgs, "precedence"));

  Instance rel;
  rel.model = Model::Related;
  rel.jobs = {{0, 1, 4}};
  rel.dag.n = 1;
  rel.m = 1;
  rel.speeds = {Rational(2)};
  rel.horizon = 4;
  Schedule half;
  half.placements = {{0, Rational(0), Rational(2)}};
  CHECK(validate_schedule(rel, half).empty());
  Schedule wrong;
  wrong.placements = {{0, Rational(0), Rational(4)}};
  CHECK(mentions(validate_schedule(rel, wrong), "duration"));
}

TEST_CASE("objective sums weighted ends") {
  Instance inst;
  inst.model = Model::Identical;
  inst.jobs = {{0, 2, 5}};
  inst.dag.n = 1;
  inst.m = 1;
  inst.horizon = 5;
  Schedule s;
  s.placements = {{0, Rational(0), Rational(5)}};
  CHECK(objective(inst, s).weighted_completion == Rational(10));

  Instance two;
  two.model = Model::Identical;
  two.jobs = {{0, 1, 1}, {1, 3, 1}};
  two.dag.n = 2;
  two.m = 2;
  two.horizon = 2;
  Schedule st;
  st.placements = {{0, Rational(0), Rational(1)}, {1, Rational(1), Rational(2)}};
  CHECK(objective(two, st).weighted_completion == Rational(7));
  CHECK(objective(two, st).makespan == Rational(2));

  Instance empty;
  empty.model = Model::Identical;
  empty.m = 1;
  empty.horizon = 0;
  CHECK(objective(empty, Schedule{}).weighted_completion == Rational(0));
}

TEST_CASE("depth over chains, antichains, diamonds") {
  PrecedenceDag chain{3, {{0, 1}, {1, 2}}};
  CHECK(depth(chain) == std::vector<int>{1, 2, 3});

  PrecedenceDag loose{3, {}};
  CHECK(depth(loose) == std::vector<int>{1, 1, 1});

  PrecedenceDag diamond{4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}};
  CHECK(depth(diamond) == std::vector<int>{1, 2, 2, 3});

  PrecedenceDag cyc{2, {{0, 1}, {1, 0}}};
  CHECK_THROWS(depth(cyc));
}

TEST_CASE("depth increases along every edge of random dags") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 8;
    cfg.density = 0.4;
    Instance inst = generate(cfg, seed);
    std::vector<int> a = depth(inst.dag);
    for (auto [u, v] : inst.dag.edges) CHECK(a[v] >= a[u] + 1);
  }
}

TEST_CASE("intervals_to_machines greedy sweep") {
  IntervalSet iv;
  iv.entries = {{0, 0, 2}, {1, 0, 2}, {2, 2, 3}};
  Schedule s = intervals_to_machines(iv, 2);
  CHECK(s.placements[0].machine == 0);
  CHECK(s.placements[1].machine == 1);
  CHECK(s.placements[2].machine == 0);

  IntervalSet over;
  over.entries = {{0, 0, 2}, {1, 0, 2}, {2, 1, 3}};
  CHECK(congestion(over) == 3);
  CHECK_THROWS_WITH(intervals_to_machines(over, 2),
                    doctest::Contains("congestion"));

  IntervalSet single;
  single.entries = {{0, 4, 9}};
  CHECK(intervals_to_machines(single, 1).placements[0].machine == 0);
}

TEST_CASE("intervals_to_machines on random interval sets") {
  Rng rng(99);
  for (int round = 0; round < 200; ++round) {
    int k = static_cast<int>(rng.next_int(1, 8));
    IntervalSet iv;
    std::vector<std::pair<std::int64_t, std::int64_t>> raw;
    for (int j = 0; j < k; ++j) {
      std::int64_t a = rng.next_int(0, 9);
      std::int64_t b = a + rng.next_int(1, 4);
      iv.entries.push_back({j, a, b});
      raw.emplace_back(a, b);
    }
    int measured = testing::congestion_by_midpoints(raw);
    CHECK(congestion(iv) == measured);
    int m = static_cast<int>(rng.next_int(1, 4));
    if (measured <= m) {
      Schedule s = intervals_to_machines(iv, m);
      // No same-machine overlap in open interiors.
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
          if (s.placements[a].machine != s.placements[b].machine) continue;
          bool disjoint = s.placements[a].end <= s.placements[b].start ||
                          s.placements[b].end <= s.placements[a].start;
          CHECK(disjoint);
        }
    } else {
      CHECK_THROWS(intervals_to_machines(iv, m));
    }
  }
}

TEST_CASE("instance text round trip") {
  Rng seeds(5);
  for (int round = 0; round < 30; ++round) {
    GeneratorConfig cfg;
    cfg.n = static_cast<int>(seeds.next_int(1, 7));
    cfg.m = static_cast<int>(seeds.next_int(1, 3));
    switch (round % 3) {
      case 0: cfg.model = Model::Identical; break;
      case 1: cfg.model = Model::Related; cfg.speed_halves = 2; break;
      case 2: cfg.model = Model::Unrelated; cfg.sparsity = 0.7; break;
    }
    Instance inst = generate(cfg, seeds.next_u64());
    CHECK(validate_instance(inst).empty());
    std::string text = write_instance(inst);
    Instance back = read_instance(text);
    CHECK(back == inst);
    CHECK(write_instance(back) == text);
  }
}

TEST_CASE("instance parse errors carry line numbers") {
  try {
    read_instance("bogus 1 1 1\n0 1 1\nedges\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
  }

  try {
    read_instance("identical 1 1 1\n0 1 1\nedges\n0 1\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
    CHECK(std::string(e.what()).find("out of range") != std::string::npos);
  }
}

TEST_CASE("schedule text round trip") {
  Schedule s;
  s.placements = {{0, Rational(0), Rational(3, 2)}, {2, Rational(3, 2), Rational(4)}};
  CHECK(read_schedule(write_schedule(s)) == s);
}

TEST_CASE("generator determinism and ranges") {
  GeneratorConfig cfg;
  cfg.model = Model::Identical;
  cfg.n = 5;
  cfg.m = 2;
  cfg.density = 0.3;
  CHECK(generate(cfg, 7) == generate(cfg, 7));

  GeneratorConfig unrel;
  unrel.model = Model::Unrelated;
  unrel.n = 6;
  unrel.m = 3;
  unrel.sparsity = 1.0;
  Instance u = generate(unrel, 11);
  for (int i = 0; i < u.m; ++i)
    for (int j = 0; j < u.n(); ++j) CHECK(u.pmatrix[i][j] > 0);

  GeneratorConfig rel;
  rel.model = Model::Related;
  rel.n = 4;
  rel.m = 4;
  rel.speed_min = 1;
  rel.speed_max = 8;
  rel.speed_halves = 2;
  Instance r = generate(rel, 3);
  for (const Rational& s : r.speeds) {
    CHECK(s >= Rational(1));
    CHECK(s <= Rational(8));
  }

  GeneratorConfig zero;
  zero.n = 0;
  CHECK_THROWS(generate(zero, 1));
}

TEST_CASE("layered generator keeps edges between adjacent layers") {
  GeneratorConfig cfg;
  cfg.model = Model::Identical;
  cfg.n = 12;
  cfg.m = 2;
  cfg.layers = 4;
  cfg.density = 0.8;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Instance inst = generate(cfg, seed);
    CHECK(validate_instance(inst).empty());
    // Depth can never exceed the layer count.
    std::vector<int> a = depth(inst.dag);
    for (int d : a) CHECK(d <= cfg.layers);
  }
}
