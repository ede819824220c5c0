#include <algorithm>
#include <set>

#include "doctest.h"
#include "sbcn/cnf.hpp"
#include "sbcn/error.hpp"
#include "sbcn/mpn.hpp"
#include "sbcn/suppes.hpp"
#include "test_util.hpp"

using namespace sbcn;
using testing::from_rows;
using testing::toy;

namespace {

MpnModel chain_model(double theta, double epsilon, double source) {
  MpnModel m;
  std::vector<Edge> edges{{0, 1}, {1, 2}};
  m.dag = Dag::from_edges(3, edges);
  m.logic = {std::nullopt, Logic::conjunction, Logic::conjunction};
  m.theta = theta;
  m.epsilon = epsilon;
  m.source_marginal = source;
  m.event_names = {"u", "v", "w"};
  return m;
}

MpnModel xor_model(double theta, double epsilon, double source) {
  MpnModel m;
  std::vector<Edge> edges{{0, 2}, {1, 2}};
  m.dag = Dag::from_edges(3, edges);
  m.logic = {std::nullopt, std::nullopt, Logic::exclusive};
  m.theta = theta;
  m.epsilon = epsilon;
  m.source_marginal = source;
  m.event_names = {"c1", "c2", "e"};
  return m;
}

void check_poset_invariants(const Dataset& d, const PrimaFaciePoset& p) {
  const auto n = d.event_count();
  std::set<Edge> allowed(p.allowed_edges.begin(), p.allowed_edges.end());
  CHECK(std::is_sorted(p.allowed_edges.begin(), p.allowed_edges.end()));
  for (const auto& e : p.allowed_edges) {
    // Soundness with exact counting done here.
    CHECK(testing::suppes_holds(d, e.from, e.to));
    CHECK_FALSE(allowed.count({e.to, e.from}));
    CHECK(testing::ones(d, e.from) > testing::ones(d, e.to));
  }
  CHECK(is_acyclic(n, p.allowed_edges));
  for (std::size_t x = 0; x < n; ++x) {
    auto parents = p.possible_parents(x);
    std::vector<std::size_t> expected, more_frequent;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == x) continue;
      if (testing::ones(d, j) > testing::ones(d, x)) more_frequent.push_back(j);
    }
    for (auto j : more_frequent) {
      if (!d.is_degenerate(j) && !d.is_degenerate(x) && testing::suppes_holds(d, j, x)) {
        expected.push_back(j);
      }
    }
    CHECK(parents == expected);
    CHECK(parents.size() <= more_frequent.size());
  }
}

}  // namespace

TEST_SUITE("suppes") {

TEST_CASE("temporal priority uses strict marginal order") {
  CHECK(temporal_priority(toy()) == std::vector<Edge>{{0, 1}});
  auto tied = from_rows({{1, 0}, {0, 1}});
  CHECK(temporal_priority(tied).empty());
  CHECK(temporal_priority(from_rows({{1}, {0}})).empty());
}

TEST_CASE("probability raising on the toy data") {
  auto pr = probability_raising(toy());
  // 2/3 > 0 for (0,1); positive dependence is symmetric.
  CHECK(pr == std::vector<Edge>{{0, 1}, {1, 0}});
  auto c = pair_counts(toy(), 0, 1);
  CHECK(c.m == 4);
  CHECK(c.cause == 3);
  CHECK(c.effect == 2);
  CHECK(c.both == 2);
}

TEST_CASE("identical columns raise both ways but have no temporal order") {
  auto twins = from_rows({{1, 1}, {0, 0}, {1, 1}});
  CHECK(probability_raising(twins) == std::vector<Edge>{{0, 1}, {1, 0}});
  auto p = prima_facie(twins);
  CHECK(p.allowed_edges.empty());
}

TEST_CASE("prima facie on the toy data") {
  auto p = prima_facie(toy());
  CHECK(p.allowed_edges == std::vector<Edge>{{0, 1}});
  CHECK(p.node_count == 2);
  REQUIRE(p.diagnostics.size() == 2);
  const auto& d01 = p.diagnostics[0];
  CHECK(d01.cause == 0);
  CHECK(d01.effect == 1);
  CHECK(d01.marginal_delta == doctest::Approx(0.25));
  REQUIRE(d01.raising_delta);
  CHECK(*d01.raising_delta == doctest::Approx(2.0 / 3.0));
  CHECK(d01.temporal_priority);
  CHECK(d01.probability_raising);
  CHECK_FALSE(p.diagnostics[1].temporal_priority);
}

TEST_CASE("degenerate events are excluded and reported") {
  auto d = from_rows({{1, 1, 0}, {1, 0, 0}, {1, 1, 1}, {1, 0, 0}});
  auto p = prima_facie(d);
  CHECK(p.degenerate == std::vector<std::size_t>{0});
  for (const auto& e : p.allowed_edges) {
    CHECK(e.from != 0);
    CHECK(e.to != 0);
  }
  for (const auto& pr : probability_raising(d)) CHECK(pr.from != 0);
  bool seen = false;
  for (const auto& diag : p.diagnostics) {
    if (diag.cause == 0 || diag.effect == 0) {
      CHECK(diag.degenerate);
      CHECK_FALSE(diag.probability_raising);
      seen = true;
    }
  }
  CHECK(seen);
}

TEST_CASE("independent columns show no systematic raising") {
  std::size_t included = 0, pairs = 0;
  double max_delta = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto d = testing::random_dataset(10000, 2, 1000 + seed);
    auto p = prima_facie(d);
    for (const auto& diag : p.diagnostics) {
      ++pairs;
      if (diag.probability_raising) ++included;
      max_delta = std::max(max_delta, std::abs(diag.raising_delta.value_or(1.0)));
    }
  }
  // Both directions carry the same sign, so included pairs come in groups of
  // two; the rate should sit near one half (3 sd for 100 seeds is 0.15).
  const double rate = static_cast<double>(included) / static_cast<double>(pairs);
  CHECK(rate > 0.35);
  CHECK(rate < 0.65);
  CHECK(max_delta < 0.06);
}

TEST_CASE("deterministic chain with theta 1 gives identical columns and no edges") {
  auto model = chain_model(1.0, 0.0, 0.5);
  auto d = sample_dataset(model, 5000, 3);
  for (std::size_t r = 0; r < d.sample_count(); ++r) {
    auto row = d.row(r);
    CHECK(row[0] == row[1]);
    CHECK(row[1] == row[2]);
  }
  CHECK(prima_facie(d).allowed_edges.empty());
}

TEST_CASE("noiseless chain admits the spurious transitive edge") {
  // epsilon = 0: no effect without its cause; theta < 1 keeps the marginals
  // strictly decreasing along the chain.
  auto model = chain_model(0.8, 0.0, 0.5);
  auto d = sample_dataset(model, 5000, 4);
  auto p = prima_facie(d);
  CHECK(p.allows({0, 1}));
  CHECK(p.allows({1, 2}));
  CHECK(p.allows({0, 2}));
  CHECK(testing::suppes_holds(d, 0, 2));
  check_poset_invariants(d, p);
}

TEST_CASE("lifted xor formula is a prima facie cause of its effect") {
  auto model = xor_model(0.9, 0.01, 0.5);
  auto d = sample_dataset(model, 5000, 5);
  auto formulas = make_xor_formulas(model);
  REQUIRE(formulas.size() == 1);
  auto lifted = prima_facie_lifted(d, formulas);
  CHECK(lifted.lifted.event_count() == 4);
  CHECK(lifted.poset.node_count == 4);
  // Only formula -> unmentioned event candidates exist.
  CHECK(lifted.poset.diagnostics.size() == 1);
  CHECK(lifted.poset.allowed_edges == std::vector<Edge>{{3, 2}});
  CHECK(testing::suppes_holds(lifted.lifted, 3, 2));
}

TEST_CASE("formula equal to its target fails temporal priority") {
  auto d = from_rows({{1, 0, 1}, {0, 1, 1}, {0, 0, 0}, {1, 1, 0}}, {"A", "B", "E"});
  // E = A xor B on every row.
  std::vector<NamedFormula> fs{
      {"phi", CnfFormula({{{0, false}, {1, false}}, {{0, true}, {1, true}}})}};
  auto lifted = prima_facie_lifted(d, fs);
  CHECK(lifted.poset.allowed_edges.empty());
  REQUIRE(lifted.poset.diagnostics.size() == 1);
  CHECK_FALSE(lifted.poset.diagnostics[0].temporal_priority);
}

TEST_CASE("never-satisfied formula is degenerate") {
  auto d = from_rows({{1, 0, 1}, {0, 1, 1}, {0, 0, 0}, {1, 0, 0}}, {"A", "B", "E"});
  std::vector<NamedFormula> fs{{"phi", CnfFormula({{{0, false}}, {{1, false}}})}};
  auto lifted = prima_facie_lifted(d, fs);
  CHECK(lifted.poset.allowed_edges.empty());
  CHECK(std::find(lifted.poset.degenerate.begin(), lifted.poset.degenerate.end(), 3) !=
        lifted.poset.degenerate.end());
  REQUIRE(lifted.poset.diagnostics.size() == 1);
  CHECK(lifted.poset.diagnostics[0].degenerate);
}

TEST_CASE("poset invariants on random data") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t m = 5 + seed % 40;
    const std::size_t n = 2 + seed % 6;
    auto d = testing::random_dataset(m, n, 500 + seed, 0.15 + 0.01 * seed);
    auto p = prima_facie(d);
    CHECK(p.diagnostics.size() == n * (n - 1));
    check_poset_invariants(d, p);
  }
}

TEST_CASE("poset edges respect a decreasing-marginal topological order") {
  auto model = chain_model(0.8, 0.02, 0.7);
  auto d = sample_dataset(model, 300, 8);
  auto p = prima_facie(d);
  std::vector<std::size_t> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return d.count_ones(a) > d.count_ones(b);
  });
  std::vector<std::size_t> pos(3);
  for (std::size_t k = 0; k < 3; ++k) pos[order[k]] = k;
  for (const auto& e : p.allowed_edges) CHECK(pos[e.from] < pos[e.to]);
}

TEST_CASE("bootstrap without resampling reduces to the point estimate") {
  auto d = testing::random_dataset(60, 5, 99, 0.4);
  ConditionTestConfig boot;
  boot.mode = ConditionMode::bootstrap;
  boot.replicates = 1;
  boot.resample = false;
  boot.seed = 12;
  ConditionTestConfig point;
  point.seed = 12;
  auto a = prima_facie(d, boot);
  auto b = prima_facie(d, point);
  CHECK(a.allowed_edges == b.allowed_edges);
  REQUIRE(a.diagnostics.size() == b.diagnostics.size());
  for (std::size_t k = 0; k < a.diagnostics.size(); ++k) {
    CHECK(a.diagnostics[k].temporal_priority == b.diagnostics[k].temporal_priority);
    CHECK(a.diagnostics[k].probability_raising == b.diagnostics[k].probability_raising);
    CHECK(a.diagnostics[k].temporal_support == b.diagnostics[k].temporal_support);
  }
}

TEST_CASE("bootstrap test is stricter than the point estimate and seed-stable") {
  auto model = chain_model(0.8, 0.1, 0.7);
  auto d = sample_dataset(model, 120, 21);
  ConditionTestConfig cfg;
  cfg.mode = ConditionMode::bootstrap;
  cfg.replicates = 50;
  cfg.seed = 3;
  auto a = prima_facie(d, cfg);
  auto point = prima_facie(d);
  for (const auto& e : a.allowed_edges) CHECK(point.allows(e));
  for (const auto& diag : a.diagnostics) {
    CHECK(diag.temporal_support >= 0.0);
    CHECK(diag.temporal_support <= 1.0);
    if (diag.temporal_priority) CHECK(diag.temporal_support >= cfg.confidence_level);
  }
  cfg.parallelism = 3;
  auto b = prima_facie(d, cfg);
  CHECK(a.allowed_edges == b.allowed_edges);
  for (std::size_t k = 0; k < a.diagnostics.size(); ++k) {
    CHECK(a.diagnostics[k].raising_support == b.diagnostics[k].raising_support);
  }
}

TEST_CASE("condition config validation") {
  ConditionTestConfig cfg;
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.replicates = 1;
  cfg.confidence_level = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.confidence_level = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.confidence_level = 0.5;
  CHECK_NOTHROW(cfg.validate());
}

}  // TEST_SUITE
