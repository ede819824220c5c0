#include <set>

#include "doctest.h"
#include "sbcn/error.hpp"
#include "sbcn/evaluation.hpp"
#include "sbcn/mpn.hpp"
#include "sbcn/random.hpp"
#include "sbcn/search.hpp"
#include "test_util.hpp"

using namespace sbcn;
using testing::from_rows;
using testing::toy;

namespace {

SearchConfig with(Regularizer r, SearchMode mode = SearchMode::hill_climb) {
  SearchConfig cfg;
  cfg.score.regularizer = r;
  cfg.mode = mode;
  return cfg;
}

MpnModel chain(double theta, double epsilon) {
  MpnModel m;
  std::vector<Edge> edges{{0, 1}, {1, 2}};
  m.dag = Dag::from_edges(3, edges);
  m.logic = {std::nullopt, Logic::conjunction, Logic::conjunction};
  m.theta = theta;
  m.epsilon = epsilon;
  m.source_marginal = theta;
  m.event_names = {"u", "v", "w"};
  return m;
}

// Random model on 4 nodes with random parent sets and noisy data, so that
// search instances have a nontrivial landscape.
Dataset random_instance(std::uint64_t seed, std::size_t m) {
  Rng rng(seed);
  MpnModel model;
  model.dag = Dag(4);
  model.logic.assign(4, std::nullopt);
  for (std::size_t v = 1; v < 4; ++v) {
    for (std::size_t u = 0; u < v; ++u) {
      if (rng.bernoulli(0.5)) model.dag.insert({u, v});
    }
    if (!model.dag.parents(v).empty()) {
      model.logic[v] = rng.bernoulli(0.5) ? Logic::conjunction : Logic::disjunction;
    }
  }
  model.theta = 0.8;
  model.epsilon = 0.1;
  model.source_marginal = 0.7;
  model.event_names = {"a", "b", "c", "d"};
  return apply_noise(sample_dataset(model, m, seed + 1), {0.1, NoiseMode::random_entry, seed + 2});
}

}  // namespace

TEST_SUITE("structure_search") {

TEST_CASE("empty candidate set gives the empty network") {
  auto d = toy();
  PrimaFaciePoset none;
  none.node_count = 2;
  auto r = hill_climb(d, none, with(Regularizer::bic));
  CHECK(r.network.network.dag.edge_count() == 0);
  CHECK(r.trace.empty());
  CHECK(r.network.score == score(d, Dag(2), with(Regularizer::bic).score).score);
  auto x = exhaustive_search(d, none, with(Regularizer::bic));
  CHECK(x.network.dag.edge_count() == 0);
}

TEST_CASE("toy data with likelihood only takes the admitted edge") {
  auto d = toy();
  auto poset = prima_facie(d);
  REQUIRE(poset.allowed_edges == std::vector<Edge>{{0, 1}});
  auto r = hill_climb(d, poset, with(Regularizer::none));
  CHECK(r.network.network.dag.edges() == std::vector<Edge>{{0, 1}});
  // By hand: the edge lifts LL from 4 ln .5 to 2 ln(2/3) + ln(1/3) for v1.
  const double without = 4 * std::log(0.5);
  const double with_edge = 2 * std::log(2.0 / 3.0) + std::log(1.0 / 3.0);
  CHECK(with_edge > without);
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].score_after - r.trace[0].score_before ==
        doctest::Approx(with_edge - without));
}

TEST_CASE("chain data: BIC drops the transitive edge") {
  auto d = sample_dataset(chain(0.9, 0.01), 2000, 17);
  auto poset = prima_facie(d);
  CHECK(poset.allows({0, 2}));
  auto oracle = exhaustive_search(d, poset, with(Regularizer::bic, SearchMode::exhaustive));
  std::vector<Edge> truth{{0, 1}, {1, 2}};
  CHECK(oracle.network.dag.edges() == truth);
  auto r = hill_climb(d, poset, with(Regularizer::bic));
  CHECK(r.network.network.dag.edges() == truth);
  CHECK(r.network.score == doctest::Approx(oracle.score));
}

TEST_CASE("admitted twin edge beats the empty graph under BIC at m = 4") {
  auto d = from_rows({{1, 1}, {0, 0}, {1, 1}, {0, 0}});
  std::vector<Edge> cand{{0, 1}};
  auto best = exhaustive_search(d, cand, with(Regularizer::bic, SearchMode::exhaustive));
  const double gain = 4 * std::log(2.0);
  const double cost = std::log(4.0) / 2.0;
  CHECK(gain > cost);
  CHECK(best.network.dag.edges() == cand);
  CHECK(best.score - score(d, Dag(2), with(Regularizer::bic).score).score ==
        doctest::Approx(gain - cost));
}

TEST_CASE("exhaustive ties go to fewer edges") {
  // Exactly independent columns: every edge has zero gain.
  auto d = from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  std::vector<Edge> cand{{0, 1}, {1, 0}};
  auto best = exhaustive_search(d, cand, with(Regularizer::none, SearchMode::exhaustive));
  CHECK(best.network.dag.edge_count() == 0);
  auto hc = hill_climb(d, cand, with(Regularizer::none));
  CHECK(hc.network.network.dag.edge_count() == 0);
}

TEST_CASE("exhaustive ties among equal sizes go to the smaller edge list") {
  // Twins: 0->1 and 1->0 score identically; cyclic pair handled.
  auto d = from_rows({{1, 1}, {0, 0}, {1, 1}, {0, 0}, {1, 1}});
  std::vector<Edge> cand{{1, 0}, {0, 1}};
  auto best = exhaustive_search(d, cand, with(Regularizer::aic, SearchMode::exhaustive));
  CHECK(best.network.dag.edges() == std::vector<Edge>{{0, 1}});
  auto hc = hill_climb(d, cand, with(Regularizer::aic));
  CHECK(hc.network.network.dag.edges() == std::vector<Edge>{{0, 1}});
}

TEST_CASE("exhaustive search refuses more than the edge cap") {
  auto d = testing::random_dataset(30, 6, 3);
  std::vector<Edge> cand;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      if (i < j) cand.push_back({i, j});
  CHECK(cand.size() == 15);
  CHECK_NOTHROW(exhaustive_search(d, cand, with(Regularizer::bic, SearchMode::exhaustive)));
  auto d7 = testing::random_dataset(30, 7, 3);
  std::vector<Edge> big;
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      if (i < j) big.push_back({i, j});
  CHECK(big.size() == 21);
  CHECK_THROWS_AS(exhaustive_search(d7, big, with(Regularizer::bic, SearchMode::exhaustive)),
                  LimitExceeded);
}

TEST_CASE("trace is strictly improving and every graph is acyclic") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto d = random_instance(seed, 60);
    std::vector<Edge> all;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j) all.push_back({i, j});
    for (auto reg : {Regularizer::none, Regularizer::aic, Regularizer::bic}) {
      auto r = hill_climb(d, all, with(reg));
      Dag g(4);
      std::set<double> seen;
      std::size_t deletions = 0;
      for (std::size_t k = 0; k < r.trace.size(); ++k) {
        const auto& s = r.trace[k];
        CHECK(s.score_after > s.score_before);
        if (k > 0) CHECK(s.score_before == r.trace[k - 1].score_after);
        CHECK(seen.insert(s.score_after).second);
        if (s.move.kind == Move::Kind::add) {
          CHECK_FALSE(g.creates_cycle(s.move.edge));
          g.insert(s.move.edge);
        } else {
          CHECK(g.has_edge(s.move.edge));
          g.erase(s.move.edge);
          ++deletions;
        }
      }
      CHECK(g == r.network.network.dag);
      CHECK(r.trace.size() <= all.size() * (1 + deletions));
      if (!r.trace.empty()) {
        CHECK(r.trace.back().score_after == doctest::Approx(r.network.score).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("hill climbing is deterministic") {
  auto d = random_instance(5, 80);
  auto poset = prima_facie(d);
  auto a = hill_climb(d, poset, with(Regularizer::aic));
  auto b = hill_climb(d, poset, with(Regularizer::aic));
  CHECK(a.network.network.dag == b.network.network.dag);
  CHECK(a.trace.size() == b.trace.size());
}

TEST_CASE("parent caps are honoured by both searches") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto d = random_instance(100 + seed, 80);
    std::vector<Edge> cand{{0, 3}, {1, 3}, {2, 3}, {0, 2}, {1, 2}, {0, 1}};
    auto cfg = with(Regularizer::none);
    cfg.max_parents = 1;
    auto r = hill_climb(d, cand, cfg);
    cfg.mode = SearchMode::exhaustive;
    auto x = exhaustive_search(d, cand, cfg);
    for (std::size_t v = 0; v < 4; ++v) {
      CHECK(r.network.network.dag.parents(v).size() <= 1);
      CHECK(x.network.dag.parents(v).size() <= 1);
    }
    CHECK(x.score >= r.network.score - 1e-9);
  }
  SearchConfig bad;
  bad.max_parents = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("exhaustive dominates hill climbing on random 4-node instances") {
  std::size_t equal = 0;
  const std::size_t trials = 80;
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    auto d = random_instance(1000 + seed, 100);
    auto poset = prima_facie(d);
    auto hc = hill_climb(d, poset, with(Regularizer::bic));
    auto ex = exhaustive_search(d, poset, with(Regularizer::bic, SearchMode::exhaustive));
    CHECK(ex.score >= hc.network.score - 1e-9);
    if (std::abs(ex.score - hc.network.score) <= 1e-9) ++equal;
  }
  MESSAGE("hill climb matched the oracle in " << equal << " of " << trials << " trials");
  CHECK(equal >= trials * 3 / 4);
}

TEST_CASE("poset size mismatch is rejected") {
  auto d = toy();
  PrimaFaciePoset p;
  p.node_count = 3;
  CHECK_THROWS_AS(hill_climb(d, p, with(Regularizer::bic)), InvalidArgument);
  CHECK_THROWS_AS(exhaustive_search(d, p, with(Regularizer::bic)), InvalidArgument);
  std::vector<Edge> far{{0, 4}};
  CHECK_THROWS_AS(hill_climb(d, far, with(Regularizer::bic)), IndexError);
}

TEST_CASE("inference output stays inside the poset") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto d = random_instance(2000 + seed, 50);
    for (auto reg : {Regularizer::none, Regularizer::aic, Regularizer::bic}) {
      InferenceConfig cfg;
      cfg.search.score.regularizer = reg;
      auto inf = infer_sbcn(d, cfg);
      for (const auto& e : inf.network.network.dag.edges()) {
        CHECK(inf.poset.allows(e));
        CHECK(testing::suppes_holds(d, e.from, e.to));
      }
    }
  }
}

TEST_CASE("prima facie only returns every admitted edge") {
  auto d = random_instance(7, 100);
  InferenceConfig cfg;
  cfg.prima_facie_only = true;
  auto inf = infer_sbcn(d, cfg);
  CHECK(inf.network.network.dag.edges() == inf.poset.allowed_edges);
  CHECK(inf.trace.empty());
}

TEST_CASE("unconstrained baseline may leave the poset but stays acyclic") {
  bool left = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto d = random_instance(3000 + seed, 100);
    InferenceConfig cfg;
    cfg.unconstrained = true;
    cfg.search.score.regularizer = Regularizer::aic;
    auto inf = infer_sbcn(d, cfg);
    auto edges = inf.network.network.dag.edges();
    CHECK(is_acyclic(4, edges));
    for (const auto& e : edges) left = left || !inf.poset.allows(e);
  }
  CHECK(left);
}

TEST_CASE("trees are recovered at m = 200") {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GeneratorParams params;
    params.theta = 0.9;
    params.epsilon = 0.01;
    auto model = random_structure(TopologyClass::make(TopologyKind::tree, 10), seed, params);
    auto d = sample_dataset(model, 200, seed + 100);
    InferenceConfig cfg;
    auto inf = infer_sbcn(d, cfg);
    total += *metrics(confusion(model.dag, inf.network.network.dag)).accuracy;
  }
  MESSAGE("mean tree accuracy " << total / 20);
  CHECK(total / 20 >= 0.9);
}

TEST_CASE("pure noise yields few false positives under BIC") {
  double fp_rate = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto d = testing::random_dataset(200, 10, 4000 + seed);
    InferenceConfig cfg;
    auto inf = infer_sbcn(d, cfg);
    fp_rate += static_cast<double>(inf.network.network.dag.edge_count()) / 90.0;
  }
  MESSAGE("mean false-positive rate " << fp_rate / 20);
  CHECK(fp_rate / 20 < 0.05);
}

}  // TEST_SUITE
