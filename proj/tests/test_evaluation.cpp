#include <cmath>

#include "doctest.h"
#include "sbcn/error.hpp"
#include "sbcn/evaluation.hpp"
#include "sbcn/mpn.hpp"
#include "test_util.hpp"

using namespace sbcn;

namespace {

Dag dag_of(std::size_t n, std::vector<Edge> edges) { return Dag::from_edges(n, edges); }

MpnModel chain3(double theta, double epsilon, double source) {
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

InferenceConfig bic_config() {
  InferenceConfig cfg;
  cfg.search.score.regularizer = Regularizer::bic;
  return cfg;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("confusion examples") {
  const auto truth = dag_of(3, {{0, 1}, {1, 2}});
  CHECK(confusion(truth, truth) == Confusion{2, 0, 4, 0});

  CHECK(confusion(dag_of(2, {{0, 1}}), dag_of(2, {{1, 0}})) == Confusion{0, 1, 0, 1});

  const auto t4 = dag_of(4, {{0, 1}, {1, 2}});
  const auto i4 = dag_of(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(confusion(t4, i4) == Confusion{2, 1, 9, 0});

  CHECK_THROWS_AS(confusion(dag_of(3, {}), dag_of(4, {})), InvalidArgument);
}

TEST_CASE("edge-list confusion accepts cyclic sets and matches the Dag overload") {
  const auto truth = dag_of(3, {{0, 1}});
  std::vector<Edge> cyclic{{0, 1}, {1, 0}};
  CHECK(confusion(truth, cyclic) == Confusion{1, 1, 4, 0});

  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    Dag a(5), b(5);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = i + 1; j < 5; ++j) {
        if (gen() % 3 == 0) a.insert({i, j});
        if (gen() % 3 == 0) b.insert({i, j});
      }
    }
    const auto edges = b.edges();
    CHECK(confusion(a, b) == confusion(a, edges));
    CHECK(confusion(a, b).total() == 20);
  }
  std::vector<Edge> bad{{0, 7}};
  CHECK_THROWS_AS(confusion(truth, bad), IndexError);
}

TEST_CASE("metrics examples") {
  const auto m = metrics({2, 1, 10, 2});
  REQUIRE(m.accuracy);
  CHECK(*m.accuracy == doctest::Approx(0.8));
  CHECK(*m.sensitivity == doctest::Approx(0.5));
  CHECK(*m.specificity == doctest::Approx(10.0 / 11.0));

  const auto perfect = metrics({2, 0, 4, 0});
  CHECK(*perfect.accuracy == 1.0);
  CHECK(*perfect.sensitivity == 1.0);
  CHECK(*perfect.specificity == 1.0);

  const auto empty_truth = metrics(confusion(dag_of(3, {}), dag_of(3, {{0, 2}})));
  CHECK_FALSE(empty_truth.sensitivity.has_value());
  REQUIRE(empty_truth.specificity.has_value());
  CHECK(*empty_truth.specificity == doctest::Approx(5.0 / 6.0));

  const auto nothing = metrics({});
  CHECK_FALSE(nothing.accuracy.has_value());
}

TEST_CASE("metrics lie in [0, 1] and accuracy mixes sensitivity and specificity") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 500; ++trial) {
    Confusion c{gen() % 7, gen() % 7, gen() % 7, gen() % 7};
    const auto m = metrics(c);
    for (const auto& v : {m.accuracy, m.sensitivity, m.specificity}) {
      if (v) CHECK((*v >= 0.0 && *v <= 1.0));
    }
    if (m.sensitivity && m.specificity) {
      const double pos = static_cast<double>(c.tp + c.fn);
      const double neg = static_cast<double>(c.fp + c.tn);
      CHECK(*m.accuracy == doctest::Approx((pos * *m.sensitivity + neg * *m.specificity) / (pos + neg)));
    }
  }
}

TEST_CASE("edge confidence tallies") {
  EdgeConfidence conf(3);
  CHECK(conf.confidence({0, 1}) == 0.0);
  conf.add_replicate(dag_of(3, {{0, 1}}));
  conf.add_replicate(dag_of(3, {{0, 1}, {1, 2}}));
  CHECK(conf.replicates() == 2);
  CHECK(conf.tally({0, 1}) == 2);
  CHECK(conf.confidence({1, 2}) == 0.5);
  const double before = conf.confidence({1, 2});
  conf.add_replicate(dag_of(3, {{1, 2}}));
  CHECK(conf.confidence({1, 2}) >= before);
  CHECK(conf.confidence({0, 1}) <= 1.0);
  CHECK_THROWS_AS(conf.add_replicate(dag_of(4, {})), InvalidArgument);
  CHECK_THROWS_AS(conf.tally({3, 0}), IndexError);
}

TEST_CASE("single-replicate bootstrap tallies are 0 or 1") {
  const auto data = testing::random_dataset(60, 4, 5, 0.4);
  const auto conf = bootstrap_confidence(data, bic_config(), 1, 9);
  CHECK(conf.replicates() == 1);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      CHECK(conf.tally({i, j}) <= 1);
    }
  }
  CHECK_THROWS_AS(bootstrap_confidence(data, bic_config(), 0, 9), InvalidArgument);
}

TEST_CASE("bootstrap is deterministic per seed and ignores parallelism") {
  const auto model = chain3(0.8, 0.1, 0.6);
  const auto data = sample_dataset(model, 150, 21);
  auto cfg = bic_config();
  const auto a = bootstrap_confidence(data, cfg, 30, 77, 1);
  const auto b = bootstrap_confidence(data, cfg, 30, 77, 4);
  const auto c = bootstrap_confidence(data, cfg, 30, 78, 1);
  bool differs = false;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(a.tally({i, j}) == b.tally({i, j}));
      differs = differs || a.tally({i, j}) != c.tally({i, j});
    }
  }
  // Not guaranteed in general, but with 30 noisy replicates this seed pair differs.
  CHECK(differs);

  cfg.conditions.mode = ConditionMode::bootstrap;
  cfg.conditions.replicates = 20;
  const auto d = bootstrap_confidence(data, cfg, 10, 5, 1);
  const auto e = bootstrap_confidence(data, cfg, 10, 5, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) CHECK(d.tally({i, j}) == e.tally({i, j}));
    }
  }
}

TEST_CASE("chain edges are reselected under resampling") {
  const auto data = sample_dataset(chain3(0.8, 0.0, 0.5), 1000, 4);
  const auto conf = bootstrap_confidence(data, bic_config(), 100, 12);
  MESSAGE("chain confidences " << conf.confidence({0, 1}) << ", " << conf.confidence({1, 2}));
  CHECK(conf.confidence({0, 1}) >= 0.95);
  CHECK(conf.confidence({1, 2}) >= 0.95);
}

TEST_CASE("fully deterministic chains give no confidence at all") {
  // theta = 1, epsilon = 0: every column copies the source, so temporal
  // priority never holds and no edge can be inferred.
  const auto data = sample_dataset(chain3(1.0, 0.0, 0.5), 1000, 4);
  const auto conf = bootstrap_confidence(data, bic_config(), 20, 12);
  CHECK(conf.confidence({0, 1}) == 0.0);
  CHECK(conf.confidence({1, 2}) == 0.0);
}

TEST_CASE("independent noise gets low confidence") {
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = testing::random_dataset(200, 5, 100 + seed, 0.5);
    const auto conf = bootstrap_confidence(data, bic_config(), 40, seed);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        if (i == j) continue;
        sum += conf.confidence({i, j});
        ++pairs;
      }
    }
  }
  const double mean = sum / static_cast<double>(pairs);
  MESSAGE("mean confidence on noise " << mean);
  CHECK(mean <= 0.2);
}

}
