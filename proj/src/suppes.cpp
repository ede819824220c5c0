#include "sbcn/suppes.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "sbcn/error.hpp"
#include "sbcn/random.hpp"

namespace sbcn {

void ConditionTestConfig::validate() const {
  if (replicates < 1) throw InvalidArgument("condition test needs at least one replicate");
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw InvalidArgument("confidence level must lie in (0, 1)");
  }
}

bool PrimaFaciePoset::allows(Edge e) const {
  return std::binary_search(allowed_edges.begin(), allowed_edges.end(), e);
}

std::vector<std::size_t> PrimaFaciePoset::possible_parents(std::size_t v) const {
  std::vector<std::size_t> out;
  for (const auto& e : allowed_edges) {
    if (e.to == v) out.push_back(e.from);
  }
  return out;
}

PairCounts pair_counts(const Dataset& data, std::size_t cause, std::size_t effect) {
  return {data.sample_count(), data.count_ones(cause), data.count_ones(effect),
          data.count_both(cause, effect)};
}

std::vector<Edge> temporal_priority(const Dataset& data) {
  const auto n = data.event_count();
  std::vector<std::size_t> ones(n);
  for (std::size_t v = 0; v < n; ++v) ones[v] = data.count_ones(v);
  std::vector<Edge> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && ones[i] > ones[j]) out.push_back({i, j});
    }
  }
  return out;
}

std::vector<Edge> probability_raising(const Dataset& data) {
  const auto n = data.event_count();
  std::vector<Edge> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.is_degenerate(i)) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || data.is_degenerate(j)) continue;
      if (pair_counts(data, i, j).probability_raising()) out.push_back({i, j});
    }
  }
  return out;
}

namespace {

// Pairwise counts under row multiplicities (bootstrap weights).
struct CountTable {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::size_t> ones;
  std::vector<std::size_t> both;  // n x n, pairwise co-occurrence

  PairCounts pair(std::size_t i, std::size_t j) const {
    return {m, ones[i], ones[j], both[i * n + j]};
  }
};

CountTable count_weighted(const Dataset& data, std::span<const std::size_t> weight,
                          std::span<const std::size_t> columns) {
  CountTable t;
  t.n = columns.size();
  t.ones.assign(t.n, 0);
  t.both.assign(t.n * t.n, 0);
  for (std::size_t r = 0; r < data.sample_count(); ++r) t.m += weight[r];
  for (std::size_t a = 0; a < t.n; ++a) {
    auto ca = data.column(columns[a]);
    for (std::size_t r = 0; r < ca.size(); ++r) t.ones[a] += ca[r] * weight[r];
    for (std::size_t b = a + 1; b < t.n; ++b) {
      auto cb = data.column(columns[b]);
      std::size_t s = 0;
      for (std::size_t r = 0; r < ca.size(); ++r) s += (ca[r] & cb[r]) * weight[r];
      t.both[a * t.n + b] = s;
      t.both[b * t.n + a] = s;
    }
  }
  return t;
}

// Candidate (cause, effect) pairs in lifted column space.
PrimaFaciePoset test_pairs(const Dataset& data, const std::vector<Edge>& candidates,
                           const ConditionTestConfig& cfg) {
  cfg.validate();
  const auto n = data.event_count();
  const auto m = data.sample_count();

  PrimaFaciePoset poset;
  poset.node_count = n;
  poset.degenerate = data.degenerate_events();
  std::vector<char> degenerate(n, 0);
  for (auto v : poset.degenerate) degenerate[v] = 1;

  std::vector<std::size_t> all_columns(n);
  for (std::size_t v = 0; v < n; ++v) all_columns[v] = v;
  const std::vector<std::size_t> unit_weight(m, 1);
  const auto point = count_weighted(data, unit_weight, all_columns);

  std::vector<std::size_t> tp_hits(candidates.size(), 0);
  std::vector<std::size_t> pr_hits(candidates.size(), 0);
  if (cfg.mode == ConditionMode::bootstrap) {
    std::vector<std::vector<std::size_t>> tp_by_rep(cfg.replicates);
    std::vector<std::vector<std::size_t>> pr_by_rep(cfg.replicates);
    auto run_replicate = [&](std::size_t rep) {
      std::vector<std::size_t> weight(m, 0);
      if (cfg.resample) {
        Rng rng(derive_seed(cfg.seed, {0x5u, rep}));
        for (std::size_t k = 0; k < m; ++k) ++weight[rng.below(m)];
      } else {
        std::fill(weight.begin(), weight.end(), 1);
      }
      const auto table = count_weighted(data, weight, all_columns);
      auto& tp = tp_by_rep[rep];
      auto& pr = pr_by_rep[rep];
      tp.resize(candidates.size());
      pr.resize(candidates.size());
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto c = table.pair(candidates[k].from, candidates[k].to);
        tp[k] = c.temporal_priority();
        pr[k] = c.probability_raising();
      }
    };
    const auto workers = std::max<std::size_t>(1, std::min(cfg.parallelism, cfg.replicates));
    if (workers == 1) {
      for (std::size_t rep = 0; rep < cfg.replicates; ++rep) run_replicate(rep);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (auto rep = next++; rep < cfg.replicates; rep = next++) run_replicate(rep);
        });
      }
      for (auto& t : pool) t.join();
    }
    for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        tp_hits[k] += tp_by_rep[rep][k];
        pr_hits[k] += pr_by_rep[rep][k];
      }
    }
  }

  const double reps = static_cast<double>(cfg.replicates);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto [i, j] = candidates[k];
    const auto c = point.pair(i, j);
    PairDiagnostic d;
    d.cause = i;
    d.effect = j;
    const double dm = static_cast<double>(m);
    d.marginal_delta = (static_cast<double>(c.cause) - static_cast<double>(c.effect)) / dm;
    if (c.cause > 0 && c.cause < m) {
      const double given = static_cast<double>(c.both) / static_cast<double>(c.cause);
      const double given_not = static_cast<double>(c.effect - c.both) /
                               static_cast<double>(m - c.cause);
      d.raising_delta = given - given_not;
    }
    d.degenerate = degenerate[i] || degenerate[j];
    const bool tp_point = c.temporal_priority();
    const bool pr_point = c.probability_raising();
    if (cfg.mode == ConditionMode::bootstrap) {
      d.temporal_support = static_cast<double>(tp_hits[k]) / reps;
      d.raising_support = static_cast<double>(pr_hits[k]) / reps;
      // The inequality must also hold on the estimation data itself.
      d.temporal_priority = tp_point && d.temporal_support >= cfg.confidence_level;
      d.probability_raising = pr_point && d.raising_support >= cfg.confidence_level;
    } else {
      d.temporal_support = tp_point ? 1.0 : 0.0;
      d.raising_support = pr_point ? 1.0 : 0.0;
      d.temporal_priority = tp_point;
      d.probability_raising = pr_point;
    }
    if (d.degenerate) d.probability_raising = false;
    if (d.temporal_priority && d.probability_raising) poset.allowed_edges.push_back({i, j});
    poset.diagnostics.push_back(d);
  }
  std::sort(poset.allowed_edges.begin(), poset.allowed_edges.end());
  return poset;
}

}  // namespace

PrimaFaciePoset prima_facie(const Dataset& data, const ConditionTestConfig& cfg) {
  const auto n = data.event_count();
  std::vector<Edge> candidates;
  candidates.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) candidates.push_back({i, j});
    }
  }
  return test_pairs(data, candidates, cfg);
}

LiftedPoset prima_facie_lifted(const Dataset& data, std::span<const NamedFormula> formulas,
                               const ConditionTestConfig& cfg) {
  auto lifted = lift_dataset(data, formulas);
  const auto n = data.event_count();
  std::vector<Edge> candidates;
  for (std::size_t k = 0; k < formulas.size(); ++k) {
    const auto mentioned = formulas[k].formula.events();
    for (std::size_t e = 0; e < n; ++e) {
      if (std::binary_search(mentioned.begin(), mentioned.end(), e)) continue;
      candidates.push_back({n + k, e});
    }
  }
  auto poset = test_pairs(lifted, candidates, cfg);
  return {std::move(lifted), std::move(poset)};
}

}  // namespace sbcn
