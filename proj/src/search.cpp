#include "sbcn/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include "sbcn/error.hpp"

namespace sbcn {

void SearchConfig::validate() const {
  score.validate();
  if (max_parents && *max_parents < 1) throw InvalidArgument("max_parents must be at least 1");
}

namespace {

void check_candidates(std::size_t n, std::span<const Edge> candidates) {
  for (const auto& e : candidates) {
    if (e.from >= n || e.to >= n) throw IndexError("candidate edge " + to_string(e) + " out of range");
    if (e.from == e.to) throw InvalidArgument("candidate self-loop " + to_string(e));
  }
}

std::vector<Edge> sorted_unique(std::span<const Edge> edges) {
  std::vector<Edge> out(edges.begin(), edges.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> with_parent(const std::vector<std::size_t>& parents, std::size_t p) {
  std::vector<std::size_t> out;
  out.reserve(parents.size() + 1);
  auto it = std::lower_bound(parents.begin(), parents.end(), p);
  out.insert(out.end(), parents.begin(), it);
  out.push_back(p);
  out.insert(out.end(), it, parents.end());
  return out;
}

std::vector<std::size_t> without_parent(const std::vector<std::size_t>& parents, std::size_t p) {
  std::vector<std::size_t> out;
  out.reserve(parents.size());
  for (auto q : parents) {
    if (q != p) out.push_back(q);
  }
  return out;
}

double total_of(const std::vector<double>& family) {
  double s = 0.0;
  for (double f : family) s += f;
  return s;
}

}  // namespace

SearchResult hill_climb(const Dataset& data, std::span<const Edge> candidate_span,
                        const SearchConfig& cfg) {
  cfg.validate();
  const auto n = data.event_count();
  check_candidates(n, candidate_span);
  const auto candidates = sorted_unique(candidate_span);
  // Subsets of an acyclic candidate graph are acyclic; only check per move
  // when the candidate graph itself has cycles.
  const bool check_cycles = !is_acyclic(n, candidates);

  Dag dag(n);
  std::vector<double> family(n);
  for (std::size_t v = 0; v < n; ++v) family[v] = family_score(data, v, {}, cfg.score);

  // Cached gain of toggling each candidate; recomputed when its child changes.
  std::vector<double> gain(candidates.size(), 0.0);
  std::vector<char> stale(candidates.size(), 1);
  std::vector<std::vector<std::size_t>> by_child(n);
  for (std::size_t k = 0; k < candidates.size(); ++k) by_child[candidates[k].to].push_back(k);

  SearchResult result;
  double current = total_of(family);
  const std::size_t iteration_cap = 4 * candidates.size() * (candidates.size() + 1) + 1;
  for (std::size_t iteration = 0; iteration < iteration_cap; ++iteration) {
    std::optional<std::size_t> best;
    double best_gain = 0.0;
    bool best_is_add = false;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const auto e = candidates[k];
      const bool present = dag.has_edge(e);
      const auto& ps = dag.parents(e.to);
      if (!present) {
        if (cfg.max_parents && ps.size() >= *cfg.max_parents) continue;
        if (check_cycles && dag.creates_cycle(e)) continue;
      }
      if (stale[k]) {
        const auto next = present ? without_parent(ps, e.from) : with_parent(ps, e.from);
        gain[k] = family_score(data, e.to, next, cfg.score) - family[e.to];
        stale[k] = 0;
      }
      const double g = gain[k];
      if (!(g > kMinImprovement)) continue;
      const bool is_add = !present;
      // Strictly larger gain wins; equal gain prefers add, then the earlier
      // edge (candidates are visited in lexicographic order).
      if (!best || g > best_gain || (g == best_gain && is_add && !best_is_add)) {
        best = k;
        best_gain = g;
        best_is_add = is_add;
      }
    }
    if (!best) break;

    const auto e = candidates[*best];
    const auto& ps = dag.parents(e.to);
    TraceStep step;
    step.move = {best_is_add ? Move::Kind::add : Move::Kind::remove, e};
    step.score_before = current;
    if (best_is_add) {
      family[e.to] = family_score(data, e.to, with_parent(ps, e.from), cfg.score);
      dag.insert(e);
    } else {
      family[e.to] = family_score(data, e.to, without_parent(ps, e.from), cfg.score);
      dag.erase(e);
    }
    current = total_of(family);
    step.score_after = current;
    result.trace.push_back(step);
    for (auto k : by_child[e.to]) stale[k] = 1;
  }

  result.network = score(data, dag, cfg.score);
  return result;
}

SearchResult hill_climb(const Dataset& data, const PrimaFaciePoset& poset,
                        const SearchConfig& cfg) {
  if (poset.node_count != data.event_count()) {
    throw InvalidArgument("poset covers " + std::to_string(poset.node_count) +
                          " nodes but the dataset has " + std::to_string(data.event_count()));
  }
  return hill_climb(data, poset.allowed_edges, cfg);
}

ScoredNetwork exhaustive_search(const Dataset& data, std::span<const Edge> candidate_span,
                                const SearchConfig& cfg) {
  cfg.validate();
  const auto n = data.event_count();
  check_candidates(n, candidate_span);
  const auto candidates = sorted_unique(candidate_span);
  if (candidates.size() > kExhaustiveEdgeCap) {
    throw LimitExceeded("exhaustive search is limited to " + std::to_string(kExhaustiveEdgeCap) +
                        " candidate edges, got " + std::to_string(candidates.size()));
  }
  const bool check_cycles = !is_acyclic(n, candidates);
  const std::size_t E = candidates.size();

  // Per child: which candidate bits feed it, and a lazily filled table of
  // family scores indexed by the sub-mask of those bits.
  struct ChildTable {
    std::vector<std::size_t> bits;
    std::vector<double> score;
    std::vector<char> known;
  };
  std::vector<ChildTable> tables(n);
  for (std::size_t k = 0; k < E; ++k) tables[candidates[k].to].bits.push_back(k);
  for (auto& t : tables) {
    t.score.assign(std::size_t{1} << t.bits.size(), 0.0);
    t.known.assign(t.score.size(), 0);
  }

  std::optional<std::uint64_t> best_mask;
  double best_score = -std::numeric_limits<double>::infinity();
  std::size_t best_edges = 0;

  auto edge_list_less = [&](std::uint64_t a, std::uint64_t b) {
    // Lexicographic comparison of the sorted edge lists selected by masks.
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (true) {
      while (ia < E && !((a >> ia) & 1)) ++ia;
      while (ib < E && !((b >> ib) & 1)) ++ib;
      if (ia == E || ib == E) return ia == E && ib != E;
      if (ia != ib) return ia < ib;
      ++ia;
      ++ib;
    }
  };

  std::vector<Edge> chosen;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << E); ++mask) {
    bool feasible = true;
    double total = 0.0;
    for (std::size_t v = 0; v < n && feasible; ++v) {
      auto& t = tables[v];
      std::size_t sub = 0;
      std::size_t count = 0;
      for (std::size_t b = 0; b < t.bits.size(); ++b) {
        if ((mask >> t.bits[b]) & 1) {
          sub |= std::size_t{1} << b;
          ++count;
        }
      }
      if (cfg.max_parents && count > *cfg.max_parents) {
        feasible = false;
        break;
      }
      if (!t.known[sub]) {
        std::vector<std::size_t> parents;
        for (std::size_t b = 0; b < t.bits.size(); ++b) {
          if ((sub >> b) & 1) parents.push_back(candidates[t.bits[b]].from);
        }
        std::sort(parents.begin(), parents.end());
        t.score[sub] = family_score(data, v, parents, cfg.score);
        t.known[sub] = 1;
      }
      total += t.score[sub];
    }
    if (!feasible) continue;
    if (check_cycles) {
      chosen.clear();
      for (std::size_t k = 0; k < E; ++k) {
        if ((mask >> k) & 1) chosen.push_back(candidates[k]);
      }
      if (!is_acyclic(n, chosen)) continue;
    }
    const auto edges = static_cast<std::size_t>(std::popcount(mask));
    bool better = false;
    if (!best_mask || total > best_score + kMinImprovement) {
      better = true;
    } else if (std::abs(total - best_score) <= kMinImprovement) {
      better = edges < best_edges || (edges == best_edges && edge_list_less(mask, *best_mask));
    }
    if (better) {
      best_mask = mask;
      best_score = total;
      best_edges = edges;
    }
  }

  std::vector<Edge> edges;
  for (std::size_t k = 0; k < E; ++k) {
    if ((*best_mask >> k) & 1) edges.push_back(candidates[k]);
  }
  return score(data, Dag::from_edges(n, edges), cfg.score);
}

ScoredNetwork exhaustive_search(const Dataset& data, const PrimaFaciePoset& poset,
                                const SearchConfig& cfg) {
  if (poset.node_count != data.event_count()) {
    throw InvalidArgument("poset and dataset disagree on the number of events");
  }
  return exhaustive_search(data, poset.allowed_edges, cfg);
}

Inference infer_with_poset(const Dataset& data, PrimaFaciePoset poset,
                           const InferenceConfig& cfg) {
  Inference out;
  out.poset = std::move(poset);
  std::vector<Edge> candidates;
  if (cfg.unconstrained) {
    const auto n = data.event_count();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) candidates.push_back({i, j});
      }
    }
  } else {
    candidates = out.poset.allowed_edges;
  }

  if (cfg.prima_facie_only) {
    if (cfg.unconstrained) throw InvalidArgument("prima-facie-only output has no unconstrained form");
    out.network = score(data, Dag::from_edges(data.event_count(), candidates), cfg.search.score);
    return out;
  }
  if (cfg.search.mode == SearchMode::exhaustive) {
    out.network = exhaustive_search(data, candidates, cfg.search);
  } else {
    auto r = hill_climb(data, candidates, cfg.search);
    out.network = std::move(r.network);
    out.trace = std::move(r.trace);
  }
  return out;
}

Inference infer_sbcn(const Dataset& data, const InferenceConfig& cfg) {
  return infer_with_poset(data, prima_facie(data, cfg.conditions), cfg);
}

}  // namespace sbcn
