#include "sbcn/mpn.hpp"

#include <algorithm>
#include <numeric>

#include "sbcn/error.hpp"
#include "sbcn/random.hpp"

namespace sbcn {

std::string_view to_string(Logic logic) {
  switch (logic) {
    case Logic::conjunction: return "AND";
    case Logic::disjunction: return "OR";
    case Logic::exclusive: return "XOR";
  }
  return "AND";
}

Logic parse_logic(std::string_view name) {
  if (name == "AND") return Logic::conjunction;
  if (name == "OR") return Logic::disjunction;
  if (name == "XOR") return Logic::exclusive;
  throw InvalidArgument("unknown logic '" + std::string(name) + "'");
}

std::vector<std::string> MpnModel::validate(bool allow_weak_gap) const {
  std::vector<std::string> warnings;
  if (!(epsilon >= 0.0 && epsilon < theta && theta <= 1.0)) {
    throw InvalidArgument("need 0 <= epsilon < theta <= 1");
  }
  if (!(source_marginal >= 0.0 && source_marginal <= 1.0)) {
    throw InvalidArgument("source marginal must be a probability");
  }
  if (theta < epsilon + 0.5) {
    if (!allow_weak_gap) throw InvalidArgument("theta must exceed epsilon by at least 0.5");
    warnings.push_back("theta - epsilon is below 0.5; the progression signal is weak");
  }
  if (logic.size() != dag.node_count() || event_names.size() != dag.node_count()) {
    throw InvalidArgument("logic and names must cover every node");
  }
  for (std::size_t v = 0; v < dag.node_count(); ++v) {
    if (logic[v].has_value() == dag.parents(v).empty()) {
      throw InvalidArgument("logic must be defined exactly on nodes with parents (node " +
                            std::to_string(v) + ")");
    }
  }
  return warnings;
}

namespace {

struct TopologyName {
  TopologyKind kind;
  std::string_view name;
};

constexpr TopologyName kTopologyNames[] = {
    {TopologyKind::tree, "tree"},
    {TopologyKind::forest, "forest"},
    {TopologyKind::dag_single_source_conj, "dag_single_source_conj"},
    {TopologyKind::dag_multi_source_conj, "dag_multi_source_conj"},
    {TopologyKind::dag_single_source_disj, "dag_single_source_disj"},
    {TopologyKind::dag_multi_source_disj, "dag_multi_source_disj"},
    {TopologyKind::dag_single_source_xor, "dag_single_source_xor"},
    {TopologyKind::dag_multi_source_xor, "dag_multi_source_xor"},
};

bool is_tree_like(TopologyKind kind) {
  return kind == TopologyKind::tree || kind == TopologyKind::forest;
}

bool is_multi_source(TopologyKind kind) {
  return kind == TopologyKind::dag_multi_source_conj ||
         kind == TopologyKind::dag_multi_source_disj ||
         kind == TopologyKind::dag_multi_source_xor;
}

Logic logic_of(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::dag_single_source_disj:
    case TopologyKind::dag_multi_source_disj: return Logic::disjunction;
    case TopologyKind::dag_single_source_xor:
    case TopologyKind::dag_multi_source_xor: return Logic::exclusive;
    default: return Logic::conjunction;
  }
}

std::size_t min_nodes(TopologyKind kind) {
  if (kind == TopologyKind::forest) return 4;
  if (is_multi_source(kind)) return 3;
  return 2;
}

// Per-position parent choices for a node placed at `pos` in the order.
std::vector<std::size_t> pick_parents(Rng& rng, const std::vector<std::size_t>& pool,
                                      std::size_t max_parents) {
  const auto k = rng.between(1, std::min(max_parents, pool.size()));
  auto shuffled = pool;
  // Partial Fisher-Yates: first k entries become a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(shuffled[i], shuffled[i + rng.below(shuffled.size() - i)]);
  }
  shuffled.resize(k);
  return shuffled;
}

}  // namespace

std::string_view to_string(TopologyKind kind) {
  for (const auto& t : kTopologyNames) {
    if (t.kind == kind) return t.name;
  }
  return "tree";
}

TopologyKind parse_topology(std::string_view name) {
  for (const auto& t : kTopologyNames) {
    if (t.name == name) return t.kind;
  }
  throw InvalidArgument("unknown topology class '" + std::string(name) + "'");
}

const std::vector<TopologyKind>& benchmark_topologies() {
  static const std::vector<TopologyKind> kinds = {
      TopologyKind::tree,
      TopologyKind::forest,
      TopologyKind::dag_single_source_conj,
      TopologyKind::dag_multi_source_conj,
      TopologyKind::dag_single_source_disj,
      TopologyKind::dag_multi_source_disj,
  };
  return kinds;
}

TopologyClass TopologyClass::make(TopologyKind kind, std::size_t node_count) {
  return {kind, node_count, is_tree_like(kind) ? std::size_t{1} : std::size_t{3}};
}

MpnModel random_structure(const TopologyClass& cls, std::uint64_t seed,
                          const GeneratorParams& params) {
  const auto n = cls.node_count;
  if (n < min_nodes(cls.kind)) {
    throw InvalidArgument(std::string(to_string(cls.kind)) + " needs at least " +
                          std::to_string(min_nodes(cls.kind)) + " nodes");
  }
  if (cls.max_parents < 1) throw InvalidArgument("max_parents must be at least 1");
  if (is_tree_like(cls.kind) && cls.max_parents != 1) {
    throw InvalidArgument("trees and forests have exactly one parent per non-root");
  }

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  std::vector<Edge> edges;
  if (cls.kind == TopologyKind::tree) {
    for (std::size_t pos = 1; pos < n; ++pos) {
      edges.push_back({order[rng.below(pos)], order[pos]});
    }
  } else if (cls.kind == TopologyKind::forest) {
    const auto roots = rng.between(2, std::max<std::size_t>(2, n / 3));
    // Two seats per component guarantee every tree has a root and a child;
    // the remaining nodes join uniformly chosen components.
    std::vector<std::size_t> component;
    for (std::size_t c = 0; c < roots; ++c) component.insert(component.end(), {c, c});
    while (component.size() < n) component.push_back(rng.below(roots));
    rng.shuffle(component);
    std::vector<std::vector<std::size_t>> members(roots);
    for (std::size_t pos = 0; pos < n; ++pos) {
      auto& mem = members[component[pos]];
      if (!mem.empty()) edges.push_back({mem[rng.below(mem.size())], order[pos]});
      mem.push_back(order[pos]);
    }
  } else {
    std::size_t sources = 1;
    if (is_multi_source(cls.kind)) {
      sources = std::min(rng.between(2, std::max<std::size_t>(2, n / 3)), n - 1);
    }
    for (std::size_t pos = sources; pos < n; ++pos) {
      const std::vector<std::size_t> pool(order.begin(), order.begin() + pos);
      for (auto p : pick_parents(rng, pool, cls.max_parents)) edges.push_back({p, order[pos]});
    }
  }

  MpnModel model;
  model.dag = Dag::from_edges(n, edges);
  model.logic.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!model.dag.parents(v).empty()) model.logic[v] = logic_of(cls.kind);
  }
  model.theta = params.theta;
  model.epsilon = params.epsilon;
  model.source_marginal = params.source_marginal.value_or(params.theta);
  for (std::size_t v = 0; v < n; ++v) model.event_names.push_back("v" + std::to_string(v + 1));
  model.validate(params.allow_weak_gap);
  return model;
}

void validate_structure(const MpnModel& model, const TopologyClass& cls) {
  const auto& dag = model.dag;
  const auto n = dag.node_count();
  auto fail = [&](const std::string& what) {
    throw InvalidArgument(std::string(to_string(cls.kind)) + ": " + what);
  };
  if (n != cls.node_count) fail("wrong node count");
  if (dag.topological_order().size() != n) fail("graph has a cycle");
  std::size_t roots = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto k = dag.parents(v).size();
    if (k == 0) ++roots;
    if (k > cls.max_parents) fail("node " + std::to_string(v) + " exceeds the parent limit");
    if (model.logic[v].has_value() != (k > 0)) fail("logic defined on the wrong nodes");
    if (k > 0 && !is_tree_like(cls.kind) && *model.logic[v] != logic_of(cls.kind)) {
      fail("node " + std::to_string(v) + " has the wrong logic");
    }
  }
  switch (cls.kind) {
    case TopologyKind::tree:
      if (roots != 1) fail("a tree has exactly one root");
      if (dag.edge_count() != n - 1) fail("a tree has n - 1 edges");
      break;
    case TopologyKind::forest: {
      if (roots < 2) fail("a forest has at least two roots");
      if (dag.edge_count() != n - roots) fail("a forest has n - roots edges");
      // Every root must have at least one child.
      for (std::size_t v = 0; v < n; ++v) {
        if (dag.parents(v).empty() && dag.children(v).empty()) fail("isolated root");
      }
      break;
    }
    default:
      if (is_multi_source(cls.kind) ? roots < 2 : roots != 1) fail("wrong number of sources");
      break;
  }
}

bool logic_triggered(Logic logic, std::size_t active, std::size_t parents) {
  switch (logic) {
    case Logic::conjunction: return active == parents;
    case Logic::disjunction: return active > 0;
    case Logic::exclusive: return active == 1;
  }
  return false;
}

Dataset sample_dataset(const MpnModel& model, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("sample count must be at least 1");
  model.validate(true);
  const auto n = model.dag.node_count();
  const auto order = model.dag.topological_order();
  std::vector<Dataset::Column> columns(n, Dataset::Column(m));
  Rng rng(seed);
  for (std::size_t r = 0; r < m; ++r) {
    for (auto v : order) {
      const auto& ps = model.dag.parents(v);
      double p;
      if (ps.empty()) {
        p = model.source_marginal;
      } else {
        std::size_t active = 0;
        for (auto q : ps) active += columns[q][r];
        p = logic_triggered(*model.logic[v], active, ps.size()) ? model.theta : model.epsilon;
      }
      columns[v][r] = rng.bernoulli(p) ? 1 : 0;
    }
  }
  std::vector<std::string> ids;
  ids.reserve(m);
  for (std::size_t r = 0; r < m; ++r) ids.push_back("s" + std::to_string(r + 1));
  return Dataset(model.event_names, std::move(ids), std::move(columns));
}

std::string_view to_string(NoiseMode mode) {
  return mode == NoiseMode::flip ? "flip" : "random_entry";
}

NoiseMode parse_noise_mode(std::string_view name) {
  if (name == "random_entry") return NoiseMode::random_entry;
  if (name == "flip") return NoiseMode::flip;
  throw InvalidArgument("unknown noise mode '" + std::string(name) + "'");
}

Dataset apply_noise(const Dataset& data, const NoiseSpec& spec) {
  if (!(spec.level >= 0.0 && spec.level <= 1.0)) throw InvalidArgument("noise level must lie in [0, 1]");
  if (spec.level == 0.0) return data;
  const auto n = data.event_count();
  const auto m = data.sample_count();
  std::vector<Dataset::Column> columns(n, Dataset::Column(m));
  Rng rng(spec.seed);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t v = 0; v < n; ++v) {
      const double hit = rng.uniform();
      const double coin = rng.uniform();
      auto value = data.column(v)[r];
      if (hit < spec.level) {
        value = spec.mode == NoiseMode::flip ? static_cast<std::uint8_t>(value ^ 1u)
                                             : static_cast<std::uint8_t>(coin < 0.5);
      }
      columns[v][r] = value;
    }
  }
  return Dataset(data.event_names(), data.sample_ids(), std::move(columns));
}

std::vector<NamedFormula> make_xor_formulas(const MpnModel& model) {
  std::vector<NamedFormula> out;
  for (std::size_t v = 0; v < model.dag.node_count(); ++v) {
    if (model.logic[v] != Logic::exclusive) continue;
    const auto& ps = model.dag.parents(v);
    std::vector<Clause> clauses;
    Clause at_least_one;
    for (auto p : ps) at_least_one.push_back({p, false});
    clauses.push_back(std::move(at_least_one));
    for (std::size_t a = 0; a < ps.size(); ++a) {
      for (std::size_t b = a + 1; b < ps.size(); ++b) {
        clauses.push_back({{ps[a], true}, {ps[b], true}});
      }
    }
    out.push_back({"xor_" + model.event_names[v], CnfFormula(std::move(clauses))});
  }
  if (out.empty()) throw InvalidArgument("model has no XOR node");
  return out;
}

}  // namespace sbcn
