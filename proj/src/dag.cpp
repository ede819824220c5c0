#include "sbcn/dag.hpp"

#include <algorithm>

#include "sbcn/error.hpp"

namespace sbcn {

Dag::Dag(std::size_t node_count) : parents_(node_count) {}

Dag Dag::from_edges(std::size_t node_count, std::span<const Edge> edges) {
  Dag dag(node_count);
  for (const auto& e : edges) {
    dag.check_node(e.from);
    dag.check_node(e.to);
    if (e.from == e.to) throw InvalidArgument("self-loop on node " + std::to_string(e.from));
    if (dag.has_edge(e)) throw InvalidArgument("duplicate edge " + to_string(e));
    auto& ps = dag.parents_[e.to];
    ps.insert(std::lower_bound(ps.begin(), ps.end(), e.from), e.from);
    ++dag.edge_count_;
  }
  if (dag.topological_order().size() != node_count) {
    throw InvalidArgument("edge set contains a directed cycle");
  }
  return dag;
}

void Dag::check_node(std::size_t v) const {
  if (v >= parents_.size()) throw IndexError("node " + std::to_string(v) + " out of range");
}

const std::vector<std::size_t>& Dag::parents(std::size_t v) const {
  check_node(v);
  return parents_[v];
}

std::vector<std::size_t> Dag::children(std::size_t v) const {
  check_node(v);
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < parents_.size(); ++c) {
    if (std::binary_search(parents_[c].begin(), parents_[c].end(), v)) out.push_back(c);
  }
  return out;
}

bool Dag::has_edge(Edge e) const {
  if (e.from >= node_count() || e.to >= node_count()) return false;
  const auto& ps = parents_[e.to];
  return std::binary_search(ps.begin(), ps.end(), e.from);
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t to = 0; to < parents_.size(); ++to) {
    for (auto from : parents_[to]) out.push_back({from, to});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Dag::reachable(std::size_t from, std::size_t to) const {
  check_node(from);
  check_node(to);
  if (from == to) return true;
  // Walk backwards from `to` along parent links.
  std::vector<char> seen(node_count(), 0);
  std::vector<std::size_t> stack{to};
  seen[to] = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto p : parents_[v]) {
      if (p == from) return true;
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
  }
  return false;
}

bool Dag::creates_cycle(Edge e) const { return reachable(e.to, e.from); }

void Dag::insert(Edge e) {
  check_node(e.from);
  check_node(e.to);
  if (has_edge(e)) return;
  if (creates_cycle(e)) throw InvalidArgument("edge " + to_string(e) + " would create a cycle");
  auto& ps = parents_[e.to];
  ps.insert(std::lower_bound(ps.begin(), ps.end(), e.from), e.from);
  ++edge_count_;
}

void Dag::erase(Edge e) {
  check_node(e.from);
  check_node(e.to);
  auto& ps = parents_[e.to];
  auto it = std::lower_bound(ps.begin(), ps.end(), e.from);
  if (it != ps.end() && *it == e.from) {
    ps.erase(it);
    --edge_count_;
  }
}

std::vector<std::size_t> Dag::topological_order() const {
  const auto n = node_count();
  std::vector<std::size_t> indegree(n);
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t to = 0; to < n; ++to) {
    indegree[to] = parents_[to].size();
    for (auto from : parents_[to]) kids[from].push_back(to);
  }
  // Smallest-index-first Kahn for a canonical order.
  std::vector<std::size_t> ready;
  for (std::size_t v = n; v-- > 0;) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    auto v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (auto c : kids[v]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  return order;
}

bool is_acyclic(std::size_t node_count, std::span<const Edge> edges) {
  std::vector<std::size_t> indegree(node_count);
  std::vector<std::vector<std::size_t>> kids(node_count);
  for (const auto& e : edges) {
    if (e.from >= node_count || e.to >= node_count) throw IndexError("edge out of range");
    if (e.from == e.to) return false;
    kids[e.from].push_back(e.to);
    ++indegree[e.to];
  }
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < node_count; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++visited;
    for (auto c : kids[v]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  return visited == node_count;
}

std::string to_string(Edge e) {
  return std::to_string(e.from) + "->" + std::to_string(e.to);
}

}  // namespace sbcn
