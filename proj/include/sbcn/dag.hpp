#ifndef SBCN_DAG_HPP
#define SBCN_DAG_HPP

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sbcn {

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  auto operator<=>(const Edge&) const = default;
};

// Directed acyclic graph over node indices [0, node_count). Parent lists are
// kept sorted so parent configurations have a canonical bit order.
class Dag {
 public:
  Dag() = default;
  explicit Dag(std::size_t node_count);
  // Throws InvalidArgument on self-loops, out-of-range nodes, duplicates or
  // cycles.
  static Dag from_edges(std::size_t node_count, std::span<const Edge> edges);

  std::size_t node_count() const noexcept { return parents_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  const std::vector<std::size_t>& parents(std::size_t v) const;
  std::vector<std::size_t> children(std::size_t v) const;
  bool has_edge(Edge e) const;
  // Sorted lexicographically by (from, to).
  std::vector<Edge> edges() const;

  // True when adding e would close a directed cycle (or is a self-loop).
  bool creates_cycle(Edge e) const;
  bool reachable(std::size_t from, std::size_t to) const;

  // Inserting an edge that would break acyclicity throws InvalidArgument.
  void insert(Edge e);
  void erase(Edge e);

  std::vector<std::size_t> topological_order() const;

  bool operator==(const Dag&) const = default;

 private:
  void check_node(std::size_t v) const;

  std::vector<std::vector<std::size_t>> parents_;
  std::size_t edge_count_ = 0;
};

// True iff the edge set over node_count nodes has no directed cycle.
bool is_acyclic(std::size_t node_count, std::span<const Edge> edges);

std::string to_string(Edge e);

}  // namespace sbcn

#endif
