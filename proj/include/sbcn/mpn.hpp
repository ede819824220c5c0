#ifndef SBCN_MPN_HPP
#define SBCN_MPN_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbcn/cnf.hpp"
#include "sbcn/dag.hpp"
#include "sbcn/dataset.hpp"

namespace sbcn {

enum class Logic { conjunction, disjunction, exclusive };

std::string_view to_string(Logic logic);
Logic parse_logic(std::string_view name);

// Monotonic progression network: a DAG whose nodes fire with probability
// theta when their parent condition holds and epsilon otherwise.
struct MpnModel {
  Dag dag;
  std::vector<std::optional<Logic>> logic;  // set iff the node has parents
  double theta = 0.9;
  double epsilon = 0.05;
  double source_marginal = 0.9;
  std::vector<std::string> event_names;

  // Throws InvalidArgument unless 0 <= epsilon < theta <= 1, the source
  // marginal is a probability, and logic is defined exactly on nodes with
  // parents. A gap theta - epsilon below 0.5 is rejected unless
  // allow_weak_gap, in which case it is reported as a warning.
  std::vector<std::string> validate(bool allow_weak_gap = false) const;
};

enum class TopologyKind {
  tree,
  forest,
  dag_single_source_conj,
  dag_multi_source_conj,
  dag_single_source_disj,
  dag_multi_source_disj,
  dag_single_source_xor,
  dag_multi_source_xor,
};

std::string_view to_string(TopologyKind kind);
TopologyKind parse_topology(std::string_view name);
// The six classes of the benchmark protocol, in canonical order.
const std::vector<TopologyKind>& benchmark_topologies();

struct TopologyClass {
  TopologyKind kind = TopologyKind::tree;
  std::size_t node_count = 10;
  std::size_t max_parents = 1;

  static TopologyClass make(TopologyKind kind, std::size_t node_count);
};

struct GeneratorParams {
  double theta = 0.9;
  double epsilon = 0.05;
  std::optional<double> source_marginal;  // defaults to theta
  bool allow_weak_gap = false;
};

MpnModel random_structure(const TopologyClass& cls, std::uint64_t seed,
                          const GeneratorParams& params = {});

// Throws InvalidArgument naming the first violated structural rule.
void validate_structure(const MpnModel& model, const TopologyClass& cls);

// True when the node's logic condition holds for the given parent values.
bool logic_triggered(Logic logic, std::size_t active_parents, std::size_t parent_count);

Dataset sample_dataset(const MpnModel& model, std::size_t m, std::uint64_t seed);

enum class NoiseMode {
  random_entry,  // replace with a fair coin (effective flip rate level/2)
  flip,          // flip the cell
};

std::string_view to_string(NoiseMode mode);
NoiseMode parse_noise_mode(std::string_view name);

struct NoiseSpec {
  double level = 0.0;
  NoiseMode mode = NoiseMode::random_entry;
  std::uint64_t seed = 0;
};

// Every cell draws the same random numbers whatever the level, so datasets
// noised with one seed at increasing levels are nested.
Dataset apply_noise(const Dataset& data, const NoiseSpec& spec);

// One formula per XOR node: "exactly one parent is 1" in pairwise CNF,
// named "xor_<child>". Throws InvalidArgument when the model has no XOR node.
std::vector<NamedFormula> make_xor_formulas(const MpnModel& model);

}  // namespace sbcn

#endif
