#ifndef SBCN_SUPPES_HPP
#define SBCN_SUPPES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sbcn/cnf.hpp"
#include "sbcn/dag.hpp"
#include "sbcn/dataset.hpp"

namespace sbcn {

enum class ConditionMode { point_estimate, bootstrap };

struct ConditionTestConfig {
  ConditionMode mode = ConditionMode::point_estimate;
  std::size_t replicates = 100;
  double confidence_level = 0.95;
  // With resampling off every replicate is the original data; used to check
  // that the bootstrap path degenerates to the point estimate.
  bool resample = true;
  std::uint64_t seed = 0;
  // Worker threads for the replicate loop. Output does not depend on it.
  std::size_t parallelism = 1;

  void validate() const;
};

struct PairDiagnostic {
  std::size_t cause = 0;
  std::size_t effect = 0;
  double marginal_delta = 0.0;  // P(cause) - P(effect)
  // P(effect|cause) - P(effect|!cause); empty when a side is undefined.
  std::optional<double> raising_delta;
  bool temporal_priority = false;
  bool probability_raising = false;
  // Fraction of bootstrap replicates in which each inequality held; equals
  // 0 or 1 in point-estimate mode.
  double temporal_support = 0.0;
  double raising_support = 0.0;
  bool degenerate = false;
};

// Ordered pairs passing temporal priority and probability raising.
struct PrimaFaciePoset {
  std::size_t node_count = 0;
  std::vector<Edge> allowed_edges;  // sorted
  std::vector<PairDiagnostic> diagnostics;
  std::vector<std::size_t> degenerate;

  bool allows(Edge e) const;
  std::vector<std::size_t> possible_parents(std::size_t v) const;
};

// Exact integer form of the two Suppes inequalities for cause -> effect.
struct PairCounts {
  std::size_t m = 0;
  std::size_t cause = 0;   // rows with cause = 1
  std::size_t effect = 0;  // rows with effect = 1
  std::size_t both = 0;

  bool temporal_priority() const { return cause > effect; }
  // both/m > (cause/m)(effect/m), i.e. positive dependence. Agrees with
  // P(e|c) > P(e|!c) whenever both conditionals are defined.
  bool probability_raising() const { return both * m > cause * effect; }
};

PairCounts pair_counts(const Dataset& data, std::size_t cause, std::size_t effect);

std::vector<Edge> temporal_priority(const Dataset& data);
// Degenerate events never take part.
std::vector<Edge> probability_raising(const Dataset& data);

PrimaFaciePoset prima_facie(const Dataset& data, const ConditionTestConfig& cfg = {});

struct LiftedPoset {
  Dataset lifted;
  PrimaFaciePoset poset;  // node indices refer to lifted columns
};

// Lifts the data with the formula columns and tests formula -> event edges
// against every original event the formula does not mention.
LiftedPoset prima_facie_lifted(const Dataset& data, std::span<const NamedFormula> formulas,
                               const ConditionTestConfig& cfg = {});

}  // namespace sbcn

#endif
