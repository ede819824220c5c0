#ifndef SBCN_SEARCH_HPP
#define SBCN_SEARCH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sbcn/dag.hpp"
#include "sbcn/dataset.hpp"
#include "sbcn/scoring.hpp"
#include "sbcn/suppes.hpp"

namespace sbcn {

enum class SearchMode { hill_climb, exhaustive };

struct SearchConfig {
  ScoreConfig score;
  std::optional<std::size_t> max_parents;  // empty = unlimited
  SearchMode mode = SearchMode::hill_climb;
  std::uint64_t seed = 0;  // unused by the deterministic searches

  void validate() const;
};

struct Move {
  enum class Kind { add, remove };
  Kind kind = Kind::add;
  Edge edge;
  bool operator==(const Move&) const = default;
};

struct TraceStep {
  Move move;
  double score_before = 0.0;
  double score_after = 0.0;
};

struct SearchResult {
  ScoredNetwork network;
  std::vector<TraceStep> trace;
};

// Smallest gain a move needs to be accepted; guards against cycling on
// rounding noise.
inline constexpr double kMinImprovement = 1e-9;

inline constexpr std::size_t kExhaustiveEdgeCap = 20;

// Steepest-ascent add/delete search from the empty graph over the given
// candidate edges. Ties on gain go to additions, then to the smaller edge.
SearchResult hill_climb(const Dataset& data, std::span<const Edge> candidates,
                        const SearchConfig& cfg);
SearchResult hill_climb(const Dataset& data, const PrimaFaciePoset& poset,
                        const SearchConfig& cfg);

// Scores every subset of the candidates. Ties within kMinImprovement go to
// fewer edges, then to the lexicographically smaller edge list. Throws
// LimitExceeded above kExhaustiveEdgeCap candidates.
ScoredNetwork exhaustive_search(const Dataset& data, std::span<const Edge> candidates,
                                const SearchConfig& cfg);
ScoredNetwork exhaustive_search(const Dataset& data, const PrimaFaciePoset& poset,
                                const SearchConfig& cfg);

struct InferenceConfig {
  ConditionTestConfig conditions;
  SearchConfig search;
  // Return the prima facie edges as the network, no search.
  bool prima_facie_only = false;
  // Plain Bayesian-network baseline: search all ordered pairs, acyclicity
  // enforced per move, no Suppes filter.
  bool unconstrained = false;
};

struct Inference {
  PrimaFaciePoset poset;
  ScoredNetwork network;
  std::vector<TraceStep> trace;
};

Inference infer_sbcn(const Dataset& data, const InferenceConfig& cfg);

// Same as infer_sbcn but reusing an already computed poset.
Inference infer_with_poset(const Dataset& data, PrimaFaciePoset poset,
                           const InferenceConfig& cfg);

}  // namespace sbcn

#endif
