#ifndef SBCN_EVALUATION_HPP
#define SBCN_EVALUATION_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sbcn/dag.hpp"
#include "sbcn/dataset.hpp"
#include "sbcn/search.hpp"

namespace sbcn {

// Counts over the n(n-1) ordered pairs; an arc is positive when present.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const Confusion&) const = default;
};

Confusion confusion(const Dag& truth, const Dag& inferred);
// Inferred arcs need not form a DAG (e.g. projected lifted networks).
Confusion confusion(const Dag& truth, std::span<const Edge> inferred);

// Empty when the denominator is zero.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
};

Metrics metrics(const Confusion& c);

class EdgeConfidence {
 public:
  explicit EdgeConfidence(std::size_t node_count);

  void add_replicate(const Dag& inferred);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t replicates() const noexcept { return replicates_; }
  std::size_t tally(Edge e) const;
  // tally / replicates; 0 before the first replicate.
  double confidence(Edge e) const;

 private:
  std::size_t node_count_;
  std::size_t replicates_ = 0;
  std::vector<std::size_t> tallies_;
};

// Resamples m rows with replacement per replicate and re-runs inference.
// Replicate r uses a seed derived from (seed, r), so the result does not
// depend on parallelism.
EdgeConfidence bootstrap_confidence(const Dataset& data, const InferenceConfig& cfg,
                                    std::size_t replicates, std::uint64_t seed,
                                    std::size_t parallelism = 1);

}  // namespace sbcn

#endif
