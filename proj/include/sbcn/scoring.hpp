#ifndef SBCN_SCORING_HPP
#define SBCN_SCORING_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbcn/dag.hpp"
#include "sbcn/dataset.hpp"

namespace sbcn {

enum class Regularizer { none, bic, aic };

std::string_view to_string(Regularizer r);
Regularizer parse_regularizer(std::string_view name);

struct ScoreConfig {
  Regularizer regularizer = Regularizer::bic;
  double pseudocount = 0.0;

  void validate() const;
};

// Conditional table of one node. Entry c holds P(node = 1 | parents = c),
// where bit k of c is the value of parents[k] (parents sorted ascending).
struct FamilyTable {
  std::size_t node = 0;
  std::vector<std::size_t> parents;
  std::vector<double> p_one;
  // Parent configurations with no supporting rows (entry set to 0.5).
  std::vector<std::size_t> unsupported;

  bool operator==(const FamilyTable&) const = default;
};

using Cpt = std::vector<FamilyTable>;

struct Network {
  Dag dag;
  Cpt cpts;
  std::vector<std::string> event_names;

  // Throws SchemaError when tables and graph disagree.
  void validate() const;
};

struct ScoredNetwork {
  Network network;
  double log_likelihood = 0.0;
  double penalty = 0.0;
  double score = 0.0;
};

// Counts for one family: ones[c], total[c] per parent configuration c. Uses
// a dense table when 2^k is small relative to m, sorted codes otherwise.
struct FamilyCounts {
  std::vector<std::size_t> configs;  // configurations with support, ascending
  std::vector<std::size_t> ones;
  std::vector<std::size_t> total;
};

FamilyCounts family_counts(const Dataset& data, std::size_t node,
                           std::span<const std::size_t> parents);

double family_log_likelihood(const Dataset& data, std::size_t node,
                             std::span<const std::size_t> parents, double pseudocount = 0.0);

// Multiplier on the parameter count: 0, 1 or ln(m)/2.
double penalty_weight(Regularizer regularizer, std::size_t sample_count);

// Log-likelihood minus the penalty for this family's 2^|parents| parameters.
double family_score(const Dataset& data, std::size_t node,
                    std::span<const std::size_t> parents, const ScoreConfig& cfg);

Cpt fit_cpts(const Dataset& data, const Dag& dag, double pseudocount = 0.0);

// Maximised log-likelihood: CPTs fitted on the same data then evaluated.
double log_likelihood(const Dataset& data, const Dag& dag, double pseudocount = 0.0);

// Log-likelihood of the data under given tables; -inf when an observed value
// has probability 0.
double log_likelihood(const Dataset& data, const Network& network);

std::size_t parameter_count(const Dag& dag);
double penalty(const Dag& dag, std::size_t sample_count, Regularizer regularizer);

ScoredNetwork score(const Dataset& data, const Dag& dag, const ScoreConfig& cfg);

}  // namespace sbcn

#endif
