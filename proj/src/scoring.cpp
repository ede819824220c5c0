#include "sbcn/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sbcn/error.hpp"

namespace sbcn {

std::string_view to_string(Regularizer r) {
  switch (r) {
    case Regularizer::none: return "none";
    case Regularizer::bic: return "bic";
    case Regularizer::aic: return "aic";
  }
  return "none";
}

Regularizer parse_regularizer(std::string_view name) {
  if (name == "none") return Regularizer::none;
  if (name == "bic") return Regularizer::bic;
  if (name == "aic") return Regularizer::aic;
  throw InvalidArgument("unknown regularizer '" + std::string(name) + "'");
}

void ScoreConfig::validate() const {
  if (!(pseudocount >= 0.0)) throw InvalidArgument("pseudocount must be nonnegative");
}

void Network::validate() const {
  if (cpts.size() != dag.node_count()) throw SchemaError("one table per node required");
  if (event_names.size() != dag.node_count()) throw SchemaError("one name per node required");
  for (std::size_t v = 0; v < cpts.size(); ++v) {
    const auto& t = cpts[v];
    if (t.node != v || t.parents != dag.parents(v)) {
      throw SchemaError("table for node " + std::to_string(v) + " does not match the graph");
    }
    if (t.p_one.size() != (std::size_t{1} << t.parents.size())) {
      throw SchemaError("table for node " + std::to_string(v) + " has the wrong arity");
    }
    for (double p : t.p_one) {
      if (!(p >= 0.0 && p <= 1.0)) throw SchemaError("probability outside [0, 1]");
    }
  }
}

FamilyCounts family_counts(const Dataset& data, std::size_t node,
                           std::span<const std::size_t> parents) {
  const auto m = data.sample_count();
  const auto k = parents.size();
  if (k >= 8 * sizeof(std::size_t) - 1) throw LimitExceeded("too many parents for a family table");
  const auto child = data.column(node);

  std::vector<std::size_t> code(m, 0);
  for (std::size_t b = 0; b < k; ++b) {
    const auto col = data.column(parents[b]);
    for (std::size_t r = 0; r < m; ++r) code[r] |= static_cast<std::size_t>(col[r]) << b;
  }

  FamilyCounts out;
  const std::size_t configs = std::size_t{1} << k;
  if (configs <= 4 * m + 16) {
    std::vector<std::size_t> ones(configs, 0);
    std::vector<std::size_t> total(configs, 0);
    for (std::size_t r = 0; r < m; ++r) {
      ++total[code[r]];
      ones[code[r]] += child[r];
    }
    for (std::size_t c = 0; c < configs; ++c) {
      if (total[c] == 0) continue;
      out.configs.push_back(c);
      out.ones.push_back(ones[c]);
      out.total.push_back(total[c]);
    }
  } else {
    // Sparse: sort packed (code, child) pairs.
    std::vector<std::size_t> keys(m);
    for (std::size_t r = 0; r < m; ++r) keys[r] = (code[r] << 1) | child[r];
    std::sort(keys.begin(), keys.end());
    for (std::size_t r = 0; r < m; ++r) {
      const auto c = keys[r] >> 1;
      if (out.configs.empty() || out.configs.back() != c) {
        out.configs.push_back(c);
        out.ones.push_back(0);
        out.total.push_back(0);
      }
      ++out.total.back();
      out.ones.back() += keys[r] & 1;
    }
  }
  return out;
}

namespace {

// n_one * ln p + n_zero * ln(1 - p) with 0 * ln 0 = 0.
double bernoulli_log_likelihood(double n_one, double n_zero, double p) {
  double ll = 0.0;
  if (n_one > 0) ll += n_one * std::log(p);
  if (n_zero > 0) ll += n_zero * std::log1p(-p);
  return ll;
}

}  // namespace

double family_log_likelihood(const Dataset& data, std::size_t node,
                             std::span<const std::size_t> parents, double pseudocount) {
  const auto counts = family_counts(data, node, parents);
  double ll = 0.0;
  for (std::size_t k = 0; k < counts.configs.size(); ++k) {
    const double ones = static_cast<double>(counts.ones[k]);
    const double total = static_cast<double>(counts.total[k]);
    const double p = (ones + pseudocount) / (total + 2.0 * pseudocount);
    ll += bernoulli_log_likelihood(ones, total - ones, p);
  }
  return ll;
}

double penalty_weight(Regularizer regularizer, std::size_t sample_count) {
  switch (regularizer) {
    case Regularizer::none: return 0.0;
    case Regularizer::aic: return 1.0;
    case Regularizer::bic: return std::log(static_cast<double>(sample_count)) / 2.0;
  }
  return 0.0;
}

double family_score(const Dataset& data, std::size_t node,
                    std::span<const std::size_t> parents, const ScoreConfig& cfg) {
  const double params = std::ldexp(1.0, static_cast<int>(parents.size()));
  return family_log_likelihood(data, node, parents, cfg.pseudocount) -
         penalty_weight(cfg.regularizer, data.sample_count()) * params;
}

Cpt fit_cpts(const Dataset& data, const Dag& dag, double pseudocount) {
  if (dag.node_count() != data.event_count()) {
    throw InvalidArgument("graph has " + std::to_string(dag.node_count()) +
                          " nodes but the dataset has " + std::to_string(data.event_count()));
  }
  if (!(pseudocount >= 0.0)) throw InvalidArgument("pseudocount must be nonnegative");
  Cpt cpts;
  cpts.reserve(dag.node_count());
  for (std::size_t v = 0; v < dag.node_count(); ++v) {
    FamilyTable t;
    t.node = v;
    t.parents = dag.parents(v);
    const std::size_t configs = std::size_t{1} << t.parents.size();
    const auto counts = family_counts(data, v, t.parents);
    t.p_one.assign(configs, 0.5);
    std::vector<char> supported(configs, 0);
    for (std::size_t k = 0; k < counts.configs.size(); ++k) {
      const auto c = counts.configs[k];
      supported[c] = 1;
      t.p_one[c] = (static_cast<double>(counts.ones[k]) + pseudocount) /
                   (static_cast<double>(counts.total[k]) + 2.0 * pseudocount);
    }
    if (pseudocount == 0.0) {
      for (std::size_t c = 0; c < configs; ++c) {
        if (!supported[c]) t.unsupported.push_back(c);
      }
    }
    cpts.push_back(std::move(t));
  }
  return cpts;
}

double log_likelihood(const Dataset& data, const Dag& dag, double pseudocount) {
  if (dag.node_count() != data.event_count()) {
    throw InvalidArgument("graph and dataset disagree on the number of events");
  }
  double ll = 0.0;
  for (std::size_t v = 0; v < dag.node_count(); ++v) {
    ll += family_log_likelihood(data, v, dag.parents(v), pseudocount);
  }
  return ll;
}

double log_likelihood(const Dataset& data, const Network& network) {
  network.validate();
  if (network.dag.node_count() != data.event_count()) {
    throw InvalidArgument("network and dataset disagree on the number of events");
  }
  double ll = 0.0;
  for (std::size_t v = 0; v < network.dag.node_count(); ++v) {
    const auto& t = network.cpts[v];
    const auto counts = family_counts(data, v, t.parents);
    for (std::size_t k = 0; k < counts.configs.size(); ++k) {
      const double ones = static_cast<double>(counts.ones[k]);
      const double zeros = static_cast<double>(counts.total[k]) - ones;
      const double p = t.p_one[counts.configs[k]];
      if ((ones > 0 && p == 0.0) || (zeros > 0 && p == 1.0)) {
        return -std::numeric_limits<double>::infinity();
      }
      ll += bernoulli_log_likelihood(ones, zeros, p);
    }
  }
  return ll;
}

std::size_t parameter_count(const Dag& dag) {
  std::size_t k = 0;
  for (std::size_t v = 0; v < dag.node_count(); ++v) k += std::size_t{1} << dag.parents(v).size();
  return k;
}

double penalty(const Dag& dag, std::size_t sample_count, Regularizer regularizer) {
  if (sample_count < 1) throw InvalidArgument("penalty needs at least one sample");
  return penalty_weight(regularizer, sample_count) * static_cast<double>(parameter_count(dag));
}

ScoredNetwork score(const Dataset& data, const Dag& dag, const ScoreConfig& cfg) {
  cfg.validate();
  ScoredNetwork out;
  out.network.dag = dag;
  out.network.cpts = fit_cpts(data, dag, cfg.pseudocount);
  out.network.event_names = data.event_names();
  out.log_likelihood = log_likelihood(data, dag, cfg.pseudocount);
  out.penalty = penalty(dag, data.sample_count(), cfg.regularizer);
  out.score = out.log_likelihood - out.penalty;
  return out;
}

}  // namespace sbcn
