#include "sbcn/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "sbcn/error.hpp"
#include "sbcn/random.hpp"

namespace sbcn {

Confusion confusion(const Dag& truth, const Dag& inferred) {
  if (truth.node_count() != inferred.node_count()) {
    throw InvalidArgument("truth has " + std::to_string(truth.node_count()) +
                          " nodes, inferred has " + std::to_string(inferred.node_count()));
  }
  const auto n = truth.node_count();
  Confusion c;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool t = truth.has_edge({i, j});
      const bool p = inferred.has_edge({i, j});
      if (t && p) ++c.tp;
      else if (p) ++c.fp;
      else if (t) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

Confusion confusion(const Dag& truth, std::span<const Edge> inferred) {
  const auto n = truth.node_count();
  std::vector<char> present(n * n, 0);
  for (const auto& e : inferred) {
    if (e.from >= n || e.to >= n) throw IndexError("inferred edge " + to_string(e) + " out of range");
    if (e.from == e.to) throw InvalidArgument("inferred self-loop " + to_string(e));
    present[e.from * n + e.to] = 1;
  }
  Confusion c;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool t = truth.has_edge({i, j});
      const bool p = present[i * n + j] != 0;
      if (t && p) ++c.tp;
      else if (p) ++c.fp;
      else if (t) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

Metrics metrics(const Confusion& c) {
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  return {ratio(c.tp + c.tn, c.total()), ratio(c.tp, c.tp + c.fn), ratio(c.tn, c.fp + c.tn)};
}

EdgeConfidence::EdgeConfidence(std::size_t node_count)
    : node_count_(node_count), tallies_(node_count * node_count, 0) {}

void EdgeConfidence::add_replicate(const Dag& inferred) {
  if (inferred.node_count() != node_count_) throw InvalidArgument("replicate has the wrong node count");
  for (const auto& e : inferred.edges()) ++tallies_[e.from * node_count_ + e.to];
  ++replicates_;
}

std::size_t EdgeConfidence::tally(Edge e) const {
  if (e.from >= node_count_ || e.to >= node_count_) throw IndexError("edge out of range");
  return tallies_[e.from * node_count_ + e.to];
}

double EdgeConfidence::confidence(Edge e) const {
  if (replicates_ == 0) return 0.0;
  return static_cast<double>(tally(e)) / static_cast<double>(replicates_);
}

EdgeConfidence bootstrap_confidence(const Dataset& data, const InferenceConfig& cfg,
                                    std::size_t replicates, std::uint64_t seed,
                                    std::size_t parallelism) {
  if (replicates < 1) throw InvalidArgument("bootstrap needs at least one replicate");
  const auto m = data.sample_count();
  std::vector<std::optional<Dag>> graphs(replicates);

  auto run = [&](std::size_t rep) {
    Rng rng(derive_seed(seed, {0xB007u, rep}));
    std::vector<std::size_t> rows(m);
    for (auto& r : rows) r = rng.below(m);
    auto resampled = data.select_rows(rows);
    auto local = cfg;
    local.conditions.seed = derive_seed(seed, {0xC0Du, rep});
    local.conditions.parallelism = 1;
    graphs[rep] = infer_sbcn(resampled, local).network.network.dag;
  };

  const auto workers = std::max<std::size_t>(1, std::min(parallelism, replicates));
  if (workers == 1) {
    for (std::size_t rep = 0; rep < replicates; ++rep) run(rep);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto rep = next++; rep < replicates; rep = next++) {
          try {
            run(rep);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  EdgeConfidence out(data.event_count());
  for (const auto& g : graphs) out.add_replicate(*g);
  return out;
}

}  // namespace sbcn
