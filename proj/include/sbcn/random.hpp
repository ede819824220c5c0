#ifndef SBCN_RANDOM_HPP
#define SBCN_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace sbcn {

// Derives an independent sub-seed from a master seed and a list of
// coordinates (grid position, replicate index, ...). Uses std::seed_seq, whose
// mixing algorithm is fixed by the standard, so results are stable across
// toolchains.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> coords) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (coords.size() + 1));
  auto push = [&words](std::uint64_t x) {
    words.push_back(static_cast<std::uint32_t>(x & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(x >> 32));
  };
  push(master);
  for (auto c : coords) push(c);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

// Thin wrapper over mt19937_64. The conversions below are written out so
// that sampled values do not depend on the standard library's distribution
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n); n must be positive.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  // Uniform integer in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) {
    return lo + below(hi - lo + 1);
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sbcn

#endif
