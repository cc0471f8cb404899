#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace psc {

/// Reproducible random source shared by the simulators and fold planner.
///
/// Raw bits come from std::mt19937_64, whose output sequence is pinned by the
/// C++ standard. The distributions in <random> are implementation-defined, so
/// every transform is spelled out here instead:
///   - uniform():  top 53 bits scaled to [0, 1)
///   - below(k):   rejection sampling on the raw 64-bit word, no modulo bias
///   - normal():   Box-Muller on a pair (u1 in (0,1], u2 in [0,1)); the sine
///                 branch is cached and returned by the next call
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform();
  std::uint64_t below(std::uint64_t bound);
  double normal();

  /// Fisher-Yates, swapping from the back.
  template <class T> void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer over (base, stream); derives independent seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

} // namespace psc
