#pragma once

#include <cstdint>
#include <array>
#include <random>

namespace qdp {

/// Seedable, splittable random stream.
///
/// Every stochastic routine takes a stream explicitly. `split(key)` derives an
/// independent child stream from the parent seed and a key without touching the
/// parent's state, so per-seed / per-row streams do not depend on call order.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] RandomStream split(std::uint64_t key) const;

  double uniform();          // [0, 1)
  double standard_normal();  // N(0, 1)
  engine_type& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qdp
