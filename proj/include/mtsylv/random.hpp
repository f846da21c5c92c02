#pragma once

#include <cstdint>
#include <random>

#include "mtsylv/dense.hpp"

namespace mtsylv {

/// Seeded generator used by every randomized routine in the library.
///
/// Algorithm (stable across releases of this library): std::mt19937_64
/// seeded with the 64-bit seed; a uniform double in [0, 1) is the top 53 bits
/// of one draw times 2^-53. Matrices are filled in column-major order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// rows x cols matrix of uniform [0, 1) entries.
  Matrix uniform_matrix(Index rows, Index cols);

  /// Vector with entries uniform in [-1, 1).
  Vector symmetric_vector(Index size);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mtsylv
