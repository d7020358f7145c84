#pragma once

#include <cstdint>
#include <random>

#include "icpovm/matrix_core.hpp"

namespace icpovm {

// Seedable generator with a fixed algorithm so that records reproduce across
// platforms: std::mt19937_64 for raw bits, 53-bit mantissa extraction for
// uniforms, Box-Muller for normals. No std::*_distribution is used because
// their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1).
  double uniform();
  double normal();
  Complex complex_normal();  // real and imaginary parts each N(0, 1/2)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 mix of (seed, index); gives independent sub-streams for parallel
// tasks without sharing generator state.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

ComplexMatrix random_operator(int dim, Rng& rng);
OperatorMatrix random_hermitian(int dim, Rng& rng);
// Hilbert-Schmidt distributed full-rank density matrix G G^dagger / Tr.
OperatorMatrix random_density_matrix(int dim, Rng& rng);
ComplexVector random_state_vector(int dim, Rng& rng);

}  // namespace icpovm
