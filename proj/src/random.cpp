#include "icpovm/random.hpp"

#include <cmath>
#include <numbers>

namespace icpovm {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ComplexMatrix random_operator(int dim, Rng& rng) {
  ComplexMatrix out(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) out(i, j) = rng.complex_normal();
  }
  return out;
}

OperatorMatrix random_hermitian(int dim, Rng& rng) {
  return OperatorMatrix(hermitian_part(random_operator(dim, rng)), OperatorRole::observable);
}

OperatorMatrix random_density_matrix(int dim, Rng& rng) {
  const ComplexMatrix g = random_operator(dim, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return OperatorMatrix(hermitian_part(rho), OperatorRole::density);
}

ComplexVector random_state_vector(int dim, Rng& rng) {
  ComplexVector psi(dim);
  for (int i = 0; i < dim; ++i) psi(i) = rng.complex_normal();
  return psi / psi.norm();
}

}  // namespace icpovm
