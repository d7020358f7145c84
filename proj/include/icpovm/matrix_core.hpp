#pragma once

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace icpovm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Entrywise tolerance for Hermitian-flagged operators.
inline constexpr double kHermitianTol = 1e-12;
// Default slack on the smallest eigenvalue when testing positivity.
inline constexpr double kPsdTol = 1e-10;
// Entrywise tolerance for unitarity checks.
inline constexpr double kUnitaryTol = 1e-10;

enum class OperatorRole { generic, observable, density, unitary, povm_element };

std::string_view to_string(OperatorRole role);
OperatorRole role_from_string(std::string_view name);

// Dense d x d complex matrix acting on the system space.
//
// Instances are immutable. Roles observable, density and povm_element imply
// Hermiticity and are validated on construction; role unitary is validated
// against U U^dagger = I. Density matrices are additionally required to be
// positive with unit trace.
class OperatorMatrix {
 public:
  explicit OperatorMatrix(ComplexMatrix entries, OperatorRole role = OperatorRole::generic);

  static OperatorMatrix identity(int dim);
  static OperatorMatrix zero(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& matrix() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }
  OperatorRole role() const { return role_; }

  OperatorMatrix with_role(OperatorRole role) const { return OperatorMatrix(entries_, role); }
  OperatorMatrix adjoint() const { return OperatorMatrix(entries_.adjoint()); }
  Complex trace() const { return entries_.trace(); }
  bool is_hermitian(double tol = kHermitianTol) const;

 private:
  ComplexMatrix entries_;
  OperatorRole role_;
};

// |A>> on the doubled space, entry n*d + m holding A_nm.
class DoubledVector {
 public:
  DoubledVector(int dim, ComplexVector entries);

  int dim() const { return dim_; }
  const ComplexVector& entries() const { return entries_; }

 private:
  int dim_;
  ComplexVector entries_;
};

DoubledVector vectorize(const OperatorMatrix& op);
OperatorMatrix devectorize(const DoubledVector& vec, OperatorRole role = OperatorRole::generic);

// Raw forms used by the frame machinery, which works on d^2 x N blocks.
ComplexVector vectorize(const ComplexMatrix& op);
ComplexMatrix devectorize(const ComplexVector& vec, int dim);

// <<A|B>> = sum_k conj(a_k) b_k.
Complex inner(const DoubledVector& a, const DoubledVector& b);

// Hilbert-Schmidt product Tr[A^dagger B].
Complex hs_inner(const OperatorMatrix& a, const OperatorMatrix& b);

enum class SandwichMode {
  transpose,  // (A (x) B)|C>>       = |A C B^T>>
  adjoint,    // (A (x) B^dagger)|C>> = |A C B^*>>
};

DoubledVector sandwich_vectorized(const OperatorMatrix& a, const OperatorMatrix& b,
                                  const OperatorMatrix& c,
                                  SandwichMode mode = SandwichMode::transpose);

struct HermitianEigen {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns are the eigenvectors
};

// Throws InvalidInputError if max|A - A^dagger| exceeds tol * max(1, max|A|).
HermitianEigen eig_hermitian(const ComplexMatrix& a, double tol = 1e-10);
HermitianEigen eig_hermitian(const OperatorMatrix& a);

bool is_psd(const OperatorMatrix& a, double tol = kPsdTol);

// A^{-1/2} through the eigendecomposition. Throws PreconditionError when the
// smallest eigenvalue is not above rank_tol.
OperatorMatrix inv_sqrt_psd(const OperatorMatrix& a, double rank_tol = 1e-10);

// Small helpers shared across modules.
double max_abs(const ComplexMatrix& a);
ComplexMatrix hermitian_part(const ComplexMatrix& a);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
bool is_unitary(const ComplexMatrix& u, double tol = kUnitaryTol);

// Four significant digits for diagnostics, e.g. "2.531e-17".
std::string format_number(double x);

}  // namespace icpovm
