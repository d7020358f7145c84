#include "icpovm/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

#include "icpovm/errors.hpp"

namespace icpovm {

namespace {

constexpr double kDensityTraceTol = 1e-10;

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

std::string_view to_string(OperatorRole role) {
  switch (role) {
    case OperatorRole::generic: return "generic";
    case OperatorRole::observable: return "observable";
    case OperatorRole::density: return "density";
    case OperatorRole::unitary: return "unitary";
    case OperatorRole::povm_element: return "povm-element";
  }
  return "generic";
}

OperatorRole role_from_string(std::string_view name) {
  for (auto role : {OperatorRole::generic, OperatorRole::observable, OperatorRole::density,
                    OperatorRole::unitary, OperatorRole::povm_element}) {
    if (to_string(role) == name) return role;
  }
  throw InvalidInputError("unknown operator role '" + std::string(name) + "'");
}

OperatorMatrix::OperatorMatrix(ComplexMatrix entries, OperatorRole role)
    : entries_(std::move(entries)), role_(role) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw DimensionError("operator matrix must be square and non-empty, got " +
                         std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()));
  }
  switch (role_) {
    case OperatorRole::generic:
      break;
    case OperatorRole::unitary:
      if (!is_unitary(entries_)) throw InvalidInputError("matrix flagged unitary is not unitary");
      break;
    case OperatorRole::density:
      if (!is_hermitian()) throw InvalidInputError("density matrix is not Hermitian");
      if (std::abs(entries_.trace() - Complex(1.0)) > kDensityTraceTol) {
        throw InvalidInputError("density matrix does not have unit trace");
      }
      if (!is_psd(*this)) throw InvalidInputError("density matrix is not positive semidefinite");
      break;
    case OperatorRole::observable:
    case OperatorRole::povm_element:
      if (!is_hermitian()) {
        throw InvalidInputError(std::string(to_string(role_)) + " is not Hermitian");
      }
      break;
  }
}

OperatorMatrix OperatorMatrix::identity(int dim) {
  return OperatorMatrix(ComplexMatrix::Identity(dim, dim));
}

OperatorMatrix OperatorMatrix::zero(int dim) {
  return OperatorMatrix(ComplexMatrix::Zero(dim, dim));
}

bool OperatorMatrix::is_hermitian(double tol) const {
  return max_abs(entries_ - entries_.adjoint()) <= tol;
}

DoubledVector::DoubledVector(int dim, ComplexVector entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (dim_ <= 0 || entries_.size() != static_cast<Eigen::Index>(dim_) * dim_) {
    throw DimensionError("doubled vector length must be d^2");
  }
}

ComplexVector vectorize(const ComplexMatrix& op) {
  const auto d = op.rows();
  ComplexVector out(d * d);
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index m = 0; m < d; ++m) out(n * d + m) = op(n, m);
  }
  return out;
}

ComplexMatrix devectorize(const ComplexVector& vec, int dim) {
  if (vec.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw DimensionError("devectorize: length is not d^2");
  }
  ComplexMatrix out(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int m = 0; m < dim; ++m) out(n, m) = vec(n * dim + m);
  }
  return out;
}

DoubledVector vectorize(const OperatorMatrix& op) {
  return DoubledVector(op.dim(), vectorize(op.matrix()));
}

OperatorMatrix devectorize(const DoubledVector& vec, OperatorRole role) {
  return OperatorMatrix(devectorize(vec.entries(), vec.dim()), role);
}

Complex inner(const DoubledVector& a, const DoubledVector& b) {
  require_same_dim(a.dim(), b.dim(), "inner");
  return a.entries().dot(b.entries());
}

Complex hs_inner(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "hs_inner");
  return (a.matrix().adjoint() * b.matrix()).trace();
}

DoubledVector sandwich_vectorized(const OperatorMatrix& a, const OperatorMatrix& b,
                                  const OperatorMatrix& c, SandwichMode mode) {
  require_same_dim(a.dim(), b.dim(), "sandwich_vectorized");
  require_same_dim(a.dim(), c.dim(), "sandwich_vectorized");
  const ComplexMatrix right =
      mode == SandwichMode::transpose ? ComplexMatrix(b.matrix().transpose())
                                      : ComplexMatrix(b.matrix().conjugate());
  return DoubledVector(a.dim(), vectorize(ComplexMatrix(a.matrix() * c.matrix() * right)));
}

HermitianEigen eig_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) throw DimensionError("eig_hermitian: matrix is not square");
  const double scale = std::max(1.0, max_abs(a));
  if (max_abs(a - a.adjoint()) > tol * scale) {
    throw InvalidInputError("eig_hermitian: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) {
    throw PreconditionError("eig_hermitian: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianEigen eig_hermitian(const OperatorMatrix& a) { return eig_hermitian(a.matrix()); }

bool is_psd(const OperatorMatrix& a, double tol) {
  if (!a.is_hermitian(std::max(kHermitianTol, tol))) return false;
  const auto eig = eig_hermitian(a.matrix());
  return eig.values(0) >= -tol;
}

OperatorMatrix inv_sqrt_psd(const OperatorMatrix& a, double rank_tol) {
  const auto eig = eig_hermitian(a.matrix());
  if (eig.values(0) <= rank_tol) {
    throw PreconditionError("inv_sqrt_psd: matrix is singular (smallest eigenvalue " +
                            format_number(eig.values(0)) + ")");
  }
  const RealVector scale = eig.values.cwiseSqrt().cwiseInverse();
  ComplexMatrix out = eig.vectors * scale.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return OperatorMatrix(hermitian_part(out));
}

double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols())) <= tol;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(4) << x;
  return os.str();
}

}  // namespace icpovm
