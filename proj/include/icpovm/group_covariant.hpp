#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "icpovm/frame_engine.hpp"
#include "icpovm/matrix_core.hpp"

namespace icpovm {

// Absolute guard on |Tr[U^dagger nu]| and <<nu|P_sigma|nu>> before dividing.
inline constexpr double kConditionTol = 1e-8;

// Density matrix nu seeding a covariant POVM U_g nu U_g^dagger.
class FiducialState {
 public:
  explicit FiducialState(OperatorMatrix nu);
  static FiducialState pure(const ComplexVector& psi);
  static FiducialState maximally_mixed(int dim);

  int dim() const { return nu_.dim(); }
  const OperatorMatrix& nu() const { return nu_; }
  double purity() const;  // Tr[nu^2]

 private:
  OperatorMatrix nu_;
};

// Either a finite list of unitaries with weights d mu(g) summing to d, or the
// orthogonal projectors onto the invariant subspaces of U_g (x) U_g^* on the
// doubled space.
class GroupRepSpec {
 public:
  enum class Kind { finite_list, subspace_decomposition };

  static GroupRepSpec finite_list(std::vector<OperatorMatrix> unitaries, std::vector<double> weights);
  static GroupRepSpec subspace_decomposition(int dim, std::vector<ComplexMatrix> projectors);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::vector<OperatorMatrix>& unitaries() const { return unitaries_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<ComplexMatrix>& projectors() const { return projectors_; }
  // Index of the subspace holding |I>>/sqrt(d) (subspace decompositions only).
  std::size_t trivial_subspace() const { return trivial_; }

 private:
  GroupRepSpec() = default;

  Kind kind_ = Kind::finite_list;
  int dim_ = 0;
  std::vector<OperatorMatrix> unitaries_;
  std::vector<double> weights_;
  std::vector<ComplexMatrix> projectors_;
  std::size_t trivial_ = 0;
};

// ---------------------------------------------------------------------------
// Z_d x Z_d clock-and-shift family. Pairs (m, n) are flattened as m * d + n.

// U_{m,n} = sum_k exp(2 pi i k m / d) |k><k (+) n|
OperatorMatrix zd_unitary(int d, int m, int n);
std::vector<OperatorMatrix> zd_unitaries(int d);

// d^2 elements (1/d) U_{m,n} nu U_{m,n}^dagger, unit weights.
Povm zd_covariant_povm(int d, const FiducialState& nu);

struct ZdCondition {
  bool satisfied = false;
  std::vector<double> magnitudes;  // |Tr[U_{p,q}^dagger nu]|, index p * d + q
  double min_magnitude = 0.0;
};

ZdCondition zd_invcond(int d, const FiducialState& nu, double tol = kConditionTol);

// Pure state proportional to sum_n alpha^n |n>, 0 < |alpha| < 1.
FiducialState zd_fiducial(int d, Complex alpha);

// Theta_{m,n} = (1/d) sum_{p,q} exp(2 pi i (n p - m q) / d) U_{p,q} / Tr[U_{p,q} nu]
DualFrame zd_dual_closed_form(int d, const FiducialState& nu, double tol = kConditionTol);

// U_{m,n} with weights 1/d.
GroupRepSpec zd_finite_rep(int d);
// d^2 one-dimensional subspaces spanned by |U_{m,n}>>/sqrt(d).
GroupRepSpec zd_subspace_decomposition(int d);

// ---------------------------------------------------------------------------
// SU(d): span of |I>>/sqrt(d) and its orthogonal complement.

GroupRepSpec sud_subspace_decomposition(int d);
FrameOperator sud_frame_operator(int d, const FiducialState& nu);
// xi = ((d^2 - 1) nu - (d - Tr[nu^2]) I) / (d Tr[nu^2] - 1)
OperatorMatrix sud_canonical_dual(int d, const FiducialState& nu, double tol = kConditionTol);

// Single-qudit Clifford group modulo phases for prime d, weights d / |G|.
// It is a unitary 2-design, so the frame operator of its orbit equals the
// SU(d) group integral exactly.
GroupRepSpec clifford_design(int d);

// ---------------------------------------------------------------------------
// Generic covariant machinery.

// Elements U_g nu U_g^dagger with the representation's weights.
Povm covariant_povm(const GroupRepSpec& rep, const FiducialState& nu);
// Elements U_g xi U_g^dagger, index-aligned with covariant_povm.
DualFrame covariant_dual(const GroupRepSpec& rep, const OperatorMatrix& xi);

// F = d sum_sigma (<<nu|P_sigma|nu>> / Tr[P_sigma]) P_sigma
FrameOperator subspace_frame_operator(const GroupRepSpec& rep, const FiducialState& nu);

struct SubspaceDual {
  FrameOperator inverse;
  OperatorMatrix xi;  // seed of the covariant canonical dual
};

// Throws SubspaceConditionError naming the first sigma with
// <<nu|P_sigma|nu>> <= tol.
SubspaceDual subspace_inverse_and_dual(const GroupRepSpec& rep, const FiducialState& nu,
                                       double tol = kConditionTol);

struct FiducialConstruction {
  FiducialState fiducial;
  double alpha = 0.0;
  std::vector<double> phases;         // theta_mu, per subspace (0 for the trivial one)
  std::vector<std::size_t> labels;    // j(mu), per subspace
};

// nu = I/d + alpha sum_{mu != 0} (e^{i theta_mu} Psi_j^(mu) + h.c.), with alpha
// halved from alpha_start until nu is PSD (min eigenvalue >= 1e-8) and every
// <<nu|P_sigma|nu>> >= 1e-8. Throws PreconditionError describing the best
// candidate when the search is exhausted.
FiducialConstruction build_fiducial_from_subspaces(const GroupRepSpec& rep,
                                                   double alpha_start = 0.25);

struct BellForm {
  OperatorMatrix reduced;  // Tr_A[(I (x) nu^T)|U>><<U|]
  double residual = 0.0;   // max |reduced - U nu U^dagger|
};

BellForm bell_form(const OperatorMatrix& u, const FiducialState& nu);

// Haar-distributed unitaries from QR of complex Ginibre matrices with the
// diagonal phases of R absorbed. Sample k uses sub-seed derive_seed(seed, k).
std::vector<OperatorMatrix> haar_sample(int d, std::uint64_t seed, std::size_t count);

}  // namespace icpovm
