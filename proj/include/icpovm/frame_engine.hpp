#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "icpovm/matrix_core.hpp"

namespace icpovm {

// Default thresholds. rank_tol is relative to the largest frame-operator
// eigenvalue; psd_tol and recon_tol are absolute.
struct Tolerances {
  double rank_tol = 1e-10;
  double psd_tol = kPsdTol;
  double recon_tol = 1e-9;
};

// F = sum_i w_i |Xi_i>><<Xi_i| as a d^2 x d^2 matrix on the doubled space.
class FrameOperator {
 public:
  FrameOperator(int dim, ComplexMatrix matrix);

  int dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  int dim_;
  ComplexMatrix matrix_;
};

// Ordered, weighted list of operators. Weights default to 1; for discretized
// continuous groups they carry the measure d mu(g), normalized to total d.
// The frame operator is computed once on construction.
class OperatorFrame {
 public:
  explicit OperatorFrame(std::vector<OperatorMatrix> elements, std::vector<double> weights = {});

  int dim() const { return elements_.front().dim(); }
  std::size_t size() const { return elements_.size(); }
  const std::vector<OperatorMatrix>& elements() const { return elements_; }
  const std::vector<double>& weights() const { return weights_; }
  const OperatorMatrix& operator[](std::size_t i) const { return elements_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  // d^2 x N matrix whose columns are |Xi_i>>.
  const ComplexMatrix& vectorized() const { return *vectorized_; }
  const FrameOperator& frame_operator() const { return *frame_operator_; }
  bool all_hermitian(double tol = kHermitianTol) const;

 private:
  std::vector<OperatorMatrix> elements_;
  std::vector<double> weights_;
  std::shared_ptr<const ComplexMatrix> vectorized_;
  std::shared_ptr<const FrameOperator> frame_operator_;
};

// Operators Theta_i index-aligned with a source frame.
class DualFrame {
 public:
  explicit DualFrame(std::vector<OperatorMatrix> elements);

  int dim() const { return elements_.front().dim(); }
  std::size_t size() const { return elements_.size(); }
  const std::vector<OperatorMatrix>& elements() const { return elements_; }
  const OperatorMatrix& operator[](std::size_t i) const { return elements_[i]; }
  ComplexMatrix vectorized() const;

 private:
  std::vector<OperatorMatrix> elements_;
};

// A frame of positive operators with sum_i w_i Pi_i = I.
class Povm {
 public:
  // Throws InvalidInputError unless every element is Hermitian and PSD within
  // tol and the weighted sum equals identity within tol.
  explicit Povm(OperatorFrame frame, double tol = kPsdTol);
  Povm(std::vector<OperatorMatrix> elements, std::vector<double> weights = {},
       double tol = kPsdTol);

  const OperatorFrame& frame() const { return frame_; }
  int dim() const { return frame_.dim(); }
  std::size_t size() const { return frame_.size(); }
  const OperatorMatrix& operator[](std::size_t i) const { return frame_[i]; }
  double weight(std::size_t i) const { return frame_.weight(i); }

 private:
  OperatorFrame frame_;
};

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool is_frame = false;
};

// chunks > 1 accumulates partial sums concurrently; the cached single-pass
// result is returned for chunks <= 1.
FrameOperator frame_operator(const OperatorFrame& frame, std::size_t chunks = 1);

FrameBounds frame_bounds(const FrameOperator& op, double rank_tol = Tolerances{}.rank_tol);

// Pseudo-inverse of F through its eigendecomposition. Throws
// PreconditionError when F is singular at the relative cutoff.
ComplexMatrix frame_operator_inverse(const FrameOperator& op,
                                     double rank_tol = Tolerances{}.rank_tol);

// False as soon as N < d^2, without touching F.
bool min_outcome_check(const Povm& povm);
bool is_info_complete(const Povm& povm, double rank_tol = Tolerances{}.rank_tol);

DualFrame canonical_dual(const OperatorFrame& frame, double rank_tol = Tolerances{}.rank_tol);

// |Theta_i>> = F^-1|Xi_i>> + |Y_i>> - sum_j w_j <<Xi_j|F^-1|Xi_i>> |Y_j>>.
// Every choice of free operators yields a valid dual.
DualFrame dual_family(const OperatorFrame& frame, std::span<const OperatorMatrix> free_ops,
                      double rank_tol = Tolerances{}.rank_tol);

// f_i(O) = Tr[Theta_i^dagger O].
std::vector<Complex> data_processing(const DualFrame& dual, const OperatorMatrix& op);

// w_i Tr[Theta_i^dagger Xi_j] = delta_ij for all pairs.
bool check_biorthogonal(const OperatorFrame& frame, const DualFrame& dual, double tol = 1e-9);

// sum_i w_i Tr[Theta_i^dagger A] Xi_i
OperatorMatrix reconstruct(const OperatorFrame& frame, const DualFrame& dual,
                           const OperatorMatrix& op);

// sum_i w_i |Xi_i>><<Theta_i|, the identity on the doubled space for a valid dual.
ComplexMatrix frame_dual_resolution(const OperatorFrame& frame, const DualFrame& dual);

// K_i -> S^{-1/2} K_i S^{-1/2} with S = sum_i K_i.
Povm povm_from_positive_frame(std::span<const OperatorMatrix> positive,
                              double psd_tol = kPsdTol, double rank_tol = 1e-10);

}  // namespace icpovm
