#include "icpovm/frame_engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "icpovm/errors.hpp"

namespace icpovm {

namespace {

ComplexMatrix vectorize_columns(const std::vector<OperatorMatrix>& ops) {
  const int d = ops.front().dim();
  ComplexMatrix out(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(ops.size()));
  for (std::size_t i = 0; i < ops.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = vectorize(ops[i].matrix());
  return out;
}

// sum_{i in [begin, end)} w_i |x_i>><<x_i|
ComplexMatrix weighted_gram(const ComplexMatrix& columns, const std::vector<double>& weights,
                            Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index count = end - begin;
  const auto block = columns.middleCols(begin, count);
  RealVector w(count);
  for (Eigen::Index i = 0; i < count; ++i) w(i) = weights[static_cast<std::size_t>(begin + i)];
  return block * w.cast<Complex>().asDiagonal() * block.adjoint();
}

void require_dims(const std::vector<OperatorMatrix>& ops, const char* what) {
  if (ops.empty()) throw InvalidInputError(std::string(what) + " must have at least one element");
  const int d = ops.front().dim();
  for (const auto& op : ops) {
    if (op.dim() != d) throw DimensionError(std::string(what) + ": elements differ in dimension");
  }
}

void require_aligned(const OperatorFrame& frame, const DualFrame& dual) {
  if (frame.dim() != dual.dim()) throw DimensionError("frame and dual differ in dimension");
  if (frame.size() != dual.size()) throw DimensionError("frame and dual differ in length");
}

std::vector<OperatorMatrix> columns_to_operators(const ComplexMatrix& columns, int dim,
                                                 bool hermitize) {
  std::vector<OperatorMatrix> out;
  out.reserve(static_cast<std::size_t>(columns.cols()));
  for (Eigen::Index i = 0; i < columns.cols(); ++i) {
    ComplexMatrix op = devectorize(ComplexVector(columns.col(i)), dim);
    out.emplace_back(hermitize ? hermitian_part(op) : op);
  }
  return out;
}

}  // namespace

FrameOperator::FrameOperator(int dim, ComplexMatrix matrix) : dim_(dim), matrix_(std::move(matrix)) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_) * dim_;
  if (dim_ <= 0 || matrix_.rows() != n || matrix_.cols() != n) {
    throw DimensionError("frame operator must be d^2 x d^2");
  }
}

OperatorFrame::OperatorFrame(std::vector<OperatorMatrix> elements, std::vector<double> weights)
    : elements_(std::move(elements)), weights_(std::move(weights)) {
  require_dims(elements_, "operator frame");
  if (weights_.empty()) weights_.assign(elements_.size(), 1.0);
  if (weights_.size() != elements_.size()) {
    throw DimensionError("operator frame: weights and elements differ in length");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InvalidInputError("operator frame: weights must be positive and finite");
    }
  }
  auto columns = std::make_shared<ComplexMatrix>(vectorize_columns(elements_));
  frame_operator_ = std::make_shared<FrameOperator>(
      dim(), hermitian_part(weighted_gram(*columns, weights_, 0, columns->cols())));
  vectorized_ = std::move(columns);
}

bool OperatorFrame::all_hermitian(double tol) const {
  return std::all_of(elements_.begin(), elements_.end(),
                     [tol](const OperatorMatrix& op) { return op.is_hermitian(tol); });
}

DualFrame::DualFrame(std::vector<OperatorMatrix> elements) : elements_(std::move(elements)) {
  require_dims(elements_, "dual frame");
}

ComplexMatrix DualFrame::vectorized() const { return vectorize_columns(elements_); }

Povm::Povm(OperatorFrame frame, double tol) : frame_(std::move(frame)) {
  const int d = frame_.dim();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  std::vector<OperatorMatrix> hermitized;
  hermitized.reserve(frame_.size());
  for (std::size_t i = 0; i < frame_.size(); ++i) {
    const auto& element = frame_[i];
    if (!element.is_hermitian(tol)) {
      throw InvalidInputError("POVM element " + std::to_string(i) + " is not Hermitian");
    }
    OperatorMatrix h(hermitian_part(element.matrix()), OperatorRole::povm_element);
    if (!is_psd(h, tol)) {
      throw InvalidInputError("POVM element " + std::to_string(i) + " is not positive semidefinite");
    }
    total += frame_.weight(i) * h.matrix();
    hermitized.push_back(std::move(h));
  }
  const double deviation = max_abs(total - ComplexMatrix::Identity(d, d));
  if (deviation > tol) {
    throw InvalidInputError("POVM elements do not sum to identity (max deviation " +
                            format_number(deviation) + ")");
  }
  frame_ = OperatorFrame(std::move(hermitized), frame_.weights());
}

Povm::Povm(std::vector<OperatorMatrix> elements, std::vector<double> weights, double tol)
    : Povm(OperatorFrame(std::move(elements), std::move(weights)), tol) {}

FrameOperator frame_operator(const OperatorFrame& frame, std::size_t chunks) {
  if (chunks <= 1) return frame.frame_operator();
  const Eigen::Index n = static_cast<Eigen::Index>(frame.size());
  chunks = std::min<std::size_t>(chunks, frame.size());
  const ComplexMatrix& columns = frame.vectorized();
  std::vector<std::future<ComplexMatrix>> partial;
  partial.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const Eigen::Index begin = n * static_cast<Eigen::Index>(c) / static_cast<Eigen::Index>(chunks);
    const Eigen::Index end = n * static_cast<Eigen::Index>(c + 1) / static_cast<Eigen::Index>(chunks);
    partial.push_back(std::async(std::launch::async, [&columns, &frame, begin, end] {
      return weighted_gram(columns, frame.weights(), begin, end);
    }));
  }
  const Eigen::Index dd = columns.rows();
  ComplexMatrix total = ComplexMatrix::Zero(dd, dd);
  for (auto& p : partial) total += p.get();
  return FrameOperator(frame.dim(), hermitian_part(total));
}

FrameBounds frame_bounds(const FrameOperator& op, double rank_tol) {
  const auto eig = eig_hermitian(op.matrix());
  FrameBounds bounds;
  bounds.lower = eig.values(0);
  bounds.upper = eig.values(eig.values.size() - 1);
  bounds.is_frame = bounds.upper > 0.0 && bounds.lower > rank_tol * bounds.upper;
  return bounds;
}

ComplexMatrix frame_operator_inverse(const FrameOperator& op, double rank_tol) {
  const auto eig = eig_hermitian(op.matrix());
  const double upper = eig.values(eig.values.size() - 1);
  const double cutoff = rank_tol * upper;
  if (!(upper > 0.0) || eig.values(0) <= cutoff) {
    throw PreconditionError("frame operator is singular (smallest eigenvalue " +
                            format_number(eig.values(0)) + ", cutoff " +
                            format_number(cutoff) + ")");
  }
  RealVector inv = eig.values;
  for (Eigen::Index k = 0; k < inv.size(); ++k) inv(k) = inv(k) > cutoff ? 1.0 / inv(k) : 0.0;
  return hermitian_part(eig.vectors * inv.cast<Complex>().asDiagonal() * eig.vectors.adjoint());
}

bool min_outcome_check(const Povm& povm) {
  const auto d = static_cast<std::size_t>(povm.dim());
  return povm.size() >= d * d;
}

bool is_info_complete(const Povm& povm, double rank_tol) {
  if (!min_outcome_check(povm)) return false;
  return frame_bounds(povm.frame().frame_operator(), rank_tol).is_frame;
}

DualFrame canonical_dual(const OperatorFrame& frame, double rank_tol) {
  const ComplexMatrix finv = frame_operator_inverse(frame.frame_operator(), rank_tol);
  const ComplexMatrix theta = finv * frame.vectorized();
  return DualFrame(columns_to_operators(theta, frame.dim(), frame.all_hermitian()));
}

DualFrame dual_family(const OperatorFrame& frame, std::span<const OperatorMatrix> free_ops,
                      double rank_tol) {
  if (free_ops.size() != frame.size()) {
    throw DimensionError("dual_family: need one free operator per frame element");
  }
  std::vector<OperatorMatrix> y_list(free_ops.begin(), free_ops.end());
  require_dims(y_list, "dual_family free operators");
  if (y_list.front().dim() != frame.dim()) {
    throw DimensionError("dual_family: free operators differ in dimension from the frame");
  }
  const ComplexMatrix finv = frame_operator_inverse(frame.frame_operator(), rank_tol);
  const ComplexMatrix& xi = frame.vectorized();
  const ComplexMatrix y = vectorize_columns(y_list);
  const ComplexMatrix canonical = finv * xi;
  // gram(j, i) = <<Xi_j|F^-1|Xi_i>>
  const ComplexMatrix gram = xi.adjoint() * canonical;
  RealVector w(static_cast<Eigen::Index>(frame.size()));
  for (std::size_t i = 0; i < frame.size(); ++i) w(static_cast<Eigen::Index>(i)) = frame.weight(i);
  const ComplexMatrix theta = canonical + y - y * w.cast<Complex>().asDiagonal() * gram;

  const bool hermitize =
      frame.all_hermitian() &&
      std::all_of(y_list.begin(), y_list.end(), [](const OperatorMatrix& op) { return op.is_hermitian(); });
  return DualFrame(columns_to_operators(theta, frame.dim(), hermitize));
}

std::vector<Complex> data_processing(const DualFrame& dual, const OperatorMatrix& op) {
  if (dual.dim() != op.dim()) throw DimensionError("data_processing: dimension mismatch");
  std::vector<Complex> out;
  out.reserve(dual.size());
  for (const auto& theta : dual.elements()) out.push_back(hs_inner(theta, op));
  return out;
}

bool check_biorthogonal(const OperatorFrame& frame, const DualFrame& dual, double tol) {
  require_aligned(frame, dual);
  const ComplexMatrix gram = dual.vectorized().adjoint() * frame.vectorized();
  const auto n = gram.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex expected = i == j ? Complex(1.0) : Complex(0.0);
      if (std::abs(frame.weight(static_cast<std::size_t>(i)) * gram(i, j) - expected) > tol) return false;
    }
  }
  return true;
}

OperatorMatrix reconstruct(const OperatorFrame& frame, const DualFrame& dual,
                           const OperatorMatrix& op) {
  require_aligned(frame, dual);
  if (op.dim() != frame.dim()) throw DimensionError("reconstruct: dimension mismatch");
  const int d = frame.dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    out += frame.weight(i) * hs_inner(dual[i], op) * frame[i].matrix();
  }
  return OperatorMatrix(out);
}

ComplexMatrix frame_dual_resolution(const OperatorFrame& frame, const DualFrame& dual) {
  require_aligned(frame, dual);
  RealVector w(static_cast<Eigen::Index>(frame.size()));
  for (std::size_t i = 0; i < frame.size(); ++i) w(static_cast<Eigen::Index>(i)) = frame.weight(i);
  return frame.vectorized() * w.cast<Complex>().asDiagonal() * dual.vectorized().adjoint();
}

Povm povm_from_positive_frame(std::span<const OperatorMatrix> positive, double psd_tol,
                              double rank_tol) {
  std::vector<OperatorMatrix> ks(positive.begin(), positive.end());
  require_dims(ks, "positive frame");
  const int d = ks.front().dim();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!is_psd(ks[i], psd_tol)) {
      throw InvalidInputError("positive frame element " + std::to_string(i) +
                              " is not positive semidefinite");
    }
    sum += ks[i].matrix();
  }
  const OperatorMatrix s_inv_sqrt = inv_sqrt_psd(OperatorMatrix(hermitian_part(sum)), rank_tol);
  std::vector<OperatorMatrix> elements;
  elements.reserve(ks.size());
  for (const auto& k : ks) {
    elements.emplace_back(hermitian_part(s_inv_sqrt.matrix() * k.matrix() * s_inv_sqrt.matrix()));
  }
  return Povm(std::move(elements), {}, psd_tol);
}

}  // namespace icpovm
