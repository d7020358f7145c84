#include "icpovm/group_covariant.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "icpovm/errors.hpp"
#include "icpovm/random.hpp"

namespace icpovm {

namespace {

constexpr double kProjectorTol = 1e-10;
constexpr double kWeightSumTol = 1e-9;
constexpr double kFiducialMinEigen = 1e-8;
constexpr int kAlphaHalvings = 40;

Complex root_of_unity(int d, long long k) {
  const long long r = ((k % d) + d) % d;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / d);
}

void require_dim(int d) {
  if (d < 1) throw ParameterError("dimension must be positive, got " + std::to_string(d));
}

void require_fiducial_dim(int d, const FiducialState& nu) {
  if (nu.dim() != d) throw DimensionError("fiducial dimension does not match d");
}

void require_kind(const GroupRepSpec& rep, GroupRepSpec::Kind kind, const char* what) {
  if (rep.kind() != kind) {
    throw InvalidInputError(std::string(what) + ": representation has the wrong kind");
  }
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k) {
    if (n % k == 0) return false;
  }
  return true;
}

// Rotates v so that its largest component (first one, in index order, within
// 1e-9 of the maximum) is real and positive. Makes eigenvector phases
// independent of solver conventions.
ComplexVector fix_phase(const ComplexVector& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) >= peak - 1e-9) return v * (std::conj(v(k)) / std::abs(v(k)));
  }
  return v;
}

// <<nu|P|nu>>
double subspace_overlap(const ComplexMatrix& projector, const ComplexVector& nu_vec) {
  return nu_vec.dot(projector * nu_vec).real();
}

}  // namespace

// ---------------------------------------------------------------------------

FiducialState::FiducialState(OperatorMatrix nu)
    : nu_([&] {
        if (!nu.is_hermitian(1e-10)) throw InvalidInputError("fiducial state is not Hermitian");
        return OperatorMatrix(hermitian_part(nu.matrix()), OperatorRole::density);
      }()) {}

FiducialState FiducialState::pure(const ComplexVector& psi) {
  if (psi.size() == 0 || std::abs(psi.norm() - 1.0) > 1e-10) {
    throw InvalidInputError("pure fiducial requires a normalized vector");
  }
  return FiducialState(OperatorMatrix(psi * psi.adjoint()));
}

FiducialState FiducialState::maximally_mixed(int dim) {
  require_dim(dim);
  return FiducialState(OperatorMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim)));
}

double FiducialState::purity() const {
  return (nu_.matrix() * nu_.matrix()).trace().real();
}

// ---------------------------------------------------------------------------

GroupRepSpec GroupRepSpec::finite_list(std::vector<OperatorMatrix> unitaries,
                                       std::vector<double> weights) {
  if (unitaries.empty()) throw InvalidInputError("finite-list representation is empty");
  if (weights.size() != unitaries.size()) {
    throw DimensionError("finite-list representation: weights and unitaries differ in length");
  }
  const int d = unitaries.front().dim();
  double total = 0.0;
  for (std::size_t g = 0; g < unitaries.size(); ++g) {
    if (unitaries[g].dim() != d) throw DimensionError("finite-list representation: mixed dimensions");
    if (!is_unitary(unitaries[g].matrix())) {
      throw InvalidInputError("finite-list representation: element " + std::to_string(g) +
                              " is not unitary");
    }
    if (!(weights[g] > 0.0)) throw InvalidInputError("finite-list representation: non-positive weight");
    total += weights[g];
  }
  if (std::abs(total - d) > kWeightSumTol) {
    throw InvalidInputError("finite-list representation: weights sum to " + format_number(total) +
                            ", expected d = " + std::to_string(d));
  }
  GroupRepSpec rep;
  rep.kind_ = Kind::finite_list;
  rep.dim_ = d;
  rep.unitaries_ = std::move(unitaries);
  rep.weights_ = std::move(weights);
  return rep;
}

GroupRepSpec GroupRepSpec::subspace_decomposition(int dim, std::vector<ComplexMatrix> projectors) {
  require_dim(dim);
  if (projectors.empty()) throw InvalidInputError("subspace decomposition is empty");
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  ComplexMatrix total = ComplexMatrix::Zero(n, n);
  for (std::size_t s = 0; s < projectors.size(); ++s) {
    const auto& p = projectors[s];
    if (p.rows() != n || p.cols() != n) {
      throw DimensionError("subspace decomposition: projectors must be d^2 x d^2");
    }
    if (max_abs(p - p.adjoint()) > kProjectorTol || max_abs(p * p - p) > kProjectorTol) {
      throw InvalidInputError("subspace decomposition: element " + std::to_string(s) +
                              " is not an orthogonal projector");
    }
    for (std::size_t t = 0; t < s; ++t) {
      if (max_abs(p * projectors[t]) > kProjectorTol) {
        throw InvalidInputError("subspace decomposition: projectors " + std::to_string(t) + " and " +
                                std::to_string(s) + " are not orthogonal");
      }
    }
    total += p;
  }
  if (max_abs(total - ComplexMatrix::Identity(n, n)) > kProjectorTol) {
    throw InvalidInputError("subspace decomposition: projectors do not sum to identity");
  }
  const ComplexVector unit = vectorize(ComplexMatrix(ComplexMatrix::Identity(dim, dim))) /
                             std::sqrt(static_cast<double>(dim));
  std::size_t holders = 0;
  std::size_t trivial = 0;
  for (std::size_t s = 0; s < projectors.size(); ++s) {
    if ((projectors[s] * unit - unit).norm() <= 1e-8) {
      ++holders;
      trivial = s;
    }
  }
  if (holders != 1) {
    throw InvalidInputError("subspace decomposition: |I>> must lie in exactly one subspace");
  }
  GroupRepSpec rep;
  rep.kind_ = Kind::subspace_decomposition;
  rep.dim_ = dim;
  rep.projectors_ = std::move(projectors);
  rep.trivial_ = trivial;
  return rep;
}

// ---------------------------------------------------------------------------

OperatorMatrix zd_unitary(int d, int m, int n) {
  require_dim(d);
  if (m < 0 || m >= d || n < 0 || n >= d) {
    throw ParameterError("zd_unitary: indices must lie in [0, d-1]");
  }
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) u(k, (k + n) % d) = root_of_unity(d, static_cast<long long>(k) * m);
  return OperatorMatrix(u, OperatorRole::unitary);
}

std::vector<OperatorMatrix> zd_unitaries(int d) {
  std::vector<OperatorMatrix> out;
  out.reserve(static_cast<std::size_t>(d) * d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) out.push_back(zd_unitary(d, m, n));
  }
  return out;
}

Povm zd_covariant_povm(int d, const FiducialState& nu) {
  require_fiducial_dim(d, nu);
  std::vector<OperatorMatrix> elements;
  elements.reserve(static_cast<std::size_t>(d) * d);
  for (const auto& u : zd_unitaries(d)) {
    const ComplexMatrix e = u.matrix() * nu.nu().matrix() * u.matrix().adjoint() / static_cast<double>(d);
    elements.emplace_back(hermitian_part(e));
  }
  return Povm(std::move(elements));
}

ZdCondition zd_invcond(int d, const FiducialState& nu, double tol) {
  require_fiducial_dim(d, nu);
  ZdCondition cond;
  cond.magnitudes.reserve(static_cast<std::size_t>(d) * d);
  cond.min_magnitude = std::numeric_limits<double>::infinity();
  for (const auto& u : zd_unitaries(d)) {
    const double mag = std::abs(hs_inner(u, nu.nu()));
    cond.magnitudes.push_back(mag);
    cond.min_magnitude = std::min(cond.min_magnitude, mag);
  }
  cond.satisfied = cond.min_magnitude > tol;
  return cond;
}

FiducialState zd_fiducial(int d, Complex alpha) {
  require_dim(d);
  const double a = std::abs(alpha);
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("zd_fiducial: requires 0 < |alpha| < 1");
  const double norm = std::sqrt((1.0 - a * a) / (1.0 - std::pow(a, 2.0 * d)));
  ComplexVector psi(d);
  Complex power(1.0);
  for (int n = 0; n < d; ++n) {
    psi(n) = norm * power;
    power *= alpha;
  }
  return FiducialState::pure(psi);
}

DualFrame zd_dual_closed_form(int d, const FiducialState& nu, double tol) {
  require_fiducial_dim(d, nu);
  const auto units = zd_unitaries(d);
  // Coefficient U_{p,q} / Tr[U_{p,q} nu], with the guard applied to |Tr[U^dagger nu]|.
  std::vector<ComplexMatrix> scaled;
  scaled.reserve(units.size());
  for (std::size_t k = 0; k < units.size(); ++k) {
    const Complex tr = (units[k].matrix() * nu.nu().matrix()).trace();
    if (std::abs(tr) <= tol) {
      throw PreconditionError("zd_dual_closed_form: Tr[U_{" + std::to_string(k / d) + "," +
                              std::to_string(k % d) + "} nu] vanishes");
    }
    scaled.push_back(units[k].matrix() / tr);
  }
  std::vector<OperatorMatrix> theta;
  theta.reserve(units.size());
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      ComplexMatrix acc = ComplexMatrix::Zero(d, d);
      for (int p = 0; p < d; ++p) {
        for (int q = 0; q < d; ++q) {
          acc += root_of_unity(d, static_cast<long long>(n) * p - static_cast<long long>(m) * q) *
                 scaled[static_cast<std::size_t>(p * d + q)];
        }
      }
      theta.emplace_back(hermitian_part(acc / static_cast<double>(d)));
    }
  }
  return DualFrame(std::move(theta));
}

GroupRepSpec zd_finite_rep(int d) {
  auto units = zd_unitaries(d);
  std::vector<double> weights(units.size(), 1.0 / d);
  return GroupRepSpec::finite_list(std::move(units), std::move(weights));
}

GroupRepSpec zd_subspace_decomposition(int d) {
  std::vector<ComplexMatrix> projectors;
  projectors.reserve(static_cast<std::size_t>(d) * d);
  for (const auto& u : zd_unitaries(d)) {
    const ComplexVector v = vectorize(u.matrix());
    projectors.push_back(v * v.adjoint() / static_cast<double>(d));
  }
  return GroupRepSpec::subspace_decomposition(d, std::move(projectors));
}

// ---------------------------------------------------------------------------

GroupRepSpec sud_subspace_decomposition(int d) {
  require_dim(d);
  const ComplexVector id = vectorize(ComplexMatrix(ComplexMatrix::Identity(d, d)));
  const ComplexMatrix p0 = id * id.adjoint() / static_cast<double>(d);
  const ComplexMatrix p1 = ComplexMatrix::Identity(p0.rows(), p0.cols()) - p0;
  return GroupRepSpec::subspace_decomposition(d, {p0, p1});
}

FrameOperator sud_frame_operator(int d, const FiducialState& nu) {
  require_fiducial_dim(d, nu);
  const ComplexVector id = vectorize(ComplexMatrix(ComplexMatrix::Identity(d, d)));
  const ComplexMatrix p0 = id * id.adjoint() / static_cast<double>(d);
  const double coeff = (d * nu.purity() - 1.0) / (static_cast<double>(d) * d - 1.0);
  return FrameOperator(d, p0 + coeff * (ComplexMatrix::Identity(p0.rows(), p0.cols()) - p0));
}

OperatorMatrix sud_canonical_dual(int d, const FiducialState& nu, double tol) {
  require_fiducial_dim(d, nu);
  const double purity = nu.purity();
  const double denom = d * purity - 1.0;
  if (std::abs(denom) <= tol) {
    throw PreconditionError("sud_canonical_dual: d Tr[nu^2] - 1 vanishes (maximally mixed fiducial)");
  }
  const ComplexMatrix xi = ((static_cast<double>(d) * d - 1.0) * nu.nu().matrix() -
                            (d - purity) * ComplexMatrix::Identity(d, d)) / denom;
  return OperatorMatrix(hermitian_part(xi));
}

GroupRepSpec clifford_design(int d) {
  if (!is_prime(d) || d > 7) {
    throw ParameterError("clifford_design: d must be a prime no larger than 7");
  }
  ComplexMatrix fourier(d, d);
  ComplexMatrix phase = ComplexMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      fourier(j, k) = root_of_unity(d, static_cast<long long>(j) * k) / std::sqrt(static_cast<double>(d));
    }
    phase(j, j) = d == 2 ? (j == 0 ? Complex(1.0) : Complex(0.0, 1.0))
                         : root_of_unity(d, static_cast<long long>(j) * (j - 1) / 2);
  }
  const std::vector<ComplexMatrix> generators = {zd_unitary(d, 0, 1).matrix(), fourier, phase};

  // Elements are stored modulo a global phase: the first non-negligible
  // entry (column-major) is rotated onto the positive real axis.
  auto canonical = [](const ComplexMatrix& u) {
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      const Complex z = u(k);
      if (std::abs(z) > 1e-6) return ComplexMatrix(u * (std::conj(z) / std::abs(z)));
    }
    return u;
  };
  auto key = [](const ComplexMatrix& u) {
    std::vector<long long> k;
    k.reserve(static_cast<std::size_t>(2 * u.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      k.push_back(std::llround(u(i).real() * 1e6));
      k.push_back(std::llround(u(i).imag() * 1e6));
    }
    return k;
  };

  std::map<std::vector<long long>, std::size_t> seen;
  std::vector<ComplexMatrix> group;
  std::deque<std::size_t> frontier;
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  seen.emplace(key(id), 0);
  group.push_back(id);
  frontier.push_back(0);
  while (!frontier.empty()) {
    const ComplexMatrix current = group[frontier.front()];
    frontier.pop_front();
    for (const auto& g : generators) {
      ComplexMatrix next = canonical(g * current);
      auto [it, inserted] = seen.emplace(key(next), group.size());
      if (inserted) {
        frontier.push_back(group.size());
        group.push_back(std::move(next));
      }
    }
  }

  std::vector<OperatorMatrix> unitaries;
  unitaries.reserve(group.size());
  for (auto& u : group) unitaries.emplace_back(std::move(u), OperatorRole::unitary);
  std::vector<double> weights(unitaries.size(), static_cast<double>(d) / static_cast<double>(unitaries.size()));
  return GroupRepSpec::finite_list(std::move(unitaries), std::move(weights));
}

// ---------------------------------------------------------------------------

Povm covariant_povm(const GroupRepSpec& rep, const FiducialState& nu) {
  require_kind(rep, GroupRepSpec::Kind::finite_list, "covariant_povm");
  require_fiducial_dim(rep.dim(), nu);
  std::vector<OperatorMatrix> elements;
  elements.reserve(rep.unitaries().size());
  for (const auto& u : rep.unitaries()) {
    elements.emplace_back(hermitian_part(u.matrix() * nu.nu().matrix() * u.matrix().adjoint()));
  }
  return Povm(std::move(elements), rep.weights());
}

DualFrame covariant_dual(const GroupRepSpec& rep, const OperatorMatrix& xi) {
  require_kind(rep, GroupRepSpec::Kind::finite_list, "covariant_dual");
  if (xi.dim() != rep.dim()) throw DimensionError("covariant_dual: dimension mismatch");
  const bool hermitian = xi.is_hermitian();
  std::vector<OperatorMatrix> elements;
  elements.reserve(rep.unitaries().size());
  for (const auto& u : rep.unitaries()) {
    const ComplexMatrix e = u.matrix() * xi.matrix() * u.matrix().adjoint();
    elements.emplace_back(hermitian ? hermitian_part(e) : e);
  }
  return DualFrame(std::move(elements));
}

FrameOperator subspace_frame_operator(const GroupRepSpec& rep, const FiducialState& nu) {
  require_kind(rep, GroupRepSpec::Kind::subspace_decomposition, "subspace_frame_operator");
  require_fiducial_dim(rep.dim(), nu);
  const int d = rep.dim();
  const ComplexVector nu_vec = vectorize(nu.nu().matrix());
  const Eigen::Index n = nu_vec.size();
  ComplexMatrix f = ComplexMatrix::Zero(n, n);
  for (const auto& p : rep.projectors()) {
    const double rank = p.trace().real();
    f += (d * subspace_overlap(p, nu_vec) / rank) * p;
  }
  return FrameOperator(d, hermitian_part(f));
}

SubspaceDual subspace_inverse_and_dual(const GroupRepSpec& rep, const FiducialState& nu, double tol) {
  require_kind(rep, GroupRepSpec::Kind::subspace_decomposition, "subspace_inverse_and_dual");
  require_fiducial_dim(rep.dim(), nu);
  const int d = rep.dim();
  const ComplexVector nu_vec = vectorize(nu.nu().matrix());
  const Eigen::Index n = nu_vec.size();
  ComplexMatrix finv = ComplexMatrix::Zero(n, n);
  ComplexVector xi = ComplexVector::Zero(n);
  for (std::size_t s = 0; s < rep.projectors().size(); ++s) {
    const auto& p = rep.projectors()[s];
    const double overlap = subspace_overlap(p, nu_vec);
    if (overlap <= tol) throw SubspaceConditionError(s, overlap);
    const double coeff = p.trace().real() / (d * overlap);
    finv += coeff * p;
    xi += coeff * (p * nu_vec);
  }
  return {FrameOperator(d, hermitian_part(finv)), OperatorMatrix(hermitian_part(devectorize(xi, d)))};
}

FiducialConstruction build_fiducial_from_subspaces(const GroupRepSpec& rep, double alpha_start) {
  require_kind(rep, GroupRepSpec::Kind::subspace_decomposition, "build_fiducial_from_subspaces");
  if (!(alpha_start > 0.0)) throw ParameterError("build_fiducial_from_subspaces: alpha must be positive");
  const int d = rep.dim();
  const std::size_t count = rep.projectors().size();
  const ComplexMatrix identity = ComplexMatrix::Identity(d, d);

  // Orthonormal eigenbasis of each P_mu and the chosen label j(mu): the first
  // eigenvector, advanced cyclically past anti-Hermitian ones.
  std::vector<ComplexMatrix> psi(count);
  std::vector<std::size_t> labels(count, 0);
  for (std::size_t mu = 0; mu < count; ++mu) {
    if (mu == rep.trivial_subspace()) continue;
    const auto eig = eig_hermitian(rep.projectors()[mu]);
    std::vector<ComplexMatrix> basis;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
      if (eig.values(k) > 0.5) basis.push_back(devectorize(fix_phase(eig.vectors.col(k)), d));
    }
    std::size_t j = 0;
    while (j + 1 < basis.size() && max_abs(basis[j] + basis[j].adjoint()) <= 1e-8) ++j;
    labels[mu] = j;
    psi[mu] = basis[j];
  }

  // theta_mu = 0 first. If the perturbation cancels on some subspace, which
  // halving alpha cannot repair, retry with golden-angle and then seeded
  // pseudo-random phases.
  std::vector<std::vector<double>> phase_schedule;
  phase_schedule.emplace_back(count, 0.0);
  {
    std::vector<double> golden(count, 0.0);
    const double step = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t mu = 0; mu < count; ++mu) golden[mu] = step * static_cast<double>(mu + 1);
    phase_schedule.push_back(std::move(golden));
    Rng rng(0x5eed);
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::vector<double> random(count, 0.0);
      for (auto& t : random) t = 2.0 * std::numbers::pi * rng.uniform();
      phase_schedule.push_back(std::move(random));
    }
  }

  double best_score = -std::numeric_limits<double>::infinity();
  std::string best_report = "no candidate evaluated";
  for (auto& phases : phase_schedule) {
    phases[rep.trivial_subspace()] = 0.0;
    ComplexMatrix perturbation = ComplexMatrix::Zero(d, d);
    for (std::size_t mu = 0; mu < count; ++mu) {
      if (mu == rep.trivial_subspace()) continue;
      const ComplexMatrix term = std::polar(1.0, phases[mu]) * psi[mu];
      perturbation += term + term.adjoint();
    }
    double alpha = alpha_start;
    for (int step = 0; step <= kAlphaHalvings; ++step, alpha *= 0.5) {
      const ComplexMatrix nu = hermitian_part(identity / static_cast<double>(d) + alpha * perturbation);
      const double min_eig = eig_hermitian(nu).values(0);
      const ComplexVector nu_vec = vectorize(nu);
      double min_overlap = std::numeric_limits<double>::infinity();
      for (const auto& p : rep.projectors()) min_overlap = std::min(min_overlap, subspace_overlap(p, nu_vec));
      const double score = std::min(min_eig, min_overlap);
      if (score > best_score) {
        best_score = score;
        std::ostringstream os;
        os << "alpha=" << alpha << " min eigenvalue=" << min_eig << " min <<nu|P|nu>>=" << min_overlap;
        best_report = os.str();
      }
      if (min_eig >= kFiducialMinEigen && min_overlap >= kConditionTol) {
        return {FiducialState(OperatorMatrix(nu)), alpha, phases, labels};
      }
    }
  }
  throw PreconditionError("build_fiducial_from_subspaces: no valid fiducial found; best candidate " +
                          best_report);
}

BellForm bell_form(const OperatorMatrix& u, const FiducialState& nu) {
  if (u.dim() != nu.dim()) throw DimensionError("bell_form: dimension mismatch");
  const int d = u.dim();
  const ComplexVector u_vec = vectorize(u.matrix());
  const ComplexMatrix joint = kron(ComplexMatrix::Identity(d, d), nu.nu().matrix().transpose()) *
                              (u_vec * u_vec.adjoint());
  // Partial trace over the second (ancilla) factor.
  ComplexMatrix reduced = ComplexMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    for (int np = 0; np < d; ++np) {
      for (int a = 0; a < d; ++a) reduced(n, np) += joint(n * d + a, np * d + a);
    }
  }
  const ComplexMatrix direct = u.matrix() * nu.nu().matrix() * u.matrix().adjoint();
  return {OperatorMatrix(reduced), max_abs(reduced - direct)};
}

std::vector<OperatorMatrix> haar_sample(int d, std::uint64_t seed, std::size_t count) {
  require_dim(d);
  if (count < 1) throw ParameterError("haar_sample: count must be at least 1");
  std::vector<OperatorMatrix> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(derive_seed(seed, k));
    const ComplexMatrix g = random_operator(d, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    ComplexVector phases(d);
    for (int i = 0; i < d; ++i) {
      const double mag = std::abs(r(i, i));
      phases(i) = mag > 0.0 ? r(i, i) / mag : Complex(1.0);
    }
    out.emplace_back(q * phases.asDiagonal(), OperatorRole::unitary);
  }
  return out;
}

}  // namespace icpovm
