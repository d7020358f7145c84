// Acceptance suite: one PASS/FAIL line per criterion, indented detail lines
// per sub-case. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "icpovm/errors.hpp"
#include "icpovm/estimation_sim.hpp"
#include "icpovm/frame_engine.hpp"
#include "icpovm/group_covariant.hpp"
#include "icpovm/random.hpp"
#include "test_support.hpp"

using namespace icpovm;
using namespace icpovm::testing;

namespace {

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}

  // Records a sub-case; the criterion passes only if every sub-case does.
  void expect(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    details_.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details_.push_back("info " + what); }

  bool report() const {
    std::cout << (pass_ ? "[PASS] " : "[FAIL] ") << name_ << '\n';
    for (const auto& d : details_) std::cout << "       " << d << '\n';
    return pass_;
  }

 private:
  std::string name_;
  bool pass_ = true;
  std::vector<std::string> details_;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double dual_gap(const DualFrame& a, const DualFrame& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, max_abs_diff(a[i].matrix(), b[i].matrix()));
  return gap;
}

// Runs body; a library exception becomes a failed sub-case carrying its message.
void guarded(Criterion& c, const std::string& label, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    c.expect(false, label + ": " + e.what());
  }
}

Povm random_positive_povm(int d, int count, Rng& rng, bool full_rank) {
  std::vector<OperatorMatrix> ks;
  for (int i = 0; i < count; ++i) {
    if (full_rank) {
      const ComplexMatrix g = random_operator(d, rng);
      ks.emplace_back(ComplexMatrix(g * g.adjoint()));
    } else {
      const ComplexVector psi = random_state_vector(d, rng);
      ks.emplace_back(ComplexMatrix(psi * psi.adjoint()));
    }
  }
  return povm_from_positive_frame(ks);
}

// ---------------------------------------------------------------------------

bool reconstruction_identity() {
  Criterion c("reconstruction identity: Z_d x Z_d, alpha = 0.5, d in {2,3,5}, 50 random operators, error <= 1e-9");
  Rng rng(1001);
  for (int d : {2, 3, 5}) {
    guarded(c, fmt("d=%d", d), [&] {
      const Povm povm = zd_covariant_povm(d, zd_fiducial(d, 0.5));
      const auto bounds = frame_bounds(frame_operator(povm.frame()));
      if (!bounds.is_frame) {
        c.expect(false, fmt("d=%d: frame operator singular (a=%.3e, b=%.3e); no dual exists", d, bounds.lower,
                            bounds.upper));
        return;
      }
      const DualFrame dual = canonical_dual(povm.frame());
      double worst = 0.0;
      for (int k = 0; k < 50; ++k) {
        const ComplexMatrix a = random_operator(d, rng);
        ComplexMatrix sum = ComplexMatrix::Zero(d, d);
        for (std::size_t i = 0; i < povm.size(); ++i) {
          sum += povm.weight(i) * entrywise_inner(dual[i].matrix(), a) * povm[i].matrix();
        }
        worst = std::max(worst, (sum - a).norm());
      }
      c.expect(worst <= 1e-9, fmt("d=%d: max ||sum Tr[Theta^+ A] Xi - A||_F = %.3e", d, worst));
    });
  }
  {
    const Povm povm = zd_covariant_povm(2, zd_fiducial(2, generic_alpha()));
    const DualFrame dual = canonical_dual(povm.frame());
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const OperatorMatrix a(random_operator(2, rng));
      worst = std::max(worst, (reconstruct(povm.frame(), dual, a).matrix() - a.matrix()).norm());
    }
    c.note(fmt("d=2 with complex alpha = 0.5 e^{0.3i}: max error %.3e", worst));
  }
  return c.report();
}

bool closed_form_cross_validation() {
  Criterion c("closed-form duals: Z_d closed form vs canonical <= 1e-9 (d=2,3); SU(d) xi vs subspace route <= 1e-10");
  for (int d : {2, 3}) {
    guarded(c, fmt("Z_d d=%d", d), [&] {
      const auto nu = zd_fiducial(d, 0.5);
      const Povm povm = zd_covariant_povm(d, nu);
      const double gap = dual_gap(zd_dual_closed_form(d, nu), canonical_dual(povm.frame()));
      c.expect(gap <= 1e-9, fmt("Z_d d=%d alpha=0.5: max elementwise gap %.3e", d, gap));
    });
  }
  {
    const auto nu = zd_fiducial(2, generic_alpha());
    const double gap = dual_gap(zd_dual_closed_form(2, nu), canonical_dual(zd_covariant_povm(2, nu).frame()));
    c.note(fmt("Z_d d=2 complex alpha = 0.5 e^{0.3i}: gap %.3e", gap));
  }
  Rng rng(1002);
  for (int d : {2, 3}) {
    double worst = 0.0;
    int accepted = 0;
    while (accepted < 10) {
      // Alternate mixed and pure draws so both regimes are covered.
      const FiducialState nu = accepted % 2 == 0 ? FiducialState(random_density_matrix(d, rng))
                                                 : FiducialState::pure(random_state_vector(d, rng));
      if (d * nu.purity() - 1.0 < 0.1) continue;
      ++accepted;
      const auto sub = subspace_inverse_and_dual(sud_subspace_decomposition(d), nu);
      worst = std::max(worst, max_abs_diff(sud_canonical_dual(d, nu).matrix(), sub.xi.matrix()));
    }
    c.expect(worst <= 1e-10, fmt("SU(%d), 10 random nu with d Tr[nu^2] - 1 >= 0.1: max gap %.3e", d, worst));
  }
  return c.report();
}

bool biorthogonality() {
  Criterion c("biorthogonality: Z_d x Z_d (alpha = 0.5, d in {2,3,5}) Gram = delta <= 1e-9; 10 random Y give the same dual <= 1e-9");
  Rng rng(1003);
  for (int d : {2, 3, 5}) {
    guarded(c, fmt("d=%d", d), [&] {
      const auto nu = zd_fiducial(d, 0.5);
      const Povm povm = zd_covariant_povm(d, nu);
      const DualFrame dual = zd_dual_closed_form(d, nu);
      double gram = 0.0;
      for (std::size_t i = 0; i < dual.size(); ++i)
        for (std::size_t j = 0; j < povm.size(); ++j)
          gram = std::max(gram, std::abs(entrywise_inner(dual[i].matrix(), povm[j].matrix()) - Complex(i == j ? 1.0 : 0.0)));
      c.expect(gram <= 1e-9, fmt("d=%d: max |Tr[Theta_i^+ Xi_j] - delta_ij| = %.3e", d, gram));
      double worst = 0.0;
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<OperatorMatrix> ys;
        for (std::size_t i = 0; i < povm.size(); ++i) ys.emplace_back(random_operator(d, rng));
        worst = std::max(worst, dual_gap(dual_family(povm.frame(), ys), dual));
      }
      c.expect(worst <= 1e-9, fmt("d=%d: 10 random Y, max gap to the unique dual %.3e", d, worst));
    });
  }
  {
    const auto nu = zd_fiducial(2, generic_alpha());
    c.note(fmt("d=2 complex alpha = 0.5 e^{0.3i}: biorthogonal = %s",
               check_biorthogonal(zd_covariant_povm(2, nu).frame(), zd_dual_closed_form(2, nu)) ? "true" : "false"));
  }
  return c.report();
}

bool info_completeness_gates() {
  Criterion c("info-completeness gates: I/d fails for both families; geometric fiducial passes for alpha in {0.2,0.5,0.8}; N < d^2 rejected");
  for (int d : {2, 3, 5}) {
    const auto mixed = FiducialState::maximally_mixed(d);
    const bool zd_ic = is_info_complete(zd_covariant_povm(d, mixed));
    const bool zd_cond = zd_invcond(d, mixed).satisfied;
    c.expect(!zd_ic && !zd_cond, fmt("Z_d d=%d, nu = I/d: info_complete=%d condition=%d", d, zd_ic, zd_cond));
    const bool su_ic = is_info_complete(covariant_povm(clifford_design(d), mixed));
    bool su_rejected = false;
    try {
      subspace_inverse_and_dual(sud_subspace_decomposition(d), mixed);
    } catch (const SubspaceConditionError&) {
      su_rejected = true;
    }
    c.expect(!su_ic && su_rejected, fmt("SU(%d), nu = I/d: orbit info_complete=%d subspace condition rejected=%d", d,
                                        su_ic, su_rejected));
  }
  for (int d : {2, 3, 4, 5}) {
    for (double alpha : {0.2, 0.5, 0.8}) {
      const auto nu = zd_fiducial(d, alpha);
      const auto cond = zd_invcond(d, nu);
      const bool ic = is_info_complete(zd_covariant_povm(d, nu));
      c.expect(cond.satisfied && ic, fmt("Z_d d=%d alpha=%.1f: condition=%d (min |Tr| = %.2e) info_complete=%d", d,
                                         alpha, cond.satisfied, cond.min_magnitude, ic));
    }
  }
  for (int d : {2, 4}) {
    const auto nu = zd_fiducial(d, generic_alpha());
    c.note(fmt("Z_d d=%d complex alpha = 0.5 e^{0.3i}: info_complete=%d", d, is_info_complete(zd_covariant_povm(d, nu))));
  }
  Rng rng(1004);
  for (int d : {2, 3, 4}) {
    bool all_rejected = true;
    for (int n = d; n < d * d; ++n) {
      const Povm povm = random_positive_povm(d, n, rng, n % 2 == 0);
      all_rejected = all_rejected && !min_outcome_check(povm) && !is_info_complete(povm);
    }
    c.expect(all_rejected, fmt("d=%d: random POVMs with N = %d..%d rejected by the minimality gate", d, d, d * d - 1));
  }
  return c.report();
}

bool group_identities() {
  Criterion c("group identities: phase law and orthogonality <= 1e-12 (d=2,3,5); Z_d twirl <= 1e-12; Haar SU(2) twirl <= 5/sqrt(1e5)");
  for (int d : {2, 3, 5}) {
    const auto us = zd_unitaries(d);
    const double two_pi_over_d = 2.0 * std::acos(-1.0) / d;
    double phase = 0.0, ortho = 0.0;
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q) {
            const ComplexMatrix& a = us[m * d + n].matrix();
            const ComplexMatrix& b = us[p * d + q].matrix();
            const ComplexMatrix& ab = us[((m + p) % d) * d + (n + q) % d].matrix();
            phase = std::max(phase, max_abs_diff(a * b, std::polar(1.0, two_pi_over_d * ((n * p) % d)) * ab));
            ortho = std::max(ortho, std::abs((a.adjoint() * b).trace() - Complex((m == p && n == q) ? d : 0)));
          }
    c.expect(phase <= 1e-12, fmt("d=%d: U_mn U_pq = w^{np} U_{m+p,n+q}, max error %.3e", d, phase));
    c.expect(ortho <= 1e-12, fmt("d=%d: Tr[U_mn^+ U_pq] = d delta, max error %.3e", d, ortho));
  }
  Rng rng(1005);
  for (int d : {2, 3, 5}) {
    const auto us = zd_unitaries(d);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix o = random_operator(d, rng);
      ComplexMatrix twirl = ComplexMatrix::Zero(d, d);
      for (const auto& u : us) twirl += u.matrix() * o * u.matrix().adjoint();
      twirl /= static_cast<double>(d);  // weights 1/d
      worst = std::max(worst, max_abs_diff(twirl, o.trace() * ComplexMatrix::Identity(d, d)));
    }
    c.expect(worst <= 1e-12, fmt("Z_d d=%d: (1/d) sum U O U^+ = Tr[O] I, max error %.3e", d, worst));
  }
  {
    const std::size_t count = 100000;
    const auto us = haar_sample(2, 1006, count);
    ComplexMatrix o = random_operator(2, rng);
    o /= o.norm();
    ComplexMatrix mean = ComplexMatrix::Zero(2, 2);
    for (const auto& u : us) mean += u.matrix() * o * u.matrix().adjoint();
    mean /= static_cast<double>(count);
    const double err = max_abs_diff(mean, o.trace() / 2.0 * ComplexMatrix::Identity(2, 2));
    const double bound = 5.0 / std::sqrt(static_cast<double>(count));
    c.expect(err <= bound, fmt("Haar SU(2), 1e5 samples, ||O||_F = 1: max error %.3e (bound %.3e)", err, bound));
  }
  return c.report();
}

bool bell_equivalence() {
  Criterion c("Bell equivalence: partial-trace identity <= 1e-12 for 20 random (U, nu), d in {2,3}");
  Rng rng(1007);
  for (int d : {2, 3}) {
    const auto us = haar_sample(d, 1008 + d, 20);
    double worst = 0.0;
    for (const auto& u : us) {
      const FiducialState nu(random_density_matrix(d, rng));
      const auto form = bell_form(u, nu);
      const ComplexMatrix direct = u.matrix() * nu.nu().matrix() * u.matrix().adjoint();
      worst = std::max(worst, max_abs_diff(form.reduced.matrix(), direct));
    }
    c.expect(worst <= 1e-12, fmt("d=%d: max |Tr_B[(I x nu^T)|U>><<U|] - U nu U^+| = %.3e", d, worst));
  }
  return c.report();
}

bool fiducial_construction() {
  Criterion c("fiducial construction: PSD, unit trace, info-complete for SU(2), SU(3), Z_3 x Z_3");
  struct Case {
    std::string name;
    GroupRepSpec subspaces;
    GroupRepSpec orbit;
  };
  const std::vector<Case> cases = {{"SU(2)", sud_subspace_decomposition(2), clifford_design(2)},
                                   {"SU(3)", sud_subspace_decomposition(3), clifford_design(3)},
                                   {"Z_3 x Z_3", zd_subspace_decomposition(3), zd_finite_rep(3)}};
  for (const auto& k : cases) {
    guarded(c, k.name, [&] {
      const auto built = build_fiducial_from_subspaces(k.subspaces);
      const ComplexMatrix& nu = built.fiducial.nu().matrix();
      const double min_eig = eig_hermitian(nu).values(0);
      const double trace_err = std::abs(nu.trace() - Complex(1.0));
      const bool ic = is_info_complete(covariant_povm(k.orbit, built.fiducial));
      c.expect(min_eig >= 0.0 && trace_err <= 1e-12 && ic,
               fmt("%s: alpha=%.4g min eigenvalue %.3e, |Tr - 1| = %.1e, info_complete=%d", k.name.c_str(),
                   built.alpha, min_eig, trace_err, ic));
    });
  }
  return c.report();
}

bool estimation() {
  Criterion c("estimation: exact contraction <= 1e-10 (30 random rho, O; d=2,3); RMS slope -0.5 +/- 0.1, 100 repeats, < 30 s");
  Rng rng(1009);
  struct Case {
    std::string name;
    Povm povm;
    DualFrame dual;
  };
  std::vector<Case> cases;
  for (int d : {2, 3}) {
    const FiducialState nu = FiducialState::pure(random_state_vector(d, rng));
    const auto rep = clifford_design(d);
    cases.push_back({fmt("SU(%d) Clifford orbit", d), covariant_povm(rep, nu), covariant_dual(rep, sud_canonical_dual(d, nu))});
    const Povm pos = random_positive_povm(d, d * d + 2, rng, false);
    cases.push_back({fmt("positive frame d=%d", d), pos, canonical_dual(pos.frame())});
  }
  {
    const auto nu = zd_fiducial(3, 0.5);
    cases.push_back({"Z_3 x Z_3 alpha=0.5", zd_covariant_povm(3, nu), zd_dual_closed_form(3, nu)});
  }
  for (const auto& k : cases) {
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      const OperatorMatrix rho = random_density_matrix(k.povm.dim(), rng);
      const OperatorMatrix obs = random_hermitian(k.povm.dim(), rng);
      const Complex value =
          exact_contraction(outcome_probabilities(rho, k.povm), data_processing(k.dual, obs));
      worst = std::max(worst, std::abs(value - entrywise_inner(rho.matrix(), obs.matrix())));
    }
    c.expect(worst <= 1e-10, fmt("%s: max |sum p_i f_i - Tr[rho O]| = %.3e", k.name.c_str(), worst));
  }
  {
    const auto nu = zd_fiducial(3, 0.5);
    const Povm povm = zd_covariant_povm(3, nu);
    const DualFrame dual = zd_dual_closed_form(3, nu);
    const OperatorMatrix rho = random_density_matrix(3, rng);
    const OperatorMatrix obs = random_hermitian(3, rng);
    const std::vector<std::uint64_t> grid = {100, 1000, 10000, 100000};
    const auto start = std::chrono::steady_clock::now();
    const auto study = convergence_study(rho, povm, dual, obs, grid, 100, 20240601);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream rows;
    for (const auto& row : study.rows) rows << ' ' << row.shots << ':' << row.rms_error;
    c.note("RMS by shots:" + rows.str());
    const bool slope_ok = study.slope && std::abs(*study.slope + 0.5) <= 0.1;
    c.expect(slope_ok, fmt("Z_3 x Z_3 log-log slope %.4f", study.slope ? *study.slope : std::nan("")));
    c.expect(seconds < 30.0, fmt("convergence study runtime %.2f s", seconds));
  }
  return c.report();
}

bool positive_frame_to_povm() {
  Criterion c("positive frame to POVM: 10 random frames per d in {2,3} give PSD, sum = I <= 1e-10, info-complete");
  Rng rng(1010);
  for (int d : {2, 3}) {
    int good = 0;
    double worst_sum = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      guarded(c, fmt("d=%d trial %d", d, trial), [&] {
        const Povm povm = random_positive_povm(d, d * d + trial % 3, rng, trial % 2 == 1);
        ComplexMatrix sum = ComplexMatrix::Zero(d, d);
        bool psd = true;
        for (std::size_t i = 0; i < povm.size(); ++i) {
          sum += povm.weight(i) * povm[i].matrix();
          psd = psd && eig_hermitian(povm[i].matrix()).values(0) >= -kPsdTol;
        }
        const double sum_err = max_abs_diff(sum, ComplexMatrix::Identity(d, d));
        worst_sum = std::max(worst_sum, sum_err);
        if (psd && sum_err <= 1e-10 && is_info_complete(povm)) ++good;
      });
    }
    c.expect(good == 10, fmt("d=%d: %d/10 valid info-complete POVMs, max |sum - I| = %.3e", d, good, worst_sum));
  }
  return c.report();
}

}  // namespace

int main() {
  const std::vector<std::function<bool()>> criteria = {
      reconstruction_identity, closed_form_cross_validation, biorthogonality, info_completeness_gates,
      group_identities,        bell_equivalence,             fiducial_construction, estimation,
      positive_frame_to_povm};
  int failed = 0;
  for (const auto& criterion : criteria) failed += criterion() ? 0 : 1;
  std::cout << "\n" << criteria.size() - failed << "/" << criteria.size() << " acceptance criteria pass\n";
  return failed == 0 ? 0 : 1;
}
