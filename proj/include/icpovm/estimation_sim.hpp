#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icpovm/frame_engine.hpp"
#include "icpovm/matrix_core.hpp"

namespace icpovm {

class MeasurementRecord {
 public:
  MeasurementRecord(std::string povm_id, std::vector<std::uint64_t> counts, std::uint64_t seed);

  const std::string& povm_id() const { return povm_id_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t shots() const { return shots_; }
  std::uint64_t seed() const { return seed_; }

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;

 private:
  std::string povm_id_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t shots_ = 0;
  std::uint64_t seed_ = 0;
};

struct EstimationReport {
  std::string operator_id;
  Complex estimate;
  double std_error = 0.0;
  std::optional<Complex> exact;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

// p_i = w_i Tr[rho Pi_i]. Values in [-1e-12, 0) are clamped to zero.
std::vector<double> outcome_probabilities(const OperatorMatrix& rho, const Povm& povm);

// Multinomial sample by inverse-CDF lookup of one uniform draw per shot.
MeasurementRecord sample_outcomes(std::span<const double> probs, std::uint64_t shots,
                                  std::uint64_t seed, std::string povm_id = {});

// sum_i p_i f_i, the infinite-statistics value of the estimator.
Complex exact_contraction(std::span<const double> probs, std::span<const Complex> f);

// Empirical mean of f_i(O) = Tr[Theta_i^dagger O] over the recorded outcomes.
// The standard error uses the plug-in variance, Bessel-corrected below 1000
// shots. rho, when given, only fills the exact field.
EstimationReport estimate_expectation(const MeasurementRecord& record, const DualFrame& dual,
                                      const OperatorMatrix& op,
                                      const OperatorMatrix* rho = nullptr,
                                      std::string operator_id = {});

struct ConvergenceRow {
  std::uint64_t shots = 0;
  double rms_error = 0.0;
  Complex mean_estimate;
};

struct ConvergenceStudy {
  Complex exact;
  std::vector<ConvergenceRow> rows;
  // Least-squares slope of log(rms) against log(shots); empty when any RMS
  // error is zero or fewer than two rows exist.
  std::optional<double> slope;
};

// Repeat r at grid point g uses seed derive_seed(derive_seed(seed, g), r).
// Repeats run concurrently; aggregation is in repeat order.
ConvergenceStudy convergence_study(const OperatorMatrix& rho, const Povm& povm,
                                   const DualFrame& dual, const OperatorMatrix& op,
                                   std::span<const std::uint64_t> shots_grid, std::size_t repeats,
                                   std::uint64_t seed);

std::optional<double> loglog_slope(std::span<const ConvergenceRow> rows);

}  // namespace icpovm
