#include "icpovm/estimation_sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <thread>

#include "icpovm/errors.hpp"
#include "icpovm/random.hpp"

namespace icpovm {

namespace {

constexpr double kProbabilityFloor = -1e-12;
constexpr double kNormalizationTol = 1e-9;
constexpr std::uint64_t kBesselThreshold = 1000;

OperatorMatrix as_density(const OperatorMatrix& rho) {
  if (rho.role() == OperatorRole::density) return rho;
  if (!rho.is_hermitian(1e-10)) throw InvalidInputError("state is not Hermitian");
  return OperatorMatrix(hermitian_part(rho.matrix()), OperatorRole::density);
}

struct Moments {
  Complex mean;
  double variance = 0.0;
};

Moments empirical_moments(const std::vector<std::uint64_t>& counts, std::span<const Complex> f,
                          std::uint64_t shots) {
  Moments m;
  const double n = static_cast<double>(shots);
  for (std::size_t i = 0; i < counts.size(); ++i) m.mean += static_cast<double>(counts[i]) * f[i];
  m.mean /= n;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    m.variance += static_cast<double>(counts[i]) * std::norm(f[i] - m.mean);
  }
  m.variance /= n;
  if (shots < kBesselThreshold && shots > 1) m.variance *= n / (n - 1.0);
  return m;
}

}  // namespace

MeasurementRecord::MeasurementRecord(std::string povm_id, std::vector<std::uint64_t> counts,
                                     std::uint64_t seed)
    : povm_id_(std::move(povm_id)), counts_(std::move(counts)), seed_(seed) {
  shots_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::vector<double> outcome_probabilities(const OperatorMatrix& rho, const Povm& povm) {
  if (rho.dim() != povm.dim()) throw DimensionError("outcome_probabilities: dimension mismatch");
  const OperatorMatrix state = as_density(rho);
  std::vector<double> probs(povm.size());
  double total = 0.0;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    double p = povm.weight(i) * (state.matrix() * povm[i].matrix()).trace().real();
    if (p < kProbabilityFloor) {
      throw InvalidInputError("outcome_probabilities: negative probability " + format_number(p));
    }
    probs[i] = std::max(p, 0.0);
    total += probs[i];
  }
  if (std::abs(total - 1.0) > kNormalizationTol) {
    throw InvalidInputError("outcome_probabilities: probabilities sum to " + format_number(total));
  }
  return probs;
}

MeasurementRecord sample_outcomes(std::span<const double> probs, std::uint64_t shots,
                                  std::uint64_t seed, std::string povm_id) {
  if (probs.empty()) throw InvalidInputError("sample_outcomes: empty distribution");
  std::vector<double> cdf(probs.size());
  double running = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw InvalidInputError("sample_outcomes: negative probability");
    running += probs[i];
    cdf[i] = running;
  }
  if (std::abs(running - 1.0) > kNormalizationTol) {
    throw InvalidInputError("sample_outcomes: probabilities do not sum to one");
  }
  // Last outcome with positive mass; upper_bound never returns a zero-mass index
  // otherwise.
  std::size_t last = probs.size() - 1;
  while (last > 0 && probs[last] == 0.0) --last;

  std::vector<std::uint64_t> counts(probs.size(), 0);
  Rng rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * running;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = std::min(static_cast<std::size_t>(it - cdf.begin()), last);
    ++counts[idx];
  }
  return MeasurementRecord(std::move(povm_id), std::move(counts), seed);
}

Complex exact_contraction(std::span<const double> probs, std::span<const Complex> f) {
  if (probs.size() != f.size()) throw DimensionError("exact_contraction: length mismatch");
  Complex total;
  for (std::size_t i = 0; i < probs.size(); ++i) total += probs[i] * f[i];
  return total;
}

EstimationReport estimate_expectation(const MeasurementRecord& record, const DualFrame& dual,
                                      const OperatorMatrix& op, const OperatorMatrix* rho,
                                      std::string operator_id) {
  if (record.shots() == 0) throw ParameterError("estimate_expectation: record has zero shots");
  if (record.counts().size() != dual.size()) {
    throw DimensionError("estimate_expectation: record and dual differ in outcome count");
  }
  const auto f = data_processing(dual, op);
  const Moments m = empirical_moments(record.counts(), f, record.shots());

  EstimationReport report;
  report.operator_id = std::move(operator_id);
  report.estimate = m.mean;
  report.std_error = std::sqrt(m.variance / static_cast<double>(record.shots()));
  report.shots = record.shots();
  report.seed = record.seed();
  if (rho != nullptr) {
    if (rho->dim() != op.dim()) throw DimensionError("estimate_expectation: state dimension mismatch");
    report.exact = (rho->matrix() * op.matrix()).trace();
  }
  return report;
}

ConvergenceStudy convergence_study(const OperatorMatrix& rho, const Povm& povm,
                                   const DualFrame& dual, const OperatorMatrix& op,
                                   std::span<const std::uint64_t> shots_grid, std::size_t repeats,
                                   std::uint64_t seed) {
  if (repeats == 0) throw ParameterError("convergence_study: repeats must be positive");
  if (!std::is_sorted(shots_grid.begin(), shots_grid.end())) {
    throw ParameterError("convergence_study: shots grid must be ascending");
  }
  const auto probs = outcome_probabilities(rho, povm);
  const auto f = data_processing(dual, op);

  ConvergenceStudy study;
  study.exact = (rho.matrix() * op.matrix()).trace();

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(repeats, std::thread::hardware_concurrency()));
  for (std::size_t g = 0; g < shots_grid.size(); ++g) {
    const std::uint64_t shots = shots_grid[g];
    if (shots == 0) throw ParameterError("convergence_study: shots must be positive");
    const std::uint64_t grid_seed = derive_seed(seed, g);
    std::vector<Complex> estimates(repeats);
    auto run = [&](std::size_t begin, std::size_t end) {
      for (std::size_t r = begin; r < end; ++r) {
        const auto record = sample_outcomes(probs, shots, derive_seed(grid_seed, r));
        estimates[r] = empirical_moments(record.counts(), f, shots).mean;
      }
    };
    if (workers == 1) {
      run(0, repeats);
    } else {
      std::vector<std::future<void>> tasks;
      for (std::size_t w = 0; w < workers; ++w) {
        tasks.push_back(std::async(std::launch::async, run, repeats * w / workers,
                                   repeats * (w + 1) / workers));
      }
      for (auto& t : tasks) t.get();
    }
    ConvergenceRow row;
    row.shots = shots;
    double sq = 0.0;
    for (const auto& e : estimates) {
      sq += std::norm(e - study.exact);
      row.mean_estimate += e;
    }
    row.rms_error = std::sqrt(sq / static_cast<double>(repeats));
    row.mean_estimate /= static_cast<double>(repeats);
    study.rows.push_back(row);
  }
  study.slope = loglog_slope(study.rows);
  return study;
}

std::optional<double> loglog_slope(std::span<const ConvergenceRow> rows) {
  if (rows.size() < 2) return std::nullopt;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& row : rows) {
    if (!(row.rms_error > 0.0)) return std::nullopt;
    const double x = std::log(static_cast<double>(row.shots));
    const double y = std::log(row.rms_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace icpovm
