#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "icpovm/errors.hpp"
#include "icpovm/estimation_sim.hpp"
#include "icpovm/frame_engine.hpp"
#include "icpovm/group_covariant.hpp"
#include "icpovm/json_io.hpp"
#include "icpovm/random.hpp"

namespace icpovm::cli {

namespace {

using io::json;

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::string dual_path;
  std::string free_ops_path;
  std::string state_path;
  std::string observable_path;
  std::string family = "zd";
  std::string section;
  int dim = 2;
  double alpha = 0.5;
  double alpha_arg = 0.0;  // phase of alpha in radians
  bool alpha_given = false;
  std::uint64_t seed = 1;
  std::uint64_t shots = 10000;
  std::size_t count = 0;
  bool canonical = false;
  Tolerances tol;
};

void validate(const RunConfig& cfg) {
  if (!(cfg.tol.rank_tol > 0.0) || !(cfg.tol.psd_tol > 0.0) || !(cfg.tol.recon_tol > 0.0)) {
    throw ParameterError("all tolerances must be positive");
  }
  if ((cfg.command == "build" || cfg.command == "demo") && cfg.dim < 2) {
    throw ParameterError("--dim must be at least 2");
  }
}

Complex complex_alpha(const RunConfig& cfg) { return std::polar(cfg.alpha, cfg.alpha_arg); }

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

// ---------------------------------------------------------------------------
// check

json condition_table(const json& group, int d) {
  const std::string family = group.value("family", "");
  const FiducialState nu(io::operator_from_json(group.at("fiducial")));
  if (nu.dim() != d) throw DimensionError("group fiducial dimension differs from POVM");
  if (family == "zdzd") {
    const auto cond = zd_invcond(d, nu);
    return json{{"family", family}, {"satisfied", cond.satisfied},
                {"min_magnitude", cond.min_magnitude}, {"magnitudes", cond.magnitudes}};
  }
  if (family == "sud") {
    const double gap = d * nu.purity() - 1.0;
    return json{{"family", family}, {"satisfied", std::abs(gap) > kConditionTol},
                {"purity", nu.purity()}, {"d_purity_minus_one", gap}};
  }
  throw ParseError("unknown group family '" + family + "'");
}

json cmd_check(const RunConfig& cfg, std::ostream& err) {
  const json j = io::read_file(cfg.input);
  const Povm povm = io::povm_from_json(j, cfg.tol.psd_tol);
  const bool gate = min_outcome_check(povm);
  const FrameBounds bounds = frame_bounds(povm.frame().frame_operator(), cfg.tol.rank_tol);
  json report{{"command", "check"},
              {"dim", povm.dim()},
              {"elements", povm.size()},
              {"min_outcome_gate", gate},
              {"frame_bounds", {{"a", bounds.lower}, {"b", bounds.upper}}},
              {"info_complete", gate && bounds.is_frame}};
  if (auto it = j.find("group"); it != j.end()) report["condition_table"] = condition_table(*it, povm.dim());
  err << "check: " << povm.size() << " elements, d = " << povm.dim() << ", a = " << bounds.lower
      << ", b = " << bounds.upper << ", info-complete: " << (gate && bounds.is_frame ? "yes" : "no")
      << '\n';
  return report;
}

// ---------------------------------------------------------------------------
// dual

DualFrame canonical_for(const Povm& povm, const Tolerances& tol) {
  if (!is_info_complete(povm, tol.rank_tol)) {
    throw PreconditionError("POVM is not informationally complete; no canonical dual");
  }
  return canonical_dual(povm.frame(), tol.rank_tol);
}

json cmd_dual(const RunConfig& cfg, std::ostream& err) {
  const Povm povm = io::povm_from_json(io::read_file(cfg.input), cfg.tol.psd_tol);
  if (!cfg.free_ops_path.empty()) {
    if (!is_info_complete(povm, cfg.tol.rank_tol)) {
      throw PreconditionError("POVM is not informationally complete; no dual family");
    }
    const DualFrame free_ops = io::dual_from_json(io::read_file(cfg.free_ops_path));
    const DualFrame dual = dual_family(povm.frame(), free_ops.elements(), cfg.tol.rank_tol);
    err << "dual: " << dual.size() << " elements from the free-operator family\n";
    return io::dual_to_json(dual);
  }
  const DualFrame dual = canonical_for(povm, cfg.tol);
  err << "dual: canonical dual with " << dual.size() << " elements\n";
  return io::dual_to_json(dual);
}

// ---------------------------------------------------------------------------
// build

json with_group(json povm, const std::string& family, const FiducialState& nu) {
  povm["group"] = {{"family", family}, {"fiducial", io::operator_to_json(nu.nu())}};
  return povm;
}

json cmd_build(const RunConfig& cfg, std::ostream& err) {
  const int d = cfg.dim;
  Rng rng(cfg.seed);
  err << "build: family " << cfg.family << ", d = " << d << '\n';
  if (cfg.family == "zd") {
    const auto nu = zd_fiducial(d, complex_alpha(cfg));
    return with_group(io::povm_to_json(zd_covariant_povm(d, nu)), "zdzd", nu);
  }
  if (cfg.family == "sud") {
    const auto nu = zd_fiducial(d, complex_alpha(cfg));
    return with_group(io::povm_to_json(covariant_povm(clifford_design(d), nu)), "sud", nu);
  }
  if (cfg.family == "positive-frame") {
    const std::size_t count = cfg.count > 0 ? cfg.count : static_cast<std::size_t>(d * d + 1);
    std::vector<OperatorMatrix> ks;
    for (std::size_t i = 0; i < count; ++i) {
      const ComplexVector psi = random_state_vector(d, rng);
      ks.emplace_back(psi * psi.adjoint());
    }
    return io::povm_to_json(povm_from_positive_frame(ks, cfg.tol.psd_tol));
  }
  if (cfg.family == "state") {
    json j = io::operator_to_json(random_density_matrix(d, rng));
    j["id"] = "rho-" + std::to_string(cfg.seed);
    return j;
  }
  if (cfg.family == "observable") {
    json j = io::operator_to_json(random_hermitian(d, rng));
    j["id"] = "obs-" + std::to_string(cfg.seed);
    return j;
  }
  if (cfg.family == "zd-subspaces") return io::rep_to_json(zd_subspace_decomposition(d));
  if (cfg.family == "sud-subspaces") return io::rep_to_json(sud_subspace_decomposition(d));
  if (cfg.family == "fiducial") {
    if (cfg.input.empty()) throw ParameterError("--family fiducial requires --input <rep.json>");
    const GroupRepSpec rep = io::rep_from_json(io::read_file(cfg.input));
    const double start = cfg.alpha_given ? cfg.alpha : 0.25;
    const auto built = build_fiducial_from_subspaces(rep, start);
    json j = io::operator_to_json(built.fiducial.nu());
    j["alpha"] = built.alpha;
    j["phases"] = built.phases;
    j["labels"] = built.labels;
    return j;
  }
  throw ParameterError("unknown --family '" + cfg.family + "'");
}

// ---------------------------------------------------------------------------
// estimate

json cmd_estimate(const RunConfig& cfg, std::ostream& err) {
  if (cfg.shots == 0) throw ParameterError("--shots must be positive");
  if (cfg.state_path.empty() || cfg.observable_path.empty()) {
    throw ParameterError("estimate requires --state and --observable");
  }
  if (cfg.canonical == !cfg.dual_path.empty()) {
    throw ParameterError("estimate requires exactly one of --dual or --canonical");
  }
  const Povm povm = io::povm_from_json(io::read_file(cfg.input), cfg.tol.psd_tol);
  const json obs_json = io::read_file(cfg.observable_path);
  const OperatorMatrix observable = io::operator_from_json(obs_json, OperatorRole::generic);
  const OperatorMatrix rho = io::operator_from_json(io::read_file(cfg.state_path), OperatorRole::generic);
  if (rho.dim() != povm.dim() || observable.dim() != povm.dim()) {
    throw DimensionError("state, observable and POVM dimensions differ");
  }
  const DualFrame dual =
      cfg.canonical ? canonical_for(povm, cfg.tol) : io::dual_from_json(io::read_file(cfg.dual_path));
  if (dual.size() != povm.size() || dual.dim() != povm.dim()) {
    throw DimensionError("dual frame does not match the POVM");
  }
  const OperatorMatrix state(rho.matrix(), OperatorRole::density);
  const auto probs = outcome_probabilities(state, povm);
  const auto record = sample_outcomes(probs, cfg.shots, cfg.seed, stem_of(cfg.input));
  const std::string id = obs_json.value("id", stem_of(cfg.observable_path));
  const auto report = estimate_expectation(record, dual, observable, &state, id);
  json j = io::report_to_json(report);
  j["exact_contraction"] = io::complex_to_json(exact_contraction(probs, data_processing(dual, observable)));
  err << "estimate: " << id << " = " << report.estimate.real() << " +/- " << report.std_error
      << " (exact " << report.exact->real() << ", shots " << report.shots << ")\n";
  return j;
}

// ---------------------------------------------------------------------------
// demo

class CheckList {
 public:
  void add(const std::string& name, double value, double tolerance) {
    const bool pass = std::isfinite(value) && value <= tolerance;
    all_ = all_ && pass;
    checks_.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}});
  }
  void add_at_least(const std::string& name, double value, double floor) {
    const bool pass = std::isfinite(value) && value >= floor;
    all_ = all_ && pass;
    checks_.push_back({{"name", name}, {"value", value}, {"floor", floor}, {"pass", pass}});
  }
  void add_flag(const std::string& name, bool pass) {
    all_ = all_ && pass;
    checks_.push_back({{"name", name}, {"pass", pass}});
  }
  bool all_pass() const { return all_; }
  const json& checks() const { return checks_; }

 private:
  json checks_ = json::array();
  bool all_ = true;
};

double max_elementwise_gap(const DualFrame& a, const DualFrame& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, max_abs(a[i].matrix() - b[i].matrix()));
  return gap;
}

double reconstruction_error(const OperatorFrame& frame, const DualFrame& dual, Rng& rng, int count) {
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const OperatorMatrix a(random_operator(frame.dim(), rng));
    worst = std::max(worst, (reconstruct(frame, dual, a).matrix() - a.matrix()).norm());
  }
  return worst;
}

void estimation_checks(CheckList& checks, const Povm& povm, const DualFrame& dual, Rng& rng,
                       const RunConfig& cfg) {
  const OperatorMatrix rho = random_density_matrix(povm.dim(), rng);
  const OperatorMatrix obs = random_hermitian(povm.dim(), rng);
  const auto probs = outcome_probabilities(rho, povm);
  const Complex exact = (rho.matrix() * obs.matrix()).trace();
  checks.add("exact_contraction", std::abs(exact_contraction(probs, data_processing(dual, obs)) - exact), 1e-10);
  const auto record = sample_outcomes(probs, cfg.shots, cfg.seed);
  const auto report = estimate_expectation(record, dual, obs, &rho);
  checks.add("estimate_within_5_sigma", std::abs(report.estimate - exact) / report.std_error, 5.0);
}

json cmd_demo(const RunConfig& cfg, std::ostream& err) {
  const int d = cfg.dim;
  Rng rng(cfg.seed);
  CheckList checks;
  if (cfg.section == "zd") {
    const auto nu = zd_fiducial(d, complex_alpha(cfg));
    const Povm povm = zd_covariant_povm(d, nu);
    checks.add_flag("min_outcome_gate", min_outcome_check(povm));
    checks.add_flag("info_complete", is_info_complete(povm, cfg.tol.rank_tol));
    const auto cond = zd_invcond(d, nu);
    checks.add_at_least("zd_condition_min_trace", cond.min_magnitude, kConditionTol);
    if (!cond.satisfied) {
      // No dual exists; report the vanishing trace instead of aborting.
      err << "demo zd: condition fails, min |Tr[U nu]| = " << cond.min_magnitude
          << "; a complex alpha (--alpha-arg) avoids this for even d\n";
      return json{{"command", "demo"}, {"section", cfg.section}, {"dim", d},
                  {"alpha", io::complex_to_json(complex_alpha(cfg))}, {"seed", cfg.seed},
                  {"shots", cfg.shots}, {"checks", checks.checks()}, {"all_pass", false}};
    }
    const DualFrame closed = zd_dual_closed_form(d, nu);
    const DualFrame canonical = canonical_dual(povm.frame(), cfg.tol.rank_tol);
    checks.add("closed_form_vs_canonical_dual", max_elementwise_gap(closed, canonical), 1e-9);
    checks.add_flag("biorthogonal", check_biorthogonal(povm.frame(), closed));
    checks.add("reconstruction_20_random", reconstruction_error(povm.frame(), closed, rng, 20), cfg.tol.recon_tol);
    estimation_checks(checks, povm, closed, rng, cfg);
  } else if (cfg.section == "sud") {
    const auto nu = zd_fiducial(d, complex_alpha(cfg));
    const GroupRepSpec design = clifford_design(d);
    const Povm povm = covariant_povm(design, nu);
    checks.add_flag("info_complete", is_info_complete(povm, cfg.tol.rank_tol));
    checks.add("closed_form_vs_direct_frame_operator",
               max_abs(sud_frame_operator(d, nu).matrix() - povm.frame().frame_operator().matrix()), 1e-10);
    const OperatorMatrix xi = sud_canonical_dual(d, nu);
    const auto subspace = subspace_inverse_and_dual(sud_subspace_decomposition(d), nu);
    checks.add("closed_form_vs_subspace_xi", max_abs(xi.matrix() - subspace.xi.matrix()), 1e-10);
    const DualFrame closed = covariant_dual(design, xi);
    const DualFrame generic = canonical_dual(povm.frame(), cfg.tol.rank_tol);
    checks.add("closed_form_vs_generic_dual", max_elementwise_gap(closed, generic), 1e-9);
    checks.add("reconstruction_20_random", reconstruction_error(povm.frame(), closed, rng, 20), cfg.tol.recon_tol);
    estimation_checks(checks, povm, closed, rng, cfg);
  } else if (cfg.section == "bell") {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const auto u = haar_sample(d, derive_seed(cfg.seed, static_cast<std::uint64_t>(k)), 1).front();
      worst = std::max(worst, bell_form(u, FiducialState(random_density_matrix(d, rng))).residual);
    }
    checks.add("partial_trace_identity_20_random", worst, 1e-12);
    const auto nu = zd_fiducial(d, complex_alpha(cfg));
    const Povm povm = zd_covariant_povm(d, nu);
    const auto units = zd_unitaries(d);
    double gap = 0.0;
    for (std::size_t i = 0; i < units.size(); ++i) {
      gap = std::max(gap, max_abs(bell_form(units[i], nu).reduced.matrix() / static_cast<double>(d) -
                                  povm[i].matrix()));
    }
    checks.add("bell_realization_of_zd_povm", gap, 1e-12);
  } else {
    throw ParameterError("unknown demo section '" + cfg.section + "' (expected zd, sud or bell)");
  }
  err << "demo " << cfg.section << ": " << (checks.all_pass() ? "all checks pass" : "FAILED") << '\n';
  return json{{"command", "demo"}, {"section", cfg.section}, {"dim", d}, {"alpha", io::complex_to_json(complex_alpha(cfg))},
              {"seed", cfg.seed},  {"shots", cfg.shots},     {"checks", checks.checks()},
              {"all_pass", checks.all_pass()}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Informationally complete POVMs: construction, duals and estimation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--rank-tol", cfg.tol.rank_tol, "Relative frame-operator rank cutoff");
  app.add_option("--psd-tol", cfg.tol.psd_tol, "Positivity and normalization tolerance");
  app.add_option("--recon-tol", cfg.tol.recon_tol, "Reconstruction tolerance");
  app.add_option("--output", cfg.output, "Write JSON here instead of standard output");

  auto* check = app.add_subcommand("check", "Report frame bounds and info-completeness of a POVM");
  check->add_option("--input", cfg.input, "POVM JSON")->required();

  auto* dual = app.add_subcommand("dual", "Compute the canonical dual (or a member of the dual family)");
  dual->add_option("--input", cfg.input, "POVM JSON")->required();
  dual->add_flag("--canonical", cfg.canonical, "Canonical dual (default)");
  dual->add_option("--free-operators", cfg.free_ops_path, "Frame JSON holding the free operators Y_i");

  auto* build = app.add_subcommand("build", "Generate POVMs, states, observables and decompositions");
  build->add_option("--family", cfg.family,
                    "zd | sud | positive-frame | state | observable | zd-subspaces | sud-subspaces | fiducial");
  build->add_option("--dim", cfg.dim, "Hilbert-space dimension");
  auto* build_alpha = build->add_option("--alpha", cfg.alpha, "Fiducial parameter |alpha| (fiducial: search start, default 0.25)");
  build->add_option("--alpha-arg", cfg.alpha_arg, "Phase of alpha in radians");
  build->add_option("--seed", cfg.seed, "Random seed");
  build->add_option("--count", cfg.count, "Number of positive operators (positive-frame)");
  build->add_option("--input", cfg.input, "Representation JSON (fiducial)");

  auto* estimate = app.add_subcommand("estimate", "Simulate a measurement and estimate <O>");
  estimate->add_option("--input", cfg.input, "POVM JSON")->required();
  estimate->add_option("--dual", cfg.dual_path, "Dual frame JSON");
  estimate->add_flag("--canonical", cfg.canonical, "Use the canonical dual");
  estimate->add_option("--state", cfg.state_path, "Density matrix JSON");
  estimate->add_option("--observable", cfg.observable_path, "Observable JSON");
  estimate->add_option("--shots", cfg.shots, "Number of measurement shots");
  estimate->add_option("--seed", cfg.seed, "Random seed");

  auto* demo = app.add_subcommand("demo", "Run a worked example end to end");
  demo->add_option("section", cfg.section, "zd | sud | bell")->required();
  demo->add_option("--dim", cfg.dim, "Hilbert-space dimension");
  demo->add_option("--alpha", cfg.alpha, "Fiducial parameter |alpha|");
  demo->add_option("--alpha-arg", cfg.alpha_arg, "Phase of alpha in radians");
  demo->add_option("--seed", cfg.seed, "Random seed");
  demo->add_option("--shots", cfg.shots, "Number of measurement shots");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParameterError;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.alpha_given = build_alpha->count() > 0;
  try {
    validate(cfg);
    json result;
    if (cfg.command == "check") result = cmd_check(cfg, err);
    else if (cfg.command == "dual") result = cmd_dual(cfg, err);
    else if (cfg.command == "build") result = cmd_build(cfg, err);
    else if (cfg.command == "estimate") result = cmd_estimate(cfg, err);
    else result = cmd_demo(cfg, err);

    if (cfg.output.empty()) out << result.dump(2) << '\n';
    else io::write_file(cfg.output, result);
    if (cfg.command == "demo" && !result["all_pass"].get<bool>()) return kPreconditionError;
    return kOk;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const nlohmann::json::exception& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kParameterError;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
    return kSemanticError;
  } catch (const InvalidInputError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kSemanticError;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kPreconditionError;
  }
}

}  // namespace icpovm::cli
