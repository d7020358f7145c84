#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "icpovm/estimation_sim.hpp"
#include "icpovm/frame_engine.hpp"
#include "icpovm/group_covariant.hpp"
#include "icpovm/matrix_core.hpp"

// JSON encodings shared by the library and the CLI.
//
//   matrix:   {"dim": d, "entries": [[[re, im], ...], ...]}        (row-major)
//   frame:    {"dim": d, "role": "povm"|"frame"|"dual", "weights": [...],
//              "elements": [matrix, ...]}
//   rep:      {"dim": d, "kind": "finite-list"|"subspace-decomposition",
//              "unitaries": [...], "weights": [...], "projectors": [...]}
//   report:   {"operator": id, "estimate": [re, im], "std_error": x,
//              "exact": [re, im], "shots": n, "seed": s}
//
// Parsing failures raise ParseError; semantic failures (a POVM that does not
// sum to identity) raise the library's usual exceptions.
namespace icpovm::io {

using json = nlohmann::json;

json complex_to_json(Complex z);
Complex complex_from_json(const json& j);

json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json operator_to_json(const OperatorMatrix& op);
// Honors an optional "role" field unless role_override is given.
OperatorMatrix operator_from_json(const json& j);
OperatorMatrix operator_from_json(const json& j, OperatorRole role_override);

json frame_to_json(const OperatorFrame& frame, const std::string& role = "frame");
json povm_to_json(const Povm& povm);
json dual_to_json(const DualFrame& dual);

OperatorFrame frame_from_json(const json& j);
Povm povm_from_json(const json& j, double tol = kPsdTol);
DualFrame dual_from_json(const json& j);

json rep_to_json(const GroupRepSpec& rep);
GroupRepSpec rep_from_json(const json& j);

json report_to_json(const EstimationReport& report);
EstimationReport report_from_json(const json& j);

json read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const json& j);

}  // namespace icpovm::io
