#include "icpovm/json_io.hpp"

#include <fstream>
#include <sstream>

#include "icpovm/errors.hpp"

namespace icpovm::io {

namespace {

const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(std::string("missing field '") + name + "'");
  return *it;
}

int parse_dim(const json& j) {
  const json& d = field(j, "dim");
  if (!d.is_number_integer() || d.get<long long>() < 1) {
    throw ParseError("'dim' must be a positive integer");
  }
  return d.get<int>();
}

double parse_number(const json& j) {
  if (!j.is_number()) throw ParseError("expected a number");
  return j.get<double>();
}

std::vector<double> parse_weights(const json& j, std::size_t count) {
  auto it = j.find("weights");
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_array() || it->size() != count) {
    throw ParseError("'weights' must be an array with one entry per element");
  }
  std::vector<double> out;
  out.reserve(count);
  for (const auto& w : *it) out.push_back(parse_number(w));
  return out;
}

std::vector<OperatorMatrix> parse_elements(const json& j, int dim) {
  const json& elems = field(j, "elements");
  if (!elems.is_array() || elems.empty()) throw ParseError("'elements' must be a non-empty array");
  std::vector<OperatorMatrix> out;
  out.reserve(elems.size());
  for (const auto& e : elems) {
    ComplexMatrix m = matrix_from_json(e);
    if (m.rows() != dim) throw DimensionError("frame element dimension differs from 'dim'");
    out.emplace_back(std::move(m));
  }
  return out;
}

}  // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw ParseError("complex number must be [re, im]");
  return {parse_number(j[0]), parse_number(j[1])};
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return json{{"dim", m.rows()}, {"entries", std::move(rows)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  const int d = parse_dim(j);
  const json& rows = field(j, "entries");
  if (!rows.is_array() || static_cast<int>(rows.size()) != d) {
    throw ParseError("'entries' must have 'dim' rows");
  }
  ComplexMatrix m(d, d);
  for (int r = 0; r < d; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != d) {
      throw ParseError("each row of 'entries' must have 'dim' columns");
    }
    for (int c = 0; c < d; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json operator_to_json(const OperatorMatrix& op) {
  json j = matrix_to_json(op.matrix());
  if (op.role() != OperatorRole::generic) j["role"] = std::string(to_string(op.role()));
  return j;
}

OperatorMatrix operator_from_json(const json& j) {
  OperatorRole role = OperatorRole::generic;
  if (auto it = j.find("role"); it != j.end()) {
    if (!it->is_string()) throw ParseError("'role' must be a string");
    role = role_from_string(it->get<std::string>());
  }
  return operator_from_json(j, role);
}

OperatorMatrix operator_from_json(const json& j, OperatorRole role_override) {
  return OperatorMatrix(matrix_from_json(j), role_override);
}

json frame_to_json(const OperatorFrame& frame, const std::string& role) {
  json elems = json::array();
  for (const auto& e : frame.elements()) elems.push_back(matrix_to_json(e.matrix()));
  return json{{"dim", frame.dim()}, {"role", role}, {"weights", frame.weights()},
              {"elements", std::move(elems)}};
}

json povm_to_json(const Povm& povm) { return frame_to_json(povm.frame(), "povm"); }

json dual_to_json(const DualFrame& dual) {
  json elems = json::array();
  for (const auto& e : dual.elements()) elems.push_back(matrix_to_json(e.matrix()));
  return json{{"dim", dual.dim()}, {"role", "dual"}, {"elements", std::move(elems)}};
}

OperatorFrame frame_from_json(const json& j) {
  const int d = parse_dim(j);
  auto elements = parse_elements(j, d);
  auto weights = parse_weights(j, elements.size());
  return OperatorFrame(std::move(elements), std::move(weights));
}

Povm povm_from_json(const json& j, double tol) { return Povm(frame_from_json(j), tol); }

DualFrame dual_from_json(const json& j) {
  const int d = parse_dim(j);
  return DualFrame(parse_elements(j, d));
}

json rep_to_json(const GroupRepSpec& rep) {
  json j{{"dim", rep.dim()}};
  if (rep.kind() == GroupRepSpec::Kind::finite_list) {
    j["kind"] = "finite-list";
    json units = json::array();
    for (const auto& u : rep.unitaries()) units.push_back(matrix_to_json(u.matrix()));
    j["unitaries"] = std::move(units);
    j["weights"] = rep.weights();
  } else {
    j["kind"] = "subspace-decomposition";
    json projs = json::array();
    for (const auto& p : rep.projectors()) projs.push_back(matrix_to_json(p));
    j["projectors"] = std::move(projs);
  }
  return j;
}

GroupRepSpec rep_from_json(const json& j) {
  const int d = parse_dim(j);
  const json& kind = field(j, "kind");
  if (!kind.is_string()) throw ParseError("'kind' must be a string");
  if (kind == "finite-list") {
    const json& units = field(j, "unitaries");
    if (!units.is_array() || units.empty()) throw ParseError("'unitaries' must be a non-empty array");
    std::vector<OperatorMatrix> list;
    for (const auto& u : units) {
      ComplexMatrix m = matrix_from_json(u);
      if (m.rows() != d) throw DimensionError("unitary dimension differs from 'dim'");
      list.emplace_back(std::move(m));
    }
    auto weights = parse_weights(j, list.size());
    if (weights.empty()) throw ParseError("finite-list representation requires 'weights'");
    return GroupRepSpec::finite_list(std::move(list), std::move(weights));
  }
  if (kind == "subspace-decomposition") {
    const json& projs = field(j, "projectors");
    if (!projs.is_array() || projs.empty()) throw ParseError("'projectors' must be a non-empty array");
    std::vector<ComplexMatrix> list;
    for (const auto& p : projs) list.push_back(matrix_from_json(p));
    return GroupRepSpec::subspace_decomposition(d, std::move(list));
  }
  throw ParseError("unknown representation kind '" + kind.get<std::string>() + "'");
}

json report_to_json(const EstimationReport& report) {
  json j{{"operator", report.operator_id},
         {"estimate", complex_to_json(report.estimate)},
         {"std_error", report.std_error},
         {"exact", report.exact ? complex_to_json(*report.exact) : json(nullptr)},
         {"shots", report.shots},
         {"seed", report.seed}};
  return j;
}

EstimationReport report_from_json(const json& j) {
  EstimationReport r;
  const json& id = field(j, "operator");
  if (!id.is_string()) throw ParseError("'operator' must be a string");
  r.operator_id = id.get<std::string>();
  r.estimate = complex_from_json(field(j, "estimate"));
  r.std_error = parse_number(field(j, "std_error"));
  if (const json& exact = field(j, "exact"); !exact.is_null()) r.exact = complex_from_json(exact);
  const json& shots = field(j, "shots");
  const json& seed = field(j, "seed");
  if (!shots.is_number_unsigned() || !seed.is_number_unsigned()) {
    throw ParseError("'shots' and 'seed' must be non-negative integers");
  }
  r.shots = shots.get<std::uint64_t>();
  r.seed = seed.get<std::uint64_t>();
  return r;
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace icpovm::io
