#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace icpovm {

// Error taxonomy. The CLI maps each family onto a distinct exit code.

// Malformed input text (bad JSON, missing fields, wrong shapes in a file).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands with inconsistent dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed but semantically invalid objects: non-Hermitian observables,
// POVMs that do not sum to identity, projector sets that are not orthogonal.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Out-of-range scalar parameters (indices, alpha, shot counts).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mathematical precondition failed: singular frame operator, a vanishing
// trace in a closed-form dual, a fiducial that violates the completeness
// condition.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when <<nu|P_sigma|nu>> vanishes for some invariant subspace.
class SubspaceConditionError : public PreconditionError {
 public:
  SubspaceConditionError(std::size_t sigma, double overlap)
      : PreconditionError(describe(sigma, overlap)),
        sigma_(sigma),
        overlap_(overlap) {}

  std::size_t sigma() const noexcept { return sigma_; }
  double overlap() const noexcept { return overlap_; }

 private:
  static std::string describe(std::size_t sigma, double overlap) {
    std::ostringstream os;
    os << "completeness condition violated on invariant subspace " << sigma << " (<<nu|P|nu>> = " << overlap
       << ")";
    return os.str();
  }

  std::size_t sigma_;
  double overlap_;
};

}  // namespace icpovm
