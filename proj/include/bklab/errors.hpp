#pragma once

// Error taxonomy shared across the engine and the numeric lab.

#include <stdexcept>
#include <string>

namespace bklab::err {

// resolvent requested on a zero-eigenvalue (kernel) component
struct DivisionByZeroEigenvalue : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a contraction produced a bare dimension factor the engine does not model
struct NeedExplicitDimension : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// rewriting exceeded its step budget without reaching a fixpoint
struct NonTerminating : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// two expressions that must agree canonically do not; carries both forms
struct MismatchError : std::runtime_error {
  std::string step, lhs, rhs, difference;
  MismatchError(const std::string& step_, const std::string& lhs_, const std::string& rhs_,
                const std::string& diff_)
      : std::runtime_error("mismatch at step " + step_ + "\n  left:\n" + lhs_ +
                           "\n  right:\n" + rhs_ + "\n  difference:\n" + diff_),
        step(step_),
        lhs(lhs_),
        rhs(rhs_),
        difference(diff_) {}
};

// a cross-check against an independent numeric model failed
struct OracleFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a truncated computation did not converge against an enlarged cutoff
struct TruncationWarning : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// discretization too coarse to separate the quantities being compared
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad CLI argument, config key, or parameter combination
struct InvalidParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bklab::err
