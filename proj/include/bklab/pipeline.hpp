#pragma once

// Model operators and the staged evaluation of the degree-two kernel
// coefficient.
//
// Builders produce the quadratic model L02 (oscillator plus fiber degree),
// its generator-only part L0, and the degree-one and degree-two perturbations
// O1, Q1, O2, Q2 as tensor-valued operator expressions in the engine frame
// (pure-type coordinate slots, metric pairing 1/2 between opposite types).
//
// compute_F2 runs the staged evaluation: apply Q1 to the projected ground
// kernel, invert the model on the excited levels, evaluate half kernels at
// the origin, assemble the six degree-two contributions, reduce with the
// identity rules, and take the fiber trace.  Each stage is compared with an
// independently frozen closed form; every comparison lands in match_flags,
// and the first mismatch throws err::MismatchError.

#include "bklab/errors.hpp"
#include "bklab/rules.hpp"
#include "bklab/term.hpp"
#include "bklab/weyl.hpp"

#include <map>
#include <string>
#include <vector>

namespace bklab {

using ModelOperator = Expr;

// Diagonal model data: a[j] is the curvature eigenvalue of direction j in
// units of 2 pi, as an exact rational.  Every entry must be nonzero.
struct ModelParams {
  std::vector<Rational> a;
};

struct ExpansionReport {
  Expr b0;
  Expr b1;
  Expr trace_b1;
  // Stage values keyed by stage name, in the engine normal form.
  std::map<std::string, Expr> intermediate;
  // Stage name -> whether the computed value matched the frozen form.
  std::map<std::string, bool> match_flags;
};

// ===== MODEL OPERATOR BUILDERS =====

// Generator part of the quadratic model: sum_j b_j b_j^+.
ModelOperator build_L0();

// Full quadratic model: sum_j b_j b_j^+ + 4 pi sum_j wbar^j i_j.
ModelOperator build_L02();

// Degree-one part of the conjugated square without the Clifford bracket.
ModelOperator build_O1();

// Full degree-one perturbation: O1 plus the torsion Clifford bracket.
ModelOperator build_Q1();

// Degree-two part coming from the Weyl-word expansion of the square.
ModelOperator build_O2();

// Remainder of the degree-two perturbation: curvature endomorphisms, the
// second-derivative Clifford bracket, and the scalar-curvature constant.
ModelOperator build_Q2_minus_O2();

// Full degree-two perturbation.
ModelOperator build_Q2();

// Contribution of the commuting degree-one/degree-three cross terms to the
// degree-two coefficient, imported as a closed lemma:
//   (1/2pi) [ <R^TX(dz_i, dzb_j) dz_j, dzb_i> + R^E(dz_i, dzb_i) ] * I.
Expr lemma_g60();

// ===== DEGREE-ZERO COEFFICIENT =====

// Leading kernel coefficient of the diagonal model: the product of |a_j|
// times the projector onto the line wbar^S, S the negative-index set.  In the
// returned word the direction labels are concrete indices of the diagonal
// model, not summation dummies.  Throws err::InvalidParams on a zero entry.
Expr compute_b0(const ModelParams& params);

// ===== STAGED EVALUATION =====

// Canonicalizes both sides, records flags[step], throws err::MismatchError
// with the canonical difference when they disagree.
void check_step(const std::string& step, const Expr& computed,
                const Expr& expected, std::map<std::string, bool>& flags);

// Runs the full staged computation of the degree-two coefficient and its
// fiber trace, checking every stage against its frozen closed form.
ExpansionReport compute_F2(const IdentityRuleSet& rules);

}  // namespace bklab
