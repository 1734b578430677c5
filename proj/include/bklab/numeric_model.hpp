// Exact random tensor values at a point, used to validate identities numerically.

#pragma once

#include "bklab/scalar.hpp"
#include "bklab/term.hpp"

#include <cstdint>
#include <vector>

namespace bklab {

// ===== EXACT FIBER MATRICES =====

// Dense matrix with exact Coefficient entries; hosts endomorphisms of the
// 2^n-dimensional exterior fiber during exact evaluations.
struct CoefMatrix {
  int dim = 0;
  std::vector<Coefficient> a;  // row-major, dim*dim entries

  static CoefMatrix zero(int d);
  static CoefMatrix identity(int d);

  Coefficient& at(int r, int c) { return a[static_cast<size_t>(r) * dim + c]; }
  const Coefficient& at(int r, int c) const {
    return a[static_cast<size_t>(r) * dim + c];
  }

  CoefMatrix operator+(const CoefMatrix& o) const;
  CoefMatrix operator*(const CoefMatrix& o) const;
  CoefMatrix scaled(const Coefficient& s) const;
  bool operator==(const CoefMatrix& o) const { return dim == o.dim && a == o.a; }
};

// Exact matrices of the fiber creation/annihilation letters and the degree-0
// projector on the 2^n exterior algebra (same conventions as ExtAlgebra).
CoefMatrix car_creation(int n, int j);
CoefMatrix car_annihilation(int n, int j);
CoefMatrix car_proj0(int n);

// ===== RANDOM POINT MODEL =====

// Assigns exact random values to every tensor atom head, in the complex
// coordinate frame (slots insert pure-type coordinate vectors, metric
// pairing 1/2 between opposite types). All declared slot symmetries, conjugation
// signs, type-vanishing rules, and the curvature compatibilities between the
// heads hold exactly by construction:
//   - the curvature four-tensor comes from a random real orthonormal-frame
//     tensor with the pair symmetries and the first Bianchi identity,
//   - the torsion tensor is pure-type with its last-pair antisymmetry,
//   - mixed second-derivative values follow the first-derivative products
//     and the curvature commutator, and the antisymmetric part of the pure
//     values is the curvature commutator,
//   - the fiberwise curvature trace is evaluated as a two-form,
//   - the scalar curvature is the real-frame double trace.
class ModelTensors {
 public:
  ModelTensors(int n, uint64_t seed);

  int n() const { return n_; }
  int fiber_dim() const { return 1 << n_; }

  // Value of one atom with slot labels taken directly as coordinate indices
  // in [0, n). Throws std::logic_error for the operator-valued head.
  Coefficient value(AtomHead h, const std::vector<Slot>& slots) const;

  // Einstein contraction of an expression with no generator or fiber letters:
  // every label is summed over [0, n).
  Coefficient eval_scalar(const Expr& e) const;

  // Same, but fiber letters multiply out to exact matrices on the 2^n fiber;
  // scalar terms contribute multiples of the identity.
  CoefMatrix eval_fiber(const Expr& e) const;

  // ----- independent cross-check quantities -----

  // real orthonormal-frame curvature component, indices in [0, 2n)
  const Rational& curv_real(int i, int j, int k, int l) const;
  // real orthonormal-frame torsion component <(nabla_{e_i} J) e_j, e_k>
  const Rational& torsion_real(int i, int j, int k) const;
  // squared norm of the torsion tensor, summed over the real frame
  Rational torsion_norm2() const;
  // real-frame double trace -<R(e_i,e_j)e_i, e_j>
  Rational scalar_curv_real() const;
  // the full fiberwise-contracted curvature endomorphism at a slot pair:
  // (1/4) <R(u,v) e_l, e_m> c(e_l) c(e_m) + (1/2) tr-form term
  CoefMatrix clifford_value(Slot u, Slot v) const;

 private:
  int n_;
  std::vector<Rational> curv_real_;     // (2n)^4
  std::vector<Rational> torsion_real_;  // (2n)^3
  std::vector<GaussRat> rtx_, nj_, n2j_, trt10_, re_, d2tau_, d2rl_;
  GaussRat rx_;

  int pack(const std::vector<Slot>& slots) const;
  const GaussRat& lookup(const std::vector<GaussRat>& table,
                         const std::vector<Slot>& slots) const;
};

}  // namespace bklab
