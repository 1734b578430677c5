#pragma once

// Operator algebra on the model space.
//
// Generators acting on kernels K(Z,Z'):
//   b_i   = -2 d/dz_i + pi zbar_i        (annihilation-direction)
//   b_i^+ =  2 d/dzbar_i + pi z_i        (kills the Gaussian ground kernel)
//   z_i, zbar_i                           multiplication, unprimed variable
//   z'_i, zbar'_i                         multiplication, primed variable (central)
// Nonflat relations (everything else commutes):
//   z_i b_j     = b_j z_i    + 2 delta_ij
//   b_j^+ b_i   = b_i b_j^+  + 4 pi delta_ij
//   b_j^+ zb_i  = zb_i b_j^+ + 2 delta_ij
// Exterior letters obey CAR:  i_a wbar^c = delta_ac - wbar^c i_a,  and the
// degree-0 projector I absorbs:  I wbar^c = 0,  i_a I = 0,  I I = I.
//
// A "state" is an operator applied to the projected ground kernel P I: terms
// hold only b / z / primes plus an exterior word containing the projector.
// Such terms are eigenvectors of the quadratic model operator with eigenvalue
// 4 pi (#b + #wedge-letters-left-of-I).

#include "bklab/errors.hpp"
#include "bklab/term.hpp"

#include <functional>
#include <vector>

namespace bklab {

struct Gen {
  GKind k;
  int label;
};

enum class EKind : uint8_t { CR, PROJ, AN };

struct ELetter {
  EKind k;
  int label = -1;
};

// Unnormalized product term; gens/exts in composition order (leftmost applied last).
struct RawTerm {
  Coefficient c;
  std::vector<Atom> atoms;
  std::vector<Gen> gens;
  std::vector<ELetter> exts;
};

// Normal-orders the generator word (emitting commutator branches) and the
// exterior word (CAR pushes, projector absorption); returns surviving branches.
std::vector<Term> normalize_raw(const RawTerm& rt);

Expr to_expr(const std::vector<RawTerm>& raw);
RawTerm to_raw(const Term& t);

Expr multiply(const Expr& a, const Expr& b);
Expr commutator(const Expr& a, const Expr& b);

// Adjoint of an operator (no primed letters): reverses words, swaps b <-> b+,
// z <-> zbar, daggers the exterior word, conjugates atoms and coefficient.
Expr formal_adjoint(const Expr& op);

// Exterior-only product (same engine, restricted inputs).
Expr ext_multiply(const Expr& a, const Expr& b);

// op * (P I); result terms carry only b / z / primes and a projector word.
Expr apply_to_PN(const Expr& op);

// op applied to an already-built state.
Expr apply_to_state(const Expr& op, const Expr& state);

// Eigenvalue bookkeeping on states.
int state_level(const Term& t);           // #b + #wedge letters (eigenvalue / 4pi)
Expr project_kernel(const Expr& state);   // level == 0 part
Expr project_excited(const Expr& state);  // level != 0 part
Expr resolvent_apply(const Expr& state);  // divide by 4 pi level; throws on level 0

// Evaluations.  eval_origin: both slots at 0 (exterior-endomorphism result).
// eval_left_origin: Z = 0, result a function of the primed variable.
// eval_right_origin: Z' = 0, result a function of (z, zbar) stored in gen.z/gen.zb.
Expr eval_origin(const Expr& state);
Expr eval_left_origin(const Expr& state);
Expr eval_right_origin(const Expr& state);

// Rename primed monomials to plain (z', zbar') -> (z, zbar) for composition.
Expr half_to_w(const Expr& half);

// Conjugate-transpose of an evaluated half-kernel (function terms): swaps the
// monomial lists, conjugates coefficient and atoms, daggers the exterior word.
Expr half_dagger(const Expr& half);

// Conjugate-transpose of an exterior-endomorphism-valued tensor expression.
Expr end_dagger(const Expr& e);

// Integral over the model space of a(W) * b(W) against the combined Gaussian:
// both halves carry e^{-pi/2 |w|^2}; the product integrates with the moment
// rule  int w^k wbar^l e^{-pi|w|^2} = delta_kl k! / pi^k  per direction.
Expr compose_at_origin(const Expr& a, const Expr& b);

Coefficient gaussian_moment(int a, int b);

}  // namespace bklab
