#pragma once

// Core symbolic data model.
//
// A Term is  coefficient * (curvature atoms) * (generator word) * (exterior word),
// with every index label a summation dummy appearing exactly twice across the
// term (Einstein pairing; a pair may sit inside a single atom).  An Expr is a
// flat sum of Terms with deterministic canonical ordering.
//
// Generator words are kept in normal order  b < z < zbar < z' < zbar' < b+,
// so a word is fully described by six sorted label multisets.  Exterior words
// are  (wedge letters) [degree-0 projector] (contraction letters)  with the
// letter lists sorted ascending; sorting signs are folded into the coefficient.

#include "bklab/scalar.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bklab {

enum class VType : uint8_t { Holo, Anti };

inline VType flip(VType t) { return t == VType::Holo ? VType::Anti : VType::Holo; }

struct Slot {
  VType type;
  int label;
  bool operator==(const Slot&) const = default;
  auto operator<=>(const Slot&) const = default;
};

enum class AtomHead : uint8_t {
  RTX,      // <R^TX(s0,s1) s2, s3>
  RE,       // R^E(s0,s1), twisting curvature
  NABLAJ,   // <(nabla_{s0} J) s1, s2>
  NABLA2J,  // <(nabla nabla J)_{(s0,s1)} s2, s3>
  RX,       // scalar curvature of X
  TRT10,    // tr[R^{T(1,0)}](s0,s1)
  RCLIFF,   // Clifford-twist curvature R(s0,s1), exterior-endomorphism valued
  D1RL,     // (d_{s0} R^L)(s1,s2)
  D2RL,     // (d_{s0} d_{s1} R^L)(s2,s3)
  D2TAU,    // d_{s0} d_{s1} tau
};

struct Atom {
  AtomHead head;
  std::vector<Slot> slots;
  bool operator==(const Atom&) const = default;
  auto operator<=>(const Atom&) const = default;
};

int atom_arity(AtomHead h);
const char* atom_name(AtomHead h);
std::optional<AtomHead> atom_head_by_name(const std::string& s);

// A slot permutation with sign, e.g. the antisymmetric pair of a curvature.
struct SymOp {
  std::vector<int> perm;  // image positions: new_slots[i] = old_slots[perm[i]]
  int sign;
};

// Full symmetry group of the head (identity included).
const std::vector<SymOp>& atom_symmetries(AtomHead h);

// Sign of the head under conjugation/adjoint: conj(A(slots)) = sign * A(type-flipped slots).
int atom_conj_sign(AtomHead h);

// True if the typed slot pattern forces the value to vanish (only NABLAJ has a
// hard rule: its tensor is pure (1,0)^3 + (0,1)^3, so mixed types give zero).
bool atom_type_zero(const Atom& a);

enum class GKind : uint8_t { B, Z, ZB, ZP, ZBP, BP };

struct GenWord {
  std::vector<int> b, z, zb, zp, zbp, bp;  // sorted multisets of labels
  bool empty() const {
    return b.empty() && z.empty() && zb.empty() && zp.empty() && zbp.empty() && bp.empty();
  }
  std::vector<int>& list(GKind k);
  const std::vector<int>& list(GKind k) const;
  bool operator==(const GenWord&) const = default;
  auto operator<=>(const GenWord&) const = default;
};

struct ExtWord {
  std::vector<int> cr;  // wedge letters, ascending
  bool proj = false;    // degree-0 projector between the letter blocks
  std::vector<int> an;  // contraction letters, ascending
  bool is_identity() const { return cr.empty() && !proj && an.empty(); }
  bool operator==(const ExtWord&) const = default;
  auto operator<=>(const ExtWord&) const = default;
};

struct Term {
  Coefficient c;
  std::vector<Atom> atoms;
  GenWord gen;
  ExtWord ext;
  int ndum = 0;

  // Structure key ignoring the coefficient; valid after canonicalization.
  auto key() const { return std::tie(atoms, gen, ext); }
};

struct Expr {
  std::vector<Term> terms;

  bool is_zero() const { return terms.empty(); }
  Expr operator+(const Expr& o) const;
  Expr operator-(const Expr& o) const;
  Expr operator-() const;
  Expr scaled(const Coefficient& k) const;
};

// ---- label utilities ----

// Applies old-label -> new-label map to every slot/letter of the term.
void remap_labels(Term& t, const std::vector<int>& map);

// Renumbers labels to 0..ndum-1 preserving first-occurrence order of a fixed
// traversal (atoms, ext, gen) and updates ndum.
void compact_labels(Term& t);

// Checks the exactly-twice pairing invariant (used by tests).
bool labels_paired(const Term& t);

// Counts how many slots/letters of the term still carry the label.
int occurrences_of(const Term& t, int label);

// After a contraction erased the letters carrying u and v, merges the labels.
// Throws err::NeedExplicitDimension when the merged label has no remaining
// home, since that would leave a bare dimension factor.
void unify_pair(Term& t, int u, int v, int ndum_hint);

// ---- canonical form ----

// Brings one term to canonical form: minimal representative over atom
// reorderings, per-atom symmetry operations and dummy relabelings.  May return
// a zero-coefficient term when the symmetries force cancellation.
Term canonicalize_term(const Term& t);

// Canonicalizes every term and combines equal structures; deterministic order.
Expr canonicalize(const Expr& e);

// Canonical equality via difference.
bool equal(const Expr& a, const Expr& b);

// Type-flips all atom slots with the per-head signs and conjugates the
// coefficient.  Involution; generator and exterior parts are left untouched
// (whole-operator adjoints live in weyl.hpp / ext_algebra.hpp).
Expr conjugate_tensors(const Expr& e);

std::string to_string(const Term& t);
std::string to_string(const Expr& e);

}  // namespace bklab
