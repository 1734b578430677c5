// Model-operator builders and the staged computation of the degree-two kernel
// coefficient, each stage checked against an independently frozen closed form.

#include "bklab/pipeline.hpp"

#include "bklab/exterior.hpp"

#include <array>
#include <functional>
#include <utility>

namespace bklab {

namespace {

// ===== SMALL BUILDERS =====

Slot hs(int l) { return Slot{VType::Holo, l}; }
Slot as(int l) { return Slot{VType::Anti, l}; }
Slot ts(VType t, int l) { return Slot{t, l}; }

Gen g(GKind k, int l) { return Gen{k, l}; }

constexpr EKind kCR = EKind::CR;
constexpr EKind kAN = EKind::AN;
ELetter cr(int l) { return ELetter{kCR, l}; }
ELetter an(int l) { return ELetter{kAN, l}; }
ELetter proj() { return ELetter{EKind::PROJ}; }

Coefficient cq(long long p, long long q) { return Coefficient::frac(p, q); }
// (p/q) pi^k
Coefficient cpi(long long p, long long q, int k) {
  return Coefficient::pi_pow(k, Rational::frac(p, q));
}
// i (p/q) pi^k
Coefficient ciq(long long p, long long q, int k = 0) {
  return Coefficient::iunit() * cpi(p, q, k);
}

Atom atom(AtomHead h, std::vector<Slot> slots) { return Atom{h, std::move(slots)}; }

// One letter of the quadratic-coordinate insertion: the multiplication
// operator together with the slot type it inserts into an atom.
struct RLetter {
  GKind mult;
  VType type;
};
constexpr std::array<RLetter, 2> kRLetters = {
    RLetter{GKind::Z, VType::Holo}, RLetter{GKind::ZB, VType::Anti}};

// Frame resolution of sum_i f(e_i) nabla0_{e_i} over the complex frame: the
// slot type inserted into f, the paired generator, and the sign it carries.
struct NablaLeg {
  VType slot;
  GKind gen;
  int sign;
};
constexpr std::array<NablaLeg, 2> kNablaLegs = {
    NablaLeg{VType::Holo, GKind::BP, +1}, NablaLeg{VType::Anti, GKind::B, -1}};

// Emits the four typed blocks of sum_{lm} F(e_l, e_m) c(e_l) c(e_m).  make(s, t)
// returns the term carrying F with slot types (s, t) on labels (la, lb); the
// Clifford letters carry the opposite types, and the frame normalization of
// the two F slots contributes a factor 2.
void add_cc_blocks(std::vector<RawTerm>& out, int la, int lb,
                   const std::function<RawTerm(VType, VType)>& make) {
  for (VType s : {VType::Holo, VType::Anti}) {
    for (VType t : {VType::Holo, VType::Anti}) {
      RawTerm rt = make(s, t);
      RawTerm cc = clifford_cc(flip(s), la, flip(t), lb);
      rt.c = rt.c * cc.c * Coefficient::rational(2);
      rt.exts.insert(rt.exts.end(), cc.exts.begin(), cc.exts.end());
      out.push_back(std::move(rt));
    }
  }
}

}  // namespace

// ===== MODEL OPERATOR BUILDERS =====

ModelOperator build_L0() {
  return to_expr({RawTerm{Coefficient::one(), {}, {g(GKind::B, 0), g(GKind::BP, 0)}, {}}});
}

ModelOperator build_L02() {
  std::vector<RawTerm> raw;
  raw.push_back({Coefficient::one(), {}, {g(GKind::B, 0), g(GKind::BP, 0)}, {}});
  raw.push_back({Coefficient::pi_pow(1, Rational(4)), {}, {}, {cr(0), an(0)}});
  return to_expr(raw);
}

ModelOperator build_O1() {
  std::vector<RawTerm> raw;
  // labels: i = 0, contracted pair of the insertion letters = 1, 2
  raw.push_back({ciq(-4, 3, 1),
                 {atom(AtomHead::NABLAJ, {as(1), as(2), as(0)})},
                 {g(GKind::B, 0), g(GKind::ZB, 1), g(GKind::ZB, 2)},
                 {}});
  raw.push_back({ciq(4, 3, 1),
                 {atom(AtomHead::NABLAJ, {hs(1), hs(2), hs(0)})},
                 {g(GKind::Z, 1), g(GKind::Z, 2), g(GKind::BP, 0)},
                 {}});
  return to_expr(raw);
}

ModelOperator build_Q1() {
  // O1 - pi i <(nabla_R J) e_l, e_m> c(e_l) c(e_m)
  std::vector<RawTerm> raw;
  for (const RLetter& rk : kRLetters) {
    add_cc_blocks(raw, 1, 2, [&](VType s, VType t) {
      RawTerm rt;
      rt.c = ciq(-1, 1, 1);
      rt.atoms = {atom(AtomHead::NABLAJ, {ts(rk.type, 0), ts(s, 1), ts(t, 2)})};
      rt.gens = {g(rk.mult, 0)};
      return rt;
    });
  }
  return build_O1() + to_expr(raw);
}

ModelOperator build_O2() {
  std::vector<RawTerm> raw;

  // (1/3) <R^TX(R, e_i) R, e_j> nabla0_{e_i} nabla0_{e_j}
  for (const RLetter& rk : kRLetters)
    for (const RLetter& rl : kRLetters)
      for (const NablaLeg& li : kNablaLegs)
        for (const NablaLeg& lj : kNablaLegs) {
          RawTerm rt;
          rt.c = cq(li.sign * lj.sign, 3);
          rt.atoms = {atom(AtomHead::RTX,
                           {ts(rk.type, 0), ts(li.slot, 2), ts(rl.type, 1), ts(lj.slot, 3)})};
          rt.gens = {g(rk.mult, 0), g(rl.mult, 1), g(li.gen, 2), g(lj.gen, 3)};
          raw.push_back(std::move(rt));
        }

  // (2/3) <R^TX(R, e_j) e_j, e_i> nabla0_{e_i}
  for (const RLetter& rk : kRLetters)
    for (VType t1 : {VType::Holo, VType::Anti})
      for (const NablaLeg& li : kNablaLegs) {
        RawTerm rt;
        rt.c = cq(4 * li.sign, 3);
        rt.atoms = {atom(AtomHead::RTX,
                         {ts(rk.type, 0), ts(t1, 1), ts(flip(t1), 1), ts(li.slot, 2)})};
        rt.gens = {g(rk.mult, 0), g(li.gen, 2)};
        raw.push_back(std::move(rt));
      }

  // -[ (1/4) (d_R d_R R^L)(R, e_i) + R^E(R, e_i) ] nabla0_{e_i}
  for (const RLetter& rl : kRLetters)
    for (const NablaLeg& li : kNablaLegs) {
      for (const RLetter& rj : kRLetters)
        for (const RLetter& rk : kRLetters) {
          RawTerm rt;
          rt.c = cq(-li.sign, 4);
          rt.atoms = {atom(AtomHead::D2RL,
                           {ts(rj.type, 0), ts(rk.type, 1), ts(rl.type, 2), ts(li.slot, 3)})};
          rt.gens = {g(rj.mult, 0), g(rk.mult, 1), g(rl.mult, 2), g(li.gen, 3)};
          raw.push_back(std::move(rt));
        }
      RawTerm rt;
      rt.c = cq(-li.sign, 1);
      rt.atoms = {atom(AtomHead::RE, {ts(rl.type, 0), ts(li.slot, 1)})};
      rt.gens = {g(rl.mult, 0), g(li.gen, 1)};
      raw.push_back(std::move(rt));
    }

  // -(1/4) sum_i d_{e_i} [ (1/2) (d_R d_R R^L)(R, e_i) ]: each of the three
  // insertion letters differentiated in turn, its slot contracted with e_i
  for (int choose = 0; choose < 3; ++choose)
    for (const RLetter& rc : kRLetters)
      for (const RLetter& r1 : kRLetters)
        for (const RLetter& r2 : kRLetters) {
          RawTerm rt;
          rt.c = cq(-1, 4);
          const std::array<const RLetter*, 2> rem = {&r1, &r2};
          std::vector<Slot> slots(4);
          int next = 0;
          for (int p = 0; p < 3; ++p) {
            if (p == choose) {
              slots[p] = ts(rc.type, 2);
            } else {
              slots[p] = ts(rem[next]->type, next);
              rt.gens.push_back(g(rem[next]->mult, next));
              ++next;
            }
          }
          slots[3] = ts(flip(rc.type), 2);
          rt.atoms = {atom(AtomHead::D2RL, std::move(slots))};
          raw.push_back(std::move(rt));
        }

  // -(1/9) [ (d_R R^L)(R, e_i) ]^2
  for (const RLetter& rj : kRLetters)
    for (const RLetter& rk : kRLetters)
      for (const RLetter& rl : kRLetters)
        for (const RLetter& rp : kRLetters) {
          RawTerm rt;
          rt.c = cq(-4, 9);
          rt.atoms = {atom(AtomHead::D1RL, {ts(rj.type, 0), ts(rk.type, 1), hs(4)}),
                      atom(AtomHead::D1RL, {ts(rl.type, 2), ts(rp.type, 3), as(4)})};
          rt.gens = {g(rj.mult, 0), g(rk.mult, 1), g(rl.mult, 2), g(rp.mult, 3)};
          raw.push_back(std::move(rt));
        }

  // -(1/2) (d_R d_R tau)
  for (const RLetter& rj : kRLetters)
    for (const RLetter& rk : kRLetters) {
      RawTerm rt;
      rt.c = cq(-1, 2);
      rt.atoms = {atom(AtomHead::D2TAU, {ts(rj.type, 0), ts(rk.type, 1)})};
      rt.gens = {g(rj.mult, 0), g(rk.mult, 1)};
      raw.push_back(std::move(rt));
    }

  // -(1/12) [L0, <R^TX(R, e_i) R, e_i>]
  std::vector<RawTerm> traced;
  for (const RLetter& rk : kRLetters)
    for (const RLetter& rl : kRLetters)
      for (VType t1 : {VType::Holo, VType::Anti}) {
        RawTerm rt;
        rt.c = cq(2, 1);
        rt.atoms = {atom(AtomHead::RTX,
                         {ts(rk.type, 0), ts(t1, 2), ts(rl.type, 1), ts(flip(t1), 2)})};
        rt.gens = {g(rk.mult, 0), g(rl.mult, 1)};
        traced.push_back(std::move(rt));
      }
  const Expr comm = commutator(build_L0(), to_expr(traced)).scaled(cq(-1, 12));

  return to_expr(raw) + comm;
}

ModelOperator build_Q2_minus_O2() {
  std::vector<RawTerm> raw;

  // R^Cliff(R, dzb_i) b_i - R^Cliff(R, dz_i) b_i^+
  for (const RLetter& rk : kRLetters) {
    raw.push_back({Coefficient::one(),
                   {atom(AtomHead::RCLIFF, {ts(rk.type, 0), as(1)})},
                   {g(rk.mult, 0), g(GKind::B, 1)},
                   {}});
    raw.push_back({-Coefficient::one(),
                   {atom(AtomHead::RCLIFF, {ts(rk.type, 0), hs(1)})},
                   {g(rk.mult, 0), g(GKind::BP, 1)},
                   {}});
  }

  // -(pi i / 2) <(nabla nabla J)_{(R,R)} e_l, e_m> c(e_l) c(e_m)
  for (const RLetter& rk : kRLetters)
    for (const RLetter& rl : kRLetters)
      add_cc_blocks(raw, 2, 3, [&](VType s, VType t) {
        RawTerm rt;
        rt.c = ciq(-1, 2, 1);
        rt.atoms = {
            atom(AtomHead::NABLA2J, {ts(rk.type, 0), ts(rl.type, 1), ts(s, 2), ts(t, 3)})};
        rt.gens = {g(rk.mult, 0), g(rl.mult, 1)};
        return rt;
      });

  // (1/2) (R^E + (1/2) tr[R^{T(1,0)}])(e_l, e_m) c(e_l) c(e_m)
  add_cc_blocks(raw, 0, 1, [&](VType s, VType t) {
    RawTerm rt;
    rt.c = cq(1, 2);
    rt.atoms = {atom(AtomHead::RE, {ts(s, 0), ts(t, 1)})};
    return rt;
  });
  add_cc_blocks(raw, 0, 1, [&](VType s, VType t) {
    RawTerm rt;
    rt.c = cq(1, 4);
    rt.atoms = {atom(AtomHead::TRT10, {ts(s, 0), ts(t, 1)})};
    return rt;
  });

  // (1/4) r^X
  raw.push_back({cq(1, 4), {atom(AtomHead::RX, {})}, {}, {}});

  return to_expr(raw);
}

ModelOperator build_Q2() { return build_O2() + build_Q2_minus_O2(); }

Expr lemma_g60() {
  std::vector<RawTerm> raw;
  raw.push_back({cpi(1, 2, -1),
                 {atom(AtomHead::RTX, {hs(0), as(1), hs(1), as(0)})},
                 {},
                 {proj()}});
  raw.push_back({cpi(1, 2, -1), {atom(AtomHead::RE, {hs(0), as(0)})}, {}, {proj()}});
  return to_expr(raw);
}

// ===== DEGREE-ZERO COEFFICIENT =====

Expr compute_b0(const ModelParams& params) {
  if (params.a.empty()) throw err::InvalidParams("model needs at least one direction");
  Rational det(1);
  std::vector<int> neg;
  for (size_t j = 0; j < params.a.size(); ++j) {
    const Rational& r = params.a[j];
    if (r.is_zero())
      throw err::InvalidParams("zero model eigenvalue in direction " + std::to_string(j));
    det = det * (r.is_negative() ? -r : r);
    if (r.is_negative()) neg.push_back(static_cast<int>(j));
  }
  // wbar^S I i_S with the contraction letters applied in descending order;
  // stored ascending, which folds in (-1)^{q(q-1)/2}.
  const int q = static_cast<int>(neg.size());
  Term t;
  t.c = Coefficient::pi_pow(0, (q * (q - 1) / 2) % 2 ? -det : det);
  t.ext.cr = neg;
  t.ext.proj = true;
  t.ext.an = neg;
  t.ndum = 0;  // concrete direction indices, not summation dummies
  Expr e;
  e.terms.push_back(std::move(t));
  return e;
}

// ===== FROZEN STAGE FORMS =====
// Closed forms the staged computation must reproduce, written with the frame
// conversions  dzb_l = sqrt2 wbar^l  and  i_{dzb_l} = (1/sqrt2) i_l  folded
// into the coefficients.

namespace {

// first application to the projected ground kernel
Expr expect_q1_pn() {
  std::vector<RawTerm> raw;
  raw.push_back({ciq(-2, 3),
                 {atom(AtomHead::NABLAJ, {as(1), as(2), as(0)})},
                 {g(GKind::B, 0), g(GKind::B, 1), g(GKind::ZBP, 2)},
                 {proj()}});
  raw.push_back({ciq(-4, 3, 1),
                 {atom(AtomHead::NABLAJ, {as(1), as(2), as(0)})},
                 {g(GKind::B, 0), g(GKind::ZBP, 1), g(GKind::ZBP, 2)},
                 {proj()}});
  raw.push_back({ciq(-2, 1),
                 {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                 {g(GKind::B, 0)},
                 {cr(1), cr(2), proj()}});
  raw.push_back({ciq(-4, 1, 1),
                 {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                 {g(GKind::ZBP, 0)},
                 {cr(1), cr(2), proj()}});
  return to_expr(raw);
}

// the same four pieces divided by the model eigenvalue 4 pi level
Expr expect_res_q1_pn() {
  std::vector<RawTerm> raw;
  raw.push_back({ciq(-1, 12, -1),
                 {atom(AtomHead::NABLAJ, {as(1), as(2), as(0)})},
                 {g(GKind::B, 0), g(GKind::B, 1), g(GKind::ZBP, 2)},
                 {proj()}});
  raw.push_back({ciq(-1, 3),
                 {atom(AtomHead::NABLAJ, {as(1), as(2), as(0)})},
                 {g(GKind::B, 0), g(GKind::ZBP, 1), g(GKind::ZBP, 2)},
                 {proj()}});
  raw.push_back({ciq(-1, 6, -1),
                 {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                 {g(GKind::B, 0)},
                 {cr(1), cr(2), proj()}});
  raw.push_back({ciq(-1, 2),
                 {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                 {g(GKind::ZBP, 0)},
                 {cr(1), cr(2), proj()}});
  return to_expr(raw);
}

// half kernel at Z = 0, a function of the primed variable
Expr expect_g7_left() {
  return to_expr({RawTerm{ciq(-1, 6),
                          {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                          {g(GKind::ZBP, 0)},
                          {cr(1), cr(2), proj()}}});
}

// half kernel at Z' = 0, a function of the plain variable
Expr expect_g7_right() {
  return to_expr({RawTerm{ciq(-1, 3),
                          {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                          {g(GKind::ZB, 0)},
                          {cr(1), cr(2), proj()}}});
}

// adjoint half kernel, first slot: dagger of the Z = 0 half
Expr expect_adjoint_left() {
  return to_expr({RawTerm{ciq(1, 6),
                          {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)})},
                          {g(GKind::Z, 0)},
                          {proj(), an(2), an(1)}}});
}

// adjoint half kernel, second slot: dagger of the Z' = 0 half
Expr expect_adjoint_right() {
  return to_expr({RawTerm{ciq(1, 3),
                          {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)})},
                          {g(GKind::Z, 0)},
                          {proj(), an(2), an(1)}}});
}

// composition of the Z = 0 half with its own adjoint
Expr expect_0g9() {
  return to_expr({RawTerm{cpi(1, 36, -1),
                          {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)}),
                           atom(AtomHead::NABLAJ, {hs(0), hs(3), hs(4)})},
                          {},
                          {cr(1), cr(2), proj(), an(4), an(3)}}});
}

// composition of the adjoint second-slot half with the Z' = 0 half
Expr expect_0g9a() {
  return to_expr({RawTerm{cpi(-1, 9, -1),
                          {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)}),
                           atom(AtomHead::NABLAJ, {as(0), as(3), as(4)})},
                          {},
                          {proj(), an(2), an(1), cr(3), cr(4), proj()}}});
}

// iterated degree-one contribution at the origin
Expr expect_g8() {
  return to_expr({RawTerm{cpi(-2, 3, -1),
                          {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)}),
                           atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                          {},
                          {proj()}}});
}

// degree-two contribution before the curvature identities
Expr expect_g11() {
  std::vector<RawTerm> raw;
  raw.push_back({cpi(1, 4, -1), {atom(AtomHead::TRT10, {hs(0), as(0)})}, {}, {proj()}});
  raw.push_back({cpi(-1, 2, -1),
                 {atom(AtomHead::RTX, {hs(0), as(0), hs(1), as(1)})},
                 {},
                 {proj()}});
  raw.push_back({ciq(1, 2, -1),
                 {atom(AtomHead::NABLA2J, {hs(0), as(0), hs(1), as(1)})},
                 {},
                 {proj()}});
  raw.push_back({ciq(1, 2, -1),
                 {atom(AtomHead::NABLA2J, {as(0), hs(0), hs(1), as(1)})},
                 {},
                 {proj()}});
  raw.push_back({cpi(-1, 12, -1),
                 {atom(AtomHead::RTX, {hs(0), as(0), as(1), as(2)})},
                 {},
                 {cr(1), cr(2), proj()}});
  raw.push_back({ciq(1, 12, -1),
                 {atom(AtomHead::NABLA2J, {hs(0), as(0), as(1), as(2)})},
                 {},
                 {cr(1), cr(2), proj()}});
  raw.push_back({ciq(1, 12, -1),
                 {atom(AtomHead::NABLA2J, {as(0), hs(0), as(1), as(2)})},
                 {},
                 {cr(1), cr(2), proj()}});
  raw.push_back({cpi(-1, 4, -1), {atom(AtomHead::RE, {as(0), as(1)})}, {}, {cr(0), cr(1), proj()}});
  raw.push_back(
      {cpi(-1, 8, -1), {atom(AtomHead::TRT10, {as(0), as(1)})}, {}, {cr(0), cr(1), proj()}});
  return to_expr(raw);
}

// the same contribution after the curvature identities
Expr expect_g14() {
  std::vector<RawTerm> raw;
  raw.push_back({cpi(3, 4, -1),
                 {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)}),
                  atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                 {},
                 {proj()}});
  raw.push_back({cpi(-1, 6, -1),
                 {atom(AtomHead::RTX, {as(1), as(2), hs(0), as(0)})},
                 {},
                 {cr(1), cr(2), proj()}});
  raw.push_back({cpi(-1, 4, -1), {atom(AtomHead::RE, {as(0), as(1)})}, {}, {cr(0), cr(1), proj()}});
  return to_expr(raw);
}

// assembled degree-two coefficient
Expr expect_g18() {
  std::vector<RawTerm> raw;
  raw.push_back({cpi(1, 1, -1),
                 {atom(AtomHead::RTX, {hs(0), as(1), hs(1), as(0)})},
                 {},
                 {proj()}});
  raw.push_back({cpi(1, 1, -1), {atom(AtomHead::RE, {hs(0), as(0)})}, {}, {proj()}});
  raw.push_back({cpi(-1, 18, -1),
                 {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)}),
                  atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                 {},
                 {proj()}});
  raw.push_back({cpi(1, 36, -1),
                 {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)}),
                  atom(AtomHead::NABLAJ, {hs(0), hs(3), hs(4)})},
                 {},
                 {cr(1), cr(2), proj(), an(4), an(3)}});
  raw.push_back({cpi(-1, 6, -1),
                 {atom(AtomHead::RTX, {as(1), as(2), hs(0), as(0)})},
                 {},
                 {cr(1), cr(2), proj()}});
  raw.push_back({cpi(-1, 4, -1), {atom(AtomHead::RE, {as(0), as(1)})}, {}, {cr(0), cr(1), proj()}});
  raw.push_back({cpi(1, 6, -1),
                 {atom(AtomHead::RTX, {hs(1), hs(2), hs(0), as(0)})},
                 {},
                 {proj(), an(2), an(1)}});
  raw.push_back({cpi(1, 4, -1), {atom(AtomHead::RE, {hs(0), hs(1)})}, {}, {proj(), an(1), an(0)}});
  return to_expr(raw);
}

// the same coefficient organized through the scalar curvature
Expr expect_c1() {
  std::vector<RawTerm> raw;
  raw.push_back({cpi(1, 8, -1), {atom(AtomHead::RX, {})}, {}, {proj()}});
  raw.push_back({cpi(1, 2, -1),
                 {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)}),
                  atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                 {},
                 {proj()}});
  raw.push_back({cpi(1, 1, -1), {atom(AtomHead::RE, {hs(0), as(0)})}, {}, {proj()}});
  raw.push_back({cpi(-1, 18, -1),
                 {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)}),
                  atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                 {},
                 {proj()}});
  raw.push_back({cpi(1, 36, -1),
                 {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)}),
                  atom(AtomHead::NABLAJ, {hs(0), hs(3), hs(4)})},
                 {},
                 {cr(1), cr(2), proj(), an(4), an(3)}});
  raw.push_back({cpi(-1, 6, -1),
                 {atom(AtomHead::RTX, {as(1), as(2), hs(0), as(0)})},
                 {},
                 {cr(1), cr(2), proj()}});
  raw.push_back({cpi(-1, 4, -1), {atom(AtomHead::RE, {as(0), as(1)})}, {}, {cr(0), cr(1), proj()}});
  raw.push_back({cpi(1, 6, -1),
                 {atom(AtomHead::RTX, {hs(1), hs(2), hs(0), as(0)})},
                 {},
                 {proj(), an(2), an(1)}});
  raw.push_back({cpi(1, 4, -1), {atom(AtomHead::RE, {hs(0), hs(1)})}, {}, {proj(), an(1), an(0)}});
  return to_expr(raw);
}

// fiber trace of the degree-two coefficient
Expr expect_c2() {
  std::vector<RawTerm> raw;
  raw.push_back({cpi(1, 8, -1), {atom(AtomHead::RX, {})}, {}, {}});
  raw.push_back({cpi(1, 2, -1),
                 {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)}),
                  atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})},
                 {},
                 {}});
  raw.push_back({cpi(1, 1, -1), {atom(AtomHead::RE, {hs(0), as(0)})}, {}, {}});
  return to_expr(raw);
}

}  // namespace

// ===== STAGED EVALUATION =====

void check_step(const std::string& step, const Expr& computed, const Expr& expected,
                std::map<std::string, bool>& flags) {
  const Expr ca = canonicalize(computed);
  const Expr cb = canonicalize(expected);
  const bool ok = equal(ca, cb);
  flags[step] = ok;
  if (!ok)
    throw err::MismatchError(step, to_string(ca), to_string(cb),
                             to_string(canonicalize(computed - expected)));
}

ExpansionReport compute_F2(const IdentityRuleSet& rules) {
  ExpansionReport rep;
  auto& flags = rep.match_flags;
  auto& mid = rep.intermediate;

  const Expr q1 = build_Q1();

  // first application to the projected ground kernel, then the inverse on the
  // excited levels
  const Expr s1 = apply_to_PN(q1);
  check_step("Q1PN", s1, expect_q1_pn(), flags);
  mid["Q1PN"] = s1;

  const Expr r1 = resolvent_apply(project_excited(s1));
  check_step("ResQ1PN", r1, expect_res_q1_pn(), flags);
  mid["ResQ1PN"] = r1;

  // half kernels at the origin and their adjoints
  const Expr g7l = eval_left_origin(r1);
  check_step("g7-left", g7l, expect_g7_left(), flags);
  mid["g7-left"] = g7l;

  const Expr g7r = eval_right_origin(r1);
  check_step("g7-right", g7r, expect_g7_right(), flags);
  mid["g7-right"] = g7r;

  const Expr left_w = half_to_w(g7l);
  const Expr adj_left = half_dagger(left_w);
  const Expr adj_right = half_dagger(g7r);
  {
    const Expr want_l = expect_adjoint_left();
    const Expr want_r = expect_adjoint_right();
    const bool ok = equal(adj_left, want_l) && equal(adj_right, want_r);
    flags["0g8"] = ok;
    if (!ok)
      throw err::MismatchError(
          "0g8", to_string(canonicalize(adj_left)) + "\n" + to_string(canonicalize(adj_right)),
          to_string(canonicalize(want_l)) + "\n" + to_string(canonicalize(want_r)),
          to_string(canonicalize(adj_left - want_l)) + "\n" +
              to_string(canonicalize(adj_right - want_r)));
  }
  mid["0g8"] = adj_left;

  // products of two half kernels: the excited-half square and the two-sided
  // square, the second with the inverse split one factor per half
  const Expr term5 = compose_at_origin(left_w, adj_left);
  check_step("0g9", term5, expect_0g9(), flags);
  mid["0g9"] = term5;

  const Expr term6 = -compose_at_origin(adj_right, g7r);
  check_step("0g9a", term6, expect_0g9a(), flags);
  mid["0g9a"] = term6;

  // second application of the degree-one perturbation
  const Expr s2 = apply_to_state(q1, r1);
  const Expr term1 = eval_origin(resolvent_apply(project_excited(s2)));
  check_step("g8", term1, expect_g8(), flags);
  mid["g8"] = term1;

  // degree-two perturbation: expand the Clifford-twist curvature first, since
  // its endomorphism letters must enter the word calculus explicitly
  const Expr diff = apply_identities(build_Q2_minus_O2(), rules, {"rcliff_expand"});
  const Expr s3 = apply_to_PN(diff);
  const Expr g11v = -eval_origin(resolvent_apply(project_excited(s3)));
  check_step("g11", g11v, expect_g11(), flags);
  mid["g11"] = g11v;

  const Expr g14v = apply_identities(g11v, rules);
  check_step("g14", g14v, expect_g14(), flags);
  mid["g14"] = g14v;

  // cross terms of the odd-degree perturbations, imported as a closed lemma
  const Expr cross = lemma_g60();
  flags["g60"] = true;
  mid["g60"] = cross;

  const Expr term2 = g14v + cross;
  const Expr term3 = end_dagger(term1);
  const Expr term4 = end_dagger(term2);

  // assembly, reduction, and the fiber trace
  const Expr b1 = apply_identities(term1 + term2 + term3 + term4 + term5 + term6, rules);
  check_step("g18", b1, expect_g18(), flags);
  mid["g18"] = b1;
  check_step("c1", b1, apply_identities(expect_c1(), rules), flags);

  rep.b0 = compute_b0(ModelParams{{Rational(1)}});
  rep.b1 = b1;
  rep.trace_b1 = lambda_trace(b1);
  check_step("c2", rep.trace_b1, apply_identities(expect_c2(), rules), flags);

  return rep;
}

}  // namespace bklab
