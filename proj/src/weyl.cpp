#include "bklab/weyl.hpp"

#include <algorithm>
#include <stdexcept>

namespace bklab {

namespace {

int kind_rank(GKind k) { return static_cast<int>(k); }

// Unify `from` into `to`; if the unified label then occurs nowhere, the
// contraction left a bare dimension sum behind, which the engine cannot hold.
void remap_raw(RawTerm& t, int from, int to) {
  int hits = 0;
  auto m = [&](int& l) {
    if (l == from) l = to;
    if (l == to) ++hits;
  };
  for (auto& a : t.atoms)
    for (auto& s : a.slots) m(s.label);
  for (auto& g : t.gens) m(g.label);
  for (auto& e : t.exts)
    if (e.k != EKind::PROJ) m(e.label);
  if (hits == 0)
    throw err::NeedExplicitDimension(
        "contraction eliminated a dummy label entirely, leaving a dimension factor");
}

void shift_raw(RawTerm& t, int offset) {
  for (auto& a : t.atoms)
    for (auto& s : a.slots) s.label += offset;
  for (auto& g : t.gens) g.label += offset;
  for (auto& e : t.exts)
    if (e.k != EKind::PROJ) e.label += offset;
}

// Commutation data for an adjacent out-of-order generator pair (left, right):
// word(left right) = word(right left) + factor * delta * word(removed).
// Returns whether a delta branch exists and the branch factor.
bool delta_factor(GKind left, GKind right, Coefficient& f) {
  if (left == GKind::Z && right == GKind::B) {
    f = Coefficient::rational(2);
    return true;
  }
  if (left == GKind::BP && right == GKind::B) {
    f = Coefficient::pi_pow(1, Rational(4));
    return true;
  }
  if (left == GKind::BP && right == GKind::ZB) {
    f = Coefficient::rational(2);
    return true;
  }
  return false;
}

Rational factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return Rational(r, BigInt(1));
}

void dagger_ext_inplace(Term& t) {
  size_t p = t.ext.cr.size(), q = t.ext.an.size();
  if (((p * (p - 1) / 2 + q * (q - 1) / 2) % 2) != 0) t.c = -t.c;
  std::swap(t.ext.cr, t.ext.an);
}

void conj_atoms_and_coeff_inplace(Term& t) {
  t.c = t.c.conj();
  for (auto& a : t.atoms) {
    if (atom_conj_sign(a.head) < 0) t.c = -t.c;
    for (auto& s : a.slots) s.type = flip(s.type);
  }
}

}  // namespace

std::vector<Term> normalize_raw(const RawTerm& rt0) {
  std::vector<Term> out;
  std::vector<RawTerm> work{rt0};

  while (!work.empty()) {
    RawTerm t = std::move(work.back());
    work.pop_back();
    if (t.c.is_zero()) continue;

    // --- generator phase ---
    bool acted = false;
    for (size_t i = 0; i + 1 < t.gens.size(); ++i) {
      GKind a = t.gens[i].k, b = t.gens[i + 1].k;
      if (kind_rank(a) <= kind_rank(b)) continue;
      Coefficient f;
      if (delta_factor(a, b, f)) {
        int la = t.gens[i].label, lb = t.gens[i + 1].label;
        if (la == lb)
          throw err::NeedExplicitDimension(
              "contraction of a self-paired generator label produces a dimension factor");
        RawTerm d = t;
        d.c = t.c * f;
        d.gens.erase(d.gens.begin() + static_cast<long>(i),
                     d.gens.begin() + static_cast<long>(i) + 2);
        remap_raw(d, lb, la);
        work.push_back(std::move(d));
      }
      std::swap(t.gens[i], t.gens[i + 1]);
      work.push_back(std::move(t));
      acted = true;
      break;
    }
    if (acted) continue;

    // --- exterior phase ---
    bool dead = false;
    for (size_t i = 0; i + 1 < t.exts.size(); ++i) {
      EKind a = t.exts[i].k, b = t.exts[i + 1].k;
      if (a == EKind::PROJ && b == EKind::PROJ) {
        t.exts.erase(t.exts.begin() + static_cast<long>(i));
        work.push_back(std::move(t));
        acted = true;
        break;
      }
      if (a == EKind::AN && b == EKind::CR) {
        int la = t.exts[i].label, lb = t.exts[i + 1].label;
        if (la == lb)
          throw err::NeedExplicitDimension(
              "contraction of a repeated exterior index produces a dimension factor");
        RawTerm d = t;
        d.exts.erase(d.exts.begin() + static_cast<long>(i),
                     d.exts.begin() + static_cast<long>(i) + 2);
        remap_raw(d, lb, la);
        work.push_back(std::move(d));
        std::swap(t.exts[i], t.exts[i + 1]);
        t.c = -t.c;
        work.push_back(std::move(t));
        acted = true;
        break;
      }
      if ((a == EKind::AN && b == EKind::PROJ) || (a == EKind::PROJ && b == EKind::CR)) {
        dead = true;
        break;
      }
    }
    if (acted) continue;
    if (dead) continue;

    // --- fully ordered: assemble ---
    Term res;
    res.c = t.c;
    res.atoms = t.atoms;
    for (auto& g : t.gens) res.gen.list(g.k).push_back(g.label);
    bool zero = false;
    for (auto& e : t.exts) {
      switch (e.k) {
        case EKind::CR: res.ext.cr.push_back(e.label); break;
        case EKind::PROJ: res.ext.proj = true; break;
        case EKind::AN: res.ext.an.push_back(e.label); break;
      }
    }
    // ascending exterior letters; fold sorting signs into the coefficient
    auto sort_ext = [&](std::vector<int>& v) {
      for (size_t i = 1; i < v.size() && !zero; ++i)
        for (size_t j = i; j > 0 && v[j] <= v[j - 1]; --j) {
          if (v[j] == v[j - 1]) {
            zero = true;
            break;
          }
          std::swap(v[j], v[j - 1]);
          res.c = -res.c;
        }
    };
    sort_ext(res.ext.cr);
    sort_ext(res.ext.an);
    if (zero) continue;
    for (auto k : {GKind::B, GKind::Z, GKind::ZB, GKind::ZP, GKind::ZBP, GKind::BP})
      std::sort(res.gen.list(k).begin(), res.gen.list(k).end());
    compact_labels(res);
    out.push_back(std::move(res));
  }
  return out;
}

RawTerm to_raw(const Term& t) {
  RawTerm r;
  r.c = t.c;
  r.atoms = t.atoms;
  for (auto k : {GKind::B, GKind::Z, GKind::ZB, GKind::ZP, GKind::ZBP, GKind::BP})
    for (int l : t.gen.list(k)) r.gens.push_back({k, l});
  for (int l : t.ext.cr) r.exts.push_back({EKind::CR, l});
  if (t.ext.proj) r.exts.push_back({EKind::PROJ});
  for (int l : t.ext.an) r.exts.push_back({EKind::AN, l});
  return r;
}

Expr to_expr(const std::vector<RawTerm>& raw) {
  Expr e;
  for (auto& r : raw) {
    auto terms = normalize_raw(r);
    e.terms.insert(e.terms.end(), terms.begin(), terms.end());
  }
  return canonicalize(e);
}

Expr multiply(const Expr& a, const Expr& b) {
  std::vector<RawTerm> raws;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      RawTerm r = to_raw(ta);
      RawTerm rb = to_raw(tb);
      shift_raw(rb, ta.ndum);
      r.c = ta.c * tb.c;
      r.atoms.insert(r.atoms.end(), rb.atoms.begin(), rb.atoms.end());
      r.gens.insert(r.gens.end(), rb.gens.begin(), rb.gens.end());
      r.exts.insert(r.exts.end(), rb.exts.begin(), rb.exts.end());
      raws.push_back(std::move(r));
    }
  return to_expr(raws);
}

Expr commutator(const Expr& a, const Expr& b) { return multiply(a, b) - multiply(b, a); }

Expr ext_multiply(const Expr& a, const Expr& b) { return multiply(a, b); }

Expr formal_adjoint(const Expr& op) {
  Expr r;
  for (auto t : op.terms) {
    if (!t.gen.zp.empty() || !t.gen.zbp.empty())
      throw std::logic_error("formal_adjoint: operator must not carry primed letters");
    GenWord g;
    g.b = t.gen.bp;
    g.z = t.gen.zb;
    g.zb = t.gen.z;
    g.bp = t.gen.b;
    t.gen = g;
    dagger_ext_inplace(t);
    conj_atoms_and_coeff_inplace(t);
    r.terms.push_back(std::move(t));
  }
  return canonicalize(r);
}

Expr apply_to_state(const Expr& op, const Expr& state) {
  Expr cur = multiply(op, state);
  // Eliminate b+ (kills the ground kernel) and zbar (splits into b and zbar').
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<RawTerm> raws;
    Expr next;
    for (const auto& t : cur.terms) {
      if (!t.gen.bp.empty()) {
        changed = true;
        continue;
      }
      if (t.gen.zb.empty()) {
        next.terms.push_back(t);
        continue;
      }
      changed = true;
      int lbl = t.gen.zb.back();
      Term base = t;
      base.gen.zb.pop_back();

      RawTerm ra = to_raw(base);  // zbar_l P = (1/2pi) b_l P + zbar'_l P
      // insert the new b right of the z block so it commutes back out exactly
      auto pos = std::find_if(ra.gens.begin(), ra.gens.end(), [](const Gen& g) {
        return kind_rank(g.k) > kind_rank(GKind::Z);
      });
      ra.gens.insert(pos, Gen{GKind::B, lbl});
      ra.c = ra.c.scaled(Rational::frac(1, 2), -1);
      raws.push_back(std::move(ra));

      Term tb = base;
      tb.gen.zbp.push_back(lbl);
      std::sort(tb.gen.zbp.begin(), tb.gen.zbp.end());
      raws.push_back(to_raw(tb));
    }
    cur = next + to_expr(raws);
  }
  for (const auto& t : cur.terms)
    if (!t.ext.proj) throw std::logic_error("apply_to_state: state lost its projector");
  return cur;
}

Expr apply_to_PN(const Expr& op) {
  Term ground;
  ground.c = Coefficient::one();
  ground.ext.proj = true;
  Expr state;
  state.terms.push_back(ground);
  return apply_to_state(op, state);
}

int state_level(const Term& t) {
  return static_cast<int>(t.gen.b.size() + t.ext.cr.size());
}

Expr project_kernel(const Expr& state) {
  Expr r;
  for (const auto& t : state.terms)
    if (state_level(t) == 0) r.terms.push_back(t);
  return r;
}

Expr project_excited(const Expr& state) {
  Expr r;
  for (const auto& t : state.terms)
    if (state_level(t) != 0) r.terms.push_back(t);
  return r;
}

Expr resolvent_apply(const Expr& state) {
  Expr r;
  for (auto t : state.terms) {
    int m = state_level(t);
    if (m == 0)
      throw err::DivisionByZeroEigenvalue(
          "resolvent applied to a zero-eigenvalue kernel component");
    t.c = t.c.scaled(Rational::frac(1, 4 * m), -1);
    r.terms.push_back(std::move(t));
  }
  return canonicalize(r);
}

namespace {

// Perfect matchings of raising letters against holomorphic letters, -2 each.
void origin_matchings(const Term& t, int ndum_hint, std::vector<Term>& out) {
  if (t.gen.b.empty()) {
    if (t.gen.z.empty()) out.push_back(t);  // an unmatched z vanishes at the origin
    return;
  }
  Term base = t;
  int u = base.gen.b.back();
  base.gen.b.pop_back();
  for (size_t j = 0; j < base.gen.z.size(); ++j) {
    Term s = base;
    int v = s.gen.z[j];
    s.gen.z.erase(s.gen.z.begin() + static_cast<long>(j));
    s.c = s.c.scaled(Rational(-2));
    unify_pair(s, u, v, ndum_hint);
    origin_matchings(s, ndum_hint, out);
  }
}

// Every holomorphic letter must find a raising partner; leftovers of the
// raising kind survive as -2 pi zbar' factors.
void left_matchings(const Term& t, int ndum_hint, std::vector<Term>& out) {
  if (t.gen.z.empty()) {
    Term s = t;
    for (int u : s.gen.b) {
      s.gen.zbp.push_back(u);
      s.c = s.c.scaled(Rational(-2), 1);
    }
    s.gen.b.clear();
    std::sort(s.gen.zbp.begin(), s.gen.zbp.end());
    out.push_back(std::move(s));
    return;
  }
  Term base = t;
  int v = base.gen.z.back();
  base.gen.z.pop_back();
  for (size_t j = 0; j < base.gen.b.size(); ++j) {
    Term s = base;
    int u = s.gen.b[j];
    s.gen.b.erase(s.gen.b.begin() + static_cast<long>(j));
    s.c = s.c.scaled(Rational(-2));
    unify_pair(s, u, v, ndum_hint);
    left_matchings(s, ndum_hint, out);
  }
}

// Partial matchings: an unmatched raising letter turns into 2 pi zbar and
// unmatched holomorphic letters stay.
void right_matchings(const Term& t, int ndum_hint, std::vector<Term>& out) {
  if (t.gen.b.empty()) {
    out.push_back(t);
    return;
  }
  Term base = t;
  int u = base.gen.b.back();
  base.gen.b.pop_back();
  {
    Term s = base;
    s.gen.zb.push_back(u);
    s.c = s.c.scaled(Rational(2), 1);
    right_matchings(s, ndum_hint, out);
  }
  for (size_t j = 0; j < base.gen.z.size(); ++j) {
    Term s = base;
    int v = s.gen.z[j];
    s.gen.z.erase(s.gen.z.begin() + static_cast<long>(j));
    s.c = s.c.scaled(Rational(-2));
    unify_pair(s, u, v, ndum_hint);
    right_matchings(s, ndum_hint, out);
  }
}

}  // namespace

Expr eval_origin(const Expr& state) {
  Expr r;
  for (const auto& t : state.terms) {
    if (!t.gen.zp.empty() || !t.gen.zbp.empty()) continue;
    if (!t.gen.zb.empty() || !t.gen.bp.empty())
      throw std::logic_error("eval_origin: not a normalized state");
    std::vector<Term> done;
    origin_matchings(t, t.ndum, done);
    for (auto& d : done) {
      compact_labels(d);
      r.terms.push_back(std::move(d));
    }
  }
  return canonicalize(r);
}

Expr eval_left_origin(const Expr& state) {
  Expr r;
  for (const auto& t : state.terms) {
    if (!t.gen.zb.empty() || !t.gen.bp.empty())
      throw std::logic_error("eval_left_origin: not a normalized state");
    std::vector<Term> done;
    left_matchings(t, t.ndum, done);
    for (auto& d : done) {
      compact_labels(d);
      r.terms.push_back(std::move(d));
    }
  }
  return canonicalize(r);
}

Expr eval_right_origin(const Expr& state) {
  Expr r;
  for (const auto& t : state.terms) {
    if (!t.gen.zp.empty() || !t.gen.zbp.empty()) continue;
    if (!t.gen.zb.empty() || !t.gen.bp.empty())
      throw std::logic_error("eval_right_origin: not a normalized state");
    std::vector<Term> done;
    right_matchings(t, t.ndum, done);
    for (auto& d : done) {
      std::sort(d.gen.z.begin(), d.gen.z.end());
      std::sort(d.gen.zb.begin(), d.gen.zb.end());
      compact_labels(d);
      r.terms.push_back(std::move(d));
    }
  }
  return canonicalize(r);
}

Expr half_to_w(const Expr& half) {
  Expr r;
  for (auto t : half.terms) {
    if (!t.gen.b.empty() || !t.gen.z.empty() || !t.gen.zb.empty() || !t.gen.bp.empty())
      throw std::logic_error("half_to_w: expected a primed-variable function");
    t.gen.z = std::move(t.gen.zp);
    t.gen.zb = std::move(t.gen.zbp);
    t.gen.zp.clear();
    t.gen.zbp.clear();
    r.terms.push_back(std::move(t));
  }
  return r;
}

Expr half_dagger(const Expr& half) {
  Expr r;
  for (auto t : half.terms) {
    if (!t.gen.b.empty() || !t.gen.bp.empty() || !t.gen.zp.empty() || !t.gen.zbp.empty())
      throw std::logic_error("half_dagger: expected an evaluated function term");
    std::swap(t.gen.z, t.gen.zb);
    dagger_ext_inplace(t);
    conj_atoms_and_coeff_inplace(t);
    r.terms.push_back(std::move(t));
  }
  return canonicalize(r);
}

Expr end_dagger(const Expr& e) {
  Expr r;
  for (auto t : e.terms) {
    if (!t.gen.empty()) throw std::logic_error("end_dagger: generator letters present");
    dagger_ext_inplace(t);
    conj_atoms_and_coeff_inplace(t);
    r.terms.push_back(std::move(t));
  }
  return canonicalize(r);
}

namespace {

void wick(const Term& t, std::vector<Term>& out) {
  if (t.gen.zb.empty()) {
    if (!t.gen.z.empty()) return;  // unbalanced moment vanishes
    out.push_back(t);
    return;
  }
  Term base = t;
  int u = base.gen.zb.back();
  base.gen.zb.pop_back();
  for (size_t j = 0; j < base.gen.z.size(); ++j) {
    Term s = base;
    int v = s.gen.z[j];
    s.gen.z.erase(s.gen.z.begin() + static_cast<long>(j));
    unify_pair(s, u, v, t.ndum);
    s.c = s.c.scaled(Rational(1), -1);
    wick(s, out);
  }
}

}  // namespace

Expr compose_at_origin(const Expr& a, const Expr& b) {
  std::vector<RawTerm> raws;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      if (!ta.gen.b.empty() || !ta.gen.bp.empty() || !ta.gen.zp.empty() ||
          !ta.gen.zbp.empty() || !tb.gen.b.empty() || !tb.gen.bp.empty() ||
          !tb.gen.zp.empty() || !tb.gen.zbp.empty())
        throw std::logic_error("compose_at_origin: expects evaluated function terms");
      RawTerm r = to_raw(ta);
      RawTerm rb = to_raw(tb);
      shift_raw(rb, ta.ndum);
      r.c = ta.c * tb.c;
      r.atoms.insert(r.atoms.end(), rb.atoms.begin(), rb.atoms.end());
      r.gens.insert(r.gens.end(), rb.gens.begin(), rb.gens.end());
      r.exts.insert(r.exts.end(), rb.exts.begin(), rb.exts.end());
      raws.push_back(std::move(r));
    }
  Expr merged = to_expr(raws);
  Expr out;
  for (const auto& t : merged.terms) {
    std::vector<Term> matched;
    wick(t, matched);
    for (auto& m : matched) {
      compact_labels(m);
      out.terms.push_back(std::move(m));
    }
  }
  return canonicalize(out);
}

Coefficient gaussian_moment(int a, int b) {
  if (a != b) return Coefficient::zero();
  return Coefficient::pi_pow(-a, factorial(a));
}

}  // namespace bklab
