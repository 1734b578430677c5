#pragma once

// Concrete-function oracle for the kernel calculus.
//
// Represents p(Z, Zbar, Z', Zbar') restricted against the ground kernel
// P(Z,Z') = exp(-pi/2 (|Z|^2 + |Z'|^2 - 2 <Z, Z'>)); generators act as honest
// differential/multiplication operators on p, so the symbolic engine's
// normal ordering, state calculus, evaluations, and Gaussian composition can
// all be cross-checked against this model with no shared code path.

#include "bklab/errors.hpp"
#include "bklab/term.hpp"
#include "bklab/weyl.hpp"

#include <complex>
#include <numbers>
#include <map>
#include <vector>

namespace bklab {

struct PolyKernel {
  // exponent layout per monomial key: z_0..z_{n-1}, zb, zp, zbp (4n entries)
  int n = 1;
  std::map<std::vector<int>, std::complex<double>> mono;

  explicit PolyKernel(int n_ = 1) : n(n_) {}

  static PolyKernel unit(int n_) {
    PolyKernel p(n_);
    p.mono[std::vector<int>(static_cast<size_t>(4 * n_), 0)] = 1.0;
    return p;
  }

  void add(const std::vector<int>& key, std::complex<double> c) {
    auto& v = mono[key];
    v += c;
    if (std::abs(v) < 1e-300) mono.erase(key);
  }

  PolyKernel scaled(std::complex<double> c) const {
    PolyKernel r(n);
    for (auto& [k, v] : mono) r.mono[k] = v * c;
    return r;
  }

  PolyKernel plus(const PolyKernel& o) const {
    PolyKernel r = *this;
    for (auto& [k, v] : o.mono) r.add(k, v);
    return r;
  }

  double max_abs_diff(const PolyKernel& o) const {
    double m = 0;
    for (auto& [k, v] : mono) {
      auto it = o.mono.find(k);
      m = std::max(m, std::abs(v - (it == o.mono.end() ? 0.0 : it->second)));
    }
    for (auto& [k, v] : o.mono)
      if (!mono.count(k)) m = std::max(m, std::abs(v));
    return m;
  }
};

namespace pk {

constexpr double kTau = 2.0 * std::numbers::pi;

// slot offsets inside the exponent vector
inline int oz(int, int i) { return i; }
inline int ozb(int n, int i) { return n + i; }
inline int ozp(int n, int i) { return 2 * n + i; }
inline int ozbp(int n, int i) { return 3 * n + i; }

inline PolyKernel mul_var(const PolyKernel& p, int off) {
  PolyKernel r(p.n);
  for (auto& [k, v] : p.mono) {
    auto key = k;
    key[static_cast<size_t>(off)]++;
    r.add(key, v);
  }
  return r;
}

inline PolyKernel d_var(const PolyKernel& p, int off) {
  PolyKernel r(p.n);
  for (auto& [k, v] : p.mono) {
    int e = k[static_cast<size_t>(off)];
    if (e == 0) continue;
    auto key = k;
    key[static_cast<size_t>(off)]--;
    r.add(key, v * static_cast<double>(e));
  }
  return r;
}

// b_i (p P) = (-2 d_{z_i} p + 2pi (zb_i - zb'_i) p) P
inline PolyKernel act_b(const PolyKernel& p, int i) {
  PolyKernel r = d_var(p, oz(p.n, i)).scaled(-2.0);
  r = r.plus(mul_var(p, ozb(p.n, i)).scaled(kTau));
  r = r.plus(mul_var(p, ozbp(p.n, i)).scaled(-kTau));
  return r;
}

// b_i^+ (p P) = (2 d_{zb_i} p) P
inline PolyKernel act_bp(const PolyKernel& p, int i) { return d_var(p, ozb(p.n, i)).scaled(2.0); }

inline PolyKernel act_gen(const PolyKernel& p, GKind k, int i) {
  switch (k) {
    case GKind::B: return act_b(p, i);
    case GKind::BP: return act_bp(p, i);
    case GKind::Z: return mul_var(p, oz(p.n, i));
    case GKind::ZB: return mul_var(p, ozb(p.n, i));
    case GKind::ZP: return mul_var(p, ozp(p.n, i));
    case GKind::ZBP: return mul_var(p, ozbp(p.n, i));
  }
  return p;
}

// Einstein realization: sum every term's dummy labels over the n directions.
// Terms must be atom-free with exterior part I (or identity when proj=false
// is ever used); word letters applied rightmost-first.
inline PolyKernel from_expr(const Expr& e, int n) {
  PolyKernel acc(n);
  for (const auto& t : e.terms) {
    if (!t.atoms.empty()) throw err::OracleFailure("poly oracle: atoms present");
    if (!t.ext.cr.empty() || !t.ext.an.empty())
      throw err::OracleFailure("poly oracle: nonscalar exterior word");
    RawTerm raw = to_raw(t);
    int nd = std::max(t.ndum, 0);
    std::vector<int> dirs(static_cast<size_t>(std::max(nd, 1)), 0);
    while (true) {
      PolyKernel p = PolyKernel::unit(n);
      for (auto it = raw.gens.rbegin(); it != raw.gens.rend(); ++it)
        p = act_gen(p, it->k, dirs[static_cast<size_t>(it->label)]);
      acc = acc.plus(p.scaled(t.c.to_complex()));
      int q = 0;
      for (; q < nd; ++q) {
        if (++dirs[static_cast<size_t>(q)] < n) break;
        dirs[static_cast<size_t>(q)] = 0;
      }
      if (q == nd) break;
    }
  }
  return acc;
}

inline std::complex<double> const_coeff(const PolyKernel& p) {
  auto it = p.mono.find(std::vector<int>(static_cast<size_t>(4 * p.n), 0));
  return it == p.mono.end() ? 0.0 : it->second;
}

// restriction Z = 0: drop every monomial with unprimed exponents
inline PolyKernel restrict_left(const PolyKernel& p) {
  PolyKernel r(p.n);
  for (auto& [k, v] : p.mono) {
    bool keep = true;
    for (int i = 0; i < 2 * p.n; ++i)
      if (k[static_cast<size_t>(i)] != 0) keep = false;
    if (keep) r.add(k, v);
  }
  return r;
}

// restriction Z' = 0
inline PolyKernel restrict_right(const PolyKernel& p) {
  PolyKernel r(p.n);
  for (auto& [k, v] : p.mono) {
    bool keep = true;
    for (int i = 2 * p.n; i < 4 * p.n; ++i)
      if (k[static_cast<size_t>(i)] != 0) keep = false;
    if (keep) r.add(k, v);
  }
  return r;
}

// int w^a wbar^b e^{-pi |w|^2} dA = delta_ab a! / pi^a, per direction.
inline std::complex<double> moment_integral(const std::vector<int>& zexp,
                                            const std::vector<int>& zbexp) {
  std::complex<double> m = 1.0;
  for (size_t i = 0; i < zexp.size(); ++i) {
    if (zexp[i] != zbexp[i]) return 0.0;
    double f = 1.0;
    for (int k = 1; k <= zexp[i]; ++k) f *= k / std::numbers::pi;
    m *= f;
  }
  return m;
}

// (K1 o K2)(0,0) where K1 is a function of Z' = W (left half evaluated at
// Z = 0) and K2 a function of Z = W (right half evaluated at Z' = 0); the two
// Gaussian tails combine to exp(-pi |w|^2).
inline std::complex<double> compose_origin(const PolyKernel& left, const PolyKernel& right) {
  std::complex<double> acc = 0.0;
  for (auto& [k1, v1] : left.mono)
    for (auto& [k2, v2] : right.mono) {
      std::vector<int> zexp(static_cast<size_t>(left.n)), zbexp(static_cast<size_t>(left.n));
      for (int i = 0; i < left.n; ++i) {
        // left half contributes w via its primed slots, right half via unprimed
        zexp[static_cast<size_t>(i)] =
            k1[static_cast<size_t>(ozp(left.n, i))] + k2[static_cast<size_t>(oz(left.n, i))];
        zbexp[static_cast<size_t>(i)] =
            k1[static_cast<size_t>(ozbp(left.n, i))] + k2[static_cast<size_t>(ozb(left.n, i))];
      }
      acc += v1 * v2 * moment_integral(zexp, zbexp);
    }
  return acc;
}

}  // namespace pk
}  // namespace bklab
