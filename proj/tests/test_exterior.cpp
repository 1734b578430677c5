// Exterior fiber tests: CAR matrices, normalization vs brute-force matrices,
// the diagonal model operator, Clifford pair products, and the fiber trace.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bklab/errors.hpp"
#include "bklab/exterior.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <map>
#include <random>
#include <vector>

using namespace bklab;
using cplx = std::complex<double>;

namespace {

double mat_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd anti(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a * b + b * a;
}

// Random numeric atom values respecting each head's slot symmetry group:
// the minimal (type, direction) arrangement over the group is the cache key,
// and the relating sign is applied.  Conflicting signs on the same minimal
// arrangement force the value to zero.
struct AtomValues {
  std::mt19937 rng{4242};
  std::map<std::vector<int>, cplx> cache;

  cplx value(const Atom& a, const std::vector<int>& dir) {
    if (atom_type_zero(a)) return 0.0;
    std::vector<std::vector<int>> rows;
    for (auto& s : a.slots)
      rows.push_back({static_cast<int>(s.type), dir[static_cast<size_t>(s.label)]});
    auto best = rows;
    int bsign = 1;
    bool dead = false;
    for (auto& op : atom_symmetries(a.head)) {
      std::vector<std::vector<int>> img(rows.size());
      for (size_t i = 0; i < rows.size(); ++i)
        img[i] = rows[static_cast<size_t>(op.perm[i])];
      if (img < best) {
        best = img;
        bsign = op.sign;
        dead = false;
      } else if (img == best && op.sign != bsign) {
        dead = true;
      }
    }
    if (dead) return 0.0;
    std::vector<int> key{static_cast<int>(a.head)};
    for (auto& r : best) key.insert(key.end(), r.begin(), r.end());
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      it = cache.emplace(key, cplx(u(rng), u(rng))).first;
    }
    return static_cast<double>(bsign) * it->second;
  }
};

// Einstein sum over direction assignments: atom values times the matrix of
// the canonical exterior word.  Terms must be generator-free.
Eigen::MatrixXcd nv_matrix(const ExtAlgebra& X, AtomValues& vals, const Expr& e) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(X.dim(), X.dim());
  for (auto& t : e.terms) {
    for (auto k : {GKind::B, GKind::Z, GKind::ZB, GKind::ZP, GKind::ZBP, GKind::BP})
      REQUIRE(t.gen.list(k).empty());
    int nl = t.ndum;
    std::vector<int> dir(static_cast<size_t>(std::max(nl, 1)), 0);
    while (true) {
      cplx w = t.c.to_complex();
      for (auto& a : t.atoms) w *= vals.value(a, dir);
      std::vector<int> cr, an;
      for (int l : t.ext.cr) cr.push_back(dir[static_cast<size_t>(l)]);
      for (int l : t.ext.an) an.push_back(dir[static_cast<size_t>(l)]);
      acc += w * X.word(cr, t.ext.proj, an);
      int q = 0;
      for (; q < nl; ++q) {
        if (++dir[static_cast<size_t>(q)] < X.n) break;
        dir[static_cast<size_t>(q)] = 0;
      }
      if (q == nl) break;
    }
  }
  return acc;
}

// The same sum for one raw word, multiplying letter matrices in written order.
Eigen::MatrixXcd raw_matrix(const ExtAlgebra& X, AtomValues& vals,
                            const RawTerm& raw, int nlabels) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(X.dim(), X.dim());
  std::vector<int> dir(static_cast<size_t>(std::max(nlabels, 1)), 0);
  while (true) {
    cplx w = raw.c.to_complex();
    for (auto& a : raw.atoms) w *= vals.value(a, dir);
    Eigen::MatrixXcd m = X.identity();
    for (auto& e : raw.exts) {
      switch (e.k) {
        case EKind::CR: m = m * X.creation(dir[static_cast<size_t>(e.label)]); break;
        case EKind::PROJ: m = m * X.proj0(); break;
        case EKind::AN: m = m * X.annihilation(dir[static_cast<size_t>(e.label)]); break;
      }
    }
    acc += w * m;
    int q = 0;
    for (; q < nlabels; ++q) {
      if (++dir[static_cast<size_t>(q)] < X.n) break;
      dir[static_cast<size_t>(q)] = 0;
    }
    if (q == nlabels) break;
  }
  return acc;
}

Atom pair_atom(AtomHead h, int l0, int l1) {
  return Atom{h, {Slot{VType::Holo, l0}, Slot{VType::Holo, l1}}};
}

// Real-frame values of a (1,1) two-form given its complex-frame block
// R(w_a, wbar_b); rows/columns follow the c_real ordering.
Eigen::MatrixXcd real_frame_form(const Eigen::MatrixXcd& rw) {
  int n = static_cast<int>(rw.rows());
  double s = 1.0 / std::sqrt(2.0);
  std::vector<Eigen::VectorXcd> al(static_cast<size_t>(2 * n)),
      be(static_cast<size_t>(2 * n));
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXcd ha = Eigen::VectorXcd::Zero(n), hb = Eigen::VectorXcd::Zero(n);
    ha(a) = s;
    hb(a) = s;
    al[static_cast<size_t>(2 * a)] = ha;
    be[static_cast<size_t>(2 * a)] = hb;
    ha(a) = cplx(0.0, s);
    hb(a) = cplx(0.0, -s);
    al[static_cast<size_t>(2 * a + 1)] = ha;
    be[static_cast<size_t>(2 * a + 1)] = hb;
  }
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int l = 0; l < 2 * n; ++l)
    for (int m = 0; m < 2 * n; ++m) {
      cplx v = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          v += al[static_cast<size_t>(l)](a) * be[static_cast<size_t>(m)](b) * rw(a, b);
          v -= be[static_cast<size_t>(l)](a) * al[static_cast<size_t>(m)](b) * rw(b, a);
        }
      r(l, m) = v;
    }
  return r;
}

}  // namespace

// ===== CAR MATRICES =====

TEST_CASE("canonical anticommutation relations") {
  for (int n = 1; n <= 4; ++n) {
    ExtAlgebra X(n);
    Eigen::MatrixXcd id = X.identity(), zero = Eigen::MatrixXcd::Zero(X.dim(), X.dim());
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        CHECK(mat_diff(anti(X.creation(j), X.annihilation(k)),
                       j == k ? id : zero) < 1e-12);
        CHECK(mat_diff(anti(X.creation(j), X.creation(k)), zero) < 1e-12);
        CHECK(mat_diff(anti(X.annihilation(j), X.annihilation(k)), zero) < 1e-12);
        CHECK(mat_diff(anti(X.c_w(j), X.c_wbar(k)), j == k ? -2.0 * id : zero) < 1e-12);
        CHECK(mat_diff(anti(X.c_w(j), X.c_w(k)), zero) < 1e-12);
      }
    for (int l = 0; l < 2 * n; ++l)
      for (int m = 0; m < 2 * n; ++m)
        CHECK(mat_diff(anti(X.c_real(l), X.c_real(m)), l == m ? -2.0 * id : zero) <
              1e-12);
    // the projector annihilates wedges from the left, contractions from the right
    for (int j = 0; j < n; ++j) {
      CHECK(mat_diff(X.proj0() * X.creation(j), zero) < 1e-12);
      CHECK(mat_diff(X.annihilation(j) * X.proj0(), zero) < 1e-12);
    }
    CHECK(mat_diff(X.proj0() * X.proj0(), X.proj0()) < 1e-12);
  }
}

// ===== NORMALIZATION VS MATRICES =====

TEST_CASE("exterior normalization agrees with the matrices") {
  std::mt19937 rng(515);
  AtomValues vals;
  std::uniform_int_distribution<int> halflen(1, 2), coin(0, 1);
  for (int n = 2; n <= 3; ++n) {
    ExtAlgebra X(n);
    for (int trial = 0; trial < 25; ++trial) {
      int L = 2 * halflen(rng);
      RawTerm raw;
      raw.c = Coefficient::frac(1, 3);
      for (int i = 0; i < L; ++i)
        raw.exts.push_back({coin(rng) ? EKind::CR : EKind::AN, i});
      if (coin(rng)) {
        std::uniform_int_distribution<int> pos(0, L);
        raw.exts.insert(raw.exts.begin() + pos(rng), {EKind::PROJ, -1});
      }
      for (int i = 0; i < L; i += 2)
        raw.atoms.push_back(pair_atom(coin(rng) ? AtomHead::D2TAU : AtomHead::RE,
                                      i, i + 1));
      Expr e = to_expr({raw});
      CHECK(mat_diff(nv_matrix(X, vals, e), raw_matrix(X, vals, raw, L)) < 1e-9);
    }
  }
}

// ===== DIAGONAL MODEL =====

TEST_CASE("diagonal model operator") {
  constexpr double pi = 3.14159265358979323846;

  // one positive direction: zero on degree 0, -2pi on degree 1
  {
    ExtAlgebra X(1);
    Eigen::MatrixXcd w = omega_d(X, DiagModel{{2 * pi}});
    CHECK(std::abs(w(0, 0)) < 1e-12);
    CHECK(std::abs(w(1, 1) + 2 * pi) < 1e-12);
  }
  // one negative direction: the kernel moves to degree 1
  {
    ExtAlgebra X(1);
    DiagModel m{{-2 * pi}};
    Eigen::MatrixXcd w = omega_d(X, m);
    CHECK(std::abs(w(0, 0) + 2 * pi) < 1e-12);
    CHECK(std::abs(w(1, 1)) < 1e-12);
    CHECK(m.q() == 1);
  }
  {
    DiagModel m{{-2 * pi, 4 * pi}};
    CHECK(m.q() == 1);
    CHECK(std::abs(m.tau() - 6 * pi) < 1e-12);
    CHECK(std::abs(m.mu0() - 2 * pi) < 1e-12);
  }
  CHECK_THROWS_AS(omega_d(ExtAlgebra(2), DiagModel{{1.0, 0.0}}), err::InvalidParams);
  CHECK_THROWS_AS(omega_d(ExtAlgebra(3), DiagModel{{1.0, 2.0}}), err::InvalidParams);

  // random models: diagonal, kernel exactly on the negative-index wedge,
  // every other eigenvalue at most -mu0
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> mag(0.3, 4.0);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int n = 1; n <= 4; ++n) {
    ExtAlgebra X(n);
    for (int trial = 0; trial < 10; ++trial) {
      DiagModel m;
      int kernel_mask = 0;
      for (int j = 0; j < n; ++j) {
        double x = mag(rng) * (coin(rng) ? 1.0 : -1.0);
        m.a.push_back(x);
        if (x < 0) kernel_mask |= 1 << j;
      }
      Eigen::MatrixXcd w = omega_d(X, m);
      for (int s = 0; s < X.dim(); ++s) {
        for (int t = 0; t < X.dim(); ++t)
          if (s != t) CHECK(std::abs(w(s, t)) < 1e-12);
        double ev = w(s, s).real();
        if (s == kernel_mask)
          CHECK(std::abs(ev) < 1e-12);
        else
          CHECK(ev <= -m.mu0() + 1e-12);
      }
    }
  }
}

// ===== CURVATURE CONTRACTION =====

TEST_CASE("curvature contraction matches the model operator") {
  std::mt19937 rng(1313);
  std::uniform_real_distribution<double> mag(0.3, 4.0), u(-1.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);

  for (int n = 1; n <= 3; ++n) {
    ExtAlgebra X(n);

    // diagonal two-form with block R(w_a, wbar_b) = a_a delta_ab:
    // (1/2) R(e_l, e_m) c(e_l) c(e_m) = -2 omega_d - tau
    for (int trial = 0; trial < 8; ++trial) {
      DiagModel m;
      for (int j = 0; j < n; ++j) m.a.push_back(mag(rng) * (coin(rng) ? 1.0 : -1.0));
      Eigen::MatrixXcd rw = Eigen::MatrixXcd::Zero(n, n);
      for (int j = 0; j < n; ++j) rw(j, j) = m.a[static_cast<size_t>(j)];
      Eigen::MatrixXcd r = real_frame_form(rw);
      Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Zero(X.dim(), X.dim());
      for (int l = 0; l < 2 * n; ++l)
        for (int k = 0; k < 2 * n; ++k)
          lhs += 0.5 * r(l, k) * (X.c_real(l) * X.c_real(k));
      Eigen::MatrixXcd rhs = -2.0 * omega_d(X, m) - m.tau() * X.identity();
      CHECK(mat_diff(lhs, rhs) < 1e-9);
    }

    // generic (1,1) block: the contraction collapses to wedge/contraction
    // pairs plus the plain trace
    for (int trial = 0; trial < 8; ++trial) {
      Eigen::MatrixXcd rw(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) rw(a, b) = cplx(u(rng), u(rng));
      Eigen::MatrixXcd r = real_frame_form(rw);
      Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Zero(X.dim(), X.dim());
      for (int l = 0; l < 2 * n; ++l)
        for (int k = 0; k < 2 * n; ++k)
          lhs += 0.5 * r(l, k) * (X.c_real(l) * X.c_real(k));
      Eigen::MatrixXcd rhs = -rw.trace() * X.identity();
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          rhs += 2.0 * rw(a, b) * (X.creation(b) * X.annihilation(a));
      CHECK(mat_diff(lhs, rhs) < 1e-9);
    }
  }
}

// ===== CLIFFORD PAIR PRODUCTS =====

TEST_CASE("clifford pair products") {
  // already-normal combinations freeze directly
  {
    RawTerm want;
    want.c = Coefficient::rational(2);
    want.exts = {{EKind::CR, 0}, {EKind::CR, 1}};
    CHECK(equal(to_expr({clifford_cc(VType::Holo, 0, VType::Holo, 1)}),
                to_expr({want})));
  }
  {
    RawTerm want;
    want.c = Coefficient::rational(-2);
    want.exts = {{EKind::CR, 0}, {EKind::AN, 1}};
    CHECK(equal(to_expr({clifford_cc(VType::Holo, 0, VType::Anti, 1)}),
                to_expr({want})));
  }
  {
    RawTerm want;
    want.c = Coefficient::rational(2);
    want.exts = {{EKind::AN, 0}, {EKind::AN, 1}};
    CHECK(equal(to_expr({clifford_cc(VType::Anti, 0, VType::Anti, 1)}),
                to_expr({want})));
  }
  // the mixed order produces the contraction branch; anchor the labels
  {
    RawTerm raw = clifford_cc(VType::Anti, 0, VType::Holo, 1);
    raw.atoms.push_back(pair_atom(AtomHead::D2TAU, 0, 1));
    RawTerm pushed;
    pushed.c = Coefficient::rational(2);
    pushed.atoms = {pair_atom(AtomHead::D2TAU, 0, 1)};
    pushed.exts = {{EKind::CR, 1}, {EKind::AN, 0}};
    RawTerm contracted;
    contracted.c = Coefficient::rational(-2);
    contracted.atoms = {pair_atom(AtomHead::D2TAU, 0, 0)};
    CHECK(equal(to_expr({raw}), to_expr({pushed, contracted})));
  }

  // all four type combinations against the Clifford matrices
  AtomValues vals;
  for (int n = 2; n <= 3; ++n) {
    ExtAlgebra X(n);
    for (VType ut : {VType::Holo, VType::Anti})
      for (VType vt : {VType::Holo, VType::Anti}) {
        RawTerm raw = clifford_cc(ut, 0, vt, 1);
        raw.atoms.push_back(pair_atom(AtomHead::D2TAU, 0, 1));
        Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(X.dim(), X.dim());
        for (int d0 = 0; d0 < n; ++d0)
          for (int d1 = 0; d1 < n; ++d1) {
            std::vector<int> dir{d0, d1};
            cplx w = vals.value(raw.atoms[0], dir);
            Eigen::MatrixXcd cu = ut == VType::Holo ? X.c_w(d0) : X.c_wbar(d0);
            Eigen::MatrixXcd cv = vt == VType::Holo ? X.c_w(d1) : X.c_wbar(d1);
            direct += w * (cu * cv);
          }
        CHECK(mat_diff(nv_matrix(X, vals, to_expr({raw})), direct) < 1e-9);
      }
  }
}

// ===== FIBER TRACE =====

TEST_CASE("fiber trace") {
  // the projector line itself has trace one
  {
    RawTerm raw;
    raw.c = Coefficient::one();
    raw.exts = {{EKind::PROJ, -1}};
    RawTerm unit;
    unit.c = Coefficient::one();
    CHECK(equal(lambda_trace(to_expr({raw})), to_expr({unit})));
  }
  // signed determinant of contractions on an antisymmetric anchor pair
  {
    RawTerm raw;
    raw.c = Coefficient::one();
    raw.atoms = {pair_atom(AtomHead::RE, 0, 1), pair_atom(AtomHead::RE, 2, 3)};
    raw.exts = {{EKind::CR, 0}, {EKind::CR, 1}, {EKind::PROJ, -1},
                {EKind::AN, 2}, {EKind::AN, 3}};
    RawTerm want;
    want.c = Coefficient::rational(-2);
    want.atoms = {pair_atom(AtomHead::RE, 0, 1), pair_atom(AtomHead::RE, 0, 1)};
    CHECK(equal(lambda_trace(to_expr({raw})), to_expr({want})));
  }
  // degree mismatch traces to zero
  {
    RawTerm raw;
    raw.c = Coefficient::one();
    raw.atoms = {Atom{AtomHead::NABLAJ,
                      {Slot{VType::Holo, 0}, Slot{VType::Holo, 1}, Slot{VType::Holo, 2}}}};
    raw.exts = {{EKind::CR, 0}, {EKind::CR, 1}, {EKind::PROJ, -1}, {EKind::AN, 2}};
    CHECK(lambda_trace(to_expr({raw})).terms.empty());
  }
  // generator letters must be gone before tracing
  {
    RawTerm raw;
    raw.c = Coefficient::one();
    raw.gens = {{GKind::B, 0}};
    raw.atoms = {pair_atom(AtomHead::D2TAU, 0, 0)};
    raw.exts = {{EKind::PROJ, -1}};
    Expr e = to_expr({raw});
    CHECK_THROWS_AS(lambda_trace(e), std::logic_error);
  }

  // random anchored words against the matrix trace
  std::mt19937 rng(909);
  AtomValues vals;
  std::uniform_int_distribution<int> deg(1, 2), coin(0, 1);
  for (int n = 2; n <= 3; ++n) {
    ExtAlgebra X(n);
    for (int trial = 0; trial < 20; ++trial) {
      int p = deg(rng);
      bool proj = coin(rng);
      RawTerm raw;
      raw.c = Coefficient::frac(1, 3);
      for (int i = 0; i < p; ++i) raw.exts.push_back({EKind::CR, i});
      if (proj) raw.exts.push_back({EKind::PROJ, -1});
      for (int i = 0; i < p; ++i) raw.exts.push_back({EKind::AN, p + i});
      std::vector<int> perm(static_cast<size_t>(p));
      for (int i = 0; i < p; ++i) perm[static_cast<size_t>(i)] = p + i;
      std::shuffle(perm.begin(), perm.end(), rng);
      for (int i = 0; i < p; ++i)
        raw.atoms.push_back(pair_atom(coin(rng) ? AtomHead::D2TAU : AtomHead::RE, i,
                                      perm[static_cast<size_t>(i)]));
      Expr e = to_expr({raw});
      Expr tr = proj ? lambda_trace(e) : lambda_trace_dim(e, n);
      if (!proj) CHECK_THROWS_AS(lambda_trace(e), err::NeedExplicitDimension);
      cplx engine = nv_matrix(X, vals, tr)(0, 0);
      cplx direct = nv_matrix(X, vals, e).trace();
      INFO("n=", n, " p=", p, " proj=", proj);
      CHECK(std::abs(engine - direct) < 1e-9);
    }
  }
}
