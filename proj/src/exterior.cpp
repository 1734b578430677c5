// Exterior fiber: concrete 2^n matrices, the diagonal model, Clifford pair
// products, and the fiber trace.

#include "bklab/exterior.hpp"

#include "bklab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace bklab {

namespace {

int sign_below(int mask, int j) {
  return (__builtin_popcount(mask & ((1 << j) - 1)) % 2) ? -1 : 1;
}

}  // namespace

// ===== CONCRETE MATRICES =====

ExtAlgebra::ExtAlgebra(int n_) : n(n_) {
  if (n < 0 || n > 20) throw err::InvalidParams("exterior rank out of range");
}

Eigen::MatrixXcd ExtAlgebra::identity() const {
  return Eigen::MatrixXcd::Identity(dim(), dim());
}

Eigen::MatrixXcd ExtAlgebra::creation(int j) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
  for (int s = 0; s < dim(); ++s)
    if (!(s & (1 << j))) m(s | (1 << j), s) = sign_below(s, j);
  return m;
}

Eigen::MatrixXcd ExtAlgebra::annihilation(int j) const {
  return creation(j).adjoint();
}

Eigen::MatrixXcd ExtAlgebra::proj0() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
  m(0, 0) = 1.0;
  return m;
}

Eigen::MatrixXcd ExtAlgebra::number() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
  for (int s = 0; s < dim(); ++s) m(s, s) = __builtin_popcount(s);
  return m;
}

Eigen::MatrixXcd ExtAlgebra::word(const std::vector<int>& cr, bool proj,
                                  const std::vector<int>& an) const {
  Eigen::MatrixXcd m = identity();
  for (int j : cr) m = m * creation(j);
  if (proj) m = m * proj0();
  for (int j : an) m = m * annihilation(j);
  return m;
}

Eigen::MatrixXcd ExtAlgebra::c_w(int j) const {
  return std::sqrt(2.0) * creation(j);
}

Eigen::MatrixXcd ExtAlgebra::c_wbar(int j) const {
  return -std::sqrt(2.0) * annihilation(j);
}

Eigen::MatrixXcd ExtAlgebra::c_real(int l) const {
  int j = l / 2;
  if (l % 2 == 0) return creation(j) - annihilation(j);
  return std::complex<double>(0.0, 1.0) * (creation(j) + annihilation(j));
}

// ===== DIAGONAL MODEL =====

int DiagModel::q() const {
  return static_cast<int>(std::count_if(a.begin(), a.end(),
                                        [](double x) { return x < 0.0; }));
}

double DiagModel::tau() const {
  double t = 0.0;
  for (double x : a) t += std::abs(x);
  return t;
}

double DiagModel::mu0() const {
  if (a.empty()) throw err::InvalidParams("empty model");
  double m = std::abs(a[0]);
  for (double x : a) m = std::min(m, std::abs(x));
  return m;
}

Eigen::MatrixXcd omega_d(const ExtAlgebra& X, const DiagModel& m) {
  if (m.n() != X.n) throw err::InvalidParams("model rank mismatch");
  double shift = 0.0;
  for (double x : m.a) {
    if (x == 0.0) throw err::InvalidParams("degenerate model: some a_j is zero");
    if (x < 0.0) shift += x;
  }
  Eigen::MatrixXcd w = shift * X.identity();
  for (int j = 0; j < X.n; ++j)
    w -= m.a[static_cast<size_t>(j)] * (X.creation(j) * X.annihilation(j));
  return w;
}

// ===== SYMBOLIC CLIFFORD =====

RawTerm clifford_cc(VType ut, int ul, VType vt, int vl) {
  auto letter = [](VType t, int l) {
    return ELetter{t == VType::Holo ? EKind::CR : EKind::AN, l};
  };
  RawTerm rt;
  int sgn = (ut == VType::Anti ? -1 : 1) * (vt == VType::Anti ? -1 : 1);
  rt.c = Coefficient::rational(2 * sgn);
  rt.exts = {letter(ut, ul), letter(vt, vl)};
  return rt;
}

// ===== FIBER TRACE =====

namespace {

// Laplace expansion of the delta determinant: repeatedly contracts the last
// remaining contraction letter against each wedge letter.
void trace_pairings(Term s, std::vector<Term>& out) {
  if (s.ext.an.empty()) {
    s.ext.proj = false;
    out.push_back(std::move(s));
    return;
  }
  int k = static_cast<int>(s.ext.an.size());
  int v = s.ext.an.back();
  s.ext.an.pop_back();
  for (int i = 0; i < k; ++i) {
    Term t = s;
    int u = t.ext.cr[static_cast<size_t>(i)];
    t.ext.cr.erase(t.ext.cr.begin() + i);
    if (((i + 1 + k) % 2) != 0) t.c = -t.c;
    unify_pair(t, u, v, t.ndum);
    trace_pairings(std::move(t), out);
  }
}

Expr trace_impl(const Expr& e, const int* n) {
  Expr r;
  for (const auto& t : e.terms) {
    for (auto kk : {GKind::B, GKind::Z, GKind::ZB, GKind::ZP, GKind::ZBP, GKind::BP})
      if (!t.gen.list(kk).empty())
        throw std::logic_error("fiber trace expects generator-free terms");
    int p = static_cast<int>(t.ext.cr.size());
    int q = static_cast<int>(t.ext.an.size());
    if (p != q) continue;
    Term s = t;
    if (!t.ext.proj) {
      if (!n)
        throw err::NeedExplicitDimension(
            "trace of a projector-free exterior word carries 2^(n - degree)");
      if (q > *n) continue;
      s.c = s.c.scaled(Rational(BigInt(1) << (*n - q), BigInt(1)));
    }
    if (((q * (q - 1) / 2) % 2) != 0) s.c = -s.c;
    std::vector<Term> outs;
    trace_pairings(std::move(s), outs);
    for (auto& o : outs) {
      compact_labels(o);
      r.terms.push_back(std::move(o));
    }
  }
  return canonicalize(r);
}

}  // namespace

Expr lambda_trace(const Expr& e) { return trace_impl(e, nullptr); }

Expr lambda_trace_dim(const Expr& e, int n) { return trace_impl(e, &n); }

}  // namespace bklab
