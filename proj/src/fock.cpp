#include "bklab/fock.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bklab {

namespace {

constexpr double kPi = std::numbers::pi;

void enumerate(std::vector<int>& cur, int pos, int left, std::vector<std::vector<int>>& out) {
  if (pos == static_cast<int>(cur.size())) {
    out.push_back(cur);
    return;
  }
  for (int v = 0; v <= left; ++v) {
    cur[static_cast<size_t>(pos)] = v;
    enumerate(cur, pos + 1, left - v, out);
  }
}

}  // namespace

FockSpace::FockSpace(int n_, int cutoff_) : n(n_), cutoff(cutoff_) {
  std::vector<int> cur(static_cast<size_t>(2 * n), 0);
  enumerate(cur, 0, cutoff, states);
  for (int s = 0; s < dim(); ++s) index[states[static_cast<size_t>(s)]] = s;
}

int FockSpace::degree(int s) const {
  int d = 0;
  for (int v : states[static_cast<size_t>(s)]) d += v;
  return d;
}

double FockSpace::norm2(int s) const {
  // prod_i alpha_i! (4 pi)^alpha_i  beta_i! pi^-beta_i
  const auto& st = states[static_cast<size_t>(s)];
  double g = 1.0;
  for (int i = 0; i < n; ++i) {
    int a = st[static_cast<size_t>(i)], b = st[static_cast<size_t>(n + i)];
    for (int k = 1; k <= a; ++k) g *= k * 4.0 * kPi;
    for (int k = 1; k <= b; ++k) g *= k / kPi;
  }
  return g;
}

Eigen::MatrixXcd gen_matrix(const FockSpace& F, GKind k, int dir) {
  int d = F.dim();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
  auto add = [&](const std::vector<int>& st, double coeff, int col) {
    auto it = F.index.find(st);
    if (it == F.index.end()) return;  // truncated
    M(it->second, col) += coeff;
  };
  for (int s = 0; s < d; ++s) {
    std::vector<int> st = F.states[static_cast<size_t>(s)];
    size_t ia = static_cast<size_t>(dir), ib = static_cast<size_t>(F.n + dir);
    int a = st[ia], b = st[ib];
    switch (k) {
      case GKind::B: {
        st[ia] = a + 1;
        add(st, 1.0, s);
        break;
      }
      case GKind::BP: {
        if (a > 0) {
          st[ia] = a - 1;
          add(st, 4.0 * kPi * a, s);
        }
        break;
      }
      case GKind::Z: {
        // z b^alpha = b^alpha z + 2 alpha b^{alpha-1}
        st[ib] = b + 1;
        add(st, 1.0, s);
        st[ib] = b;
        if (a > 0) {
          st[ia] = a - 1;
          add(st, 2.0 * a, s);
        }
        break;
      }
      case GKind::ZB: {
        // zb phi = (1/2pi)(b^{alpha+1} z^beta + 2 beta b^alpha z^{beta-1}) G
        st[ia] = a + 1;
        add(st, 1.0 / (2.0 * kPi), s);
        st[ia] = a;
        if (b > 0) {
          st[ib] = b - 1;
          add(st, b / kPi, s);
        }
        break;
      }
      default:
        throw std::logic_error("gen_matrix: primed letters have no matrix model");
    }
  }
  // conjugate into the orthonormal basis
  Eigen::VectorXd nr(d);
  for (int s = 0; s < d; ++s) nr(s) = std::sqrt(F.norm2(s));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if (M(r, c) != 0.0) M(r, c) *= nr(r) / nr(c);
  return M;
}

Eigen::MatrixXcd word_matrix(const FockSpace& F, const std::vector<Gen>& word,
                             const std::vector<int>& dir_of_label) {
  int d = F.dim();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(d, d);
  for (auto it = word.rbegin(); it != word.rend(); ++it)
    M = gen_matrix(F, it->k, dir_of_label.at(static_cast<size_t>(it->label))) * M;
  return M;
}

Eigen::MatrixXcd expr_matrix(const FockSpace& F, const Expr& e) {
  int d = F.dim();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& t : e.terms) {
    if (!t.atoms.empty() || !t.ext.is_identity())
      throw std::logic_error("expr_matrix: expected a pure generator word");
    RawTerm r = to_raw(t);
    int nd = t.ndum;
    std::vector<int> dirs(static_cast<size_t>(std::max(nd, 1)), 0);
    // iterate all n^nd assignments
    while (true) {
      M += t.c.to_complex() * word_matrix(F, r.gens, dirs);
      int p = 0;
      for (; p < nd; ++p) {
        if (++dirs[static_cast<size_t>(p)] < F.n) break;
        dirs[static_cast<size_t>(p)] = 0;
      }
      if (p == nd) break;
    }
  }
  return M;
}

}  // namespace bklab
