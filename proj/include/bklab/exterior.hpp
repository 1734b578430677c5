#pragma once

// Exterior algebra of the antiholomorphic frame.
//
// Concrete side: 2^n matrices over the subset basis e_S = wbar^{s1} ^ ... ^,
// with wedge/contraction operators, the degree-0 projector, and the Clifford
// matrices of both the complex and the real orthonormal frame.
//
// Symbolic side: Clifford pair products c(u)c(v) as raw words, and the trace
// over the exterior fiber, which turns a wedge/contraction word into a signed
// sum of delta contractions.

#include "bklab/term.hpp"
#include "bklab/weyl.hpp"

#include <Eigen/Dense>

#include <vector>

namespace bklab {

// ===== CONCRETE MATRICES =====

struct ExtAlgebra {
  int n;
  explicit ExtAlgebra(int n_);
  int dim() const { return 1 << n; }
  Eigen::MatrixXcd identity() const;
  Eigen::MatrixXcd creation(int j) const;      // wbar^j ^ .
  Eigen::MatrixXcd annihilation(int j) const;  // i_{wbar_j}
  Eigen::MatrixXcd proj0() const;              // onto the degree-0 line
  Eigen::MatrixXcd number() const;             // total degree
  // Word in composition order: wedge letters, optional projector, contraction
  // letters; the rightmost letter acts first.
  Eigen::MatrixXcd word(const std::vector<int>& cr, bool proj,
                        const std::vector<int>& an) const;
  Eigen::MatrixXcd c_w(int j) const;     // c(w_j)    =  sqrt2 wedge
  Eigen::MatrixXcd c_wbar(int j) const;  // c(wbar_j) = -sqrt2 contraction
  Eigen::MatrixXcd c_real(int l) const;  // real orthonormal frame, l in [0, 2n)
};

// ===== DIAGONAL MODEL =====

// Diagonal linear model at a point: J w_j = (i a_j / 2pi) w_j with every a_j
// nonzero; the negative ones (q in number) span the concentrating degree.
struct DiagModel {
  std::vector<double> a;
  int n() const { return static_cast<int>(a.size()); }
  int q() const;
  double tau() const;  // sum |a_j|
  double mu0() const;  // min |a_j|
};

// omega_d = -sum_j a_j wbar^j i_j + sum_{a_j < 0} a_j.  Diagonal in the subset
// basis; e_S has eigenvalue 0 exactly when S is the negative-index set, and
// every other eigenvalue is <= -mu0.  Throws err::InvalidParams when some a_j
// vanishes.
Eigen::MatrixXcd omega_d(const ExtAlgebra& X, const DiagModel& m);

// ===== SYMBOLIC CLIFFORD =====

// c(u)c(v) for complex-frame vectors (Holo l = w_l, Anti l = wbar_l), as one
// raw word in composition order; normalization yields the normal forms
//   c(w_a)c(w_b)       =  2 wbar^a wbar^b
//   c(w_a)c(wbar_b)    = -2 wbar^a i_b
//   c(wbar_a)c(w_b)    = -2 delta_ab + 2 wbar^b i_a
//   c(wbar_a)c(wbar_b) =  2 i_a i_b
RawTerm clifford_cc(VType ut, int ul, VType vt, int vl);

// ===== FIBER TRACE =====

// Trace over the exterior fiber of each term's wedge/contraction word, per
// fiber of the twisting bundle.  A projector word wbar^{l_1..l_p} I i_{m_1..m_q}
// traces to the signed delta determinant (-1)^{q(q-1)/2} det(delta_{l_a m_b});
// mismatched degrees trace to zero.  Projector-free words additionally carry
// 2^(n - degree), so they need the explicit dimension: lambda_trace throws
// err::NeedExplicitDimension on them, lambda_trace_dim takes n.  Generator
// letters must have been eliminated beforehand.
Expr lambda_trace(const Expr& e);
Expr lambda_trace_dim(const Expr& e, int n);

}  // namespace bklab
