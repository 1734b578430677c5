#pragma once

// Truncated Fock-space matrices for the model generators.
//
// Basis: phi_{alpha,beta} = b^alpha z^beta G with G = exp(-pi/2 |Z|^2), one
// (alpha_i, beta_i) pair per direction, truncated to |alpha| + |beta| <= cutoff.
// Matrices are expressed in the orthonormalized basis, so adjoints are plain
// conjugate transposes.  Raising past the cutoff truncates; callers compare
// operators of word length L only on columns of degree <= cutoff - L.

#include "bklab/term.hpp"
#include "bklab/weyl.hpp"

#include <Eigen/Dense>

#include <map>
#include <vector>

namespace bklab {

struct FockSpace {
  int n = 1;
  int cutoff = 8;
  std::vector<std::vector<int>> states;  // alpha_0..alpha_{n-1}, beta_0..beta_{n-1}
  std::map<std::vector<int>, int> index;

  FockSpace(int n_, int cutoff_);
  int dim() const { return static_cast<int>(states.size()); }
  int degree(int s) const;
  double norm2(int s) const;  // squared norm of the monomial basis vector
};

// One generator letter acting in direction dir (0-based), orthonormal basis.
Eigen::MatrixXcd gen_matrix(const FockSpace& F, GKind k, int dir);

// Product of letters; word[0] acts last (operator composition order).
Eigen::MatrixXcd word_matrix(const FockSpace& F, const std::vector<Gen>& word,
                             const std::vector<int>& dir_of_label);

// Einstein sum: every dummy label of every term ranges over all directions.
// Terms must be pure generator words (no atoms, identity exterior part).
Eigen::MatrixXcd expr_matrix(const FockSpace& F, const Expr& e);

}  // namespace bklab
