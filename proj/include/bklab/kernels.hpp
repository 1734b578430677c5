#pragma once

// Numeric verification lab.  Closed-form model kernels (Bergman projector,
// Mehler heat kernel with its exterior twist), truncated Fock-space matrices
// of model operators with generalized oscillator scaling, position-space
// Hermite evaluation, Gauss-Hermite quadrature, heat-to-projector decay
// measurement, and the symbolic-vs-numeric word oracle.
//
// Basis conventions.  FockBasisSpec truncates the monomial basis
// b^alpha z^beta (ground Gaussian suppressed) by total degree
// |alpha| + |beta| <= cutoff.  With the exterior factor the state index is
// extIndex * fockDim + fockIndex over the subset basis of Lambda(C^n).
// Curvature data enters as ModelParams (units of 2 pi, all entries nonzero);
// direction j carries the oscillator scale sqrt(|a_j| / 2 pi), and for
// a_j < 0 the roles of z_j and conj(z_j) swap (antiholomorphic vacuum).

#include "bklab/exterior.hpp"
#include "bklab/fock.hpp"
#include "bklab/numeric_model.hpp"
#include "bklab/pipeline.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace bklab {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

struct FockBasisSpec {
  int n = 1;
  int cutoff = 8;
  bool includeExterior = false;
};

// Uniform sampling grid over [-extent, extent]^realDimension, read as
// realDimension / 2 complex coordinates (x + iy per pair of axes).
struct GridSpec {
  int realDimension = 2;
  double extent = 1.0;
  int points = 3;
};

std::vector<CVec> grid_points(const GridSpec& g);

// Curvature coefficients in absolute units (entry j equals 2 pi a_j).
DiagModel to_diag(const ModelParams& params);

// ===== CLOSED-FORM KERNELS =====

struct BergmanKernel {
  Cplx scalar;             // Gaussian factor of the kernel
  Eigen::MatrixXcd fiber;  // projector onto the vacuum line of omega_d
};

BergmanKernel bergman_kernel_closed(const ModelParams& params, const CVec& Z, const CVec& Zp);

// Heat kernel of the scalar model operator (no exterior twist).
Cplx mehler_kernel_scalar(const ModelParams& params, double u, const CVec& Z, const CVec& Zp);

// Twisted heat kernel: scalar Mehler factor times exp(2 u omega_d).
Eigen::MatrixXcd mehler_kernel_closed(const ModelParams& params, double u, const CVec& Z,
                                      const CVec& Zp);

// Least-squares slope of log sup|heat(u) - projector| at the origin; the
// expected value is minus the first nonzero model-operator eigenvalue.
double heat_to_bergman_rate(const ModelParams& params);

// ===== TRUNCATED MATRICES =====

// Dense matrix of a normal-ordered operator; every label of every term is
// summed over the directions [0, n) below its term's dummy count, letters in
// direction j are scaled by sqrt(|a_j| / 2 pi) (raising/lowering) or its
// inverse (multiplication letters).  Terms carrying tensor atoms need the
// atom valuation; exterior letters need includeExterior.
Eigen::MatrixXcd fock_matrix(const Expr& op, const FockBasisSpec& spec, const ModelParams& params,
                             const ModelTensors* atoms = nullptr);

// Full model operator on Fock x Lambda for an arbitrary sign pattern:
// oscillator part tensor identity, minus twice omega_d on the fiber.
Eigen::MatrixXcd model_operator_matrix(const FockBasisSpec& spec, const ModelParams& params);

// Ascending spectrum of a Hermitian matrix.
std::vector<double> sorted_spectrum(const Eigen::MatrixXcd& H);

// Lowest `count` distinct eigenvalue levels (values clustered within
// clusterTol), recomputed at cutoff + 10; throws err::TruncationWarning when
// the two truncations disagree beyond convergenceTol.
std::vector<double> fock_lowest_distinct_eigenvalues(const Expr& op, const FockBasisSpec& spec,
                                                     const ModelParams& params, int count,
                                                     double clusterTol = 1e-6,
                                                     double convergenceTol = 1e-8);

// ===== POSITION REPRESENTATION =====

// Value at Z of the unnormalized basis state with the given per-direction
// occupation numbers, and its squared L^2 norm.
Cplx fock_state_position(const ModelParams& params, const std::vector<int>& alpha,
                         const std::vector<int>& beta, const CVec& Z);
double fock_state_norm2(const ModelParams& params, const std::vector<int>& alpha,
                        const std::vector<int>& beta);

// Kernel sum_{s,t} K_{st} psi_s(Z) conj(psi_t(Z')) over the normalized basis
// states psi of the truncation (exterior factor excluded).
Cplx kernel_eval(const Eigen::MatrixXcd& K, const FockBasisSpec& spec, const ModelParams& params,
                 const CVec& Z, const CVec& Zp);

// Coefficient matrix of the spectral projector onto eigenvalues < threshold.
Eigen::MatrixXcd spectral_projector(const Eigen::MatrixXcd& H, double threshold);

// Coefficient matrix of exp(-u H) for Hermitian H.
Eigen::MatrixXcd heat_coefficient_matrix(const Eigen::MatrixXcd& H, double u);

// ===== QUADRATURE =====

struct GaussHermite {
  std::vector<double> x, w;  // nodes and weights for the weight exp(-x^2)
};
GaussHermite gauss_hermite(int order);

// Integral over R^dim of f, where f decays at least like exp(-scale_i x_i^2)
// along axis i; nodes are rescaled per axis and the weight is restored.
Cplx gh_integrate(const std::vector<double>& scale, int order,
                  const std::function<Cplx(const std::vector<double>&)>& f);

// ===== WORD ORACLE =====

struct OracleResult {
  double maxError = 0;
  int checked = 0;
  std::string worstWord;
};

// Core check: the truncated matrix of each word's normal-ordered form must
// match the direct product of its letter matrices on all columns of degree
// <= cutoff - word length.  Throws err::OracleFailure naming the word that
// exceeded tol.
OracleResult symbolic_numeric_oracle(const std::vector<RawTerm>& words, const FockBasisSpec& spec,
                                     const ModelParams& params, const ModelTensors* atoms = nullptr,
                                     double tol = 1e-10);

// Randomized driver: shuffles the generator and exterior letters of every
// term of op `trials` times and runs the core check on the shuffled words.
OracleResult symbolic_numeric_oracle(const Expr& op, const FockBasisSpec& spec,
                                     const ModelParams& params, int trials, unsigned seed = 1,
                                     const ModelTensors* atoms = nullptr, double tol = 1e-10);

// Deterministic stream of random words: up to maxLen generator letters with
// random directions, a small rational coefficient, occasionally exterior
// letters; suitable input for the core oracle.
std::vector<RawTerm> random_words(int count, int maxLen, int n, unsigned seed);

}  // namespace bklab
