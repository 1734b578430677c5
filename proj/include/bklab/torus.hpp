#pragma once

// Flat-torus magnetic Laplacian demo: 5-point finite differences on the unit
// torus with Peierls link phases carrying total flux 2 pi p, renormalized by
// the zero-point shift 2 pi p.  Reports the lowest Landau cluster (expected:
// p eigenvalues near 0) and the gap to the next cluster (expected: ~ 4 pi p).

#include <vector>

namespace bklab {

struct TorusSpec {
  int p = 1;   // flux quanta through the torus
  int m = 64;  // grid points per axis
};

struct TorusGapResult {
  std::vector<double> lowCluster;  // eigenvalues in [-0.5, 0.5], ascending
  double nextEigenvalue = 0.0;     // bottom of the next cluster
  double gap = 0.0;                // nextEigenvalue minus the cluster top
};

TorusGapResult torus_gap_demo(const TorusSpec& spec);

}  // namespace bklab
