#pragma once

// Benchmark problem generators.

#include <cstdint>

#include "mtsylv/problem.hpp"

namespace mtsylv {

struct GeneratorParams {
  Index n = 10;
  Index m = 10;
  Index ell = 1;
  double beta = 0.1;
  std::uint64_t seed = 0;
  /// Grid parameter of the PDE generators.
  Index n0 = 3;

  void validate() const;
};

/// A = A0 - 1.5 Re(lambda_max(A0)) I with A0 uniform [0, 1), B likewise,
/// Y uniform, N_k and H_k uniform, pi_scale = beta^2. Draw order from a
/// single Rng(seed): A0, B0, Y, then N_1, H_1, N_2, H_2, ... (each matrix
/// column-major). F, T, G come from the thin SVD of Y, which is kept.
ProblemSpec gen_random_dense(const GeneratorParams& params);

/// Lyapunov-kind advection-diffusion example on the unit square, evolution
/// operator Laplacian minus d/dy, centered differences with h = 1/(n0 + 1).
/// Grid nodes (i, j), i = 0..n0+1 (Robin columns included), j = 1..n0
/// (Dirichlet rows eliminated); node index (j - 1) * (n0 + 2) + i, so
/// n = (n0 + 2) * n0. N_1 and N_2 carry 2/h on the left and right edge
/// nodes, F has -2 beta / h there, T = I_2 and pi_scale = beta^2.
/// Matrices are stored sparse.
ProblemSpec gen_advdiff(Index n0, double beta);

/// Sylvester-kind problem from two advection-diffusion grids: A, N_k, F
/// from grid n0_a; B = A_b^T, H_k = N_{b,k}^T, G = F_b from grid n0_b.
ProblemSpec gen_multiterm_sylvester(Index n0_a, Index n0_b, double beta);

}  // namespace mtsylv
