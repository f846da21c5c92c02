#pragma once

// Brute-force Kronecker-vectorized references. Nothing here is used by the
// solvers themselves; tests and the `spectrum` CLI command rely on it.

#include <vector>

#include "mtsylv/problem.hpp"

namespace mtsylv::oracles {

constexpr Index kDefaultCap = 4096;

/// L_vec = I_m (x) A + B^T (x) I_n, Pi_vec = pi_scale * sum_k H_k^T (x) N_k,
/// y_vec = vec(F T G^T) (or vec(Y)).
struct VectorizedSystem {
  Index n = 0;
  Index m = 0;
  Matrix L_vec;
  Matrix Pi_vec;
  Vector y_vec;
};

/// G = -L_vec^{-1} Pi_vec together with its eigenvalue moduli, descending.
struct IterationMatrix {
  Matrix G;
  std::vector<double> moduli;
};

/// Throws Error(OracleTooLarge) when n*m exceeds `cap`.
VectorizedSystem kron_assemble(const ProblemSpec& spec,
                               Index cap = kDefaultCap);

/// Reference solution of A X + X B + Pi(X) = -Y, reshaped to n x m.
/// Throws Error(NoUniqueSolution) when L_vec + Pi_vec is singular.
Matrix direct_solve_vec(const VectorizedSystem& sys);

IterationMatrix iteration_spectrum(const ProblemSpec& spec,
                                   Index cap = kDefaultCap);

/// Constrained least squares min ||U gamma|| s.t. sum(gamma) = 1 solved by
/// eliminating the last coefficient; returns sum_{i<=w} gamma_i x_i.
/// Expects exactly w + 1 iterates.
Vector rre_reference(const std::vector<Vector>& iterates, Index w);

/// The coefficients behind rre_reference.
Vector rre_reference_gamma(const std::vector<Vector>& iterates, Index w);

}  // namespace mtsylv::oracles
