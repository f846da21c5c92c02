#pragma once

#include <cstdint>
#include <vector>

#include "mtsylv/lowrank.hpp"
#include "mtsylv/problem.hpp"
#include "mtsylv/random.hpp"

namespace mtsylv::test {

/// Entries uniform in [-1, 1).
Matrix random_matrix(Rng& rng, Index rows, Index cols);

/// Random matrix shifted so that every eigenvalue has real part <= -0.5.
Matrix random_stable(Rng& rng, Index n);

/// Random orthogonal matrix (QR of a random square matrix).
Matrix random_orthogonal(Rng& rng, Index n);

/// Stable A, B, random N_k, H_k scaled so that sum ||N_k|| ||H_k|| equals
/// `pi_weight`, rank-r factored right-hand side with T = I.
ProblemSpec random_spec(Rng& rng, Index n, Index m, Index ell, Index r,
                        double pi_weight = 0.3);

/// A = B = -I/2, N_1 = Q diag(d) Q^T, H_1 = I_m, so the iteration matrix has
/// eigenvalues d_i, each with multiplicity m. Q = I if `rotate` is false.
ProblemSpec diagonal_spec(Rng& rng, const std::vector<double>& d, Index m,
                          Index r, bool rotate);

LowRankTriple random_triple(Rng& rng, Index n, Index m, Index z);

/// Largest singular value by dense power iteration on M^T M (independent
/// of the SVD kernel).
double power_norm(const Matrix& M, int iters = 2000);

}  // namespace mtsylv::test
