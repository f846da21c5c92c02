#pragma once

// Reduced rank extrapolation in cycling mode.
//
// A window holds w + 1 successive iterates x_1, ..., x_{w+1} in the order
// the caller supplies them. With first differences u_i = x_{i+1} - x_i the
// coefficients minimize ||sum_i gamma_i u_i|| subject to sum_i gamma_i = 1,
// and the extrapolant is sum_{i=1..w} gamma_i x_i.

#include <vector>

#include "mtsylv/lowrank.hpp"

namespace mtsylv {

struct RreCoefficients {
  Vector gamma;  // w entries, sum 1
  Vector q;      // w - 1 entries
  Index window = 0;
};

/// Coefficients from the difference matrix U = [u_1, ..., u_w] (b x w).
/// Solved in the unconstrained form min ||u_1 + Psi q|| with
/// psi_i = u_{i+1} - u_i; the minimum-norm q is taken when Psi is rank
/// deficient. Then gamma_1 = 1 - q_1, gamma_i = q_{i-1} - q_i,
/// gamma_w = q_{w-1}.
RreCoefficients rre_coefficients(const Matrix& U);

/// Extrapolant of a window of w + 1 dense iterates.
Matrix extrapolate_dense(const std::vector<Matrix>& window);

/// Extrapolant of a window of w + 1 low-rank iterates, compressed with the
/// truncation rule sigma_i >= sigma_1 * tau_trunc and at most max_col terms.
LowRankTriple extrapolate_lowrank(const std::vector<LowRankTriple>& window,
                                  double tau_trunc, Index max_col = kNoRankCap);

}  // namespace mtsylv
