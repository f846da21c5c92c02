#pragma once

#include <limits>
#include <vector>

#include "mtsylv/problem.hpp"

namespace mtsylv {

constexpr Index kNoRankCap = std::numeric_limits<Index>::max();

/// Factored matrix Z_L D Z_R^T of size n x m and inner dimension z.
/// z = 0 (empty factors) is the zero matrix.
class LowRankTriple {
 public:
  LowRankTriple() = default;
  LowRankTriple(Matrix ZL, Matrix D, Matrix ZR);

  static LowRankTriple zero(Index n, Index m);

  Index rows() const { return ZL_.rows(); }
  Index cols() const { return ZR_.rows(); }
  Index rank() const { return D_.rows(); }

  const Matrix& left() const { return ZL_; }
  const Matrix& core() const { return D_; }
  const Matrix& right() const { return ZR_; }

  Matrix dense() const;
  LowRankTriple negated() const;
  LowRankTriple scaled(double c) const;

 private:
  Matrix ZL_;
  Matrix D_;
  Matrix ZR_;
};

/// Factors with orthonormal outer columns and a small core:
/// Q_L * core * Q_R^T. Produced by the stacked thin QR of both factors.
struct OrthogonalizedPair {
  Matrix QL;
  Matrix RL;  // QL^T ZL, i.e. the R factor of the left stack
  Matrix QR;
  Matrix RR;
};

OrthogonalizedPair orthogonalize_factors(const Matrix& ZL, const Matrix& ZR);

/// SVD-compresses Q_L * core * Q_R^T (Q_L, Q_R with orthonormal columns),
/// keeping singular values >= sigma_1 * tau, at most max_col of them.
/// Singular values below 1e-15 * scale are treated as zero; `scale` should
/// bound the magnitude of the terms that formed the core (it defaults to
/// ||core||_2), so that exact cancellations truncate to rank zero.
LowRankTriple compress_core(const Matrix& QL, const Matrix& core,
                            const Matrix& QR, double tau, Index max_col,
                            double scale = -1.0);

/// The truncation operator: thin QR of both factors, SVD of R_L D R_R^T.
/// Output core is diagonal with descending entries.
LowRankTriple truncate(const LowRankTriple& t, double tau,
                       Index max_col = kNoRankCap);

/// Sum by factor concatenation; the core becomes block diagonal.
LowRankTriple concat(const std::vector<LowRankTriple>& ts);

enum class RhsCompression { TwoStage, SingleStage };

/// Compressed factors of F T G^T + Pi(X_prev). With TwoStage each term
/// N_i X_prev H_i is truncated on its own before the global truncation.
LowRankTriple assemble_rhs(const ProblemSpec& spec, const LowRankTriple& x_prev,
                           double tau, Index max_col = kNoRankCap,
                           RhsCompression mode = RhsCompression::TwoStage);

/// Splits into ceil(z / part_size) triples of contiguous columns whose
/// products sum to the input. A core that is not block diagonal for the
/// requested split is rotated to diagonal form first.
std::vector<LowRankTriple> separate_rhs(const LowRankTriple& rhs,
                                        Index part_size);

/// Residual matrix R(X) = A X + X B + Pi(X) + F T G^T applied to p (m x k),
/// without forming R.
Matrix lowrank_apply_operator_vec(const ProblemSpec& spec,
                                  const LowRankTriple& x, const Matrix& p);

/// R(X)^T q for q of size n x k.
Matrix lowrank_apply_operator_vec_transpose(const ProblemSpec& spec,
                                            const LowRankTriple& x,
                                            const Matrix& q);

/// Exact ||Z_L D Z_R^T||_2 via thin QR of both factors.
double lowrank_norm(const LowRankTriple& t);

}  // namespace mtsylv
