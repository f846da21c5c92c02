#pragma once

// Inexact solvers for the two-term Sylvester equation
//   A X + X B = -Z_L D Z_R^T
// used inside the outer low-rank iteration: LR-ADI and the extended Krylov
// subspace method (EKSM), plus right-hand-side separation.

#include <cstdint>
#include <memory>
#include <vector>

#include "mtsylv/linear_solve.hpp"
#include "mtsylv/lowrank.hpp"

namespace mtsylv {

/// ADI shift parameters. Step j solves with (A + beta_j I) and
/// (B + alpha_j I)^T, so alpha_j should approximate eigenvalues of A and
/// beta_j eigenvalues of B; all shifts lie in the open left half-plane.
/// A step whose alpha or beta is non-real is immediately followed by the
/// step (conj(alpha), conj(beta)).
struct ShiftSets {
  std::vector<Complex> alpha;
  std::vector<Complex> beta;
  /// Ritz value candidates the shifts were picked from.
  std::vector<Complex> candidates_a;
  std::vector<Complex> candidates_b;
  /// Set when an Arnoldi run stopped early and fewer candidates were found.
  bool breakdown = false;

  std::size_t size() const { return alpha.size(); }
};

/// Throws Error(InvalidInput) if the lists differ in length, are empty, or
/// a non-real shift is not followed by its conjugate.
void validate_shifts(const ShiftSets& shifts);

struct InnerResult {
  LowRankTriple solution;
  /// ||A X + X B + Z_L D Z_R^T||_2 evaluated from the factored residual.
  double residual_norm = 0.0;
  /// Factored residual matrix.
  LowRankTriple residual;
  Index steps = 0;
  bool converged = true;
  /// Index of the first part that failed to converge, -1 if none.
  Index failed_part = -1;
};

/// Ritz values of A (k_plus Arnoldi steps) and reciprocal Ritz values of
/// A^{-1} (k_minus steps) form the candidates for A; likewise for B.
/// Candidates outside the open left half-plane are dropped. The first pair
/// minimizes the product of the two rational bounds over the candidates;
/// further pairs are added greedily where the current bound is largest.
/// Deterministic for a given seed.
ShiftSets heuristic_shifts(const Coefficient& A, const Coefficient& B,
                           Index k_plus, Index k_minus, Index n_shifts,
                           std::uint64_t seed);

/// Factored-residual LR-ADI with factorizations of every shifted matrix
/// computed once at construction. Immutable; solve() may be called from
/// several threads.
class AdiSolver {
 public:
  AdiSolver(const Coefficient& A, const Coefficient& B, ShiftSets shifts);

  /// Stops when the residual norm is <= tol * ||rhs||_2 or after max_steps
  /// steps (a fused complex pair counts as two).
  InnerResult solve(const LowRankTriple& rhs, double tol, Index max_steps) const;

  const ShiftSets& shifts() const { return shifts_; }

 private:
  ShiftSets shifts_;
  std::vector<ShiftedSolve> solve_a_;  // A + beta_j I
  std::vector<ShiftedSolve> solve_b_;  // (B + alpha_j I)^T
};

/// Galerkin projection onto EK(A, Z_L) and EK(B^T, Z_R). A and B are
/// factorized once at construction.
class EksmSolver {
 public:
  EksmSolver(const Coefficient& A, const Coefficient& B);

  InnerResult solve(const LowRankTriple& rhs, double tol, Index max_steps) const;

 private:
  Coefficient A_;
  Coefficient B_;
  ShiftedSolve inv_a_;
  ShiftedSolve inv_bt_;
};

InnerResult lr_adi_solve(const Coefficient& A, const Coefficient& B,
                         const LowRankTriple& rhs, const ShiftSets& shifts,
                         double tol, Index max_steps = 200);

InnerResult eksm_solve(const Coefficient& A, const Coefficient& B,
                       const LowRankTriple& rhs, double tol,
                       Index max_steps = 100);

enum class InnerMethod { Adi, Eksm };

struct InnerConfig {
  InnerMethod method = InnerMethod::Adi;
  /// 0 selects the method default (200 for ADI, 100 for EKSM).
  Index max_steps = 0;
  /// Maximal rank of one separated part; 0 selects the method default
  /// (no separation for ADI, 30 for EKSM).
  Index part_size = 0;
  /// Truncate each part's solution at part_tau * r_j / r.
  bool truncate_parts = false;
  double part_tau = 0.0;
  /// Worker threads for separated parts.
  int threads = 1;
  Index k_plus = 20;
  Index k_minus = 10;
  Index n_shifts = 10;
  std::uint64_t seed = 0;
};

Index effective_max_steps(const InnerConfig& config);
Index effective_part_size(const InnerConfig& config);

/// Reusable inner solver: shifts and factorizations are set up once.
class InnerSolver {
 public:
  InnerSolver(const Coefficient& A, const Coefficient& B, InnerConfig config);

  /// Splits rhs into parts of rank <= part_size, solves part j to the
  /// absolute tolerance tol * ||rhs||_2 * r_j / r, and recombines the parts
  /// in ascending order. Errors from a part are rethrown with its index.
  InnerResult solve(const LowRankTriple& rhs, double tol) const;

  const InnerConfig& config() const { return config_; }
  /// Null for EKSM.
  const ShiftSets* shifts() const;

 private:
  InnerConfig config_;
  std::unique_ptr<AdiSolver> adi_;
  std::unique_ptr<EksmSolver> eksm_;
};

InnerResult solve_inner(const Coefficient& A, const Coefficient& B,
                        const LowRankTriple& rhs, double tol,
                        const InnerConfig& config);

}  // namespace mtsylv
