#pragma once

// Outer fixed-point iterations for
//   A X + X B + pi_scale * sum_k N_k X H_k = -F T G^T
// with the splitting X_k = L^{-1}(-Y - Pi(X_{k-1})) and cycling RRE.

#include <cstdint>
#include <optional>
#include <vector>

#include "mtsylv/error.hpp"
#include "mtsylv/inner.hpp"
#include "mtsylv/lowrank.hpp"

namespace mtsylv {

struct SolverConfig {
  /// Window size; extrapolation at k >= w with k % w == 0.
  Index w = 3;
  bool rre_enabled = true;
  double tau_outer = 1e-10;
  /// Inner tolerance coupling: tau_inner,k = eta * previous scaled residual.
  double eta = 1e-3;
  double tau_trunc = 1e-10;
  /// tau_trunc,k = max(1e-15, min(tau_trunc, eta * previous scaled residual)).
  bool dynamic_trunc = true;
  Index max_col = kNoRankCap;
  Index k_max = 50;
  InnerMethod inner = InnerMethod::Adi;
  /// 0 selects the inner method default.
  Index part_size = 0;
  Index inner_max_steps = 0;
  bool truncate_parts = false;
  RhsCompression rhs_compression = RhsCompression::TwoStage;
  Index k_plus = 20;
  Index k_minus = 10;
  Index n_shifts = 10;
  /// Recompute ADI shifts at every outer step instead of once.
  bool regenerate_shifts = false;
  int threads = 1;
  std::uint64_t seed = 0;
  double divergence_threshold = 1e8;
  double estimator_rel_tol = 1e-3;
  Index estimator_max_iters = 50;

  /// Throws Error(InvalidInput) or Error(InvalidWindow).
  void validate() const;
};

struct TraceRecord {
  Index iter = 0;
  /// ||A(X_k) + F T G^T||_2 / ||F T G^T||_2, after extrapolation if any.
  double scaled_residual = 0.0;
  /// Value before extrapolation, at extrapolation steps only.
  std::optional<double> pre_extrapolation;
  /// Rank of the iterate; -1 on the dense path.
  Index rank = -1;
  Index inner_steps = 0;
  double elapsed_s = 0.0;
  bool extrapolated = false;
  bool inner_converged = true;
  bool estimator_converged = true;
};

struct IterationTrace {
  std::vector<TraceRecord> records;
};

enum class SolveStatus { Converged, MaxIter, Diverged };

const char* to_string(SolveStatus status);

struct DenseSolveResult {
  Matrix X;
  IterationTrace trace;
  SolveStatus status = SolveStatus::MaxIter;
};

struct LowRankSolveResult {
  LowRankTriple X;
  IterationTrace trace;
  SolveStatus status = SolveStatus::MaxIter;
};

/// Thrown when the scaled residual exceeds the divergence threshold.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, IterationTrace trace)
      : Error(ErrorKind::Diverged, what), trace_(std::move(trace)) {}

  const IterationTrace& trace() const noexcept { return trace_; }

 private:
  IterationTrace trace_;
};

/// Dense stationary iteration. A and B are reduced to real Schur form once
/// and the whole equation is transformed; every step is one
/// quasi-triangular Sylvester solve. Starts from X_0 = 0.
DenseSolveResult stationary_dense_solve(const ProblemSpec& spec,
                                        const SolverConfig& config);

/// Low-rank non-stationary iteration with inexact inner solves, truncation
/// and a matvec-only residual estimate.
LowRankSolveResult nonstationary_lowrank_solve(const ProblemSpec& spec,
                                               const SolverConfig& config);

struct ResidualEstimate {
  double value = 0.0;
  Index iterations = 0;
  bool converged = false;
};

/// Power iteration on R^T R for R = A(X) + F T G^T, using only products of
/// R and R^T with vectors. Returns an estimate of ||R||_2.
ResidualEstimate estimate_residual_spectral_norm(const ProblemSpec& spec,
                                                 const LowRankTriple& x,
                                                 double rel_tol,
                                                 Index max_iters,
                                                 std::uint64_t seed);

}  // namespace mtsylv
