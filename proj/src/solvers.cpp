#include "mtsylv/solvers.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <sstream>

#include "mtsylv/error.hpp"
#include "mtsylv/random.hpp"
#include "mtsylv/rre.hpp"

namespace mtsylv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool extrapolation_step(const SolverConfig& c, Index k) {
  return c.rre_enabled && k >= c.w && k % c.w == 0;
}

[[noreturn]] void diverged(const TraceRecord& rec, IterationTrace trace) {
  std::ostringstream os;
  os << "iteration diverged at step " << rec.iter << " (scaled residual "
     << rec.scaled_residual << ")";
  throw DivergedError(os.str(), std::move(trace));
}

bool is_diverged(double scaled, const SolverConfig& c) {
  return !std::isfinite(scaled) || scaled > c.divergence_threshold;
}

InnerConfig inner_config(const SolverConfig& c, std::uint64_t seed) {
  InnerConfig ic;
  ic.method = c.inner;
  ic.max_steps = c.inner_max_steps;
  ic.part_size = c.part_size;
  ic.truncate_parts = c.truncate_parts;
  ic.part_tau = c.tau_trunc;
  ic.threads = c.threads;
  ic.k_plus = c.k_plus;
  ic.k_minus = c.k_minus;
  ic.n_shifts = c.n_shifts;
  ic.seed = seed;
  return ic;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIter: return "max-iter";
    case SolveStatus::Diverged: return "diverged";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  auto unit = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) {
      throw Error(ErrorKind::InvalidInput,
                  std::string(name) + " must lie in (0, 1)");
    }
  };
  if (rre_enabled && w < 1) {
    throw Error(ErrorKind::InvalidWindow, "window size must be >= 1");
  }
  unit(tau_outer, "tau_outer");
  unit(eta, "eta");
  unit(tau_trunc, "tau_trunc");
  if (k_max < 1) throw Error(ErrorKind::InvalidInput, "k_max must be >= 1");
  if (max_col < 1) throw Error(ErrorKind::InvalidInput, "max_col must be >= 1");
  if (part_size < 0) throw Error(ErrorKind::InvalidInput, "part_size must be >= 0");
  if (threads < 1) throw Error(ErrorKind::InvalidInput, "threads must be >= 1");
}

DenseSolveResult stationary_dense_solve(const ProblemSpec& spec,
                                        const SolverConfig& config) {
  spec.validate();
  config.validate();
  const auto start = Clock::now();

  const Matrix Y = spec.rhs_dense();
  const double y_norm = spectral_norm(Y);
  DenseSolveResult out;
  out.X = Matrix::Zero(spec.n(), spec.m());
  if (y_norm == 0.0) {
    out.status = SolveStatus::Converged;
    return out;
  }

  const SchurForm sa = real_schur(spec.A.dense());
  const SchurForm sb = real_schur(spec.B.dense());
  const Matrix Yt = sa.Q.transpose() * Y * sb.Q;
  std::vector<Matrix> Nt;
  std::vector<Matrix> Ht;
  for (std::size_t k = 0; k < spec.N.size(); ++k) {
    Nt.push_back(sa.Q.transpose() * spec.N[k].dense() * sa.Q);
    Ht.push_back(sb.Q.transpose() * spec.H[k].dense() * sb.Q);
  }
  auto pi = [&](const Matrix& X) {
    Matrix P = Matrix::Zero(X.rows(), X.cols());
    for (std::size_t k = 0; k < Nt.size(); ++k) P += Nt[k] * X * Ht[k];
    return Matrix(spec.pi_scale * P);
  };
  // The spectral norm is invariant under the orthogonal transformation.
  auto scaled_residual = [&](const Matrix& X) {
    return spectral_norm(sa.R * X + X * sb.R + pi(X) + Yt) / y_norm;
  };

  Matrix X = Matrix::Zero(spec.n(), spec.m());
  std::deque<Matrix> window{X};  // newest first
  for (Index k = 1; k <= config.k_max; ++k) {
    X = solve_quasi_triangular_sylvester(sa.R, sb.R, -(Yt + pi(X)));
    TraceRecord rec;
    rec.iter = k;
    if (config.rre_enabled) {
      window.push_front(X);
      while (static_cast<Index>(window.size()) > config.w + 1) window.pop_back();
      if (extrapolation_step(config, k)) {
        rec.pre_extrapolation = scaled_residual(X);
        // w = 1 forces gamma = (1): the extrapolant is the current iterate.
        if (config.w > 1) X = extrapolate_dense({window.begin(), window.end()});
        rec.extrapolated = true;
        window.assign(1, X);
      }
    }
    rec.scaled_residual = scaled_residual(X);
    rec.elapsed_s = seconds_since(start);
    out.trace.records.push_back(rec);
    if (is_diverged(rec.scaled_residual, config)) diverged(rec, out.trace);
    if (rec.scaled_residual <= config.tau_outer) {
      out.status = SolveStatus::Converged;
      break;
    }
  }
  out.X = sa.Q * X * sb.Q.transpose();
  return out;
}

LowRankSolveResult nonstationary_lowrank_solve(const ProblemSpec& spec,
                                               const SolverConfig& config) {
  spec.validate();
  config.validate();
  const auto start = Clock::now();

  LowRankSolveResult out;
  out.X = LowRankTriple::zero(spec.n(), spec.m());
  const double rhs_norm = spec.rhs_norm();
  if (rhs_norm == 0.0) {
    out.status = SolveStatus::Converged;
    return out;
  }

  auto inner = std::make_unique<InnerSolver>(spec.A, spec.B,
                                             inner_config(config, config.seed));
  LowRankTriple X = out.X;
  std::deque<LowRankTriple> window{X};
  double prev_scaled = 1.0;
  LowRankTriple rhs = assemble_rhs(spec, X, config.tau_trunc, config.max_col,
                                   config.rhs_compression);
  for (Index k = 1; k <= config.k_max; ++k) {
    const double tau_inner = config.eta * prev_scaled;
    const double tau_k =
        config.dynamic_trunc
            ? std::max(1e-15, std::min(config.tau_trunc, config.eta * prev_scaled))
            : config.tau_trunc;
    if (config.regenerate_shifts && k > 1) {
      inner = std::make_unique<InnerSolver>(
          spec.A, spec.B,
          inner_config(config, config.seed + static_cast<std::uint64_t>(k)));
    }
    const InnerResult res = inner->solve(rhs, tau_inner);
    X = truncate(res.solution, tau_k, config.max_col);

    TraceRecord rec;
    rec.iter = k;
    rec.inner_steps = res.steps;
    rec.inner_converged = res.converged;
    const auto est_seed = config.seed + static_cast<std::uint64_t>(k);
    if (config.rre_enabled) {
      window.push_front(X);
      while (static_cast<Index>(window.size()) > config.w + 1) window.pop_back();
      if (extrapolation_step(config, k)) {
        rec.pre_extrapolation =
            estimate_residual_spectral_norm(spec, X, config.estimator_rel_tol,
                                            config.estimator_max_iters, est_seed)
                .value /
            rhs_norm;
        if (config.w > 1) {
          X = extrapolate_lowrank({window.begin(), window.end()}, tau_k,
                                  config.max_col);
          X = truncate(X, tau_k, config.max_col);
        }
        rec.extrapolated = true;
        window.assign(1, X);
      }
    }
    const ResidualEstimate est = estimate_residual_spectral_norm(
        spec, X, config.estimator_rel_tol, config.estimator_max_iters, est_seed);
    rec.scaled_residual = est.value / rhs_norm;
    rec.estimator_converged = est.converged;
    rec.rank = X.rank();
    rec.elapsed_s = seconds_since(start);
    out.trace.records.push_back(rec);
    out.X = X;
    if (is_diverged(rec.scaled_residual, config)) diverged(rec, out.trace);
    if (rec.scaled_residual <= config.tau_outer) {
      out.status = SolveStatus::Converged;
      break;
    }
    prev_scaled = rec.scaled_residual;
    if (k < config.k_max) {
      rhs = assemble_rhs(spec, X, tau_k, config.max_col, config.rhs_compression);
    }
  }
  return out;
}

ResidualEstimate estimate_residual_spectral_norm(const ProblemSpec& spec,
                                                 const LowRankTriple& x,
                                                 double rel_tol,
                                                 Index max_iters,
                                                 std::uint64_t seed) {
  ResidualEstimate out;
  Rng rng(seed);
  Vector p = rng.symmetric_vector(spec.m());
  p /= p.norm();
  double prev = -1.0;
  for (Index i = 0; i < max_iters; ++i) {
    const Matrix q = lowrank_apply_operator_vec(spec, x, p);
    const double qn = q.norm();
    out.iterations = i + 1;
    if (qn == 0.0) {
      // p is in the null space; on the first step this only means R = 0
      // along p, which for a random start means R = 0.
      out.value = std::max(out.value, 0.0);
      out.converged = true;
      return out;
    }
    const Matrix z = lowrank_apply_operator_vec_transpose(spec, x, q);
    const double zn = z.norm();
    out.value = zn / qn;
    if (prev >= 0.0 && std::abs(out.value - prev) <= rel_tol * out.value) {
      out.converged = true;
      return out;
    }
    prev = out.value;
    if (zn == 0.0) {
      out.converged = true;
      return out;
    }
    p = z / zn;
  }
  return out;
}

}  // namespace mtsylv
