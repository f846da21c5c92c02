#include <algorithm>
#include <atomic>
#include <exception>
#include <string>
#include <thread>

#include "mtsylv/error.hpp"
#include "mtsylv/inner.hpp"

namespace mtsylv {

Index effective_max_steps(const InnerConfig& config) {
  if (config.max_steps > 0) return config.max_steps;
  return config.method == InnerMethod::Adi ? 200 : 100;
}

Index effective_part_size(const InnerConfig& config) {
  if (config.part_size > 0) return config.part_size;
  return config.method == InnerMethod::Adi ? kNoRankCap : 30;
}

InnerSolver::InnerSolver(const Coefficient& A, const Coefficient& B,
                         InnerConfig config)
    : config_(config) {
  if (config_.method == InnerMethod::Adi) {
    adi_ = std::make_unique<AdiSolver>(
        A, B,
        heuristic_shifts(A, B, config_.k_plus, config_.k_minus,
                         config_.n_shifts, config_.seed));
  } else {
    eksm_ = std::make_unique<EksmSolver>(A, B);
  }
}

const ShiftSets* InnerSolver::shifts() const {
  return adi_ ? &adi_->shifts() : nullptr;
}

InnerResult InnerSolver::solve(const LowRankTriple& rhs, double tol) const {
  const Index max_steps = effective_max_steps(config_);
  const double rhs_norm = lowrank_norm(rhs);
  const std::vector<LowRankTriple> parts =
      rhs.rank() == 0 ? std::vector<LowRankTriple>{rhs}
                      : separate_rhs(rhs, effective_part_size(config_));
  const auto total_rank = static_cast<double>(std::max<Index>(rhs.rank(), 1));

  std::vector<InnerResult> results(parts.size());
  std::vector<std::exception_ptr> errors(parts.size());

  auto solve_part = [&](std::size_t j) {
    try {
      const LowRankTriple& part = parts[j];
      const double share = static_cast<double>(part.rank()) / total_rank;
      const double part_norm = lowrank_norm(part);
      // Convert the absolute target tol * ||rhs|| * r_j / r into a tolerance
      // relative to this part.
      const double part_tol =
          part_norm > 0.0 ? tol * rhs_norm * share / part_norm : tol;
      InnerResult r = adi_ ? adi_->solve(part, part_tol, max_steps)
                           : eksm_->solve(part, part_tol, max_steps);
      if (config_.truncate_parts && r.solution.rank() > 0) {
        r.solution = truncate(r.solution, config_.part_tau * share);
      }
      results[j] = std::move(r);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, config_.threads));
  if (workers == 1 || parts.size() == 1) {
    for (std::size_t j = 0; j < parts.size(); ++j) solve_part(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(workers, parts.size()); ++t) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < parts.size(); j = next++) solve_part(j);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (!errors[j]) continue;
    try {
      std::rethrow_exception(errors[j]);
    } catch (const Error& e) {
      throw Error(e.kind(), "inner solve, part " + std::to_string(j) + ": " + e.what());
    }
  }

  if (parts.size() == 1) {
    InnerResult& only = results.front();
    if (!only.converged) only.failed_part = 0;
    return std::move(only);
  }

  InnerResult out;
  std::vector<LowRankTriple> solutions;
  std::vector<LowRankTriple> residuals;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    solutions.push_back(results[j].solution);
    residuals.push_back(results[j].residual);
    out.steps += results[j].steps;
    if (!results[j].converged && out.failed_part < 0) {
      out.converged = false;
      out.failed_part = static_cast<Index>(j);
    }
  }
  out.solution = concat(solutions);
  out.residual = concat(residuals);
  out.residual_norm = lowrank_norm(out.residual);
  return out;
}

InnerResult solve_inner(const Coefficient& A, const Coefficient& B,
                        const LowRankTriple& rhs, double tol,
                        const InnerConfig& config) {
  return InnerSolver(A, B, config).solve(rhs, tol);
}

}  // namespace mtsylv
