#include <string>

#include "mtsylv/error.hpp"
#include "mtsylv/inner.hpp"

namespace mtsylv {

namespace {

// ||W_F W_G^T||_2
double factored_norm(const Matrix& WF, const Matrix& WG) {
  if (WF.cols() == 0) return 0.0;
  const QrFactors f = thin_qr(WF);
  const QrFactors g = thin_qr(WG);
  return spectral_norm(f.R * g.R.transpose());
}

// Solution blocks collected per step, assembled once at the end.
struct Accumulator {
  std::vector<Matrix> left;
  std::vector<Matrix> right;
  std::vector<double> signs;  // core is diag(signs), one entry per column

  void add(const Matrix& L, const Matrix& R, double sign) {
    left.push_back(L);
    right.push_back(R);
    signs.insert(signs.end(), static_cast<std::size_t>(L.cols()), sign);
  }

  LowRankTriple assemble(Index n, Index m) const {
    const auto z = static_cast<Index>(signs.size());
    Matrix ZL(n, z);
    Matrix ZR(m, z);
    Index offset = 0;
    for (std::size_t i = 0; i < left.size(); ++i) {
      ZL.middleCols(offset, left[i].cols()) = left[i];
      ZR.middleCols(offset, right[i].cols()) = right[i];
      offset += left[i].cols();
    }
    Vector d(z);
    for (Index i = 0; i < z; ++i) d(i) = signs[static_cast<std::size_t>(i)];
    return LowRankTriple(std::move(ZL), Matrix(d.asDiagonal()), std::move(ZR));
  }
};

Index find_solver(const std::vector<ShiftedSolve>& solvers, Complex shift) {
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    if (solvers[i].shift() == shift) return static_cast<Index>(i);
  }
  return -1;
}

}  // namespace

AdiSolver::AdiSolver(const Coefficient& A, const Coefficient& B,
                     ShiftSets shifts)
    : shifts_(std::move(shifts)) {
  validate_shifts(shifts_);
  for (std::size_t j = 0; j < shifts_.size(); ++j) {
    const Complex a = shifts_.alpha[j];
    const Complex b = shifts_.beta[j];
    if (!(a.real() < 0.0) || !(b.real() < 0.0)) {
      throw Error(ErrorKind::InvalidInput,
                  "ADI shifts must lie in the open left half-plane (step " +
                      std::to_string(j) + ")");
    }
    const Index ia = find_solver(solve_a_, b);
    solve_a_.push_back(ia >= 0 ? solve_a_[static_cast<std::size_t>(ia)]
                               : ShiftedSolve(A, b, false));
    const Index ib = find_solver(solve_b_, a);
    solve_b_.push_back(ib >= 0 ? solve_b_[static_cast<std::size_t>(ib)]
                               : ShiftedSolve(B, a, true));
  }
}

InnerResult AdiSolver::solve(const LowRankTriple& rhs, double tol,
                             Index max_steps) const {
  const Index n = rhs.rows();
  const Index m = rhs.cols();
  InnerResult out;
  Matrix WF = rhs.left() * rhs.core();
  Matrix WG = rhs.right();
  const double rhs_norm = factored_norm(WF, WG);
  out.residual_norm = rhs_norm;
  if (rhs_norm == 0.0) {
    out.solution = LowRankTriple::zero(n, m);
    out.residual = LowRankTriple::zero(n, m);
    return out;
  }

  Accumulator acc;
  const std::size_t count = shifts_.size();
  std::size_t j = 0;
  out.converged = false;
  while (out.steps < max_steps) {
    const Complex a = shifts_.alpha[j];
    const Complex b = shifts_.beta[j];
    if (a.imag() == 0.0 && b.imag() == 0.0) {
      const double s = a.real() + b.real();
      const Matrix V = solve_a_[j].solve(WF);
      const Matrix W = solve_b_[j].solve(WG);
      WF -= s * V;
      WG -= s * W;
      acc.add(-s * V, W, 1.0);
      out.steps += 1;
      j = (j + 1) % count;
    } else {
      // Fused step with (a, b) followed by (conj a, conj b); the product of
      // the two updates is real.
      const Complex s1 = a + b;
      const Complex s2 = std::conj(s1);
      const CMatrix V1 = solve_a_[j].solve(CMatrix(WF.cast<Complex>()));
      const CMatrix W1 = solve_b_[j].solve(CMatrix(WG.cast<Complex>()));
      const CMatrix WF1 = WF.cast<Complex>() - s1 * V1;
      const CMatrix WG1 = WG.cast<Complex>() - s1 * W1;
      const CMatrix V2 = solve_a_[j + 1].solve(WF1);
      const CMatrix W2 = solve_b_[j + 1].solve(WG1);
      WF = (WF1 - s2 * V2).real();
      WG = (WG1 - s2 * W2).real();
      const CMatrix P1 = -s1 * V1;
      const CMatrix P2 = -s2 * V2;
      acc.add(P1.real(), W1.real(), 1.0);
      acc.add(P2.real(), W2.real(), 1.0);
      acc.add(P1.imag(), W1.imag(), -1.0);
      acc.add(P2.imag(), W2.imag(), -1.0);
      out.steps += 2;
      j = (j + 2) % count;
    }
    out.residual_norm = factored_norm(WF, WG);
    if (!std::isfinite(out.residual_norm)) {
      throw Error(ErrorKind::NumericalFailure,
                  "LR-ADI residual became non-finite at step " +
                      std::to_string(out.steps));
    }
    if (out.residual_norm <= tol * rhs_norm) {
      out.converged = true;
      break;
    }
  }
  out.solution = acc.signs.empty() ? LowRankTriple::zero(n, m)
                                   : acc.assemble(n, m);
  out.residual = LowRankTriple(WF, Matrix::Identity(WF.cols(), WF.cols()), WG);
  return out;
}

InnerResult lr_adi_solve(const Coefficient& A, const Coefficient& B,
                         const LowRankTriple& rhs, const ShiftSets& shifts,
                         double tol, Index max_steps) {
  return AdiSolver(A, B, shifts).solve(rhs, tol, max_steps);
}

}  // namespace mtsylv
