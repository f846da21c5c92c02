#include <string>

#include "mtsylv/error.hpp"
#include "mtsylv/inner.hpp"

namespace mtsylv {

namespace {

// Relative size below which an orthogonalized column counts as dependent.
constexpr double kDeflationTol = 1e-10;

// One side of the extended Krylov space: orthonormal basis U together with
// M U, grown by a "plus" block (products with M) and a "minus" block
// (solves with M) per step.
class ExtendedBasis {
 public:
  ExtendedBasis(const Coefficient& M, const ShiftedSolve& inv, bool transpose)
      : M_(M), inv_(inv), transpose_(transpose) {}

  void start(const Matrix& F) {
    U_ = Matrix(F.rows(), 0);
    MU_ = Matrix(F.rows(), 0);
    plus_ = append(F);
    minus_ = append(inv_.solve(F));
  }

  // Returns false when the space stopped growing.
  bool expand() {
    const Matrix next_plus = apply(plus_);
    const Matrix next_minus = plus_.cols() + minus_.cols() > 0
                                  ? inv_.solve(minus_)
                                  : Matrix(U_.rows(), 0);
    plus_ = append(next_plus);
    minus_ = append(next_minus);
    return plus_.cols() + minus_.cols() > 0;
  }

  const Matrix& basis() const { return U_; }
  const Matrix& product() const { return MU_; }

 private:
  Matrix apply(const Matrix& X) const {
    return transpose_ ? M_.apply_transpose(X) : M_.apply(X);
  }

  // Orthogonalizes X against the basis (two passes), keeps an orthonormal
  // basis of what is left and appends it. Returns the appended block.
  Matrix append(Matrix X) {
    if (X.cols() == 0) return X;
    const double ref = X.norm();
    if (ref == 0.0) return Matrix(X.rows(), 0);
    for (int pass = 0; pass < 2; ++pass) {
      if (U_.cols() > 0) X -= U_ * (U_.transpose() * X);
    }
    const SvdFactors f = svd(X);
    Index keep = 0;
    while (keep < f.S.size() && f.S(keep) > kDeflationTol * ref) ++keep;
    keep = std::min(keep, X.rows() - U_.cols());
    Matrix block = f.U.leftCols(keep);
    if (keep > 0 && U_.cols() > 0) {
      block -= U_ * (U_.transpose() * block);
      block = thin_qr(block).Q;
    }
    const Index old = U_.cols();
    U_.conservativeResize(Eigen::NoChange, old + keep);
    U_.rightCols(keep) = block;
    MU_.conservativeResize(Eigen::NoChange, old + keep);
    MU_.rightCols(keep) = apply(block);
    return block;
  }

  const Coefficient& M_;
  const ShiftedSolve& inv_;
  bool transpose_;
  Matrix U_;
  Matrix MU_;
  Matrix plus_;
  Matrix minus_;
};

double stacked_norm(const Matrix& L, const Matrix& core, const Matrix& R) {
  const QrFactors l = thin_qr(L);
  const QrFactors r = thin_qr(R);
  return spectral_norm(l.R * core * r.R.transpose());
}

}  // namespace

EksmSolver::EksmSolver(const Coefficient& A, const Coefficient& B)
    : A_(A), B_(B), inv_a_(A, 0.0, false), inv_bt_(B, 0.0, true) {}

InnerResult EksmSolver::solve(const LowRankTriple& rhs, double tol,
                              Index max_steps) const {
  const Index n = rhs.rows();
  const Index m = rhs.cols();
  InnerResult out;
  const double rhs_norm = lowrank_norm(rhs);
  out.residual_norm = rhs_norm;
  out.solution = LowRankTriple::zero(n, m);
  out.residual = LowRankTriple::zero(n, m);
  if (rhs_norm == 0.0) return out;
  out.residual = rhs;

  ExtendedBasis left(A_, inv_a_, false);
  ExtendedBasis right(B_, inv_bt_, true);
  left.start(rhs.left());
  right.start(rhs.right());
  out.converged = false;

  Matrix Y;
  bool grew = true;
  while (out.steps < max_steps && grew) {
    out.steps += 1;
    const Matrix& U = left.basis();
    const Matrix& W = right.basis();
    const Matrix Ap = U.transpose() * left.product();
    const Matrix Bp = (W.transpose() * right.product()).transpose();  // W^T B W
    const Matrix Yp = (U.transpose() * rhs.left()) * rhs.core() *
                      (W.transpose() * rhs.right()).transpose();
    try {
      Y = dense_sylvester_solve(Ap, Bp, Yp);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SpectraOverlap) throw;
      throw Error(ErrorKind::NumericalFailure,
                  std::string("EKSM projected equation is singular: ") + e.what());
    }
    // A U = U Ap + P1 and B^T W = W Bp^T + P2, so the residual is
    // P1 Y W^T + U Y P2^T = [P1, U] [W Y^T, P2 Y^T]^T.
    const Matrix P1 = left.product() - U * Ap;
    const Matrix P2 = right.product() - W * Bp.transpose();
    Matrix L(n, P1.cols() + U.cols());
    L << P1, U;
    Matrix R(m, 2 * Y.rows());
    R << W * Y.transpose(), P2 * Y.transpose();
    Matrix I = Matrix::Identity(L.cols(), L.cols());
    out.residual_norm = stacked_norm(L, I, R);
    out.residual = LowRankTriple(std::move(L), std::move(I), std::move(R));
    if (!std::isfinite(out.residual_norm)) {
      throw Error(ErrorKind::NumericalFailure,
                  "EKSM residual became non-finite at step " +
                      std::to_string(out.steps));
    }
    if (out.residual_norm <= tol * rhs_norm) {
      out.converged = true;
      break;
    }
    if (out.steps == max_steps) break;
    const bool gl = left.expand();
    const bool gr = right.expand();
    grew = gl || gr;
  }
  if (Y.size() > 0) {
    const SvdFactors f = svd(Y);
    Index keep = 0;
    while (keep < f.S.size() && f.S(keep) > 1e-14 * f.S(0)) ++keep;
    out.solution = LowRankTriple(left.basis() * f.U.leftCols(keep),
                                 Matrix(f.S.head(keep).asDiagonal()),
                                 right.basis() * f.V.leftCols(keep));
  }
  return out;
}

InnerResult eksm_solve(const Coefficient& A, const Coefficient& B,
                       const LowRankTriple& rhs, double tol, Index max_steps) {
  return EksmSolver(A, B).solve(rhs, tol, max_steps);
}

}  // namespace mtsylv
