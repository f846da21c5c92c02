#include "mtsylv/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mtsylv/error.hpp"

namespace mtsylv {

namespace {

// Relative distance below which two eigenvalues count as colliding.
constexpr double kCollisionTol = 1e-14;

// Size of the diagonal block of a quasi-triangular matrix starting at i.
Index block_size(const Matrix& R, Index i) {
  return (i + 1 < R.rows() && R(i + 1, i) != 0.0) ? 2 : 1;
}

std::vector<Index> block_starts(const Matrix& R) {
  std::vector<Index> starts;
  for (Index i = 0; i < R.rows(); i += block_size(R, i)) starts.push_back(i);
  return starts;
}

// Solves Ap X + X Bq = C for blocks of order <= 2 via the Kronecker system
// (I (x) Ap + Bq^T (x) I) vec(X) = vec(C).
Matrix solve_block(const Matrix& Ap, const Matrix& Bq, const Matrix& C) {
  const Index p = Ap.rows();
  const Index q = Bq.rows();
  if (p == 1 && q == 1) {
    const double a = Ap(0, 0);
    const double b = Bq(0, 0);
    const double d = a + b;
    if (std::abs(d) <= kCollisionTol * (std::abs(a) + std::abs(b)) ||
        d == 0.0) {
      throw Error(ErrorKind::SpectraOverlap,
                  "eigenvalue " + std::to_string(a) +
                      " of A collides with the negated eigenvalue " +
                      std::to_string(-b) + " of B");
    }
    return Matrix::Constant(1, 1, C(0, 0) / d);
  }
  const Matrix K = kron(Matrix::Identity(q, q), Ap) +
                   kron(Bq.transpose(), Matrix::Identity(p, p));
  Eigen::JacobiSVD<Matrix> sv(K);
  const auto& s = sv.singularValues();
  if (s(s.size() - 1) <= kCollisionTol * s(0) || s(0) == 0.0) {
    throw Error(ErrorKind::SpectraOverlap,
                "spectra of A and -B overlap in a " + std::to_string(p) + "x" +
                    std::to_string(q) + " block equation");
  }
  const Vector x = K.fullPivLu().solve(C.reshaped());
  return x.reshaped(p, q);
}

}  // namespace

void require_finite(const Eigen::Ref<const Matrix>& M, const char* what) {
  if (!M.allFinite()) {
    throw Error(ErrorKind::InvalidInput,
                std::string(what) + " contains non-finite entries");
  }
}

QrFactors thin_qr(const Matrix& M) {
  require_finite(M, "thin_qr input");
  const Index rows = M.rows();
  const Index cols = M.cols();
  const Index k = std::min(rows, cols);
  QrFactors out;
  if (k == 0) {
    out.Q = Matrix(rows, 0);
    out.R = Matrix(0, cols);
    return out;
  }
  Eigen::HouseholderQR<Matrix> qr(M);
  out.Q = qr.householderQ() * Matrix::Identity(rows, k);
  out.R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

SvdFactors svd(const Matrix& M) {
  require_finite(M, "svd input");
  SvdFactors out;
  const Index k = std::min(M.rows(), M.cols());
  if (k == 0) {
    out.U = Matrix(M.rows(), 0);
    out.S = Vector(0);
    out.V = Matrix(M.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.U = dec.matrixU();
  out.S = dec.singularValues();
  out.V = dec.matrixV();
  return out;
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  require_finite(M, "spectral_norm input");
  Eigen::BDCSVD<Matrix> dec(M);
  return dec.singularValues()(0);
}

double spectral_norm_estimate(const Matrix& M, int iters) {
  if (M.size() == 0) return 0.0;
  Index j = 0;
  const double col_max = M.colwise().norm().maxCoeff(&j);
  if (col_max == 0.0 || !std::isfinite(col_max)) return col_max;
  Vector v = Vector::Unit(M.cols(), j);
  double est = col_max;
  for (int i = 0; i < iters; ++i) {
    const Vector u = M * v;
    const Vector z = M.transpose() * u;
    const double zn = z.norm();
    if (zn == 0.0) break;
    est = std::max(est, std::sqrt(zn));
    v = z / zn;
  }
  return est;
}

SchurForm real_schur(const Matrix& M) {
  if (M.rows() != M.cols()) {
    throw Error(ErrorKind::InvalidInput, "real_schur needs a square matrix");
  }
  require_finite(M, "real_schur input");
  if (M.rows() == 0) return {Matrix(0, 0), Matrix(0, 0)};
  Eigen::RealSchur<Matrix> rs(M.rows());
  rs.compute(M, true);
  if (rs.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure,
                "real Schur iteration did not converge within " +
                    std::to_string(rs.getMaxIterations()) + " iterations");
  }
  SchurForm out{rs.matrixU(), rs.matrixT()};
  // Strictly zero everything below the first subdiagonal.
  for (Index j = 0; j < out.R.cols(); ++j) {
    for (Index i = j + 2; i < out.R.rows(); ++i) out.R(i, j) = 0.0;
  }
  return out;
}

std::vector<Complex> quasi_triangular_eigenvalues(const Matrix& R) {
  std::vector<Complex> ev;
  ev.reserve(static_cast<std::size_t>(R.rows()));
  for (Index i : block_starts(R)) {
    if (block_size(R, i) == 1) {
      ev.emplace_back(R(i, i), 0.0);
      continue;
    }
    const double a = R(i, i), b = R(i, i + 1), c = R(i + 1, i),
                 d = R(i + 1, i + 1);
    const double mean = 0.5 * (a + d);
    const double disc = 0.25 * (a - d) * (a - d) + b * c;
    if (disc >= 0.0) {
      const double r = std::sqrt(disc);
      ev.emplace_back(mean + r, 0.0);
      ev.emplace_back(mean - r, 0.0);
    } else {
      const double r = std::sqrt(-disc);
      ev.emplace_back(mean, r);
      ev.emplace_back(mean, -r);
    }
  }
  return ev;
}

Matrix solve_quasi_triangular_sylvester(const Matrix& Ra, const Matrix& Rb,
                                        const Matrix& C) {
  const Index n = Ra.rows();
  const Index m = Rb.rows();
  if (Ra.cols() != n || Rb.cols() != m || C.rows() != n || C.cols() != m) {
    throw Error(ErrorKind::InvalidInput,
                "solve_quasi_triangular_sylvester: dimension mismatch");
  }
  require_finite(C, "Sylvester right-hand side");
  Matrix X = Matrix::Zero(n, m);
  const std::vector<Index> rows = block_starts(Ra);
  for (Index j : block_starts(Rb)) {
    const Index q = block_size(Rb, j);
    Matrix rhs = C.middleCols(j, q);
    if (j > 0) rhs.noalias() -= X.leftCols(j) * Rb.block(0, j, j, q);
    const Matrix Bq = Rb.block(j, j, q, q);
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      const Index i = *it;
      const Index p = block_size(Ra, i);
      Matrix local = rhs.middleRows(i, p);
      const Index tail = n - i - p;
      if (tail > 0) {
        local.noalias() -=
            Ra.block(i, i + p, p, tail) * X.block(i + p, j, tail, q);
      }
      X.block(i, j, p, q) = solve_block(Ra.block(i, i, p, p), Bq, local);
    }
  }
  return X;
}

Matrix dense_sylvester_solve(const Matrix& A, const Matrix& B,
                             const Matrix& Y) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || Y.rows() != A.rows() ||
      Y.cols() != B.rows()) {
    throw Error(ErrorKind::InvalidInput,
                "dense_sylvester_solve: dimension mismatch");
  }
  const SchurForm sa = real_schur(A);
  const SchurForm sb = real_schur(B);
  const Matrix C = -(sa.Q.transpose() * Y * sb.Q);
  const Matrix Xt = solve_quasi_triangular_sylvester(sa.R, sb.R, C);
  return sa.Q * Xt * sb.Q.transpose();
}

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::SpectraOverlap: return "spectra-overlap";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::OracleTooLarge: return "oracle-too-large";
    case ErrorKind::NoUniqueSolution: return "no-unique-solution";
    case ErrorKind::InvalidWindow: return "invalid-window";
    case ErrorKind::ShiftFailure: return "shift-failure";
    case ErrorKind::Diverged: return "diverged";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace mtsylv
