#pragma once

// Dense kernels: thin QR, SVD, real Schur form, quasi-triangular Sylvester
// solves (Bartels-Stewart) and helpers shared by the rest of the library.
//
// All dense matrices are Eigen::MatrixXd, i.e. column-major storage. vec(X)
// therefore stacks columns, which is the convention used by the Kronecker
// oracles.

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace mtsylv {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

struct QrFactors {
  Matrix Q;  // rows x min(rows, cols), orthonormal columns
  Matrix R;  // min(rows, cols) x cols, upper triangular
};

struct SvdFactors {
  Matrix U;
  Vector S;  // descending, nonnegative
  Matrix V;
};

/// Q orthogonal, R quasi-upper-triangular with M = Q R Q^T.
struct SchurForm {
  Matrix Q;
  Matrix R;
};

/// Throws Error(InvalidInput) naming `what` if M holds NaN or Inf.
void require_finite(const Eigen::Ref<const Matrix>& M, const char* what);

QrFactors thin_qr(const Matrix& M);

/// Thin SVD; U is rows x k, V is cols x k with k = min(rows, cols).
SvdFactors svd(const Matrix& M);

/// Largest singular value. Zero for empty matrices.
double spectral_norm(const Matrix& M);

/// Cheap lower estimate of the largest singular value by a few power steps
/// started from the column of largest norm. Used to scale roundoff floors.
double spectral_norm_estimate(const Matrix& M, int iters = 20);

SchurForm real_schur(const Matrix& M);

/// Eigenvalues read off the 1x1 and 2x2 diagonal blocks of a
/// quasi-upper-triangular matrix, in block order.
std::vector<Complex> quasi_triangular_eigenvalues(const Matrix& R);

/// Solves Ra X + X Rb = C for quasi-upper-triangular Ra (n x n) and
/// Rb (m x m). Column blocks of X are produced left to right; within each
/// block the rows are found by back substitution over the diagonal blocks of
/// Ra. Each elementary block equation (at most 4 x 4) is solved directly.
Matrix solve_quasi_triangular_sylvester(const Matrix& Ra, const Matrix& Rb,
                                        const Matrix& C);

/// Solves A X + X B = -Y by Bartels-Stewart.
Matrix dense_sylvester_solve(const Matrix& A, const Matrix& B,
                             const Matrix& Y);

/// Kronecker product, used by the vectorized oracles.
Matrix kron(const Matrix& A, const Matrix& B);

}  // namespace mtsylv
