#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/SparseCore>

#include "mtsylv/dense.hpp"

namespace mtsylv {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// A coefficient matrix of the equation, stored dense or sparse. Only
/// products, transposition and densification are exposed; shifted solves
/// live in linear_solve.hpp.
class Coefficient {
 public:
  Coefficient() : storage_(Matrix(0, 0)) {}
  Coefficient(Matrix dense);         // NOLINT(google-explicit-constructor)
  Coefficient(SparseMatrix sparse);  // NOLINT(google-explicit-constructor)

  Index rows() const;
  Index cols() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }

  /// M * X
  Matrix apply(const Eigen::Ref<const Matrix>& X) const;
  /// M^T * X
  Matrix apply_transpose(const Eigen::Ref<const Matrix>& X) const;

  Matrix dense() const;
  SparseMatrix sparse() const;
  Coefficient transposed() const;

  const Matrix* dense_ptr() const { return std::get_if<Matrix>(&storage_); }
  const SparseMatrix* sparse_ptr() const {
    return std::get_if<SparseMatrix>(&storage_);
  }

 private:
  std::variant<Matrix, SparseMatrix> storage_;
};

enum class EquationKind { Sylvester, Lyapunov };

/// Coefficients of
///   A X + X B + pi_scale * sum_k N_k X H_k = -F T G^T.
/// `pi_scale` lets generators keep N_k, H_k unscaled (e.g. beta^2 weighting).
/// For the Lyapunov kind B = A^T, H_k = N_k^T and G = F.
struct ProblemSpec {
  EquationKind kind = EquationKind::Sylvester;
  Coefficient A;
  Coefficient B;
  std::vector<Coefficient> N;
  std::vector<Coefficient> H;
  double pi_scale = 1.0;
  Matrix F;
  Matrix T;
  Matrix G;
  /// Optional dense right-hand side; equals F T G^T when present.
  std::optional<Matrix> Y;

  Index n() const { return A.rows(); }
  Index m() const { return B.rows(); }
  Index ell() const { return static_cast<Index>(N.size()); }
  Index rhs_rank() const { return T.rows(); }

  /// Y if present, else F T G^T.
  Matrix rhs_dense() const;
  /// ||F T G^T||_2 from the factors (thin QR of F and G).
  double rhs_norm() const;

  /// Throws Error(InvalidInput) on nonconforming shapes, non-finite data or
  /// a dense Y that disagrees with F T G^T.
  void validate() const;
};

/// Builds a Lyapunov-kind spec: B = A^T, H_k = N_k^T, G = F.
ProblemSpec make_lyapunov(Coefficient A, std::vector<Coefficient> N, Matrix F,
                          Matrix T, double pi_scale = 1.0);

/// A X + X B + Pi(X), no right-hand side.
Matrix apply_operator(const ProblemSpec& spec, const Matrix& X);

/// pi_scale * sum_k N_k X H_k
Matrix apply_pi(const ProblemSpec& spec, const Matrix& X);

/// ||A X + X B + Pi(X) + F T G^T||_2
double dense_residual_norm(const ProblemSpec& spec, const Matrix& X);

}  // namespace mtsylv
