#include "mtsylv/problem.hpp"

#include <string>

#include "mtsylv/error.hpp"

namespace mtsylv {

Coefficient::Coefficient(Matrix dense) : storage_(std::move(dense)) {}

Coefficient::Coefficient(SparseMatrix sparse) : storage_(std::move(sparse)) {
  std::get<SparseMatrix>(storage_).makeCompressed();
}

Index Coefficient::rows() const {
  return std::visit([](const auto& M) { return static_cast<Index>(M.rows()); },
                    storage_);
}

Index Coefficient::cols() const {
  return std::visit([](const auto& M) { return static_cast<Index>(M.cols()); },
                    storage_);
}

Matrix Coefficient::apply(const Eigen::Ref<const Matrix>& X) const {
  return std::visit([&](const auto& M) -> Matrix { return M * X; }, storage_);
}

Matrix Coefficient::apply_transpose(const Eigen::Ref<const Matrix>& X) const {
  return std::visit([&](const auto& M) -> Matrix { return M.transpose() * X; },
                    storage_);
}

Matrix Coefficient::dense() const {
  if (const auto* d = dense_ptr()) return *d;
  return Matrix(*sparse_ptr());
}

SparseMatrix Coefficient::sparse() const {
  if (const auto* s = sparse_ptr()) return *s;
  return dense_ptr()->sparseView();
}

Coefficient Coefficient::transposed() const {
  if (const auto* d = dense_ptr()) return Coefficient(Matrix(d->transpose()));
  return Coefficient(SparseMatrix(sparse_ptr()->transpose()));
}

Matrix ProblemSpec::rhs_dense() const {
  if (Y) return *Y;
  return F * T * G.transpose();
}

double ProblemSpec::rhs_norm() const {
  if (T.size() == 0) return 0.0;
  const QrFactors qf = thin_qr(F);
  const QrFactors qg = thin_qr(G);
  return spectral_norm(qf.R * T * qg.R.transpose());
}

void ProblemSpec::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::InvalidInput, "problem spec: " + what);
  };
  const Index n = A.rows();
  const Index m = B.rows();
  if (A.cols() != n) fail("A is not square");
  if (B.cols() != m) fail("B is not square");
  if (N.size() != H.size()) fail("N and H term counts differ");
  for (std::size_t k = 0; k < N.size(); ++k) {
    if (N[k].rows() != n || N[k].cols() != n) {
      fail("N" + std::to_string(k + 1) + " is not n x n");
    }
    if (H[k].rows() != m || H[k].cols() != m) {
      fail("H" + std::to_string(k + 1) + " is not m x m");
    }
  }
  const Index r = T.rows();
  if (T.cols() != r || F.rows() != n || F.cols() != r || G.rows() != m ||
      G.cols() != r) {
    fail("right-hand side factors F, T, G do not conform");
  }
  require_finite(F, "F");
  require_finite(T, "T");
  require_finite(G, "G");
  auto finite = [&](const Coefficient& c, const std::string& name) {
    const bool ok = c.is_sparse()
                        ? Eigen::Map<const Vector>(c.sparse_ptr()->valuePtr(),
                                                   c.sparse_ptr()->nonZeros())
                              .allFinite()
                        : c.dense_ptr()->allFinite();
    if (!ok) fail(name + " contains NaN or Inf");
  };
  finite(A, "A");
  finite(B, "B");
  for (std::size_t k = 0; k < N.size(); ++k) {
    finite(N[k], "N" + std::to_string(k + 1));
    finite(H[k], "H" + std::to_string(k + 1));
  }
  if (Y) {
    if (Y->rows() != n || Y->cols() != m) fail("Y is not n x m");
    require_finite(*Y, "Y");
    const Matrix diff = *Y - F * T * G.transpose();
    if (diff.norm() > 1e-12 * std::max(1.0, Y->norm())) {
      fail("dense Y disagrees with F T G^T");
    }
  }
}

ProblemSpec make_lyapunov(Coefficient A, std::vector<Coefficient> N, Matrix F,
                          Matrix T, double pi_scale) {
  ProblemSpec spec;
  spec.kind = EquationKind::Lyapunov;
  spec.B = A.transposed();
  spec.A = std::move(A);
  for (const auto& Nk : N) spec.H.push_back(Nk.transposed());
  spec.N = std::move(N);
  spec.G = F;
  spec.F = std::move(F);
  spec.T = std::move(T);
  spec.pi_scale = pi_scale;
  return spec;
}

Matrix apply_pi(const ProblemSpec& spec, const Matrix& X) {
  Matrix out = Matrix::Zero(spec.n(), spec.m());
  for (std::size_t k = 0; k < spec.N.size(); ++k) {
    // N X H = N (H^T X^T)^T
    const Matrix XH = spec.H[k].apply_transpose(X.transpose()).transpose();
    out.noalias() += spec.N[k].apply(XH);
  }
  return spec.pi_scale * out;
}

Matrix apply_operator(const ProblemSpec& spec, const Matrix& X) {
  if (X.rows() != spec.n() || X.cols() != spec.m()) {
    throw Error(ErrorKind::InvalidInput,
                "apply_operator: X is " + std::to_string(X.rows()) + "x" +
                    std::to_string(X.cols()) + ", expected " +
                    std::to_string(spec.n()) + "x" + std::to_string(spec.m()));
  }
  Matrix out = spec.A.apply(X);
  out.noalias() += spec.B.apply_transpose(X.transpose()).transpose();
  if (!spec.N.empty()) out += apply_pi(spec, X);
  return out;
}

double dense_residual_norm(const ProblemSpec& spec, const Matrix& X) {
  return spectral_norm(apply_operator(spec, X) + spec.rhs_dense());
}

}  // namespace mtsylv
