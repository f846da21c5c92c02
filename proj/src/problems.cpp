#include "mtsylv/problems.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "mtsylv/error.hpp"
#include "mtsylv/random.hpp"

namespace mtsylv {

namespace {

double max_real_eigenvalue(const Matrix& M) {
  const SchurForm s = real_schur(M);
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& ev : quasi_triangular_eigenvalues(s.R)) {
    best = std::max(best, ev.real());
  }
  return best;
}

Matrix shifted_stable(Matrix M0) {
  const double shift = 1.5 * max_real_eigenvalue(M0);
  M0.diagonal().array() -= shift;
  return M0;
}

void require_grid(Index n0, double beta) {
  if (n0 < 2) {
    throw Error(ErrorKind::InvalidInput,
                "grid parameter n0 must be >= 2, got " + std::to_string(n0));
  }
  if (!(beta >= 0.0)) throw Error(ErrorKind::InvalidInput, "beta must be >= 0");
}

struct AdvDiffParts {
  SparseMatrix A;
  SparseMatrix N1;
  SparseMatrix N2;
  Matrix F;
};

AdvDiffParts advdiff_parts(Index n0, double beta) {
  require_grid(n0, beta);
  const Index nx = n0 + 2;
  const Index n = nx * n0;
  const double h = 1.0 / static_cast<double>(n0 + 1);
  const double d2 = 1.0 / (h * h);
  const double d1 = 1.0 / (2.0 * h);
  auto idx = [&](Index i, Index j) { return (j - 1) * nx + i; };

  std::vector<Eigen::Triplet<double>> a;
  std::vector<Eigen::Triplet<double>> n1;
  std::vector<Eigen::Triplet<double>> n2;
  AdvDiffParts out;
  out.F = Matrix::Zero(n, 2);
  for (Index j = 1; j <= n0; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index r = idx(i, j);
      a.emplace_back(r, r, -4.0 * d2);
      if (i == 0) {
        a.emplace_back(r, idx(1, j), 2.0 * d2);
        n1.emplace_back(r, r, 2.0 / h);
        out.F(r, 0) = -2.0 * beta / h;
      } else if (i == nx - 1) {
        a.emplace_back(r, idx(nx - 2, j), 2.0 * d2);
        n2.emplace_back(r, r, 2.0 / h);
        out.F(r, 1) = -2.0 * beta / h;
      } else {
        a.emplace_back(r, idx(i - 1, j), d2);
        a.emplace_back(r, idx(i + 1, j), d2);
      }
      if (j < n0) a.emplace_back(r, idx(i, j + 1), d2 - d1);
      if (j > 1) a.emplace_back(r, idx(i, j - 1), d2 + d1);
    }
  }
  out.A.resize(n, n);
  out.A.setFromTriplets(a.begin(), a.end());
  out.N1.resize(n, n);
  out.N1.setFromTriplets(n1.begin(), n1.end());
  out.N2.resize(n, n);
  out.N2.setFromTriplets(n2.begin(), n2.end());
  return out;
}

}  // namespace

void GeneratorParams::validate() const {
  if (n < 1 || m < 1) throw Error(ErrorKind::InvalidInput, "n and m must be >= 1");
  if (ell < 0) throw Error(ErrorKind::InvalidInput, "ell must be >= 0");
  if (!(beta >= 0.0)) throw Error(ErrorKind::InvalidInput, "beta must be >= 0");
}

ProblemSpec gen_random_dense(const GeneratorParams& params) {
  params.validate();
  Rng rng(params.seed);
  ProblemSpec spec;
  spec.kind = EquationKind::Sylvester;
  const Matrix A0 = rng.uniform_matrix(params.n, params.n);
  const Matrix B0 = rng.uniform_matrix(params.m, params.m);
  Matrix Y = rng.uniform_matrix(params.n, params.m);
  for (Index k = 0; k < params.ell; ++k) {
    spec.N.emplace_back(rng.uniform_matrix(params.n, params.n));
    spec.H.emplace_back(rng.uniform_matrix(params.m, params.m));
  }
  spec.A = shifted_stable(A0);
  spec.B = shifted_stable(B0);
  spec.pi_scale = params.beta * params.beta;
  const SvdFactors f = svd(Y);
  spec.F = f.U;
  spec.T = f.S.asDiagonal();
  spec.G = f.V;
  spec.Y = std::move(Y);
  return spec;
}

ProblemSpec gen_advdiff(Index n0, double beta) {
  AdvDiffParts p = advdiff_parts(n0, beta);
  return make_lyapunov(std::move(p.A), {std::move(p.N1), std::move(p.N2)},
                       std::move(p.F), Matrix::Identity(2, 2), beta * beta);
}

ProblemSpec gen_multiterm_sylvester(Index n0_a, Index n0_b, double beta) {
  AdvDiffParts a = advdiff_parts(n0_a, beta);
  AdvDiffParts b = advdiff_parts(n0_b, beta);
  ProblemSpec spec;
  spec.kind = EquationKind::Sylvester;
  spec.A = std::move(a.A);
  spec.B = SparseMatrix(b.A.transpose());
  spec.N = {std::move(a.N1), std::move(a.N2)};
  spec.H = {SparseMatrix(b.N1.transpose()), SparseMatrix(b.N2.transpose())};
  spec.pi_scale = beta * beta;
  spec.F = std::move(a.F);
  spec.T = Matrix::Identity(2, 2);
  spec.G = std::move(b.F);
  return spec;
}

}  // namespace mtsylv
