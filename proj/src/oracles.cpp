#include "mtsylv/oracles.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Dense>

#include "mtsylv/error.hpp"

namespace mtsylv::oracles {

VectorizedSystem kron_assemble(const ProblemSpec& spec, Index cap) {
  const Index n = spec.n();
  const Index m = spec.m();
  if (n * m > cap) {
    throw Error(ErrorKind::OracleTooLarge,
                "vectorized system of order " + std::to_string(n * m) +
                    " exceeds the oracle cap " + std::to_string(cap));
  }
  VectorizedSystem sys;
  sys.n = n;
  sys.m = m;
  const Matrix A = spec.A.dense();
  const Matrix B = spec.B.dense();
  sys.L_vec = kron(Matrix::Identity(m, m), A) +
              kron(B.transpose(), Matrix::Identity(n, n));
  sys.Pi_vec = Matrix::Zero(n * m, n * m);
  for (std::size_t k = 0; k < spec.N.size(); ++k) {
    sys.Pi_vec += kron(spec.H[k].dense().transpose(), spec.N[k].dense());
  }
  sys.Pi_vec *= spec.pi_scale;
  sys.y_vec = spec.rhs_dense().reshaped();
  return sys;
}

Matrix direct_solve_vec(const VectorizedSystem& sys) {
  Eigen::FullPivLU<Matrix> lu(sys.L_vec + sys.Pi_vec);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::NoUniqueSolution,
                "L_vec + Pi_vec is singular (rank " + std::to_string(lu.rank()) +
                    " of " + std::to_string(sys.L_vec.rows()) + ")");
  }
  const Vector x = lu.solve(Vector(-sys.y_vec));
  return x.reshaped(sys.n, sys.m);
}

IterationMatrix iteration_spectrum(const ProblemSpec& spec, Index cap) {
  const VectorizedSystem sys = kron_assemble(spec, cap);
  Eigen::FullPivLU<Matrix> lu(sys.L_vec);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::NoUniqueSolution, "L_vec is singular");
  }
  IterationMatrix out;
  out.G = -lu.solve(sys.Pi_vec);
  const SchurForm schur = real_schur(out.G);
  for (const Complex& ev : quasi_triangular_eigenvalues(schur.R)) {
    out.moduli.push_back(std::abs(ev));
  }
  std::sort(out.moduli.begin(), out.moduli.end(), std::greater<>());
  return out;
}

Vector rre_reference_gamma(const std::vector<Vector>& iterates, Index w) {
  if (w < 1) throw Error(ErrorKind::InvalidWindow, "window size must be >= 1");
  if (static_cast<Index>(iterates.size()) != w + 1) {
    throw Error(ErrorKind::InvalidWindow,
                "expected " + std::to_string(w + 1) + " iterates, got " +
                    std::to_string(iterates.size()));
  }
  const Index b = iterates.front().size();
  Matrix U(b, w);
  for (Index i = 0; i < w; ++i) {
    U.col(i) = iterates[static_cast<std::size_t>(i + 1)] -
               iterates[static_cast<std::size_t>(i)];
  }
  Vector gamma = Vector::Zero(w);
  if (w == 1) {
    gamma(0) = 1.0;
    return gamma;
  }
  // gamma_w = 1 - sum_{i<w} gamma_i  =>  U gamma = M g + u_w.
  Matrix M(b, w - 1);
  for (Index i = 0; i < w - 1; ++i) M.col(i) = U.col(i) - U.col(w - 1);
  const Vector g = M.completeOrthogonalDecomposition().solve(
      Vector(-U.col(w - 1)));
  gamma.head(w - 1) = g;
  gamma(w - 1) = 1.0 - g.sum();
  return gamma;
}

Vector rre_reference(const std::vector<Vector>& iterates, Index w) {
  const Vector gamma = rre_reference_gamma(iterates, w);
  Vector x = Vector::Zero(iterates.front().size());
  for (Index i = 0; i < w; ++i) x += gamma(i) * iterates[static_cast<std::size_t>(i)];
  return x;
}

}  // namespace mtsylv::oracles
