#include "mtsylv/rre.hpp"

#include <string>

#include <Eigen/QR>

#include "mtsylv/error.hpp"

namespace mtsylv {

namespace {

template <typename T>
Index window_size(const std::vector<T>& window) {
  if (window.size() < 2) {
    throw Error(ErrorKind::InvalidWindow,
                "a window needs w + 1 >= 2 iterates, got " +
                    std::to_string(window.size()));
  }
  return static_cast<Index>(window.size()) - 1;
}

Vector gamma_from_q(const Vector& q) {
  const Index w = q.size() + 1;
  Vector gamma(w);
  if (w == 1) {
    gamma(0) = 1.0;
    return gamma;
  }
  gamma(0) = 1.0 - q(0);
  for (Index i = 1; i < w - 1; ++i) gamma(i) = q(i - 1) - q(i);
  gamma(w - 1) = q(w - 2);
  return gamma;
}

}  // namespace

RreCoefficients rre_coefficients(const Matrix& U) {
  const Index w = U.cols();
  if (w < 1) throw Error(ErrorKind::InvalidWindow, "window size must be >= 1");
  if (U.rows() < 1) {
    throw Error(ErrorKind::InvalidInput, "difference vectors are empty");
  }
  require_finite(U, "RRE differences");

  RreCoefficients out;
  out.window = w;
  out.q = Vector::Zero(w - 1);
  if (w > 1) {
    Matrix Psi(U.rows(), w - 1);
    for (Index i = 0; i < w - 1; ++i) Psi.col(i) = U.col(i + 1) - U.col(i);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Psi);
    // Default threshold is relative to the largest pivot; a zero Psi must
    // give q = 0, not a division by a zero pivot.
    if (Psi.norm() > 0.0) out.q = cod.solve(Vector(-U.col(0)));
  }
  out.gamma = gamma_from_q(out.q);
  return out;
}

Matrix extrapolate_dense(const std::vector<Matrix>& window) {
  const Index w = window_size(window);
  const Index rows = window.front().rows();
  const Index cols = window.front().cols();
  for (const Matrix& X : window) {
    if (X.rows() != rows || X.cols() != cols) {
      throw Error(ErrorKind::InvalidInput, "RRE window: iterates differ in size");
    }
  }
  Matrix U(rows * cols, w);
  for (Index i = 0; i < w; ++i) {
    const auto k = static_cast<std::size_t>(i);
    U.col(i) = (window[k + 1] - window[k]).reshaped();
  }
  const RreCoefficients c = rre_coefficients(U);
  Matrix X = Matrix::Zero(rows, cols);
  for (Index i = 0; i < w; ++i) X += c.gamma(i) * window[static_cast<std::size_t>(i)];
  return X;
}

LowRankTriple extrapolate_lowrank(const std::vector<LowRankTriple>& window,
                                  double tau_trunc, Index max_col) {
  const Index w = window_size(window);
  const Index n = window.front().rows();
  const Index m = window.front().cols();
  Index z = 0;
  for (const auto& t : window) {
    if (t.rows() != n || t.cols() != m) {
      throw Error(ErrorKind::InvalidInput,
                  "RRE window: low-rank iterates differ in size");
    }
    z += t.rank();
  }
  if (z == 0) return LowRankTriple::zero(n, m);

  Matrix ZL(n, z);
  Matrix ZR(m, z);
  Index offset = 0;
  for (const auto& t : window) {
    ZL.middleCols(offset, t.rank()) = t.left();
    ZR.middleCols(offset, t.rank()) = t.right();
    offset += t.rank();
  }
  const OrthogonalizedPair o = orthogonalize_factors(ZL, ZR);

  // Small representatives R_{L,i} D_i R_{R,i}^T of every iterate, all in the
  // common bases Q_L, Q_R.
  std::vector<Matrix> small;
  std::vector<double> magnitude;
  offset = 0;
  for (const auto& t : window) {
    const Matrix RLi = o.RL.middleCols(offset, t.rank());
    const Matrix RRi = o.RR.middleCols(offset, t.rank());
    small.push_back(RLi * t.core() * RRi.transpose());
    magnitude.push_back(spectral_norm_estimate(RLi) *
                        spectral_norm_estimate(t.core()) *
                        spectral_norm_estimate(RRi));
    offset += t.rank();
  }

  Matrix U(small.front().size(), w);
  for (Index i = 0; i < w; ++i) {
    const auto k = static_cast<std::size_t>(i);
    U.col(i) = (small[k + 1] - small[k]).reshaped();
  }
  const RreCoefficients c = rre_coefficients(U);

  Matrix core = Matrix::Zero(small.front().rows(), small.front().cols());
  double scale = 0.0;
  for (Index i = 0; i < w; ++i) {
    const auto k = static_cast<std::size_t>(i);
    core += c.gamma(i) * small[k];
    scale += std::abs(c.gamma(i)) * magnitude[k];
  }
  return compress_core(o.QL, core, o.QR, tau_trunc, max_col, scale);
}

}  // namespace mtsylv
