#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "mtsylv/error.hpp"
#include "mtsylv/inner.hpp"
#include "mtsylv/random.hpp"

namespace mtsylv {

namespace {

struct RitzResult {
  std::vector<Complex> values;
  bool breakdown = false;
};

RitzResult arnoldi_ritz(const std::function<Vector(const Vector&)>& op,
                        Index n, Index steps, std::uint64_t seed) {
  RitzResult out;
  steps = std::min(steps, n);
  if (steps < 1) return out;
  Rng rng(seed);
  Matrix V = Matrix::Zero(n, steps + 1);
  Matrix H = Matrix::Zero(steps + 1, steps);
  Vector v = rng.symmetric_vector(n);
  V.col(0) = v / v.norm();
  Index done = steps;
  for (Index j = 0; j < steps; ++j) {
    Vector w = op(V.col(j));
    const double wnorm = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      const Vector h = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h;
      H.col(j).head(j + 1) += h;
    }
    H(j + 1, j) = w.norm();
    if (j + 1 < steps && H(j + 1, j) <= 1e-12 * std::max(wnorm, 1e-300)) {
      done = j + 1;
      out.breakdown = true;
      break;
    }
    if (j + 1 < steps) V.col(j + 1) = w / H(j + 1, j);
  }
  const SchurForm s = real_schur(H.topLeftCorner(done, done));
  out.values = quasi_triangular_eigenvalues(s.R);
  return out;
}

std::vector<Complex> candidates(const Coefficient& M, Index k_plus,
                                Index k_minus, std::uint64_t seed,
                                bool& breakdown) {
  const Index n = M.rows();
  std::vector<Complex> out;
  RitzResult plus = arnoldi_ritz(
      [&](const Vector& x) -> Vector { return M.apply(x); }, n, k_plus, seed);
  breakdown = breakdown || plus.breakdown;
  out.insert(out.end(), plus.values.begin(), plus.values.end());
  if (k_minus > 0) {
    const ShiftedSolve inv(M, 0.0, false);
    RitzResult minus = arnoldi_ritz(
        [&](const Vector& x) -> Vector { return inv.solve(Matrix(x)); }, n,
        k_minus, seed + 1);
    breakdown = breakdown || minus.breakdown;
    for (const Complex& theta : minus.values) {
      if (std::abs(theta) > 0.0) out.push_back(1.0 / theta);
    }
  }
  std::erase_if(out, [](const Complex& z) { return !(z.real() < 0.0); });
  if (out.empty()) {
    throw Error(ErrorKind::ShiftFailure,
                "no Ritz value in the open left half-plane; cannot build ADI "
                "shifts");
  }
  return out;
}

// prod_j |(z - p_j) / (z + q_j)|
double rational_bound(const Complex& z, const std::vector<Complex>& p,
                      const std::vector<Complex>& q) {
  double v = 1.0;
  for (std::size_t j = 0; j < p.size(); ++j) v *= std::abs((z - p[j]) / (z + q[j]));
  return v;
}

double max_bound(const std::vector<Complex>& zs, const std::vector<Complex>& p,
                 const std::vector<Complex>& q, std::size_t& arg) {
  double best = -1.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double v = rational_bound(zs[i], p, q);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return best;
}

void append_pair(ShiftSets& s, Complex a, Complex b) {
  s.alpha.push_back(a);
  s.beta.push_back(b);
  if (a.imag() != 0.0 || b.imag() != 0.0) {
    s.alpha.push_back(std::conj(a));
    s.beta.push_back(std::conj(b));
  }
}

}  // namespace

void validate_shifts(const ShiftSets& shifts) {
  if (shifts.alpha.empty() || shifts.alpha.size() != shifts.beta.size()) {
    throw Error(ErrorKind::InvalidInput,
                "shift lists must be nonempty and of equal length");
  }
  for (std::size_t j = 0; j < shifts.size(); ++j) {
    const Complex a = shifts.alpha[j];
    const Complex b = shifts.beta[j];
    if (a.imag() == 0.0 && b.imag() == 0.0) continue;
    if (j + 1 >= shifts.size() || shifts.alpha[j + 1] != std::conj(a) ||
        shifts.beta[j + 1] != std::conj(b)) {
      throw Error(ErrorKind::InvalidInput,
                  "non-real shift at position " + std::to_string(j) +
                      " is not followed by its conjugate");
    }
    ++j;
  }
}

ShiftSets heuristic_shifts(const Coefficient& A, const Coefficient& B,
                           Index k_plus, Index k_minus, Index n_shifts,
                           std::uint64_t seed) {
  if (k_plus < 1 || k_minus < 1 || n_shifts < 1) {
    throw Error(ErrorKind::InvalidInput,
                "k_plus, k_minus and n_shifts must be >= 1");
  }
  ShiftSets s;
  s.candidates_a = candidates(A, k_plus, k_minus, seed, s.breakdown);
  s.candidates_b = candidates(B, k_plus, k_minus, seed + 2, s.breakdown);
  const auto& ca = s.candidates_a;
  const auto& cb = s.candidates_b;

  // First pair: minimize the product of the single-shift bounds.
  double best = std::numeric_limits<double>::infinity();
  Complex a0 = ca.front();
  Complex b0 = cb.front();
  for (const Complex& a : ca) {
    for (const Complex& b : cb) {
      double fa = 0.0;
      for (const Complex& l : ca) fa = std::max(fa, std::abs((l - a) / (l + b)));
      double fb = 0.0;
      for (const Complex& m : cb) fb = std::max(fb, std::abs((m - b) / (m + a)));
      if (fa * fb < best) {
        best = fa * fb;
        a0 = a;
        b0 = b;
      }
    }
  }
  append_pair(s, a0, b0);

  while (static_cast<Index>(s.size()) < n_shifts) {
    std::size_t ia = 0;
    std::size_t ib = 0;
    const double fa = max_bound(ca, s.alpha, s.beta, ia);
    const double fb = max_bound(cb, s.beta, s.alpha, ib);
    if (fa <= 0.0 && fb <= 0.0) break;
    append_pair(s, ca[ia], cb[ib]);
  }
  return s;
}

}  // namespace mtsylv
