#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/QR>

#include "mtsylv/error.hpp"
#include "mtsylv/oracles.hpp"
#include "test_util.hpp"

namespace mtsylv {
namespace {

using oracles::direct_solve_vec;
using oracles::iteration_spectrum;
using oracles::kron_assemble;

ProblemSpec scalar_spec(double a, double b, double n1, double h1, double y) {
  ProblemSpec s;
  s.A = Matrix(Matrix::Constant(1, 1, a));
  s.B = Matrix(Matrix::Constant(1, 1, b));
  if (n1 != 0.0 || h1 != 0.0) {
    s.N.emplace_back(Matrix(Matrix::Constant(1, 1, n1)));
    s.H.emplace_back(Matrix(Matrix::Constant(1, 1, h1)));
  }
  s.F = Matrix::Constant(1, 1, y);
  s.T = Matrix::Identity(1, 1);
  s.G = Matrix::Ones(1, 1);
  return s;
}

TEST(KronAssemble, Scalar) {
  const auto sys = kron_assemble(scalar_spec(-2.0, -3.0, 0.0, 0.0, 1.0));
  EXPECT_EQ(sys.L_vec(0, 0), -5.0);
  EXPECT_EQ(sys.Pi_vec.norm(), 0.0);
}

TEST(KronAssemble, NoTermsMeansZeroPi) {
  Rng rng(1);
  const auto sys = kron_assemble(test::random_spec(rng, 4, 3, 0, 1));
  EXPECT_EQ(sys.Pi_vec.norm(), 0.0);
}

TEST(KronAssemble, MatchesApplyOperator) {
  Rng rng(2);
  const ProblemSpec spec = test::random_spec(rng, 3, 2, 2, 1);
  const auto sys = kron_assemble(spec);
  ProblemSpec two_term = spec;
  two_term.N.clear();
  two_term.H.clear();
  for (int i = 0; i < 10; ++i) {
    const Matrix X = test::random_matrix(rng, 3, 2);
    EXPECT_LE((sys.L_vec * X.reshaped() - apply_operator(two_term, X).reshaped()).norm(), 1e-14);
    EXPECT_LE(((sys.L_vec + sys.Pi_vec) * X.reshaped() - apply_operator(spec, X).reshaped()).norm(),
              1e-14);
  }
}

TEST(KronAssemble, CapIsEnforced) {
  Rng rng(3);
  const ProblemSpec spec = test::random_spec(rng, 10, 10, 1, 1);
  try {
    kron_assemble(spec, 99);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OracleTooLarge);
  }
  EXPECT_NO_THROW(kron_assemble(spec, 100));
}

TEST(DirectSolveVec, Scalar) {
  const Matrix x = direct_solve_vec(kron_assemble(scalar_spec(-2.0, -1.0, 0.5, 0.4, 3.0)));
  EXPECT_NEAR(x(0, 0), -3.0 / (-3.0 + 0.2), 1e-15);
}

TEST(DirectSolveVec, SingularSystem) {
  try {
    direct_solve_vec(kron_assemble(scalar_spec(-1.0, -1.0, 1.0, 2.0, 1.0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoUniqueSolution);
  }
}

TEST(DirectSolveVec, TwoTermEqualsSylvesterSolve) {
  Rng rng(4);
  const ProblemSpec spec = test::random_spec(rng, 6, 4, 0, 2);
  const Matrix x = direct_solve_vec(kron_assemble(spec));
  const Matrix ref = dense_sylvester_solve(spec.A.dense(), spec.B.dense(), spec.rhs_dense());
  EXPECT_LE((x - ref).norm(), 1e-12 * ref.norm());
  EXPECT_LE(dense_residual_norm(spec, x), 1e-10 * spectral_norm(spec.rhs_dense()));
}

TEST(DirectSolveVec, LyapunovPlusPositiveIsSymmetric) {
  Rng rng(5);
  const Matrix A = test::random_stable(rng, 6);
  Matrix N = test::random_matrix(rng, 6, 6);
  N *= 0.3 / test::power_norm(N);
  const ProblemSpec spec =
      make_lyapunov(A, {Coefficient(N)}, test::random_matrix(rng, 6, 2), Matrix::Identity(2, 2));
  const Matrix x = direct_solve_vec(kron_assemble(spec));
  EXPECT_LE((x - x.transpose()).norm(), 1e-10 * x.norm());
}

TEST(IterationSpectrum, ZeroPi) {
  Rng rng(6);
  const auto g = iteration_spectrum(test::random_spec(rng, 4, 3, 0, 1));
  ASSERT_EQ(g.moduli.size(), 12u);
  for (double v : g.moduli) EXPECT_EQ(v, 0.0);
}

TEST(IterationSpectrum, DiagonalConstruction) {
  Rng rng(7);
  const auto g = iteration_spectrum(test::diagonal_spec(rng, {0.9, -0.5, 0.1}, 3, 1, true));
  ASSERT_EQ(g.moduli.size(), 9u);
  const double expect[] = {0.9, 0.9, 0.9, 0.5, 0.5, 0.5, 0.1, 0.1, 0.1};
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(g.moduli[i], expect[i], 1e-12);
}

TEST(IterationSpectrum, RadiusMatchesPowerIteration) {
  Rng rng(8);
  const ProblemSpec spec = test::random_spec(rng, 5, 4, 2, 1, 0.6);
  const auto g = iteration_spectrum(spec);
  for (std::size_t i = 1; i < g.moduli.size(); ++i) EXPECT_LE(g.moduli[i], g.moduli[i - 1]);
  // Power iteration on G; the dominant eigenvalue may belong to a complex
  // pair, so finish with a two-dimensional Krylov fit G^2 v = a G v + b v.
  Vector v = Vector::Ones(g.G.rows());
  for (int k = 0; k < 2000; ++k) {
    v = g.G * v;
    v /= v.norm();
  }
  const Vector v1 = g.G * v;
  const Vector v2 = g.G * v1;
  Matrix K(v.size(), 2);
  K << v1, v;
  const Vector ab = K.colPivHouseholderQr().solve(v2);
  const Complex disc = std::sqrt(Complex(ab(0) * ab(0) + 4.0 * ab(1), 0.0));
  const double est = std::max(std::abs((ab(0) + disc) / 2.0), std::abs((ab(0) - disc) / 2.0));
  EXPECT_NEAR(g.moduli.front(), est, 1e-6);
}

TEST(IterationSpectrum, FixedPointOfOneStationaryStep) {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const ProblemSpec spec = test::random_spec(rng, 5, 4, 2, 2);
    const Matrix X = direct_solve_vec(kron_assemble(spec));
    const Matrix next =
        dense_sylvester_solve(spec.A.dense(), spec.B.dense(), spec.rhs_dense() + apply_pi(spec, X));
    EXPECT_LE((next - X).norm(), 1e-10 * X.norm());
  }
}

TEST(IterationSpectrum, PlainContractionMatchesLeadingModulus) {
  Rng rng(10);
  int checked = 0;
  for (int trial = 0; trial < 20 && checked < 5; ++trial) {
    const ProblemSpec spec = test::random_spec(rng, 5, 4, 1, 1, 1.0);
    const auto g = iteration_spectrum(spec);
    const double l1 = g.moduli[0];
    // Skip complex leading pairs and clustered spectra.
    std::size_t i2 = 1;
    while (i2 < g.moduli.size() && std::abs(g.moduli[i2] - l1) < 1e-9) ++i2;
    if (!(l1 < 1.0) || i2 != 1 || l1 / g.moduli[i2] <= 1.2) continue;
    ++checked;
    const Matrix Xs = direct_solve_vec(kron_assemble(spec));
    Matrix X = Matrix::Zero(5, 4);
    std::vector<double> err;
    for (int k = 0; k <= 15; ++k) {
      err.push_back((X - Xs).norm());
      X = dense_sylvester_solve(spec.A.dense(), spec.B.dense(), spec.rhs_dense() + apply_pi(spec, X));
    }
    const double rate = std::pow(err[15] / err[5], 1.0 / 10.0);
    EXPECT_NEAR(rate, l1, 0.15 * l1);
  }
  EXPECT_GE(checked, 1);
}

TEST(RreReference, Examples) {
  const std::vector<Vector> constant(3, Vector::Constant(2, 4.0));
  EXPECT_LE((oracles::rre_reference(constant, 2) - Vector::Constant(2, 4.0)).norm(), 1e-15);

  std::vector<Vector> geo;
  for (double v : {1.5, 1.25, 1.125}) geo.push_back(Vector::Constant(1, v));
  const Vector gamma = oracles::rre_reference_gamma(geo, 2);
  EXPECT_NEAR(gamma(0), -1.0, 1e-14);
  EXPECT_NEAR(gamma(1), 2.0, 1e-14);
  EXPECT_NEAR(oracles::rre_reference(geo, 2)(0), 1.0, 1e-14);

  Rng rng(11);
  const std::vector<Vector> any{test::random_matrix(rng, 4, 1), test::random_matrix(rng, 4, 1)};
  EXPECT_EQ(oracles::rre_reference(any, 1), any[0]);
}

TEST(RreReference, InvalidWindow) {
  const std::vector<Vector> two(2, Vector::Zero(3));
  for (Index w : {Index{0}, Index{2}}) {
    try {
      oracles::rre_reference(two, w);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidWindow);
    }
  }
}

}  // namespace
}  // namespace mtsylv
