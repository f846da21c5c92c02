#include "mtsylv/linear_solve.hpp"

#include <sstream>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "mtsylv/error.hpp"

namespace mtsylv {

namespace {

using SparseCMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

// Below this reciprocal condition estimate a dense shifted matrix is
// treated as singular.
constexpr double kMinRcond = 1e-14;

std::string shift_name(Complex s) {
  std::ostringstream os;
  os.precision(17);
  os << s.real();
  if (s.imag() != 0.0) os << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag()) << "i";
  return os.str();
}

// rcond() alone misses exactly zero pivots, so check them directly.
template <typename Lu>
bool well_conditioned(const Lu& lu) {
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  return pivots.allFinite() && pivots.minCoeff() > 0.0 && lu.rcond() > kMinRcond;
}

[[noreturn]] void shift_failure(Complex s) {
  throw Error(ErrorKind::ShiftFailure,
              "shifted system with shift " + shift_name(s) + " is singular");
}

}  // namespace

struct ShiftedSolve::Impl {
  std::variant<Eigen::PartialPivLU<Matrix>, Eigen::PartialPivLU<CMatrix>,
               std::unique_ptr<Eigen::SparseLU<SparseMatrix>>,
               std::unique_ptr<Eigen::SparseLU<SparseCMatrix>>>
      lu;
};

ShiftedSolve::ShiftedSolve(const Coefficient& M, Complex shift, bool transpose)
    : shift_(shift) {
  if (M.rows() != M.cols()) {
    throw Error(ErrorKind::InvalidInput, "shifted solve needs a square matrix");
  }
  const Index n = M.rows();
  auto impl = std::make_shared<Impl>();
  if (const Matrix* d = M.dense_ptr()) {
    if (is_real()) {
      Matrix S = transpose ? Matrix(d->transpose()) : *d;
      S.diagonal().array() += shift.real();
      Eigen::PartialPivLU<Matrix> lu(S);
      if (n > 0 && !well_conditioned(lu)) shift_failure(shift);
      impl->lu = std::move(lu);
    } else {
      CMatrix S = (transpose ? Matrix(d->transpose()) : *d).cast<Complex>();
      S.diagonal().array() += shift;
      Eigen::PartialPivLU<CMatrix> lu(S);
      if (n > 0 && !well_conditioned(lu)) shift_failure(shift);
      impl->lu = std::move(lu);
    }
  } else {
    const SparseMatrix& s = *M.sparse_ptr();
    SparseMatrix base = transpose ? SparseMatrix(s.transpose()) : s;
    SparseMatrix eye(n, n);
    eye.setIdentity();
    if (is_real()) {
      SparseMatrix S = base + shift.real() * eye;
      auto lu = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
      lu->analyzePattern(S);
      lu->factorize(S);
      if (lu->info() != Eigen::Success) shift_failure(shift);
      impl->lu = std::move(lu);
    } else {
      SparseCMatrix S = base.cast<Complex>();
      SparseCMatrix ceye = eye.cast<Complex>();
      S = S + shift * ceye;
      auto lu = std::make_unique<Eigen::SparseLU<SparseCMatrix>>();
      lu->analyzePattern(S);
      lu->factorize(S);
      if (lu->info() != Eigen::Success) shift_failure(shift);
      impl->lu = std::move(lu);
    }
  }
  impl_ = std::move(impl);
}

Matrix ShiftedSolve::solve(const Matrix& rhs) const {
  if (!is_real()) return solve(CMatrix(rhs.cast<Complex>())).real();
  if (const auto* lu = std::get_if<Eigen::PartialPivLU<Matrix>>(&impl_->lu)) {
    return lu->solve(rhs);
  }
  const auto& lu =
      std::get<std::unique_ptr<Eigen::SparseLU<SparseMatrix>>>(impl_->lu);
  Matrix out = lu->solve(rhs);
  if (!out.allFinite()) shift_failure(shift_);
  return out;
}

CMatrix ShiftedSolve::solve(const CMatrix& rhs) const {
  if (is_real()) {
    const Matrix re = solve(Matrix(rhs.real()));
    const Matrix im = solve(Matrix(rhs.imag()));
    CMatrix out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
  }
  if (const auto* lu = std::get_if<Eigen::PartialPivLU<CMatrix>>(&impl_->lu)) {
    return lu->solve(rhs);
  }
  const auto& lu =
      std::get<std::unique_ptr<Eigen::SparseLU<SparseCMatrix>>>(impl_->lu);
  CMatrix out = lu->solve(rhs);
  if (!out.allFinite()) shift_failure(shift_);
  return out;
}

}  // namespace mtsylv
