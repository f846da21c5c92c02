#include "mtsylv/lowrank.hpp"

#include <algorithm>
#include <string>

#include "mtsylv/error.hpp"

namespace mtsylv {

namespace {

constexpr double kRoundoffFloor = 1e-15;

void require_conforming(const std::vector<LowRankTriple>& ts, const char* op) {
  for (const auto& t : ts) {
    if (t.rows() != ts.front().rows() || t.cols() != ts.front().cols()) {
      throw Error(ErrorKind::InvalidInput,
                  std::string(op) + ": triples of different sizes (" +
                      std::to_string(t.rows()) + "x" + std::to_string(t.cols()) +
                      " vs " + std::to_string(ts.front().rows()) + "x" +
                      std::to_string(ts.front().cols()) + ")");
    }
  }
}

Matrix block_diagonal(const std::vector<const Matrix*>& blocks) {
  Index total = 0;
  for (const Matrix* b : blocks) total += b->rows();
  Matrix D = Matrix::Zero(total, total);
  Index offset = 0;
  for (const Matrix* b : blocks) {
    D.block(offset, offset, b->rows(), b->cols()) = *b;
    offset += b->rows();
  }
  return D;
}

}  // namespace

LowRankTriple::LowRankTriple(Matrix ZL, Matrix D, Matrix ZR)
    : ZL_(std::move(ZL)), D_(std::move(D)), ZR_(std::move(ZR)) {
  if (D_.rows() != D_.cols() || ZL_.cols() != D_.rows() ||
      ZR_.cols() != D_.cols()) {
    throw Error(ErrorKind::InvalidInput,
                "low-rank triple: factors do not conform (Z_L has " +
                    std::to_string(ZL_.cols()) + " columns, D is " +
                    std::to_string(D_.rows()) + "x" + std::to_string(D_.cols()) +
                    ", Z_R has " + std::to_string(ZR_.cols()) + " columns)");
  }
}

LowRankTriple LowRankTriple::zero(Index n, Index m) {
  return LowRankTriple(Matrix(n, 0), Matrix(0, 0), Matrix(m, 0));
}

Matrix LowRankTriple::dense() const {
  if (rank() == 0) return Matrix::Zero(rows(), cols());
  return ZL_ * D_ * ZR_.transpose();
}

LowRankTriple LowRankTriple::negated() const { return scaled(-1.0); }

LowRankTriple LowRankTriple::scaled(double c) const {
  return LowRankTriple(ZL_, c * D_, ZR_);
}

OrthogonalizedPair orthogonalize_factors(const Matrix& ZL, const Matrix& ZR) {
  QrFactors l = thin_qr(ZL);
  QrFactors r = thin_qr(ZR);
  return {std::move(l.Q), std::move(l.R), std::move(r.Q), std::move(r.R)};
}

LowRankTriple compress_core(const Matrix& QL, const Matrix& core,
                            const Matrix& QR, double tau, Index max_col,
                            double scale) {
  if (core.size() == 0) return LowRankTriple::zero(QL.rows(), QR.rows());
  const SvdFactors f = svd(core);
  const double sigma1 = f.S(0);
  if (scale < 0.0) scale = sigma1;
  const double floor = kRoundoffFloor * scale;
  Index keep = 0;
  while (keep < f.S.size() && keep < max_col && f.S(keep) > floor &&
         f.S(keep) >= sigma1 * tau) {
    ++keep;
  }
  if (keep == 0) return LowRankTriple::zero(QL.rows(), QR.rows());
  return LowRankTriple(QL * f.U.leftCols(keep),
                       Matrix(f.S.head(keep).asDiagonal()),
                       QR * f.V.leftCols(keep));
}

LowRankTriple truncate(const LowRankTriple& t, double tau, Index max_col) {
  if (t.rank() == 0 || t.rows() == 0 || t.cols() == 0) {
    return LowRankTriple::zero(t.rows(), t.cols());
  }
  const OrthogonalizedPair o = orthogonalize_factors(t.left(), t.right());
  const Matrix core = o.RL * t.core() * o.RR.transpose();
  const double scale = spectral_norm_estimate(o.RL) *
                       spectral_norm_estimate(t.core()) *
                       spectral_norm_estimate(o.RR);
  return compress_core(o.QL, core, o.QR, tau, max_col, scale);
}

LowRankTriple concat(const std::vector<LowRankTriple>& ts) {
  if (ts.empty()) {
    throw Error(ErrorKind::InvalidInput, "concat: empty list of triples");
  }
  require_conforming(ts, "concat");
  Index z = 0;
  for (const auto& t : ts) z += t.rank();
  Matrix ZL(ts.front().rows(), z);
  Matrix ZR(ts.front().cols(), z);
  std::vector<const Matrix*> cores;
  Index offset = 0;
  for (const auto& t : ts) {
    ZL.middleCols(offset, t.rank()) = t.left();
    ZR.middleCols(offset, t.rank()) = t.right();
    cores.push_back(&t.core());
    offset += t.rank();
  }
  return LowRankTriple(std::move(ZL), block_diagonal(cores), std::move(ZR));
}

LowRankTriple assemble_rhs(const ProblemSpec& spec, const LowRankTriple& x_prev,
                           double tau, Index max_col, RhsCompression mode) {
  if (x_prev.rows() != spec.n() || x_prev.cols() != spec.m()) {
    throw Error(ErrorKind::InvalidInput, "assemble_rhs: iterate has wrong size");
  }
  std::vector<LowRankTriple> parts;
  parts.emplace_back(spec.F, spec.T, spec.G);
  if (x_prev.rank() > 0) {
    const Matrix D = spec.pi_scale * x_prev.core();
    for (std::size_t k = 0; k < spec.N.size(); ++k) {
      LowRankTriple term(spec.N[k].apply(x_prev.left()), D,
                         spec.H[k].apply_transpose(x_prev.right()));
      if (mode == RhsCompression::TwoStage) term = truncate(term, tau);
      parts.push_back(std::move(term));
    }
  }
  return truncate(concat(parts), tau, max_col);
}

std::vector<LowRankTriple> separate_rhs(const LowRankTriple& rhs,
                                        Index part_size) {
  if (part_size < 1) {
    throw Error(ErrorKind::InvalidInput, "separate_rhs: part size must be >= 1");
  }
  const Index z = rhs.rank();
  if (z <= part_size) return {rhs};

  // Slicing is lossless only if D has no coupling across part boundaries.
  bool splittable = true;
  for (Index j = 0; j < z && splittable; ++j) {
    for (Index i = 0; i < z; ++i) {
      if (i / part_size != j / part_size && rhs.core()(i, j) != 0.0) {
        splittable = false;
        break;
      }
    }
  }
  Matrix ZL = rhs.left();
  Matrix D = rhs.core();
  Matrix ZR = rhs.right();
  if (!splittable) {
    const SvdFactors f = svd(D);
    ZL = ZL * f.U;
    ZR = ZR * f.V;
    D = f.S.asDiagonal();
  }
  std::vector<LowRankTriple> parts;
  for (Index start = 0; start < z; start += part_size) {
    const Index len = std::min(part_size, z - start);
    parts.emplace_back(ZL.middleCols(start, len), D.block(start, start, len, len),
                       ZR.middleCols(start, len));
  }
  return parts;
}

Matrix lowrank_apply_operator_vec(const ProblemSpec& spec,
                                  const LowRankTriple& x, const Matrix& p) {
  if (p.rows() != spec.m() || x.rows() != spec.n() || x.cols() != spec.m()) {
    throw Error(ErrorKind::InvalidInput,
                "lowrank_apply_operator_vec: dimension mismatch");
  }
  auto xv = [&](const Matrix& v) -> Matrix {
    return x.left() * (x.core() * (x.right().transpose() * v));
  };
  Matrix out = spec.F * (spec.T * (spec.G.transpose() * p));
  if (x.rank() > 0) {
    out += spec.A.apply(xv(p));
    out += xv(spec.B.apply(p));
    for (std::size_t k = 0; k < spec.N.size(); ++k) {
      out += spec.pi_scale * spec.N[k].apply(xv(spec.H[k].apply(p)));
    }
  }
  return out;
}

Matrix lowrank_apply_operator_vec_transpose(const ProblemSpec& spec,
                                            const LowRankTriple& x,
                                            const Matrix& q) {
  if (q.rows() != spec.n() || x.rows() != spec.n() || x.cols() != spec.m()) {
    throw Error(ErrorKind::InvalidInput,
                "lowrank_apply_operator_vec_transpose: dimension mismatch");
  }
  auto xtv = [&](const Matrix& v) -> Matrix {
    return x.right() * (x.core().transpose() * (x.left().transpose() * v));
  };
  Matrix out = spec.G * (spec.T.transpose() * (spec.F.transpose() * q));
  if (x.rank() > 0) {
    out += xtv(spec.A.apply_transpose(q));
    out += spec.B.apply_transpose(xtv(q));
    for (std::size_t k = 0; k < spec.N.size(); ++k) {
      out += spec.pi_scale *
             spec.H[k].apply_transpose(xtv(spec.N[k].apply_transpose(q)));
    }
  }
  return out;
}

double lowrank_norm(const LowRankTriple& t) {
  if (t.rank() == 0) return 0.0;
  const OrthogonalizedPair o = orthogonalize_factors(t.left(), t.right());
  return spectral_norm(o.RL * t.core() * o.RR.transpose());
}

}  // namespace mtsylv
