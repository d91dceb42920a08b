#include "descentlab/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace descentlab::linalg {
namespace {

// Aspect ratio beyond which a QR step is taken first so the SVD runs on the
// small triangular factor.
constexpr double kQrPreconditionRatio = 2.0;

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw InvalidInput(std::string(what) + ": matrix has non-finite entries");
  }
}

struct RawSvd {
  Matrix u;
  Vector s;
  Matrix v;
};

RawSvd bdc(const Matrix& a) {
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw NumericalFailure("svd: decomposition did not converge");
  }
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

// Thin SVD of a tall matrix (rows >= cols) through a = QR, R = U S V^T.
RawSvd tall_svd_via_qr(const Matrix& a) {
  const Index m = a.rows();
  const Index k = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  RawSvd inner = bdc(r);
  Matrix padded = Matrix::Zero(m, k);
  padded.topRows(k) = inner.u;
  padded.applyOnTheLeft(qr.householderQ());
  return {std::move(padded), std::move(inner.s), std::move(inner.v)};
}

RawSvd raw_svd(const Matrix& a) {
  const auto rows = static_cast<double>(a.rows());
  const auto cols = static_cast<double>(a.cols());
  if (rows >= kQrPreconditionRatio * cols) {
    return tall_svd_via_qr(a);
  }
  if (cols >= kQrPreconditionRatio * rows) {
    RawSvd t = tall_svd_via_qr(a.transpose());
    return {std::move(t.v), std::move(t.s), std::move(t.u)};
  }
  return bdc(a);
}

void require_rows(const Matrix& x, Index n, const char* what) {
  if (x.rows() != n) {
    throw InvalidInput(std::string(what) + ": row count " + std::to_string(x.rows()) +
                       " does not match target length " + std::to_string(n));
  }
}

// V_r * diag(1/s) * U_r^T * y without forming the pseudo-inverse.
Matrix apply_pinv(const SvdResult& dec, const Matrix& y) {
  const Matrix projected = dec.u.transpose() * y;
  return dec.vt.transpose() * (dec.singular_values.cwiseInverse().asDiagonal() * projected);
}

}  // namespace

SvdResult svd(const Matrix& a) {
  if (a.size() == 0) {
    throw InvalidInput("svd: empty matrix");
  }
  require_finite(a, "svd");

  RawSvd raw = raw_svd(a);
  SvdResult out;
  out.max_singular_value = raw.s.size() > 0 ? raw.s(0) : 0.0;
  const double cutoff = kRankEpsilon * static_cast<double>(std::max(a.rows(), a.cols())) *
                        out.max_singular_value;
  Index rank = 0;
  while (rank < raw.s.size() && raw.s(rank) > cutoff) {
    ++rank;
  }
  out.rank = rank;
  out.u = raw.u.leftCols(rank);
  out.singular_values = raw.s.head(rank);
  out.vt = raw.v.leftCols(rank).transpose();
  return out;
}

double max_singular_value(const Matrix& a) { return svd(a).max_singular_value; }

Matrix pseudo_inverse(const Matrix& a) {
  require_finite(a, "pseudo_inverse");
  if (a.size() == 0) {
    return Matrix::Zero(a.cols(), a.rows());
  }
  const SvdResult dec = svd(a);
  return dec.vt.transpose() * dec.singular_values.cwiseInverse().asDiagonal() *
         dec.u.transpose();
}

LinearPredictor min_norm_least_squares(const Matrix& x, const Vector& y) {
  require_rows(x, y.size(), "min_norm_least_squares");
  LinearPredictor out;
  out.active.resize(static_cast<std::size_t>(x.cols()));
  std::iota(out.active.begin(), out.active.end(), Index{0});
  if (x.size() == 0) {
    out.weights = Vector::Zero(x.cols());
    return out;
  }
  out.weights = apply_pinv(svd(x), y);
  return out;
}

Matrix min_norm_solve(const Matrix& x, const Matrix& y) {
  require_rows(x, y.rows(), "min_norm_solve");
  if (x.size() == 0) {
    return Matrix::Zero(x.cols(), y.cols());
  }
  return apply_pinv(svd(x), y);
}

Vector least_squares_solution_member(const Matrix& x, const Vector& y, const Vector& u) {
  require_rows(x, y.size(), "least_squares_solution_member");
  if (u.size() != x.cols()) {
    throw InvalidInput("least_squares_solution_member: offset length must equal column count");
  }
  const SvdResult dec = svd(x);
  const Vector base = apply_pinv(dec, y);
  const Vector in_row_space = dec.vt.transpose() * (dec.vt * u);
  return base + (u - in_row_space);
}

Matrix kernel_projector(const Matrix& x) {
  require_finite(x, "kernel_projector");
  const Index d = x.cols();
  if (x.size() == 0) {
    return Matrix::Identity(d, d);
  }
  const SvdResult dec = svd(x);
  return Matrix::Identity(d, d) - dec.vt.transpose() * dec.vt;
}

}  // namespace descentlab::linalg
