#include "ellipcert/interval_matrix.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "ellipcert/error.hpp"

namespace ellipcert {

using namespace rounding;

MRMatrix::MRMatrix(Eigen::MatrixXd m, Eigen::MatrixXd r) : mid(std::move(m)), rad(std::move(r)) {
  if (mid.rows() != rad.rows() || mid.cols() != rad.cols()) {
    throw Error(ErrorKind::InvalidArgument, "midpoint and radius shapes differ");
  }
  if (!mid.allFinite() || !rad.allFinite()) throw Error(ErrorKind::NonFinite, "interval matrix");
}

MRMatrix::MRMatrix(const Eigen::MatrixXd& m) : MRMatrix(m, Eigen::MatrixXd::Zero(m.rows(), m.cols())) {}

MRMatrix::MRMatrix(Eigen::Index rows, Eigen::Index cols)
    : mid(Eigen::MatrixXd::Zero(rows, cols)), rad(Eigen::MatrixXd::Zero(rows, cols)) {}

Interval MRMatrix::at(Eigen::Index i, Eigen::Index j) const {
  return Interval(sub_down(mid(i, j), rad(i, j)), add_up(mid(i, j), rad(i, j)));
}

void MRMatrix::set(Eigen::Index i, Eigen::Index j, const Interval& v) {
  mid(i, j) = v.mid();
  rad(i, j) = v.rad();
}

MRMatrix MRMatrix::transpose() const { return MRMatrix(mid.transpose(), rad.transpose()); }

MRMatrix product(const MRMatrix& a, const MRMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::InvalidArgument, "product shape mismatch");
  const double n = static_cast<double>(a.cols());
  const double u = DBL_EPSILON / 2;
  MRMatrix c;
  c.mid = a.mid * b.mid;
  const Eigen::MatrixXd abs_am = a.mid.cwiseAbs();
  const Eigen::MatrixXd abs_bm = b.mid.cwiseAbs();
  Eigen::MatrixXd round_err = abs_am * abs_bm;
  const bool point_a = (a.rad.array() == 0.0).all();
  const bool point_b = (b.rad.array() == 0.0).all();
  Eigen::MatrixXd spread = Eigen::MatrixXd::Zero(c.mid.rows(), c.mid.cols());
  if (!point_b) spread += abs_am * b.rad;
  if (!point_a) spread += a.rad * (abs_bm + b.rad);
  // gamma_n |A||B| bounds the error of the midpoint product; every float
  // product of nonnegative matrices above underestimates by at most a factor
  // (1 + gamma_{n+2}), absorbed by the final safety factor.
  const double gamma = div_up(mul_up(n + 1, u), sub_down(1.0, mul_up(n + 1, u)));
  const double safety = add_up(1.0, mul_up(4.0 * (n + 4), u));
  const double underflow = mul_up(2.0 * n + 4, std::numeric_limits<double>::denorm_min());
  c.rad.resize(c.mid.rows(), c.mid.cols());
  for (Eigen::Index j = 0; j < c.mid.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.mid.rows(); ++i) {
      const double r = add_up(mul_up(gamma, round_err(i, j)), spread(i, j));
      c.rad(i, j) = add_up(mul_up(r, safety), underflow);
    }
  }
  if (!c.mid.allFinite() || !c.rad.allFinite()) throw Error(ErrorKind::NonFinite, "matrix product");
  return c;
}

namespace {

template <class Op>
MRMatrix entrywise(const MRMatrix& a, const MRMatrix& b, Op op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::InvalidArgument, "shape mismatch");
  }
  MRMatrix c(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) c.set(i, j, op(a.at(i, j), b.at(i, j)));
  return c;
}

}  // namespace

MRMatrix add(const MRMatrix& a, const MRMatrix& b) {
  return entrywise(a, b, [](const Interval& x, const Interval& y) { return x + y; });
}

MRMatrix sub(const MRMatrix& a, const MRMatrix& b) {
  return entrywise(a, b, [](const Interval& x, const Interval& y) { return x - y; });
}

MRMatrix hadamard(const MRMatrix& a, const MRMatrix& b) {
  return entrywise(a, b, [](const Interval& x, const Interval& y) { return x * y; });
}

MRMatrix scale(const Interval& s, const MRMatrix& a) {
  MRMatrix c(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) c.set(i, j, s * a.at(i, j));
  return c;
}

double norm2_upper(const MRMatrix& a) {
  // |M| <= |mid| + rad entrywise for every member, and the spectral norm is
  // monotone in the entrywise absolute value for the bounds used here.
  double frob = 0.0;
  std::vector<double> row_sum(a.rows(), 0.0);
  double max_col = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double m = add_up(std::fabs(a.mid(i, j)), a.rad(i, j));
      frob = add_up(frob, mul_up(m, m));
      col = add_up(col, m);
      row_sum[i] = add_up(row_sum[i], m);
    }
    max_col = std::max(max_col, col);
  }
  double max_row = 0.0;
  for (double r : row_sum) max_row = std::max(max_row, r);
  return std::min(sqrt_up(frob), sqrt_up(mul_up(max_col, max_row)));
}

double norm2_upper(const Eigen::MatrixXd& a) {
  return norm2_upper(MRMatrix(a));
}

}  // namespace ellipcert
