#include "ellipcert/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "ellipcert/error.hpp"

namespace ellipcert {

namespace {

void check_shapes(Eigen::Index wr, Eigen::Index wc, Eigen::Index axr, Eigen::Index axc,
                  Eigen::Index bxr, Eigen::Index bxc, Eigen::Index ayr, Eigen::Index ayc,
                  Eigen::Index byr, Eigen::Index byc) {
  if (axr != wr || bxr != wr || ayr != wc || byr != wc || axc != bxc || ayc != byc || axc != ayc) {
    throw Error(ErrorKind::InvalidArgument, "contraction shape mismatch");
  }
}

// Rows (k,i) -> (k,l) and columns (l,j) -> (i,j).
template <class Mat>
Mat permute(const Mat& G, Eigen::Index N) {
  Mat M(N * N, N * N);
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index l = 0; l < N; ++l)
      for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) M(k * N + l, i * N + j) = G(k * N + i, l * N + j);
  return M;
}

}  // namespace

Eigen::MatrixXd contract(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Ax,
                         const Eigen::MatrixXd& Bx, const Eigen::MatrixXd& Ay,
                         const Eigen::MatrixXd& By) {
  check_shapes(W.rows(), W.cols(), Ax.rows(), Ax.cols(), Bx.rows(), Bx.cols(), Ay.rows(), Ay.cols(),
               By.rows(), By.cols());
  const Eigen::Index N = Ax.cols(), Qy = W.cols();
  // H(k*N+i, b) = sum_a W(a,b) Ax(a,k) Bx(a,i)
  Eigen::MatrixXd H(N * N, Qy);
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < Qy; ++b) {
    const Eigen::MatrixXd Hb = Ax.transpose() * (W.col(b).asDiagonal() * Bx);
    for (Eigen::Index k = 0; k < N; ++k)
      for (Eigen::Index i = 0; i < N; ++i) H(k * N + i, b) = Hb(k, i);
  }
  // P(b, l*N+j) = Ay(b,l) By(b,j)
  Eigen::MatrixXd P(Qy, N * N);
  for (Eigen::Index l = 0; l < N; ++l)
    for (Eigen::Index j = 0; j < N; ++j) P.col(l * N + j) = Ay.col(l).cwiseProduct(By.col(j));
  return permute(Eigen::MatrixXd(H * P), N);
}

Eigen::MatrixXd contract_serial(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Ax,
                                const Eigen::MatrixXd& Bx, const Eigen::MatrixXd& Ay,
                                const Eigen::MatrixXd& By) {
  check_shapes(W.rows(), W.cols(), Ax.rows(), Ax.cols(), Bx.rows(), Bx.cols(), Ay.rows(), Ay.cols(),
               By.rows(), By.cols());
  const Eigen::Index N = Ax.cols();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N * N, N * N);
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index l = 0; l < N; ++l)
      for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) {
          double s = 0.0;
          for (Eigen::Index a = 0; a < W.rows(); ++a)
            for (Eigen::Index b = 0; b < W.cols(); ++b)
              s += W(a, b) * Ax(a, k) * Bx(a, i) * Ay(b, l) * By(b, j);
          M(k * N + l, i * N + j) = s;
        }
  return M;
}

MRMatrix contract(const MRMatrix& W, const MRMatrix& Ax, const MRMatrix& Bx, const MRMatrix& Ay,
                  const MRMatrix& By) {
  check_shapes(W.rows(), W.cols(), Ax.rows(), Ax.cols(), Bx.rows(), Bx.cols(), Ay.rows(), Ay.cols(),
               By.rows(), By.cols());
  const Eigen::Index N = Ax.cols(), Qx = W.rows(), Qy = W.cols();
  const MRMatrix AxT = Ax.transpose();
  MRMatrix H(N * N, Qy);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < Qy; ++b) {
    MRMatrix D(Qx, N);
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index a = 0; a < Qx; ++a) D.set(a, i, W.at(a, b) * Bx.at(a, i));
    const MRMatrix Hb = product(AxT, D);
    for (Eigen::Index k = 0; k < N; ++k)
      for (Eigen::Index i = 0; i < N; ++i) {
        H.mid(k * N + i, b) = Hb.mid(k, i);
        H.rad(k * N + i, b) = Hb.rad(k, i);
      }
  }
  MRMatrix P(Qy, N * N);
  for (Eigen::Index l = 0; l < N; ++l)
    for (Eigen::Index j = 0; j < N; ++j)
      for (Eigen::Index b = 0; b < Qy; ++b) P.set(b, l * N + j, Ay.at(b, l) * By.at(b, j));
  const MRMatrix G = product(H, P);
  return MRMatrix(permute(G.mid, N), permute(G.rad, N));
}

MRMatrix contract_serial(const MRMatrix& W, const MRMatrix& Ax, const MRMatrix& Bx,
                         const MRMatrix& Ay, const MRMatrix& By) {
  check_shapes(W.rows(), W.cols(), Ax.rows(), Ax.cols(), Bx.rows(), Bx.cols(), Ay.rows(), Ay.cols(),
               By.rows(), By.cols());
  const Eigen::Index N = Ax.cols();
  MRMatrix M(N * N, N * N);
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index l = 0; l < N; ++l)
      for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) {
          Interval s(0.0);
          for (Eigen::Index a = 0; a < W.rows(); ++a)
            for (Eigen::Index b = 0; b < W.cols(); ++b)
              s += W.at(a, b) * Ax.at(a, k) * Bx.at(a, i) * Ay.at(b, l) * By.at(b, j);
          M.set(k * N + l, i * N + j, s);
        }
  return M;
}

Box grid_cell(const Rectangle& domain, int depth, int ix, int iy) {
  const double n = std::ldexp(1.0, depth);
  const Interval a = domain.width_x(), b = domain.width_y();
  // Reference cell endpoints are exact dyadics.
  const Interval x = Interval(domain.x0) + a * Interval(ix / n, (ix + 1) / n);
  const Interval y = Interval(domain.y0) + b * Interval(iy / n, (iy + 1) / n);
  return Box{x, y};
}

namespace {

struct GridRows {
  std::vector<BasisRow> range, mid;
};

GridRows grid_rows(int n, int N, bool parallel) {
  GridRows g;
  g.range.resize(n);
  g.mid.resize(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
    const double m = 0.5 * (lo + hi);
    g.mid[i] = basis_rows_at_points(std::span<const double>(&m, 1), N)[0];
    g.range[i] = basis_row_over(Interval(lo, hi), g.mid[i], m);
  }
  return g;
}

Interval cell_range(const Eigen::MatrixXd& c, const GridRows& g, int ix, int iy, RangeMode mode) {
  const BasisRow &rx = g.range[ix], &ry = g.range[iy], &mx = g.mid[ix], &my = g.mid[iy];
  switch (mode) {
    case RangeMode::direct:
      return range_direct(c, rx, ry);
    case RangeMode::mean_value:
      return range_mean_value(c, rx, ry, mx, my);
    case RangeMode::factored:
      return range_factored(c, rx, ry, mx, my);
    case RangeMode::automatic:
      break;
  }
  return range_automatic(c, rx, ry, mx, my);
}

std::vector<Interval> grid_impl(const LegendreFunction& u, int depth, RangeMode mode,
                                bool parallel) {
  if (depth < 0 || depth > 12) throw Error(ErrorKind::InvalidArgument, "grid depth must be in [0,12]");
  const int n = 1 << depth;
  const GridRows g = grid_rows(n, u.N(), parallel);
  std::vector<Interval> out(static_cast<size_t>(n) * n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      out[static_cast<size_t>(ix) * n + iy] = cell_range(u.coeffs(), g, ix, iy, mode);
  return out;
}

}  // namespace

std::vector<Interval> grid_ranges(const LegendreFunction& u, int depth, RangeMode mode) {
  return grid_impl(u, depth, mode, true);
}

std::vector<Interval> grid_ranges_serial(const LegendreFunction& u, int depth, RangeMode mode) {
  return grid_impl(u, depth, mode, false);
}

int kernel_threads() { return omp_get_max_threads(); }

void set_kernel_threads(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "thread count must be >= 1");
  omp_set_num_threads(n);
}

}  // namespace ellipcert
