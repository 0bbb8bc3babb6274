#include <doctest.h>

#include <random>

#include "ellipcert/error.hpp"
#include "ellipcert/interval_matrix.hpp"
#include "ellipcert/kernels.hpp"
#include "rational_poly.hpp"

using namespace ellipcert;
using oracle::Rat;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = std::ldexp(U(rng), static_cast<int>(rng() % 9) - 4);
  return m;
}

}  // namespace

TEST_CASE("interval matrix product encloses the exact rational product") {
  std::mt19937_64 rng(3);
  int bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd A = random_matrix(rng, 7, 9), B = random_matrix(rng, 9, 5);
    Eigen::MatrixXd Ar = random_matrix(rng, 7, 9).cwiseAbs() * 1e-10;
    const MRMatrix a(A, Ar), b(B);
    const MRMatrix c = product(a, b);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 5; ++j) {
        // Check the product at the two extreme members A +- Ar (per sign of B).
        for (int sgn : {-1, 1}) {
          Rat s;
          for (int k = 0; k < 9; ++k) {
            const Rat ak = Rat(A(i, k)) + Rat(sgn * Ar(i, k));
            s = s + ak * Rat(B(k, j));
          }
          if (!oracle::encloses(c.at(i, j), s)) ++bad;
        }
        if (c.rad(i, j) > 1e-6) ++bad;
      }
  }
  CHECK(bad == 0);
}

TEST_CASE("spectral norm bound dominates the singular value") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd A = random_matrix(rng, 12, 12);
    const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
    const double ub = norm2_upper(A);
    CHECK(ub >= s * (1 + 1e-14));
    CHECK(ub <= 12 * s);
  }
  CHECK(norm2_upper(Eigen::MatrixXd::Identity(5, 5)) == doctest::Approx(1.0));
}

TEST_CASE("parallel and serial float contractions agree") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd W = random_matrix(rng, 6, 5);
  const Eigen::MatrixXd Ax = random_matrix(rng, 6, 4), Bx = random_matrix(rng, 6, 4);
  const Eigen::MatrixXd Ay = random_matrix(rng, 5, 4), By = random_matrix(rng, 5, 4);
  const Eigen::MatrixXd M = contract(W, Ax, Bx, Ay, By);
  const Eigen::MatrixXd R = contract_serial(W, Ax, Bx, Ay, By);
  CHECK((M - R).cwiseAbs().maxCoeff() <= 1e-12 * (1 + R.cwiseAbs().maxCoeff()));
  CHECK_THROWS_AS(contract(W, Ax, Bx, By.topRows(3), By), Error);
}

TEST_CASE("rigorous contraction encloses the exact sum; reference agrees") {
  std::mt19937_64 rng(6);
  const int Qx = 4, Qy = 3, N = 3;
  const Eigen::MatrixXd W = random_matrix(rng, Qx, Qy);
  const Eigen::MatrixXd Ax = random_matrix(rng, Qx, N), Bx = random_matrix(rng, Qx, N);
  const Eigen::MatrixXd Ay = random_matrix(rng, Qy, N), By = random_matrix(rng, Qy, N);
  const MRMatrix M = contract(MRMatrix(W), MRMatrix(Ax), MRMatrix(Bx), MRMatrix(Ay), MRMatrix(By));
  const MRMatrix R =
      contract_serial(MRMatrix(W), MRMatrix(Ax), MRMatrix(Bx), MRMatrix(Ay), MRMatrix(By));
  int bad = 0;
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          Rat s;
          for (int a = 0; a < Qx; ++a)
            for (int b = 0; b < Qy; ++b)
              s = s + Rat(W(a, b)) * Rat(Ax(a, k)) * Rat(Bx(a, i)) * Rat(Ay(b, l)) * Rat(By(b, j));
          if (!oracle::encloses(M.at(k * N + l, i * N + j), s)) ++bad;
          if (!oracle::encloses(R.at(k * N + l, i * N + j), s)) ++bad;
          if (M.rad(k * N + l, i * N + j) > 1e-13 * (1 + std::fabs(M.mid(k * N + l, i * N + j)))) ++bad;
        }
  CHECK(bad == 0);
}

TEST_CASE("grid ranges: parallel equals serial and contains sampled values") {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd c = random_matrix(rng, 6, 6) * 0.1;
  const LegendreFunction u(c, Rectangle{-1.0, 1.0, 0.0, 2.0});
  for (int depth : {0, 2, 4}) {
    const auto P = grid_ranges(u, depth);
    const auto S = grid_ranges_serial(u, depth);
    REQUIRE(P.size() == S.size());
    const int n = 1 << depth;
    int bad = 0;
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const Interval r = P[ix * n + iy];
        if (!(r == S[ix * n + iy])) ++bad;
        const Box box = grid_cell(u.domain(), depth, ix, iy);
        for (double s : {0.0, 0.3, 0.5, 1.0})
          for (double t : {0.0, 0.7, 1.0}) {
            const double x = box.x.lo() + s * (box.x.hi() - box.x.lo());
            const double y = box.y.lo() + t * (box.y.hi() - box.y.lo());
            const double v = u.value(x, y);
            if (v < r.lo() - 1e-13 || v > r.hi() + 1e-13) ++bad;
          }
      }
    CHECK(bad == 0);
  }
}
