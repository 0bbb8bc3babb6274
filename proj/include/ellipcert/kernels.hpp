#pragma once

// Compute kernels shared by the Galerkin solver and the verification stages.
// Each kernel has an OpenMP-parallel version and a plain serial reference
// kept for testing and benchmarking.
//
// Tensor contraction: with quadrature values W(a,b) and 1-D tables
// Ax, Bx (nodes_x x N) and Ay, By (nodes_y x N),
//   M[k*N+l, i*N+j] = sum_{a,b} W(a,b) Ax(a,k) Bx(a,i) Ay(b,l) By(b,j).

#include <Eigen/Dense>

#include <vector>

#include "ellipcert/interval_matrix.hpp"
#include "ellipcert/legendre.hpp"

namespace ellipcert {

Eigen::MatrixXd contract(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Ax,
                         const Eigen::MatrixXd& Bx, const Eigen::MatrixXd& Ay,
                         const Eigen::MatrixXd& By);
Eigen::MatrixXd contract_serial(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Ax,
                                const Eigen::MatrixXd& Bx, const Eigen::MatrixXd& Ay,
                                const Eigen::MatrixXd& By);

/// Rigorous version on interval data.
MRMatrix contract(const MRMatrix& W, const MRMatrix& Ax, const MRMatrix& Bx, const MRMatrix& Ay,
                  const MRMatrix& By);
/// Serial reference in plain interval arithmetic (slow; small sizes only).
MRMatrix contract_serial(const MRMatrix& W, const MRMatrix& Ax, const MRMatrix& Bx,
                         const MRMatrix& Ay, const MRMatrix& By);

/// Range enclosures of u on the uniform 2^depth x 2^depth grid of cells of
/// its domain; entry ix * n + iy is the cell [ix/n, (ix+1)/n] x [iy/n, (iy+1)/n]
/// in reference coordinates.
std::vector<Interval> grid_ranges(const LegendreFunction& u, int depth,
                                  RangeMode mode = RangeMode::automatic);
std::vector<Interval> grid_ranges_serial(const LegendreFunction& u, int depth,
                                         RangeMode mode = RangeMode::automatic);

/// Physical box of grid cell (ix, iy) at the given depth (outward).
Box grid_cell(const Rectangle& domain, int depth, int ix, int iy);

/// Number of OpenMP threads used by the parallel kernels.
int kernel_threads();
void set_kernel_threads(int n);

}  // namespace ellipcert
