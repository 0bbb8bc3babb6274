#pragma once

// Interval matrices in midpoint-radius form. Every member of the set
// {M : |M - mid| <= rad (entrywise)} is represented; products use a
// floating-point GEMM on the midpoints plus an a-priori rounding error bound,
// so they run at BLAS speed.

#include <Eigen/Dense>

#include <vector>

#include "ellipcert/interval.hpp"

namespace ellipcert {

struct MRMatrix {
  Eigen::MatrixXd mid;
  Eigen::MatrixXd rad;

  MRMatrix() = default;
  MRMatrix(Eigen::MatrixXd m, Eigen::MatrixXd r);
  /// Exact point matrix (zero radius).
  explicit MRMatrix(const Eigen::MatrixXd& m);
  MRMatrix(Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const { return mid.rows(); }
  Eigen::Index cols() const { return mid.cols(); }
  Interval at(Eigen::Index i, Eigen::Index j) const;
  void set(Eigen::Index i, Eigen::Index j, const Interval& v);
  MRMatrix transpose() const;
};

/// Enclosure of {A B : A in a, B in b}.
MRMatrix product(const MRMatrix& a, const MRMatrix& b);
MRMatrix add(const MRMatrix& a, const MRMatrix& b);
MRMatrix sub(const MRMatrix& a, const MRMatrix& b);
/// s * a for an interval scalar s.
MRMatrix scale(const Interval& s, const MRMatrix& a);
/// Entrywise product.
MRMatrix hadamard(const MRMatrix& a, const MRMatrix& b);

/// Upper bound of the spectral norm over all members of a.
double norm2_upper(const MRMatrix& a);
/// Upper bound of the spectral norm of an exact float matrix.
double norm2_upper(const Eigen::MatrixXd& a);

}  // namespace ellipcert
