#pragma once

// Tensor-product Legendre basis on rectangles.
//
// 1-D family on the reference interval (0,1):
//   Q_n(x)   = P_n(2x-1)                         shifted Legendre polynomial
//   phi_n(x) = x(1-x) Q_n'(x) / (n(n+1))         n >= 1, vanishes at 0 and 1
// with the identities phi_n' = -Q_n and phi_n = (Q_{n-1} - Q_{n+1}) / (2(2n+1)).
// A function on the rectangle [x0,x1]x[y0,y1] is
//   u(x,y) = sum_{i,j=1..N} c_{ij} phi_i(xi) phi_j(eta),  xi = (x-x0)/a, eta = (y-y0)/b.

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "ellipcert/interval.hpp"

namespace ellipcert {

struct Rectangle {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  static Rectangle unit() { return {}; }
  /// Throws InvalidArgument unless x1 > x0 and y1 > y0 (finite).
  void validate() const;
  Interval width_x() const { return Interval(x1) - Interval(x0); }
  Interval width_y() const { return Interval(y1) - Interval(y0); }
  bool is_unit_square() const { return x0 == 0.0 && x1 == 1.0 && y0 == 0.0 && y1 == 1.0; }
  bool operator==(const Rectangle&) const = default;
};

struct Box {
  Interval x;
  Interval y;
};

// ---------------------------------------------------------------------------
// 1-D enclosures

/// Q_n(x) over x (n >= 0).
Interval shifted_legendre(int n, const Interval& x);
/// phi_n(x) over x (n >= 1).
Interval phi(int n, const Interval& x);
/// phi_n'(x) = -Q_n(x) over x (n >= 1).
Interval dphi(int n, const Interval& x);

/// sup over [0,1] of |Q_n^{(k)}|, rounded up; k in {0,1,2,3}.
double shifted_legendre_derivative_bound(int n, int k);

/// Enclosures of the 1-D family for n = 1..N at one reference abscissa, or
/// over a reference interval (then every entry is a range enclosure).
struct BasisRow {
  Interval where;                  // the abscissa (interval) the row describes
  std::vector<Interval> phi;       // phi_n
  std::vector<Interval> dphi;      // phi_n'  = -Q_n
  std::vector<Interval> d2phi;     // phi_n'' = -Q_n'
  std::vector<Interval> psi;       // Q_n' / (n(n+1)), so phi_n = x(1-x) psi_n
  std::vector<Interval> dpsi;      // psi_n'
  Interval bubble;                 // x(1-x)
};

/// Rows at exact reference points (0 <= x <= 1).
std::vector<BasisRow> basis_rows_at_points(std::span<const double> points, int N);
/// Row of range enclosures over a reference interval X subset [0,1]
/// (first- and second-order expansions about mid(X), intersected with
/// global bounds).
BasisRow basis_row_over(const Interval& X, int N);
/// Same, reusing a row already evaluated at the exact midpoint of X.
BasisRow basis_row_over(const Interval& X, const BasisRow& at_mid, double mid);

// ---------------------------------------------------------------------------
// Quadrature

/// Gauss-Legendre rule on (0,1) with verified node and weight enclosures.
struct QuadratureRule {
  int order = 0;
  std::vector<Interval> nodes;
  std::vector<Interval> weights;
  /// Node enclosures to double-double accuracy: {lo_hi, lo_lo, hi_hi, hi_lo}
  /// with node in [lo_hi + lo_lo, hi_hi + hi_lo]. Used to build basis tables.
  std::vector<std::array<double, 4>> node_dd;
};

constexpr int kMaxQuadratureOrder = 256;

/// Cached; thread-safe. Throws QuadratureCertFail / InvalidArgument.
const QuadratureRule& gauss_rule(int order);
/// Per-dimension order that integrates a degree-`degree` polynomial exactly.
int quadrature_order_for_degree(int degree);
/// Basis rows at the certified nodes of `rule`.
std::vector<BasisRow> basis_rows_at_nodes(const QuadratureRule& rule, int N);

/// Integral of a polynomial integrand over [x0,x1] (rule must be exact for it).
Interval integrate(const std::function<Interval(const Interval&)>& integrand, const Interval& x0,
                   const Interval& x1, const QuadratureRule& rule);
/// Integral over a rectangle cell with the tensor rule.
Interval integrate(const std::function<Interval(const Interval&, const Interval&)>& integrand,
                   const Rectangle& cell, const QuadratureRule& rule);

// ---------------------------------------------------------------------------
// Functions in the tensor basis

class LegendreFunction {
 public:
  LegendreFunction(int N, Rectangle domain = Rectangle::unit());
  LegendreFunction(Eigen::MatrixXd coeffs, Rectangle domain = Rectangle::unit());

  int N() const { return static_cast<int>(coeffs_.rows()); }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  Eigen::MatrixXd& coeffs() { return coeffs_; }
  const Rectangle& domain() const { return domain_; }

  /// Plain binary64 evaluation at a physical point (no rigor).
  double value(double x, double y) const;

 private:
  Eigen::MatrixXd coeffs_;
  Rectangle domain_;
};

/// Float values of phi_n(x), n = 1..N, at a reference abscissa.
Eigen::VectorXd phi_values(double x, int N);

enum class RangeMode {
  direct,      // products of per-basis range enclosures
  mean_value,  // value at the box midpoint + gradient enclosure * offsets
  factored,    // x(1-x) y(1-y) times the enclosure of the cofactor
  automatic,   // mean_value below box width 2^-4, direct above; intersected with factored
};

/// Map a physical box into reference coordinates (outward).
Box to_reference(const Rectangle& domain, const Box& box);

/// Range enclosure of u over a physical box.
Interval eval(const LegendreFunction& u, const Box& box, RangeMode mode = RangeMode::automatic);
/// Range enclosures of (u_x, u_y) over a physical box.
std::array<Interval, 2> grad(const LegendreFunction& u, const Box& box);
/// Range enclosure of u_xx + u_yy over a physical box.
Interval laplacian(const LegendreFunction& u, const Box& box);

/// Range enclosures from precomputed rows (reference coordinates). These are
/// the building blocks used by the grid kernels.
Interval range_direct(const Eigen::MatrixXd& c, const BasisRow& rx, const BasisRow& ry);
Interval range_mean_value(const Eigen::MatrixXd& c, const BasisRow& rx, const BasisRow& ry,
                          const BasisRow& mx, const BasisRow& my);
Interval range_factored(const Eigen::MatrixXd& c, const BasisRow& rx, const BasisRow& ry,
                        const BasisRow& mx, const BasisRow& my);
/// The automatic mode: mean-value or direct by box width, intersected with factored.
Interval range_automatic(const Eigen::MatrixXd& c, const BasisRow& rx, const BasisRow& ry,
                         const BasisRow& mx, const BasisRow& my);

// ---------------------------------------------------------------------------
// Exact 1-D Galerkin matrices (entries are rationals, enclosed)

/// S_mn = int phi_m' phi_n' = delta_mn / (2n+1), n = 1..N.
std::vector<Interval> stiffness_1d_diagonal(int N);
/// M_mn = int phi_m phi_n (nonzero for |m-n| in {0,2}); returned dense, N x N.
std::vector<Interval> mass_1d(int N);

}  // namespace ellipcert
