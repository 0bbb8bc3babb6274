#pragma once

// Verified norms of a Legendre approximation u_hat: the strong residual in
// L^2, L^q norms, and bounds for the negative part u_hat_- = max(-u_hat, 0)
// obtained by subdividing the domain into congruent cells.

#include <string>
#include <vector>

#include "ellipcert/interval.hpp"
#include "ellipcert/legendre.hpp"
#include "ellipcert/problem.hpp"

namespace ellipcert {

/// Enclosure of ||Laplace(u_hat) + f(u_hat)||_{L^2} by exact tensor Gauss
/// quadrature. Throws NonPolynomialIntegrand when f has an even exponent.
Interval residual_l2(const LegendreFunction& u, const ProblemSpec& p);

/// Quadrature order used by residual_l2 (per dimension).
int residual_quadrature_order(const ProblemSpec& p, int N);

/// ||u_hat||_{L^q}: enclosure for even q (exact quadrature); for odd q an
/// upper bound [0, U] from cell ranges at `depth`, tightened by the
/// interpolation inequality between the neighbouring even exponents.
Interval lq_norm(const LegendreFunction& u, int q, int depth = 7);

/// Enclosure of ||grad u_hat||_{L^2} from the exact 1-D stiffness and mass entries.
Interval h10_norm(const LegendreFunction& u);

/// [0, U] with ||u_hat_-||_{L^q} <= U from cells down to size 2^-depth; nonincreasing in depth.
Interval negative_part_lq(const LegendreFunction& u, int q, int depth = 7);

/// [0, U] with ||grad u_hat_-||_{L^2} <= U: exact integrals of |grad u_hat|^2
/// over the cells where u_hat is not provably positive; nonincreasing in depth.
Interval negative_part_h10(const LegendreFunction& u, int depth = 7);

struct AdaptiveH10 {
  Interval bound;            // [0, U]
  int depth_reached = 0;
  std::size_t flagged_cells = 0;  // possibly-negative cells at the finest level
};

/// Bisects possibly-negative cells (starting from `depth`, up to `max_depth`)
/// until the bound drops below `target` or the depth limit is reached.
AdaptiveH10 negative_part_h10_adaptive(const LegendreFunction& u, int depth, int max_depth,
                                       double target);

enum class CellFlag { provably_positive, possibly_negative };

struct CellFlagGrid {
  int depth = 0;
  Interval threshold;
  Rectangle domain;
  std::vector<CellFlag> flags;    // index ix * n + iy
  std::vector<Interval> ranges;   // range enclosure of u_hat on the cell

  int n() const { return 1 << depth; }
  CellFlag at(int ix, int iy) const { return flags[static_cast<std::size_t>(ix) * n() + iy]; }
  std::size_t count(CellFlag f) const;
  /// Rows "ix,iy,x0,x1,y0,y1,flag,lo,hi" with a header line.
  std::string to_csv() const;
};

/// A cell is provably positive iff the lower end of its range exceeds threshold.hi().
CellFlagGrid build_flag_grid(const LegendreFunction& u, const Interval& threshold, int depth);

}  // namespace ellipcert
