#include "ellipcert/rigor_norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "ellipcert/error.hpp"
#include "ellipcert/interval_matrix.hpp"
#include "ellipcert/kernels.hpp"

namespace ellipcert {

using namespace rounding;

namespace {

struct NodeTables {
  const QuadratureRule* rule;
  MRMatrix phi;  // nodes x N
  MRMatrix d2phi;
};

NodeTables node_tables(int order, int N) {
  const QuadratureRule& rule = gauss_rule(order);
  const auto rows = basis_rows_at_nodes(rule, N);
  NodeTables t{&rule, MRMatrix(order, N), MRMatrix(order, N)};
  for (int a = 0; a < order; ++a)
    for (int n = 0; n < N; ++n) {
      t.phi.set(a, n, rows[a].phi[n]);
      t.d2phi.set(a, n, rows[a].d2phi[n]);
    }
  return t;
}

// sum_{a,b} w_a w_b g(a,b) with a fixed reduction order.
template <class G>
Interval tensor_sum(const QuadratureRule& rule, G g) {
  const int Q = rule.order;
  std::vector<Interval> rows(Q);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < Q; ++a) {
    Interval s(0.0);
    for (int b = 0; b < Q; ++b) s += rule.weights[b] * g(a, b);
    rows[a] = rule.weights[a] * s;
  }
  Interval total(0.0);
  for (const auto& r : rows) total += r;
  return total;
}

Interval area(const Rectangle& d) { return d.width_x() * d.width_y(); }

// Integral of u^q over the domain, q even.
Interval power_integral(const LegendreFunction& u, int q) {
  const int N = u.N();
  const int order = quadrature_order_for_degree(q * (N + 1));
  if (order > kMaxQuadratureOrder) {
    throw Error(ErrorKind::InvalidArgument, "quadrature order for this norm exceeds the maximum");
  }
  const NodeTables t = node_tables(order, N);
  const MRMatrix U = product(product(t.phi, MRMatrix(u.coeffs())), t.phi.transpose());
  const Interval s = tensor_sum(*t.rule, [&](int a, int b) { return pow_int(U.at(a, b), q); });
  return positive_part(s * area(u.domain()));
}

Interval cell_area(const Rectangle& d, int depth) {
  return area(d) / Interval(std::ldexp(1.0, 2 * depth));
}

}  // namespace

int residual_quadrature_order(const ProblemSpec& p, int N) {
  // (Laplace u + f(u))^2 has degree 2 p (N+1) per variable.
  return quadrature_order_for_degree(2 * p.max_exponent() * (N + 1));
}

Interval residual_l2(const LegendreFunction& u, const ProblemSpec& p) {
  if (!p.polynomial()) {
    throw Error(ErrorKind::NonPolynomialIntegrand,
                "even exponents make f(u_hat) non-polynomial; exact quadrature is unavailable");
  }
  if (!(u.domain() == p.domain)) throw Error(ErrorKind::InvalidArgument, "domain mismatch");
  const int N = u.N();
  const int order = residual_quadrature_order(p, N);
  if (order > kMaxQuadratureOrder) {
    throw Error(ErrorKind::InvalidArgument, "residual quadrature order " + std::to_string(order) +
                                                " exceeds " + std::to_string(kMaxQuadratureOrder));
  }
  const NodeTables t = node_tables(order, N);
  const MRMatrix C(u.coeffs());
  const MRMatrix phiT = t.phi.transpose();
  const MRMatrix U = product(product(t.phi, C), phiT);
  const MRMatrix Uxx = product(product(t.d2phi, C), phiT);
  const MRMatrix Uyy = product(product(t.phi, C), t.d2phi.transpose());
  const Interval ia2 = Interval(1.0) / sqr(p.domain.width_x());
  const Interval ib2 = Interval(1.0) / sqr(p.domain.width_y());
  const Interval s = tensor_sum(*t.rule, [&](int a, int b) {
    const Interval r = Uxx.at(a, b) * ia2 + Uyy.at(a, b) * ib2 + p.f(U.at(a, b));
    return sqr(r);
  });
  return sqrt(positive_part(s * area(p.domain)));
}

Interval lq_norm(const LegendreFunction& u, int q, int depth) {
  if (q < 2) throw Error(ErrorKind::InvalidArgument, "q must be >= 2");
  if (q % 2 == 0) return root(power_integral(u, q), q);
  // Cell bound: sum over cells of max|u|^q * cell area.
  const auto ranges = grid_ranges(u, depth);
  const Interval ca = cell_area(u.domain(), depth);
  double s = 0.0;
  for (const auto& r : ranges) s = add_up(s, pow_int(Interval(mag(r)), q).hi());
  const double cell_bound = root(Interval(s) * ca, q).hi();
  // Cauchy-Schwarz: int |u|^q <= (int u^(q-1))^(1/2) (int u^(q+1))^(1/2).
  const Interval prod = power_integral(u, q - 1) * power_integral(u, q + 1);
  const double cs_bound = root(Interval(prod.hi()), 2 * q).hi();
  return Interval(0.0, std::min(cell_bound, cs_bound));
}

namespace {

// Exact 1-D integrals over a reference sub-interval [lo, hi]:
// S(k,i) = int phi_k' phi_i', M(k,i) = int phi_k phi_i.
struct SubIntervalMatrices {
  MRMatrix S, M;
};

SubIntervalMatrices sub_interval_matrices(double lo, double hi, int N) {
  const QuadratureRule& rule = gauss_rule(N + 2);
  const Interval h = Interval(hi) - Interval(lo);
  MRMatrix D(rule.order, N), P(rule.order, N);
  for (int a = 0; a < rule.order; ++a) {
    const Interval x = intersect(Interval(lo) + h * rule.nodes[a], Interval(lo, hi));
    const BasisRow r = basis_row_over(x, N);
    const Interval sw = sqrt(rule.weights[a] * h);
    for (int n = 0; n < N; ++n) {
      D.set(a, n, r.dphi[n] * sw);
      P.set(a, n, r.phi[n] * sw);
    }
  }
  return {product(D.transpose(), D), product(P.transpose(), P)};
}

// Enclosure of sum_{k,l} A(k,l) B(k,l).
Interval frobenius(const MRMatrix& A, const MRMatrix& B) {
  Interval s(0.0);
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i) s += A.at(i, j) * B.at(i, j);
  return s;
}

struct Cell {
  int level, ix, iy;
};

class GradientIntegrator {
 public:
  explicit GradientIntegrator(const LegendreFunction& u) : u_(u), C_(u.coeffs()) {
    const Interval a = u.domain().width_x(), b = u.domain().width_y();
    b_over_a_ = b / a;
    a_over_b_ = a / b;
  }

  // Integral of |grad u|^2 over the physical image of a reference cell.
  Interval operator()(const Cell& c) {
    const auto& X = mats(c.level, c.ix);
    const auto& Y = mats(c.level, c.iy);
    // sum c(k,l) c(i,j) [S_x(k,i) M_y(l,j) b/a + M_x(k,i) S_y(l,j) a/b]
    const Interval gx = frobenius(C_, product(product(X.S, C_), Y.M));
    const Interval gy = frobenius(C_, product(product(X.M, C_), Y.S));
    return positive_part(gx * b_over_a_ + gy * a_over_b_);
  }

 private:
  const SubIntervalMatrices& mats(int level, int i) {
    const auto key = std::make_pair(level, i);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      const double n = std::ldexp(1.0, level);
      it = cache_.emplace(key, sub_interval_matrices(i / n, (i + 1) / n, u_.N())).first;
    }
    return it->second;
  }

  const LegendreFunction& u_;
  MRMatrix C_;
  Interval b_over_a_, a_over_b_;
  std::map<std::pair<int, int>, SubIntervalMatrices> cache_;
};

Interval reference_cell_range(const LegendreFunction& u, const Cell& c) {
  const double n = std::ldexp(1.0, c.level);
  const Interval X(c.ix / n, (c.ix + 1) / n), Y(c.iy / n, (c.iy + 1) / n);
  const double mx = X.mid(), my = Y.mid();
  const auto mid_x = basis_rows_at_points(std::span<const double>(&mx, 1), u.N())[0];
  const auto mid_y = basis_rows_at_points(std::span<const double>(&my, 1), u.N())[0];
  return range_automatic(u.coeffs(), basis_row_over(X, mid_x, mx), basis_row_over(Y, mid_y, my), mid_x,
                         mid_y);
}

Interval total(const std::vector<Interval>& parts) {
  Interval s(0.0);
  for (const auto& p : parts) s += p;
  return s;
}

}  // namespace

// Cells are refined from the whole domain down to `depth`, only where the
// range may dip below zero, and each child range is intersected with its
// parent's. Every level gives a valid bound; the smallest is returned, so a
// deeper grid never reports a larger one.
Interval negative_part_lq(const LegendreFunction& u, int q, int depth) {
  if (q < 1 || depth < 0 || depth > 12) throw Error(ErrorKind::InvalidArgument, "negative_part_lq arguments");
  std::vector<Cell> cells{{0, 0, 0}};
  std::vector<Interval> ranges{reference_cell_range(u, cells[0])};
  double best = std::numeric_limits<double>::infinity();
  for (int level = 0;; ++level) {
    std::vector<Cell> flagged;
    std::vector<Interval> flagged_ranges;
    double s = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k)
      if (ranges[k].lo() < 0.0) {
        flagged.push_back(cells[k]);
        flagged_ranges.push_back(ranges[k]);
        s = add_up(s, pow_int(Interval(-ranges[k].lo()), q).hi());
      }
    best = std::min(best, s == 0.0 ? 0.0 : root(Interval(s) * cell_area(u.domain(), level), q).hi());
    if (flagged.empty() || level == depth) break;

    cells.clear();
    for (const Cell& c : flagged)
      for (int dx = 0; dx < 2; ++dx)
        for (int dy = 0; dy < 2; ++dy) cells.push_back({level + 1, 2 * c.ix + dx, 2 * c.iy + dy});
    ranges.assign(cells.size(), Interval(0.0));
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < cells.size(); ++k)
      ranges[k] = intersect(reference_cell_range(u, cells[k]), flagged_ranges[k / 4]);
  }
  return best == 0.0 ? Interval(0.0) : Interval(0.0, best);
}

AdaptiveH10 negative_part_h10_adaptive(const LegendreFunction& u, int depth, int max_depth,
                                       double target) {
  if (depth < 0 || max_depth < depth || max_depth > 12) {
    throw Error(ErrorKind::InvalidArgument, "depth must satisfy 0 <= depth <= max_depth <= 12");
  }
  const auto ranges = grid_ranges(u, depth);
  const int n = 1 << depth;
  std::vector<Cell> flagged;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      if (ranges[static_cast<std::size_t>(ix) * n + iy].lo() < 0.0) flagged.push_back({depth, ix, iy});

  GradientIntegrator integrate_cell(u);
  auto bound_of = [&](const std::vector<Cell>& cells) {
    std::vector<Interval> parts(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) parts[k] = integrate_cell(cells[k]);
    return Interval(0.0, sqrt(Interval(total(parts).hi())).hi());
  };

  AdaptiveH10 out;
  out.depth_reached = depth;
  out.bound = flagged.empty() ? Interval(0.0) : bound_of(flagged);
  while (!flagged.empty() && !(out.bound.hi() < target) && out.depth_reached < max_depth) {
    std::vector<Cell> children;
    for (const Cell& c : flagged)
      for (int dx = 0; dx < 2; ++dx)
        for (int dy = 0; dy < 2; ++dy) children.push_back({c.level + 1, 2 * c.ix + dx, 2 * c.iy + dy});
    std::vector<char> keep(children.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < children.size(); ++k) {
      keep[k] = reference_cell_range(u, children[k]).lo() < 0.0;
    }
    std::vector<Cell> next;
    for (std::size_t k = 0; k < children.size(); ++k)
      if (keep[k]) next.push_back(children[k]);
    flagged = std::move(next);
    ++out.depth_reached;
    const Interval b = flagged.empty() ? Interval(0.0) : bound_of(flagged);
    // The flagged region only shrinks, so the previous bound stays valid.
    out.bound = b.hi() < out.bound.hi() ? b : out.bound;
  }
  out.flagged_cells = flagged.size();
  return out;
}

Interval h10_norm(const LegendreFunction& u) {
  // ||grad u||^2 = (b/a) sum_k S_k c_k. M1 c_k. + (a/b) sum_l S_l c_.l M1 c_.l
  const int N = u.N();
  const Eigen::MatrixXd& c = u.coeffs();
  const auto S1 = stiffness_1d_diagonal(N);
  const auto M1 = mass_1d(N);
  const Interval a = u.domain().width_x();
  const Interval b = u.domain().width_y();
  auto quad = [&](auto coef) {
    Interval s(0.0);
    for (int m = 0; m < N; ++m)
      for (int n = std::max(0, m - 2); n <= std::min(N - 1, m + 2); ++n) {
        const Interval& e = M1[m * N + n];
        if (e.lo() == 0.0 && e.hi() == 0.0) continue;
        s += e * Interval(coef(m)) * Interval(coef(n));
      }
    return s;
  };
  Interval x(0.0), y(0.0);
  for (int k = 0; k < N; ++k) {
    x += S1[k] * quad([&](int j) { return c(k, j); });
    y += S1[k] * quad([&](int i) { return c(i, k); });
  }
  const Interval sq = (b / a) * x + (a / b) * y;
  return sqrt(Interval::raw(std::max(sq.lo(), 0.0), std::max(sq.hi(), 0.0)));
}

Interval negative_part_h10(const LegendreFunction& u, int depth) {
  // Refining from the whole domain keeps the bound nonincreasing in depth.
  return negative_part_h10_adaptive(u, 0, depth, 0.0).bound;
}

std::size_t CellFlagGrid::count(CellFlag f) const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), f));
}

std::string CellFlagGrid::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "ix,iy,x0,x1,y0,y1,flag,lo,hi\n";
  for (int ix = 0; ix < n(); ++ix)
    for (int iy = 0; iy < n(); ++iy) {
      const Box b = grid_cell(domain, depth, ix, iy);
      const std::size_t k = static_cast<std::size_t>(ix) * n() + iy;
      os << ix << ',' << iy << ',' << b.x.lo() << ',' << b.x.hi() << ',' << b.y.lo() << ','
         << b.y.hi() << ',' << (flags[k] == CellFlag::provably_positive ? "positive" : "possibly_negative")
         << ',' << ranges[k].lo() << ',' << ranges[k].hi() << '\n';
    }
  return os.str();
}

CellFlagGrid build_flag_grid(const LegendreFunction& u, const Interval& threshold, int depth) {
  if (threshold.lo() < 0.0) throw Error(ErrorKind::InvalidArgument, "threshold must be >= 0");
  CellFlagGrid g;
  g.depth = depth;
  g.threshold = threshold;
  g.domain = u.domain();
  g.ranges = grid_ranges(u, depth);
  g.flags.resize(g.ranges.size());
  for (std::size_t k = 0; k < g.ranges.size(); ++k) {
    g.flags[k] = g.ranges[k].lo() > threshold.hi() ? CellFlag::provably_positive : CellFlag::possibly_negative;
  }
  return g;
}

}  // namespace ellipcert
