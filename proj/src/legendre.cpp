#include "ellipcert/legendre.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "ellipcert/error.hpp"
#include "hp_interval.hpp"

namespace ellipcert {

using detail::HpInterval;
using namespace rounding;

void Rectangle::validate() const {
  if (!std::isfinite(x0) || !std::isfinite(x1) || !std::isfinite(y0) || !std::isfinite(y1)) {
    throw Error(ErrorKind::InvalidArgument, "rectangle bounds must be finite");
  }
  if (!(x1 > x0) || !(y1 > y0)) {
    throw Error(ErrorKind::InvalidArgument, "rectangle must have x1 > x0 and y1 > y0");
  }
}

namespace {

mpfr_prec_t table_prec(int nmax) { return 128 + 2 * (nmax + 2); }

// Q_n, Q_n', Q_n'' for n = 0..nmax at an abscissa given as an HP interval.
struct HpFamily {
  std::vector<HpInterval> q, dq, d2q;
};

HpFamily hp_family(const HpInterval& x, int nmax) {
  const mpfr_prec_t prec = x.prec();
  HpInterval s(prec);
  HpInterval::mul_scalar(s, x, 2.0);
  HpInterval::sub(s, s, HpInterval(prec, 1.0));

  HpFamily f;
  f.q.reserve(nmax + 1);
  f.dq.reserve(nmax + 1);
  f.d2q.reserve(nmax + 1);
  f.q.emplace_back(prec, 1.0);
  f.dq.emplace_back(prec, 0.0);
  f.d2q.emplace_back(prec, 0.0);
  if (nmax >= 1) {
    f.q.push_back(s);
    f.dq.emplace_back(prec, 1.0);
    f.d2q.emplace_back(prec, 0.0);
  }
  HpInterval t(prec), u(prec);
  for (int k = 1; k < nmax; ++k) {
    // P_{k+1} = ((2k+1) s P_k - k P_{k-1}) / (k+1)
    HpInterval::mul(t, s, f.q[k]);
    HpInterval::mul_scalar(t, t, 2.0 * k + 1);
    HpInterval::mul_scalar(u, f.q[k - 1], k);
    HpInterval::sub(t, t, u);
    HpInterval::div_scalar(t, t, k + 1.0);
    f.q.push_back(t);
    // P'_{k+1} = P'_{k-1} + (2k+1) P_k,  P''_{k+1} = P''_{k-1} + (2k+1) P'_k
    HpInterval::mul_scalar(u, f.q[k], 2.0 * k + 1);
    HpInterval::add(t, f.dq[k - 1], u);
    f.dq.push_back(t);
    HpInterval::mul_scalar(u, f.dq[k], 2.0 * k + 1);
    HpInterval::add(t, f.d2q[k - 1], u);
    f.d2q.push_back(t);
  }
  // Derivatives of P in s, rescale to derivatives in x.
  for (int k = 0; k <= nmax; ++k) {
    HpInterval::mul_scalar(f.dq[k], f.dq[k], 2.0);
    HpInterval::mul_scalar(f.d2q[k], f.d2q[k], 4.0);
  }
  return f;
}

BasisRow row_from_family(const HpInterval& x, const Interval& where, int N) {
  const HpFamily f = hp_family(x, N + 1);
  BasisRow r;
  r.where = where;
  r.phi.resize(N);
  r.dphi.resize(N);
  r.d2phi.resize(N);
  r.psi.resize(N);
  r.dpsi.resize(N);
  const mpfr_prec_t prec = x.prec();
  HpInterval t(prec);
  for (int n = 1; n <= N; ++n) {
    HpInterval::sub(t, f.q[n - 1], f.q[n + 1]);
    HpInterval::div_scalar(t, t, 2.0 * (2 * n + 1));
    r.phi[n - 1] = t.to_interval();
    r.dphi[n - 1] = -f.q[n].to_interval();
    r.d2phi[n - 1] = -f.dq[n].to_interval();
    const double nn = static_cast<double>(n) * (n + 1);
    HpInterval::div_scalar(t, f.dq[n], nn);
    r.psi[n - 1] = t.to_interval();
    HpInterval::div_scalar(t, f.d2q[n], nn);
    r.dpsi[n - 1] = t.to_interval();
  }
  HpInterval one_minus(prec);
  HpInterval::sub(one_minus, HpInterval(prec, 1.0), x);
  HpInterval::mul(t, x, one_minus);
  r.bubble = t.to_interval();
  return r;
}

BasisRow row_at_point(double p, int N) {
  HpInterval x(table_prec(N + 1), p);
  return row_from_family(x, Interval(p), N);
}

// Exact range of x(1-x) over X intersected with [0,1].
Interval bubble_range(const Interval& X) {
  const Interval Y = intersect(X, Interval(0.0, 1.0));
  const Interval a = Interval(Y.lo()) * (Interval(1.0) - Interval(Y.lo()));
  const Interval b = Interval(Y.hi()) * (Interval(1.0) - Interval(Y.hi()));
  Interval r = hull(a, b);
  if (Y.contains(0.5)) r = hull(r, Interval(0.25));
  return Interval(std::max(0.0, r.lo()), r.hi());
}

Interval sym(double r) { return Interval(-r, r); }

// f(mid) + [-b1 r, b1 r], f(mid) + f'(mid) R + [-b2 r^2/2, b2 r^2/2], intersected with [-g, g].
Interval taylor_range(const Interval& fm, const Interval& dfm, double b1, double b2, double r,
                      double g) {
  const Interval R = sym(r);
  const double r2 = mul_up(mul_up(r, r), 0.5);
  Interval out = fm + sym(mul_up(b1, r));
  out = intersect(out, fm + dfm * R + sym(mul_up(b2, r2)));
  return intersect(out, sym(g));
}

// Enclosure of sum_ij c_ij a_i b_j in midpoint-radius arithmetic: float
// products for the midpoints plus a rigorous bound for rounding and spread.
Interval bilinear(const Eigen::MatrixXd& c, const std::vector<Interval>& a,
                  const std::vector<Interval>& b) {
  const int N = static_cast<int>(c.rows());
  Eigen::VectorXd am(N), ar(N), bm(N), br(N);
  for (int i = 0; i < N; ++i) {
    am[i] = a[i].mid();
    ar[i] = a[i].rad();
    bm[i] = b[i].mid();
    br[i] = b[i].rad();
  }
  const double u = 0x1p-53;
  const double gamma = div_up(mul_up(N + 1.0, u), sub_down(1.0, mul_up(N + 1.0, u)));
  const double safety = add_up(1.0, mul_up(4.0 * (N + 2), u));
  const double tiny = mul_up(2.0 * N + 2, 0x1p-1074);
  const Eigen::MatrixXd ac = c.cwiseAbs();
  const Eigen::VectorXd tm = c.transpose() * am;
  const Eigen::VectorXd s1 = ac.transpose() * am.cwiseAbs();
  const Eigen::VectorXd s2 = ac.transpose() * ar;
  Eigen::VectorXd tr(N);
  for (int j = 0; j < N; ++j) {
    tr[j] = add_up(mul_up(add_up(mul_up(gamma, s1[j]), s2[j]), safety), tiny);
  }
  const double mid = tm.dot(bm);
  double round = 0.0, spread = 0.0;
  for (int j = 0; j < N; ++j) {
    const double atm = std::fabs(tm[j]);
    round = add_up(round, mul_up(atm, std::fabs(bm[j])));
    spread = add_up(spread, add_up(mul_up(atm, br[j]), mul_up(tr[j], add_up(std::fabs(bm[j]), br[j]))));
  }
  const double rad = add_up(mul_up(add_up(mul_up(gamma, round), spread), safety), tiny);
  if (!std::isfinite(mid) || !std::isfinite(rad)) throw Error(ErrorKind::NonFinite, "range evaluation");
  return Interval(sub_down(mid, rad), add_up(mid, rad));
}

}  // namespace

double shifted_legendre_derivative_bound(int n, int k) {
  if (n < 0 || k < 0 || k > 3) throw Error(ErrorKind::InvalidArgument, "derivative bound");
  if (k > n) return 0.0;
  // (n+k)! / (k! (n-k)!) = prod_{j=n-k+1}^{n+k} j / k!
  double v = 1.0;
  for (int j = n - k + 1; j <= n + k; ++j) v = mul_up(v, static_cast<double>(j));
  double kf = 1.0;
  for (int j = 2; j <= k; ++j) kf *= j;
  return div_up(v, kf);
}

std::vector<BasisRow> basis_rows_at_points(std::span<const double> points, int N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  std::vector<BasisRow> rows;
  rows.reserve(points.size());
  for (double p : points) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "point outside [0,1]");
    rows.push_back(row_at_point(p, N));
  }
  return rows;
}

BasisRow basis_row_over(const Interval& X, const BasisRow& m, double mid) {
  const int N = static_cast<int>(m.phi.size());
  const double r = max(Interval(sub_up(X.hi(), mid)), Interval(sub_up(mid, X.lo()))).hi();
  BasisRow row;
  row.where = X;
  row.phi.resize(N);
  row.dphi.resize(N);
  row.d2phi.resize(N);
  row.psi.resize(N);
  row.dpsi.resize(N);
  row.bubble = bubble_range(X);
  for (int n = 1; n <= N; ++n) {
    const double b1 = shifted_legendre_derivative_bound(n, 1);
    const double b2 = shifted_legendre_derivative_bound(n, 2);
    const double b3 = shifted_legendre_derivative_bound(n, 3);
    const Interval nn(static_cast<double>(n) * (n + 1));
    const int i = n - 1;
    const Interval q_m = -m.dphi[i];
    const Interval dq_m = -m.d2phi[i];
    const Interval d2q_m = m.dpsi[i] * nn;
    // phi' = -Q is bounded by 1, phi'' = -Q' by b1.
    const double phi_global = std::min(div_up(1.0, 2.0 * n + 1), row.bubble.hi());
    row.phi[i] = taylor_range(m.phi[i], m.dphi[i], 1.0, b1, r, phi_global);
    const Interval q = taylor_range(q_m, dq_m, b1, b2, r, 1.0);
    const Interval dq = taylor_range(dq_m, d2q_m, b2, b3, r, b1);
    row.dphi[i] = -q;
    row.d2phi[i] = -dq;
    row.psi[i] = dq / nn;
    const double b3_over = div_up(b3, static_cast<double>(n) * (n + 1));
    row.dpsi[i] = intersect(m.dpsi[i] + sym(mul_up(b3_over, r)),
                            sym(div_up(b2, static_cast<double>(n) * (n + 1))));
  }
  return row;
}

BasisRow basis_row_over(const Interval& X, int N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  const Interval Y = intersect(X, Interval(0.0, 1.0));
  const double mid = Y.mid();
  if (Y.is_point()) return row_at_point(mid, N);
  return basis_row_over(Y, row_at_point(mid, N), mid);
}

Interval shifted_legendre(int n, const Interval& x) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be >= 0");
  if (n == 0) return Interval(1.0);
  return -basis_row_over(x, n).dphi[n - 1];
}

Interval phi(int n, const Interval& x) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  return basis_row_over(x, n).phi[n - 1];
}

Interval dphi(int n, const Interval& x) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  return basis_row_over(x, n).dphi[n - 1];
}

// ---------------------------------------------------------------------------
// Gauss rules

namespace {

// Round-to-nearest P_n(s), P_n'(s) in MPFR.
void legendre_point(mpfr_t p, mpfr_t dp, const mpfr_t s, int n) {
  const mpfr_prec_t prec = mpfr_get_prec(p);
  mpfr_t p0, p1, t;
  mpfr_inits2(prec, p0, p1, t, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_ui(p0, 1, MPFR_RNDN);
  mpfr_set(p1, s, MPFR_RNDN);
  for (int k = 1; k < n; ++k) {
    mpfr_mul(t, s, p1, MPFR_RNDN);
    mpfr_mul_ui(t, t, 2 * k + 1, MPFR_RNDN);
    mpfr_mul_ui(p0, p0, k, MPFR_RNDN);
    mpfr_sub(t, t, p0, MPFR_RNDN);
    mpfr_div_ui(t, t, k + 1, MPFR_RNDN);
    mpfr_swap(p0, p1);
    mpfr_swap(p1, t);
  }
  // P_n' = n (s P_n - P_{n-1}) / (s^2 - 1)
  mpfr_set(p, p1, MPFR_RNDN);
  mpfr_mul(t, s, p1, MPFR_RNDN);
  mpfr_sub(t, t, p0, MPFR_RNDN);
  mpfr_mul_ui(t, t, n, MPFR_RNDN);
  mpfr_sqr(p0, s, MPFR_RNDN);
  mpfr_sub_ui(p0, p0, 1, MPFR_RNDN);
  mpfr_div(dp, t, p0, MPFR_RNDN);
  mpfr_clears(p0, p1, t, static_cast<mpfr_ptr>(nullptr));
}

// Interval P_n and P_n' at an HP abscissa s in [-1,1], via the x-family.
void legendre_interval(HpInterval& p, HpInterval& dp, const HpInterval& s, int n) {
  const mpfr_prec_t prec = s.prec();
  HpInterval x(prec);
  HpInterval::add(x, s, HpInterval(prec, 1.0));
  HpInterval::div_scalar(x, x, 2.0);
  const HpFamily f = hp_family(x, n);
  p = f.q[n];
  HpInterval::div_scalar(dp, f.dq[n], 2.0);
}

struct RawNode {
  HpInterval node;    // on (-1,1)
  HpInterval weight;  // on (-1,1)
};

RawNode certify_node(int n, double guess, mpfr_prec_t prec) {
  mpfr_t s, p, dp, ds, tol;
  mpfr_inits2(prec, s, p, dp, ds, tol, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(s, guess, MPFR_RNDN);
  mpfr_set_ui_2exp(tol, 1, -(prec - 16), MPFR_RNDN);
  bool converged = false;
  for (int it = 0; it < 200 && !converged; ++it) {
    legendre_point(p, dp, s, n);
    mpfr_div(ds, p, dp, MPFR_RNDN);
    mpfr_sub(s, s, ds, MPFR_RNDN);
    mpfr_abs(ds, ds, MPFR_RNDN);
    converged = mpfr_cmp(ds, tol) <= 0;
  }

  // Interval Newton on X = [s - d, s + d].
  const double d2bound = shifted_legendre_derivative_bound(n, 2) / 4.0;  // sup |P_n''| on [-1,1]
  mpfr_t delta, e;
  mpfr_inits2(prec, delta, e, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_ui_2exp(delta, 1, -(prec / 2), MPFR_RNDN);

  HpInterval m(prec), X(prec);
  m.set_bounds(s, s);
  HpInterval::widen(X, m, delta);
  HpInterval pm(prec), dpm(prec), dpX(prec), N(prec);
  legendre_interval(pm, dpm, m, n);
  mpfr_mul_d(e, delta, d2bound, MPFR_RNDU);
  HpInterval::widen(dpX, dpm, e);
  bool ok = converged && !dpX.contains_zero();
  if (ok) {
    HpInterval::div(N, pm, dpX);
    HpInterval::sub(N, m, N);
    ok = mpfr_cmp(N.lo(), X.lo()) > 0 && mpfr_cmp(N.hi(), X.hi()) < 0;
  }
  if (!ok) {
    mpfr_clears(s, p, dp, ds, tol, delta, e, static_cast<mpfr_ptr>(nullptr));
    throw Error(ErrorKind::QuadratureCertFail,
                "could not certify Gauss node for order " + std::to_string(n));
  }
  // The root lies in N; enclose P_n' over N and form the weight 2/((1-s^2) P_n'(s)^2).
  HpInterval c(prec), dpN(prec);
  mpfr_add(e, N.lo(), N.hi(), MPFR_RNDN);
  mpfr_div_2ui(e, e, 1, MPFR_RNDN);
  c.set_bounds(e, e);
  legendre_interval(pm, dpm, c, n);
  mpfr_sub(delta, N.hi(), e, MPFR_RNDU);
  mpfr_sub(e, e, N.lo(), MPFR_RNDU);
  mpfr_max(delta, delta, e, MPFR_RNDU);
  mpfr_mul_d(e, delta, d2bound, MPFR_RNDU);
  HpInterval::widen(dpN, dpm, e);
  HpInterval w(prec), t(prec);
  HpInterval::mul(t, N, N);
  HpInterval::sub(t, HpInterval(prec, 1.0), t);
  HpInterval::mul(w, dpN, dpN);
  HpInterval::mul(w, w, t);
  HpInterval::div(w, HpInterval(prec, 2.0), w);
  mpfr_clears(s, p, dp, ds, tol, delta, e, static_cast<mpfr_ptr>(nullptr));
  return RawNode{N, w};
}

std::unique_ptr<QuadratureRule> build_rule(int order) {
  const mpfr_prec_t prec = std::max<mpfr_prec_t>(256, 128 + 4 * order);
  auto rule = std::make_unique<QuadratureRule>();
  rule->order = order;
  rule->nodes.resize(order);
  rule->weights.resize(order);
  rule->node_dd.resize(order);
  const double pi = 3.14159265358979323846;
  mpfr_t t;
  mpfr_init2(t, prec);
  for (int k = 1; k <= order; ++k) {
    const double guess = std::cos(pi * (k - 0.25) / (order + 0.5));
    RawNode raw = certify_node(order, guess, prec);
    // Map to (0,1): x = (1+s)/2, w/2. Guesses are descending in s.
    HpInterval x(prec), w(prec);
    HpInterval::add(x, raw.node, HpInterval(prec, 1.0));
    HpInterval::div_scalar(x, x, 2.0);
    HpInterval::div_scalar(w, raw.weight, 2.0);
    const int idx = order - k;
    rule->nodes[idx] = x.to_interval();
    rule->weights[idx] = w.to_interval();
    std::array<double, 4> dd{};
    dd[0] = mpfr_get_d(x.lo(), MPFR_RNDN);
    mpfr_sub_d(t, x.lo(), dd[0], MPFR_RNDD);
    dd[1] = mpfr_get_d(t, MPFR_RNDD);
    dd[2] = mpfr_get_d(x.hi(), MPFR_RNDN);
    mpfr_sub_d(t, x.hi(), dd[2], MPFR_RNDU);
    dd[3] = mpfr_get_d(t, MPFR_RNDU);
    rule->node_dd[idx] = dd;
  }
  mpfr_clear(t);
  for (int k = 1; k < order; ++k) {
    if (!(rule->nodes[k - 1].hi() <= rule->nodes[k].lo())) {
      throw Error(ErrorKind::QuadratureCertFail, "Gauss nodes not separated");
    }
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_rule(int order) {
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw Error(ErrorKind::InvalidArgument,
                "quadrature order must be in [1, " + std::to_string(kMaxQuadratureOrder) + "]");
  }
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = build_rule(order);
  return *slot;
}

int quadrature_order_for_degree(int degree) {
  if (degree < 0) throw Error(ErrorKind::InvalidArgument, "degree must be >= 0");
  return (degree + 2) / 2;
}

std::vector<BasisRow> basis_rows_at_nodes(const QuadratureRule& rule, int N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  const mpfr_prec_t prec = table_prec(N + 1);
  std::vector<BasisRow> rows;
  rows.reserve(rule.order);
  mpfr_t lo, hi;
  mpfr_inits2(prec, lo, hi, static_cast<mpfr_ptr>(nullptr));
  for (int k = 0; k < rule.order; ++k) {
    const auto& dd = rule.node_dd[k];
    mpfr_set_d(lo, dd[0], MPFR_RNDD);
    mpfr_add_d(lo, lo, dd[1], MPFR_RNDD);
    mpfr_set_d(hi, dd[2], MPFR_RNDU);
    mpfr_add_d(hi, hi, dd[3], MPFR_RNDU);
    HpInterval x(prec);
    x.set_bounds(lo, hi);
    rows.push_back(row_from_family(x, rule.nodes[k], N));
  }
  mpfr_clears(lo, hi, static_cast<mpfr_ptr>(nullptr));
  return rows;
}

Interval integrate(const std::function<Interval(const Interval&)>& integrand, const Interval& x0,
                   const Interval& x1, const QuadratureRule& rule) {
  const Interval h = x1 - x0;
  Interval sum(0.0);
  for (int k = 0; k < rule.order; ++k) {
    sum += rule.weights[k] * integrand(x0 + h * rule.nodes[k]);
  }
  return sum * h;
}

Interval integrate(const std::function<Interval(const Interval&, const Interval&)>& integrand,
                   const Rectangle& cell, const QuadratureRule& rule) {
  const Interval hx = cell.width_x();
  const Interval hy = cell.width_y();
  Interval sum(0.0);
  for (int a = 0; a < rule.order; ++a) {
    const Interval x = Interval(cell.x0) + hx * rule.nodes[a];
    Interval inner(0.0);
    for (int b = 0; b < rule.order; ++b) {
      inner += rule.weights[b] * integrand(x, Interval(cell.y0) + hy * rule.nodes[b]);
    }
    sum += rule.weights[a] * inner;
  }
  return sum * hx * hy;
}

// ---------------------------------------------------------------------------
// LegendreFunction and range enclosures

LegendreFunction::LegendreFunction(int N, Rectangle domain)
    : coeffs_(Eigen::MatrixXd::Zero(N, N)), domain_(domain) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  domain_.validate();
}

LegendreFunction::LegendreFunction(Eigen::MatrixXd coeffs, Rectangle domain)
    : coeffs_(std::move(coeffs)), domain_(domain) {
  if (coeffs_.rows() < 1 || coeffs_.rows() != coeffs_.cols()) {
    throw Error(ErrorKind::InvalidArgument, "coefficient matrix must be square and nonempty");
  }
  if (!coeffs_.allFinite()) throw Error(ErrorKind::NonFinite, "coefficients must be finite");
  domain_.validate();
}

Eigen::VectorXd phi_values(double x, int N) {
  const double s = 2.0 * x - 1.0;
  std::vector<double> q(N + 2);
  q[0] = 1.0;
  q[1] = s;
  for (int k = 1; k <= N; ++k) q[k + 1] = ((2.0 * k + 1) * s * q[k] - k * q[k - 1]) / (k + 1);
  Eigen::VectorXd v(N);
  for (int n = 1; n <= N; ++n) v[n - 1] = (q[n - 1] - q[n + 1]) / (2.0 * (2 * n + 1));
  return v;
}

double LegendreFunction::value(double x, double y) const {
  const double xi = (x - domain_.x0) / (domain_.x1 - domain_.x0);
  const double eta = (y - domain_.y0) / (domain_.y1 - domain_.y0);
  return phi_values(xi, N()).dot(coeffs_ * phi_values(eta, N()));
}

Box to_reference(const Rectangle& domain, const Box& box) {
  const Interval X = (box.x - Interval(domain.x0)) / domain.width_x();
  const Interval Y = (box.y - Interval(domain.y0)) / domain.width_y();
  const Interval unit(0.0, 1.0);
  if (X.hi() < 0.0 || X.lo() > 1.0 || Y.hi() < 0.0 || Y.lo() > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "box lies outside the domain");
  }
  return Box{intersect(X, unit), intersect(Y, unit)};
}

Interval range_direct(const Eigen::MatrixXd& c, const BasisRow& rx, const BasisRow& ry) {
  return bilinear(c, rx.phi, ry.phi);
}

namespace {

Interval offset(const BasisRow& r, const BasisRow& m) {
  return Interval(sub_down(r.where.lo(), m.where.lo()), sub_up(r.where.hi(), m.where.hi()));
}

}  // namespace

Interval range_mean_value(const Eigen::MatrixXd& c, const BasisRow& rx, const BasisRow& ry,
                          const BasisRow& mx, const BasisRow& my) {
  const Interval v = bilinear(c, mx.phi, my.phi);
  const Interval gx = bilinear(c, rx.dphi, ry.phi);
  const Interval gy = bilinear(c, rx.phi, ry.dphi);
  return v + gx * offset(rx, mx) + gy * offset(ry, my);
}

Interval range_factored(const Eigen::MatrixXd& c, const BasisRow& rx, const BasisRow& ry,
                        const BasisRow& mx, const BasisRow& my) {
  Interval cof = bilinear(c, rx.psi, ry.psi);
  const Interval v = bilinear(c, mx.psi, my.psi);
  const Interval gx = bilinear(c, rx.dpsi, ry.psi);
  const Interval gy = bilinear(c, rx.psi, ry.dpsi);
  cof = intersect(cof, v + gx * offset(rx, mx) + gy * offset(ry, my));
  return rx.bubble * ry.bubble * cof;
}

Interval range_automatic(const Eigen::MatrixXd& c, const BasisRow& rx, const BasisRow& ry,
                         const BasisRow& mx, const BasisRow& my) {
  const double small = 0.0625;
  const bool narrow = rx.where.width() <= small && ry.where.width() <= small;
  const Interval base = narrow ? range_mean_value(c, rx, ry, mx, my) : range_direct(c, rx, ry);
  return intersect(base, range_factored(c, rx, ry, mx, my));
}

namespace {

struct RowPair {
  BasisRow rx, ry, mx, my;
};

RowPair rows_for(const LegendreFunction& u, const Box& box) {
  const Box ref = to_reference(u.domain(), box);
  const int N = u.N();
  const double mxp = ref.x.mid();
  const double myp = ref.y.mid();
  RowPair p;
  p.mx = row_at_point(mxp, N);
  p.my = row_at_point(myp, N);
  p.rx = ref.x.is_point() ? p.mx : basis_row_over(ref.x, p.mx, mxp);
  p.ry = ref.y.is_point() ? p.my : basis_row_over(ref.y, p.my, myp);
  return p;
}

}  // namespace

Interval eval(const LegendreFunction& u, const Box& box, RangeMode mode) {
  const RowPair p = rows_for(u, box);
  const auto& c = u.coeffs();
  switch (mode) {
    case RangeMode::direct:
      return range_direct(c, p.rx, p.ry);
    case RangeMode::mean_value:
      return range_mean_value(c, p.rx, p.ry, p.mx, p.my);
    case RangeMode::factored:
      return range_factored(c, p.rx, p.ry, p.mx, p.my);
    case RangeMode::automatic:
      break;
  }
  return range_automatic(c, p.rx, p.ry, p.mx, p.my);
}

std::array<Interval, 2> grad(const LegendreFunction& u, const Box& box) {
  const RowPair p = rows_for(u, box);
  const auto& c = u.coeffs();
  const Interval ox = offset(p.rx, p.mx);
  const Interval oy = offset(p.ry, p.my);
  Interval gx = intersect(bilinear(c, p.rx.dphi, p.ry.phi),
                          bilinear(c, p.mx.dphi, p.my.phi) + bilinear(c, p.rx.d2phi, p.ry.phi) * ox +
                              bilinear(c, p.rx.dphi, p.ry.dphi) * oy);
  Interval gy = intersect(bilinear(c, p.rx.phi, p.ry.dphi),
                          bilinear(c, p.mx.phi, p.my.dphi) + bilinear(c, p.rx.dphi, p.ry.dphi) * ox +
                              bilinear(c, p.rx.phi, p.ry.d2phi) * oy);
  return {gx / u.domain().width_x(), gy / u.domain().width_y()};
}

Interval laplacian(const LegendreFunction& u, const Box& box) {
  const RowPair p = rows_for(u, box);
  const auto& c = u.coeffs();
  const Interval a = u.domain().width_x();
  const Interval b = u.domain().width_y();
  return bilinear(c, p.rx.d2phi, p.ry.phi) / sqr(a) + bilinear(c, p.rx.phi, p.ry.d2phi) / sqr(b);
}

// ---------------------------------------------------------------------------
// Exact 1-D matrices

std::vector<Interval> stiffness_1d_diagonal(int N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  std::vector<Interval> s(N);
  for (int n = 1; n <= N; ++n) s[n - 1] = Interval(1.0) / Interval(2.0 * n + 1);
  return s;
}

std::vector<Interval> mass_1d(int N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  std::vector<Interval> m(static_cast<size_t>(N) * N, Interval(0.0));
  for (int n = 1; n <= N; ++n) {
    const Interval k(2.0 * n + 1);
    const Interval diag = (Interval(1.0) / Interval(2.0 * n - 1) + Interval(1.0) / Interval(2.0 * n + 3)) /
                          (Interval(4.0) * sqr(k));
    m[(n - 1) * N + (n - 1)] = diag;
    if (n + 2 <= N) {
      const Interval off =
          -Interval(1.0) / (Interval(4.0) * k * Interval(2.0 * n + 3) * Interval(2.0 * n + 5));
      m[(n - 1) * N + (n + 1)] = off;
      m[(n + 1) * N + (n - 1)] = off;
    }
  }
  return m;
}

}  // namespace ellipcert
