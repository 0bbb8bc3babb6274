#include "ellipcert/eigen_bounds.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <utility>

#include "ellipcert/error.hpp"
#include "ellipcert/kernels.hpp"

namespace ellipcert {

using namespace rounding;

namespace {

MRMatrix symmetrized(const MRMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidArgument, "matrix is not square");
  const Eigen::Index n = a.rows();
  MRMatrix s(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const Interval h = hull(a.at(i, j), a.at(j, i));
      s.set(i, j, h);
      s.set(j, i, h);
    }
  }
  return s;
}

MRMatrix identity_minus(const MRMatrix& r, const Eigen::VectorXd& d) {
  MRMatrix e = r;
  for (Eigen::Index k = 0; k < d.size(); ++k) e.set(k, k, r.at(k, k) - Interval(d(k)));
  return e;
}

// Eigenvalue bounds of the pencil (S, R) with R = I + E_R, S = D + E_S,
// ||E_R|| <= delta < 1, ||E_S|| <= eta: Rayleigh quotients of (S, R) lie between
// monotone transforms of those of D, so min-max carries them over.
double transform_up(double rho, double eta, double delta) {
  const double num = add_up(rho, eta);
  return num >= 0.0 ? div_up(num, sub_down(1.0, delta)) : div_up(num, add_down(1.0, delta));
}
double transform_down(double rho, double eta, double delta) {
  const double num = sub_down(rho, eta);
  return num >= 0.0 ? div_down(num, add_up(1.0, delta)) : div_down(num, sub_up(1.0, delta));
}

struct NodeTables {
  const QuadratureRule* rule;
  MRMatrix phi;
  MRMatrix d2phi;
};

NodeTables node_tables(int order, int N) {
  if (order > kMaxQuadratureOrder) {
    throw Error(ErrorKind::InvalidArgument, "quadrature order " + std::to_string(order) +
                                                " exceeds " + std::to_string(kMaxQuadratureOrder));
  }
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

// W(a,b) = area * w_a w_b * h(a,b).
template <class H>
MRMatrix weight_matrix(const QuadratureRule& rule, const Interval& area, H h) {
  const int Q = rule.order;
  MRMatrix W(Q, Q);
  for (int a = 0; a < Q; ++a)
    for (int b = 0; b < Q; ++b) W.set(a, b, area * rule.weights[a] * rule.weights[b] * h(a, b));
  return W;
}

MRMatrix nodal_values(const NodeTables& t, const Eigen::MatrixXd& c) {
  return product(product(t.phi, MRMatrix(c)), t.phi.transpose());
}

Interval gamma_for(const Interval& cn, double c, double wplus) {
  const Interval c2 = sqr(cn);
  const Interval denom = Interval(1.0) - Interval(c) - Interval(wplus) * c2;
  if (!(denom.lo() > 0.0)) {
    throw Error(ErrorKind::NotCoercive, "projection correction needs 1 - c - max(w,0) C_N^2 > 0");
  }
  return c2 / denom;
}

int count_if_interval(const std::vector<Interval>& v, auto pred) {
  return static_cast<int>(std::count_if(v.begin(), v.end(), pred));
}

}  // namespace

std::vector<Interval> verified_sym_geig(const MRMatrix& A_in, const MRMatrix& B_in) {
  if (A_in.rows() != B_in.rows() || A_in.cols() != B_in.cols()) {
    throw Error(ErrorKind::InvalidArgument, "pencil shape mismatch");
  }
  const MRMatrix A = symmetrized(A_in);
  const MRMatrix B = symmetrized(B_in);
  const Eigen::Index n = A.rows();
  if (n == 0) return {};
  if (Eigen::LLT<Eigen::MatrixXd>(A.mid).info() != Eigen::Success) {
    throw Error(ErrorKind::NotSPD, "Cholesky factorization of the midpoint failed");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B.mid, A.mid);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NotSPD, "float generalized eigensolver failed");
  const Eigen::MatrixXd& Xf = es.eigenvectors();
  const Eigen::VectorXd& d = es.eigenvalues();
  if (!Xf.allFinite() || !d.allFinite()) throw Error(ErrorKind::EnclosureFail, "non-finite eigenvectors");

  const MRMatrix X(Xf);
  const MRMatrix XT(Eigen::MatrixXd(Xf.transpose()));
  const MRMatrix R = product(product(XT, A), X);
  const MRMatrix S = product(product(XT, B), X);
  const double delta = norm2_upper(identity_minus(R, Eigen::VectorXd::Ones(n)));
  const double eta = norm2_upper(identity_minus(S, d));
  // X^T A X = I + E with ||E|| < 1 also proves A positive definite.
  if (!(delta < 1.0)) {
    throw Error(ErrorKind::NotSPD, "A-orthonormality defect " + std::to_string(delta) + " >= 1");
  }
  if (!std::isfinite(eta)) throw Error(ErrorKind::EnclosureFail, "non-finite residual bound");

  std::vector<Interval> out(static_cast<size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    out[k] = Interval(transform_down(d(k), eta, delta), transform_up(d(k), eta, delta));
  }
  return out;
}

std::vector<Interval> merge_clusters(const std::vector<Interval>& enclosures) {
  std::vector<Interval> out;
  for (const auto& e : enclosures) {
    if (!out.empty() && e.lo() <= out.back().hi()) {
      out.back() = hull(out.back(), e);
    } else {
      out.push_back(e);
    }
  }
  return out;
}

ProjectionConstant ProjectionConstant::closed_form(int N, const Rectangle& domain) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  domain.validate();
  const Interval side = max(domain.width_x(), domain.width_y());
  const Interval k = sqrt(Interval(static_cast<double>(N + 1)) * Interval(static_cast<double>(N + 2)));
  return {side / (Interval(2.0) * k), "closed-form"};
}

ProjectionConstant ProjectionConstant::supplied(const Interval& value) {
  if (!(value.lo() > 0.0)) throw Error(ErrorKind::InvalidArgument, "C_N must be positive");
  return {value, "supplied"};
}

Interval dprime_range(const LegendreFunction& u, const ProblemSpec& p, int depth) {
  const auto ranges = grid_ranges(u, depth);
  Interval r = p.df(ranges.front());
  for (const auto& c : ranges) r = hull(r, p.df(c));
  return r;
}

SpectralContext::SpectralContext(const LegendreFunction& u, const ProblemSpec& p,
                                 ProjectionConstant cn, int depth)
    : N_(u.N()), cn_(std::move(cn)) {
  if (!p.polynomial()) {
    throw Error(ErrorKind::NonPolynomialIntegrand,
                "even exponents make f'(u_hat) non-polynomial; exact quadrature is unavailable");
  }
  if (!(u.domain() == p.domain)) throw Error(ErrorKind::InvalidArgument, "domain mismatch");
  if (!(cn_.value.lo() > 0.0)) throw Error(ErrorKind::InvalidArgument, "C_N must be positive");
  const int N = N_;
  const Interval a = p.domain.width_x();
  const Interval b = p.domain.width_y();
  const Interval area = a * b;
  g_range_ = dprime_range(u, p, depth);

  // A = (b/a) S (x) M1 + (a/b) M1 (x) S and M = ab M1 (x) M1 from exact 1-D entries.
  const auto S1 = stiffness_1d_diagonal(N);
  const auto M1 = mass_1d(N);
  const Interval ba = b / a, ab = a / b;
  A_ = MRMatrix(N * N, N * N);
  M_ = MRMatrix(N * N, N * N);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const Interval& mki = M1[k * N + i];
          const Interval& mlj = M1[l * N + j];
          Interval s(0.0);
          if (k == i) s += ba * S1[k] * mlj;
          if (l == j) s += ab * mki * S1[l];
          A_.set(k * N + l, i * N + j, s);
          M_.set(k * N + l, i * N + j, area * mki * mlj);
        }

  const Interval ia2 = Interval(1.0) / sqr(a);
  const Interval ib2 = Interval(1.0) / sqr(b);
  const int pm = p.max_exponent();

  // (g phi, phi) and (Laplace phi, g phi): degree (p+1)(N+1) per variable.
  {
    const NodeTables t = node_tables(quadrature_order_for_degree((pm + 1) * (N + 1)), N);
    const MRMatrix U = nodal_values(t, u.coeffs());
    const MRMatrix Wg = weight_matrix(*t.rule, area, [&](int i, int j) { return p.df(U.at(i, j)); });
    Mg_ = contract(Wg, t.phi, t.phi, t.phi, t.phi);
    Bg_ = add(scale(ia2, contract(Wg, t.d2phi, t.phi, t.phi, t.phi)),
              scale(ib2, contract(Wg, t.phi, t.phi, t.d2phi, t.phi)));
  }
  // (g^2 phi, phi): degree 2p(N+1).
  {
    const NodeTables t = node_tables(quadrature_order_for_degree(2 * pm * (N + 1)), N);
    const MRMatrix U = nodal_values(t, u.coeffs());
    const MRMatrix Wg2 =
        weight_matrix(*t.rule, area, [&](int i, int j) { return sqr(p.df(U.at(i, j))); });
    Mg2_ = contract(Wg2, t.phi, t.phi, t.phi, t.phi);
  }
  // (Laplace phi, Laplace phi): degree 2(N+1).
  {
    const NodeTables t = node_tables(quadrature_order_for_degree(2 * (N + 1)), N);
    const MRMatrix W = weight_matrix(*t.rule, area, [](int, int) { return Interval(1.0); });
    const MRMatrix xx = contract(W, t.d2phi, t.d2phi, t.phi, t.phi);
    const MRMatrix yy = contract(W, t.phi, t.phi, t.d2phi, t.d2phi);
    const MRMatrix xy = add(contract(W, t.d2phi, t.phi, t.phi, t.d2phi),
                            contract(W, t.phi, t.d2phi, t.d2phi, t.phi));
    G_ = add(add(scale(sqr(ia2), xx), scale(sqr(ib2), yy)), scale(ia2 * ib2, xy));
  }
}

MRMatrix SpectralContext::correction_gram(double t) const {
  const Interval ti(t);
  // w = g + t: M_{w^2} = M_{g^2} + 2t M_g + t^2 M and (Laplace phi, w phi) = B_g - t A
  // (integration by parts against functions vanishing on the boundary).
  const MRMatrix Mw2 =
      add(add(Mg2_, scale(Interval(2.0) * ti, Mg_)), scale(sqr(ti), M_));
  const MRMatrix Bw = sub(Bg_, scale(ti, A_));
  // Any Z is admissible; the least-squares choice -G^{-1} B_w makes R small.
  const Eigen::MatrixXd Zf = -Eigen::LLT<Eigen::MatrixXd>(G_.mid).solve(Bw.mid);
  const MRMatrix Z(Zf);
  const MRMatrix ZT(Eigen::MatrixXd(Zf.transpose()));
  const MRMatrix ZtB = product(ZT, Bw);
  const MRMatrix ZtGZ = product(product(ZT, G_), Z);
  return add(add(Mw2, add(ZtB, ZtB.transpose())), ZtGZ);
}

Mu1Bound mu1_lower_bound(const SpectralContext& ctx) {
  const MRMatrix& A = ctx.stiffness();
  const MRMatrix& M = ctx.mass();
  const MRMatrix base = sub(A, ctx.potential_mass());
  Mu1Bound out;
  // Rayleigh-Ritz: the smallest eigenvalue of (A - M_g, M) bounds mu_1 from above.
  const auto ritz = verified_sym_geig(M, base);
  out.ritz = ritz.front().hi();
  double t = ritz.front().lo();
  for (int attempt = 1; attempt <= 6; ++attempt) {
    out.attempts = attempt;
    // mu_1 >= t iff ||grad v||^2 - ((g + t) v, v) >= 0 for all v, which holds when
    // A - M_g - gamma R_t - t M is positive semidefinite.
    const double wplus = std::max(0.0, add_up(ctx.g_range().hi(), t));
    const Interval gamma = gamma_for(ctx.cn().value, 0.0, wplus);
    const MRMatrix H = sub(base, scale(gamma, ctx.correction_gram(t)));
    const double theta = verified_sym_geig(M, H).front().lo();
    if (theta >= t) {
      out.lower = t;
      out.gamma = gamma.hi();
      return out;
    }
    t = sub_down(theta, 1e-9 * std::max(1.0, std::fabs(theta)));
  }
  throw Error(ErrorKind::EnclosureFail, "mu_1 lower bound iteration did not reach a verified fixed point");
}

InverseNormBound inverse_norm_bound(const SpectralContext& ctx) {
  const MRMatrix& A = ctx.stiffness();
  const MRMatrix& Mg = ctx.potential_mass();
  InverseNormBound out;
  // Spectrum relative to V: <F' v, v> = nu ||grad v||^2, nu = 1 - kappa with
  // kappa the eigenvalues of (g v, v) relative to ||grad v||^2.
  const auto kappa = verified_sym_geig(A, Mg);
  out.nu_ritz = 1.0;
  for (const auto& k : kappa) out.nu_ritz = std::min(out.nu_ritz, std::fabs(1.0 - k.mid()));
  if (out.nu_ritz <= 0.0) throw Error(ErrorKind::PossiblySingular, "Galerkin spectrum touches zero");

  const double c2 = sqr(ctx.cn().value).hi();
  const double gplus = std::max(0.0, ctx.g_range().hi());
  const double tau_cap = std::min(out.nu_ritz, sub_down(1.0, mul_up(gplus, c2)) - 1e-3);
  if (!(tau_cap > 0.0)) throw Error(ErrorKind::PossiblySingular, "no room for the projection correction");
  const Interval gamma = gamma_for(ctx.cn().value, tau_cap, gplus);
  out.gamma = gamma.hi();
  // For tau <= tau_cap: (1-tau)||grad v||^2 - (g v, v) >= v_N^T [(1-tau) A - (M_g + gamma R)] v_N.
  const auto lambda = verified_sym_geig(A, add(Mg, scale(gamma, ctx.correction_gram(0.0))));

  // nu < tau occurs at most #{lambda >= 1 - tau} times; the Ritz values give at
  // least #{kappa > 1 + tau} values nu < -tau. Equal counts exclude [-tau, tau).
  auto upper_count = [&](double tau) {
    const double edge = sub_down(1.0, tau);
    return count_if_interval(lambda, [&](const Interval& l) { return l.hi() >= edge; });
  };
  auto lower_count = [&](double tau) {
    const double edge = add_up(1.0, tau);
    return count_if_interval(kappa, [&](const Interval& k) { return k.lo() > edge; });
  };
  auto ok = [&](double tau) { return upper_count(tau) <= lower_count(tau); };

  double tau = tau_cap;
  if (!ok(tau)) {
    double lo = 0.0, hi = tau_cap;
    if (!ok(std::ldexp(1.0, -40))) {
      throw Error(ErrorKind::PossiblySingular, "zero cannot be excluded from the corrected spectrum");
    }
    lo = std::ldexp(1.0, -40);
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (lo + hi);
      (ok(m) ? lo : hi) = m;
    }
    tau = lo;
  }
  out.tau = tau;
  out.negative_count = lower_count(tau);
  out.value = Interval(1.0, div_up(1.0, tau));
  return out;
}

}  // namespace ellipcert
