#include "ellipcert/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ellipcert/error.hpp"
#include "ellipcert/kernels.hpp"

namespace ellipcert {

Eigen::VectorXd flatten(const Eigen::MatrixXd& c) {
  const Eigen::Index N = c.rows();
  Eigen::VectorXd v(N * N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) v(i * N + j) = c(i, j);
  return v;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int N) {
  if (v.size() != static_cast<Eigen::Index>(N) * N) {
    throw Error(ErrorKind::InvalidArgument, "coefficient vector has the wrong length");
  }
  Eigen::MatrixXd c(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) c(i, j) = v(i * N + j);
  return c;
}

namespace {

Eigen::MatrixXd dense_1d(const std::vector<Interval>& m, int N) {
  Eigen::MatrixXd d(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) d(i, j) = m[i * N + j].mid();
  return d;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const Eigen::Index N = X.rows();
  Eigen::MatrixXd K(N * N, N * N);
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index i = 0; i < N; ++i) K.block(k * N, i * N, N, N) = X(k, i) * Y;
  return K;
}

}  // namespace

Eigen::MatrixXd stiffness_matrix(int N, const Rectangle& domain) {
  const auto s = stiffness_1d_diagonal(N);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  for (int n = 0; n < N; ++n) S(n, n) = s[n].mid();
  const Eigen::MatrixXd M = dense_1d(mass_1d(N), N);
  const double a = domain.x1 - domain.x0, b = domain.y1 - domain.y0;
  return (b / a) * kron(S, M) + (a / b) * kron(M, S);
}

Eigen::MatrixXd mass_matrix(int N, const Rectangle& domain) {
  const Eigen::MatrixXd M = dense_1d(mass_1d(N), N);
  return (domain.x1 - domain.x0) * (domain.y1 - domain.y0) * kron(M, M);
}

int galerkin_quadrature_order(const ProblemSpec& p, int N) {
  // f(u_hat) phi has degree p(N+1) + (N+1) per variable; v f'(u_hat) phi one degree less per factor.
  return quadrature_order_for_degree((p.max_exponent() + 1) * (N + 1));
}

GalerkinSystem::GalerkinSystem(const ProblemSpec& p, int N) : problem_(p), N_(N) {
  p.validate();
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  const int order = std::min(galerkin_quadrature_order(p, N), kMaxQuadratureOrder);
  const QuadratureRule& rule = gauss_rule(order);
  Phi_.resize(order, N);
  w_.resize(order);
  for (int a = 0; a < order; ++a) {
    Phi_.row(a) = phi_values(rule.nodes[a].mid(), N).transpose();
    w_(a) = rule.weights[a].mid();
  }
  A_ = stiffness_matrix(N, p.domain);
  M_ = mass_matrix(N, p.domain);
  area_ = (p.domain.x1 - p.domain.x0) * (p.domain.y1 - p.domain.y0);
}

Eigen::MatrixXd GalerkinSystem::values_at_nodes(const Eigen::VectorXd& c) const {
  return Phi_ * unflatten(c, N_) * Phi_.transpose();
}

Eigen::VectorXd GalerkinSystem::residual(const Eigen::VectorXd& c) const {
  const Eigen::MatrixXd U = values_at_nodes(c);
  Eigen::MatrixXd F(U.rows(), U.cols());
  for (Eigen::Index b = 0; b < U.cols(); ++b)
    for (Eigen::Index a = 0; a < U.rows(); ++a) F(a, b) = w_(a) * w_(b) * problem_.f(U(a, b));
  const Eigen::MatrixXd load = area_ * (Phi_.transpose() * F * Phi_);
  return A_ * c - flatten(load);
}

Eigen::MatrixXd GalerkinSystem::jacobian(const Eigen::VectorXd& c) const {
  const Eigen::MatrixXd U = values_at_nodes(c);
  Eigen::MatrixXd W(U.rows(), U.cols());
  for (Eigen::Index b = 0; b < U.cols(); ++b)
    for (Eigen::Index a = 0; a < U.rows(); ++a) W(a, b) = area_ * w_(a) * w_(b) * problem_.df(U(a, b));
  Eigen::MatrixXd J = A_ - contract(W, Phi_, Phi_, Phi_, Phi_);
  return 0.5 * (J + J.transpose());
}

double GalerkinSystem::scalar_balance(double alpha, const Eigen::VectorXd& g) const {
  const Eigen::MatrixXd G = values_at_nodes(g);
  double load = 0.0;
  for (Eigen::Index b = 0; b < G.cols(); ++b)
    for (Eigen::Index a = 0; a < G.rows(); ++a) load += w_(a) * w_(b) * problem_.f(alpha * G(a, b)) * G(a, b);
  return alpha * g.dot(A_ * g) - area_ * load;
}

Eigen::VectorXd assemble_residual(const ProblemSpec& p, const Eigen::MatrixXd& c) {
  return GalerkinSystem(p, static_cast<int>(c.rows())).residual(flatten(c));
}

Eigen::MatrixXd assemble_jacobian(const ProblemSpec& p, const Eigen::MatrixXd& c) {
  return GalerkinSystem(p, static_cast<int>(c.rows())).jacobian(flatten(c));
}

NewtonResult newton_solve(const ProblemSpec& p, const Eigen::MatrixXd& init, double tol, int max_iter) {
  if (init.rows() != init.cols() || init.rows() < 1) {
    throw Error(ErrorKind::InvalidArgument, "initial coefficients must be a square matrix");
  }
  if (!(tol > 0.0) || max_iter < 1) throw Error(ErrorKind::InvalidArgument, "tolerance and iteration limit");
  const int N = static_cast<int>(init.rows());
  const GalerkinSystem sys(p, N);
  Eigen::VectorXd c = flatten(init);
  Eigen::VectorXd r = sys.residual(c);
  double norm = r.norm();
  NewtonReport rep;
  while (rep.iterations < max_iter && !(norm <= tol)) {
    ++rep.iterations;
    const Eigen::VectorXd step = sys.jacobian(c).partialPivLu().solve(r);
    if (!step.allFinite()) break;
    double t = 1.0;
    Eigen::VectorXd trial = c - step;
    Eigen::VectorXd rt = sys.residual(trial);
    for (int k = 0; k < 30 && !(rt.norm() < (1.0 - 1e-4 * t) * norm); ++k) {
      t *= 0.5;
      trial = c - t * step;
      rt = sys.residual(trial);
    }
    if (!(rt.norm() < norm)) {
      // No decrease: accept the full step only if it is at round-off level.
      if (step.norm() > 1e-14 * (1.0 + c.norm())) break;
    }
    c = trial;
    r = rt;
    norm = r.norm();
  }
  rep.residual = norm;
  rep.converged = norm <= tol;
  if (!rep.converged) {
    throw Error(ErrorKind::NewtonDiverged, "residual " + std::to_string(norm) + " after " +
                                               std::to_string(rep.iterations) + " iterations");
  }
  return NewtonResult{LegendreFunction(unflatten(c, N), p.domain), rep};
}

Eigen::MatrixXd sine_mode(int N, const Rectangle& domain) {
  // s_n = int_0^1 sin(pi x) phi_n(x) dx; the load of -Laplace(sine) is lambda_1 * area * s_k s_l.
  const QuadratureRule& rule = gauss_rule(64);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(N);
  for (int a = 0; a < rule.order; ++a) {
    const double x = rule.nodes[a].mid();
    s += rule.weights[a].mid() * std::sin(std::numbers::pi * x) * phi_values(x, N);
  }
  const double a = domain.x1 - domain.x0, b = domain.y1 - domain.y0;
  const double lam1 = std::numbers::pi * std::numbers::pi * (1 / (a * a) + 1 / (b * b));
  const Eigen::VectorXd rhs = lam1 * a * b * flatten(s * s.transpose());
  return unflatten(stiffness_matrix(N, domain).ldlt().solve(rhs), N);
}

Eigen::MatrixXd initial_guess(const ProblemSpec& p, int N, std::optional<double> amplitude) {
  const Eigen::MatrixXd g = sine_mode(N, p.domain);
  if (amplitude) return *amplitude * g;
  const GalerkinSystem sys(p, N);
  const Eigen::VectorXd gv = flatten(g);
  auto h = [&](double a) { return sys.scalar_balance(a, gv); };
  double prev_a = 1e-3, prev_h = h(prev_a);
  for (double a = prev_a * 1.25; a <= 1e4; a *= 1.25) {
    const double ha = h(a);
    if ((prev_h < 0) != (ha < 0)) {
      double lo = prev_a, hi = a, hlo = prev_h;
      for (int k = 0; k < 100; ++k) {
        const double m = 0.5 * (lo + hi);
        const double hm = h(m);
        if ((hm < 0) == (hlo < 0)) {
          lo = m;
          hlo = hm;
        } else {
          hi = m;
        }
      }
      return 0.5 * (lo + hi) * g;
    }
    prev_a = a;
    prev_h = ha;
  }
  return g;
}

NewtonResult solve(const ProblemSpec& p, int N, const SolveOptions& opt) {
  try {
    return newton_solve(p, initial_guess(p, N, opt.amplitude), opt.tol,
                        p.epsilon ? std::min(opt.max_iter, 20) : opt.max_iter);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NewtonDiverged || !p.epsilon) throw;
  }
  auto with_eps = [&](double eps) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", eps);
    return ProblemSpec::allen_cahn(buf, p.domain);
  };
  const double target = p.epsilon->mid();
  double eps = std::max(2 * target, 0.1);
  std::optional<NewtonResult> cur;
  while (!cur) {
    try {
      const ProblemSpec q = with_eps(eps);
      cur = newton_solve(q, initial_guess(q, N, opt.amplitude), opt.tol, opt.max_iter);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NewtonDiverged || eps > 10) throw;
      eps *= 2;
    }
  }
  double factor = 0.8;
  while (eps > target) {
    const double next = std::max(target, eps * factor);
    const ProblemSpec q = next == target ? p : with_eps(next);
    try {
      cur = newton_solve(q, cur->u.coeffs(), opt.tol, opt.max_iter);
      eps = next;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NewtonDiverged || factor > 0.99) throw;
      factor = std::sqrt(factor);
    }
  }
  return *cur;
}

}  // namespace ellipcert
