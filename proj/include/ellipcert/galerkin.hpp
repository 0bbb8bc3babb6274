#pragma once

// Floating-point Galerkin approximation in the tensor Legendre space V_N.
// Nothing computed here is trusted by the verification stages; it only
// produces the candidate u_hat.
//
// Unknowns are flattened row-major: c(i,j) -> i*N + j.

#include <Eigen/Dense>

#include <optional>

#include "ellipcert/legendre.hpp"
#include "ellipcert/problem.hpp"

namespace ellipcert {

Eigen::VectorXd flatten(const Eigen::MatrixXd& c);
Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int N);

/// Exact stiffness (grad phi_kl, grad phi_ij) and mass (phi_kl, phi_ij) of the
/// tensor basis on the rectangle, rounded to binary64.
Eigen::MatrixXd stiffness_matrix(int N, const Rectangle& domain);
Eigen::MatrixXd mass_matrix(int N, const Rectangle& domain);

/// Per-dimension Gauss order making f(u_hat) phi exact for odd exponents.
int galerkin_quadrature_order(const ProblemSpec& p, int N);

class GalerkinSystem {
 public:
  GalerkinSystem(const ProblemSpec& p, int N);

  int N() const { return N_; }
  const Eigen::MatrixXd& stiffness() const { return A_; }
  const Eigen::MatrixXd& mass() const { return M_; }

  /// [(grad u_hat, grad phi_kl) - (f(u_hat), phi_kl)]_kl
  Eigen::VectorXd residual(const Eigen::VectorXd& c) const;
  /// Matrix of v -> (grad v, grad .) - (f'(u_hat) v, .); symmetric.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& c) const;
  /// (grad u, grad u) - (f(u), u) restricted to u = alpha * g.
  double scalar_balance(double alpha, const Eigen::VectorXd& g) const;

 private:
  Eigen::MatrixXd values_at_nodes(const Eigen::VectorXd& c) const;

  ProblemSpec problem_;
  int N_;
  Eigen::MatrixXd Phi_;    // nodes x N
  Eigen::VectorXd w_;      // node weights on (0,1)
  Eigen::MatrixXd A_, M_;
  double area_;
};

Eigen::VectorXd assemble_residual(const ProblemSpec& p, const Eigen::MatrixXd& c);
Eigen::MatrixXd assemble_jacobian(const ProblemSpec& p, const Eigen::MatrixXd& c);

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;  // Euclidean norm of the residual vector
  bool converged = false;
};

struct NewtonResult {
  LegendreFunction u;
  NewtonReport report;
};

/// Damped Newton with a residual-norm line search. Throws NewtonDiverged when
/// the tolerance is not reached within max_iter iterations.
NewtonResult newton_solve(const ProblemSpec& p, const Eigen::MatrixXd& init, double tol = 1e-12,
                          int max_iter = 50);

/// Coefficients of the H^1_0 projection of sin(pi xi) sin(pi eta).
Eigen::MatrixXd sine_mode(int N, const Rectangle& domain);
/// amplitude * sine_mode. Without an amplitude, one is chosen where the
/// scalar balance along the sine mode changes sign (1 if it never does).
Eigen::MatrixXd initial_guess(const ProblemSpec& p, int N, std::optional<double> amplitude = {});

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 50;
  std::optional<double> amplitude;
};

/// Newton from initial_guess; for problems given by an epsilon shortcut that
/// fail to converge directly, continues from epsilon = 0.1 (or the largest
/// value that converges) down to the target in geometric steps.
NewtonResult solve(const ProblemSpec& p, int N, const SolveOptions& opt = {});

}  // namespace ellipcert
