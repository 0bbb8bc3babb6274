#pragma once

// Existence (Newton-Kantorovich) and positivity certificates for
// -Laplace(u) = f(u), u = 0 on the boundary of a rectangle.
//
// Existence: with alpha >= ||F'^{-1}|| ||F(u_hat)||_{V*}, beta >= ||F'^{-1}|| L and
// alpha beta <= 1/2 there is a solution u with ||u - u_hat||_V <= rho,
// rho = (1 - sqrt(1 - 2 alpha beta)) / beta, unique in B(u_hat, 2 alpha).
//
// Positivity, by sign class of f(t) = lambda t + sum a_i t|t|^(i-1):
//   lambda < lambda_1:            sum_{a_i>0} a_i C_{i+1}^2 (||u_hat_-||_{i+1} + C_{i+1} rho)^(i-1)
//                                   < 1 - lambda / lambda_1          (theorem1)
//   lambda >= lambda_1, a_i <= 0: mu_1(u_hat) > 0 and max(u_hat, 0) in B(u_hat, rho)
//                                   (Newton iteration keeps nonnegativity; theorem2)
//   lambda >= lambda_1, mixed:    theorem1 with lambda_1 of a superset of the set where
//                                   u_hat - r_inf is not positive (corollaryA1)
// The cells "a_i >= 0, lambda >= lambda_1" and "a_i <= 0, lambda < lambda_1" admit
// no positive solution (test the equation against the first eigenfunction).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ellipcert/eigen_bounds.hpp"
#include "ellipcert/error.hpp"
#include "ellipcert/interval.hpp"
#include "ellipcert/legendre.hpp"
#include "ellipcert/problem.hpp"
#include "ellipcert/rigor_norms.hpp"

namespace ellipcert {

struct Constant {
  Interval value;
  std::string provenance;  // pinned | scaled-pinned | closed-form | supplied
};

/// Embedding constants ||u||_{L^q} <= C_q ||grad u||_{L^2} on H^1_0 of a rectangle,
/// lambda_1 and the projection constant C_N.
class ConstantsRegistry {
 public:
  explicit ConstantsRegistry(Rectangle domain);

  const Rectangle& domain() const { return domain_; }
  /// Encloses pi^2 (1/a^2 + 1/b^2).
  Constant lambda1() const;
  /// lambda_1^{-1/2}; also the norm of L^2 -> V*.
  Constant c2() const;
  /// q = 2: c2(); q = 4, 6: pinned unit-square values, scaled for other rectangles;
  /// otherwise supplied values only. Throws ConstantUnavailable.
  Constant embedding(int q) const;
  void supply_embedding(int q, const Interval& value);

  ProjectionConstant projection(int N) const;
  void supply_projection(const Interval& value);

  /// Every available entry, in a fixed order, for reports and certificates.
  std::vector<std::pair<std::string, Constant>> report(std::optional<int> N = {}) const;

 private:
  Rectangle domain_;
  std::map<int, Interval> supplied_;
  std::optional<Interval> supplied_cn_;
};

/// Upper-bound enclosures ||u_hat||_{L^{i+1}} for every term exponent i.
std::map<int, Interval> term_norms(const LegendreFunction& u, const ProblemSpec& p, int depth = 7);
/// Upper-bound enclosures ||(u_hat)_-||_{L^{i+1}} for every term exponent i.
std::map<int, Interval> negative_term_norms(const LegendreFunction& u, const ProblemSpec& p,
                                            int depth = 7);

/// Lipschitz constant of v -> F'(v) on B(u_hat, r):
/// sum_i |a_i| i (i-1) C_{i+1}^3 (||u_hat||_{i+1} + C_{i+1} r)^(i-2).
Interval lipschitz_bound(const ProblemSpec& p, const std::map<int, Interval>& norms,
                         const ConstantsRegistry& reg, const Interval& r);

struct Kantorovich {
  Interval rho;            // error bound
  Interval unique_radius;  // 2 alpha
  Interval alpha_beta;
};

/// Throws KantorovichFail unless alpha * beta <= 1/2 is verified.
Kantorovich newton_kantorovich(const Interval& alpha, const Interval& beta);

/// alpha = ||F'^{-1}|| * C_2 * ||Laplace u_hat + f(u_hat)||_{L^2}.
Interval compute_alpha(const Interval& inverse_norm, const Interval& c2, const Interval& residual);

/// One ulp above 2 alpha: the radius of D = B(u_hat, r) used for L.
double domain_radius(const Interval& alpha);

enum class Strategy { theorem1, theorem2, corollaryA1 };
const char* to_string(Strategy s);

enum class Verdict { existence_only, nonnegative, positive, failed, no_positive_solution };
const char* to_string(Verdict v);

struct StrategyPlan {
  std::string cell;                  // sign class and lambda vs lambda_1
  std::vector<Strategy> strategies;  // applicable checkers in order
  bool no_positive_solution = false;
};

/// Throws Indeterminate when lambda vs lambda_1 or a coefficient sign cannot be decided.
StrategyPlan select_strategy(const ProblemSpec& p, const ConstantsRegistry& reg);

struct CheckResult {
  Strategy strategy = Strategy::theorem1;
  bool passed = false;
  Interval lhs;  // condition value (theorem1/A1) or ||u_hat_-||_V (theorem2)
  Interval rhs;  // 1 - lambda / lambda_1 or rho
  Verdict verdict = Verdict::existence_only;
  std::optional<ErrorKind> failure;
  std::vector<std::string> notes;
};

/// Theorem-1 inequality with a caller-supplied lower bound of lambda_1 (of the
/// domain, or of a superset of the region where u may be negative).
/// grad_norm_lower bounds ||grad u_hat|| from below; once it exceeds rho the
/// solution is nonzero and, f being polynomial, the strong maximum principle
/// upgrades nonnegative to positive.
/// Throws StrategyInapplicable unless lambda < lambda1_lower.
CheckResult check_theorem1(const ProblemSpec& p, const std::map<int, Interval>& negative_norms,
                           const Interval& rho, const ConstantsRegistry& reg,
                           const Interval& lambda1_lower, double grad_norm_lower = 0.0);

struct Theorem2Inputs {
  double mu1_lower = 0.0;
  Interval negative_h10;          // bound of ||(u_hat)_-||_V
  bool has_positive_cell = false;  // max(u_hat, 0) is not identically zero
  double grad_norm_lower = 0.0;
};

/// Failures Mu1NotPositive / Assumption4Unverified are reported in the result.
/// Positive only for f(t) = lambda (t - t^3). Throws StrategyInapplicable if
/// some a_i > 0 is possible.
CheckResult check_theorem2(const ProblemSpec& p, const Theorem2Inputs& in, const Interval& rho);

/// Superset of the region where u may be negative: closed rectangles with
/// pairwise disjoint closures, or the boundary frame of the given width.
struct Superset {
  std::vector<Rectangle> rectangles;
  std::optional<double> frame_width;
};

/// Lower bound of lambda_1 of the superset (min over rectangles; pi^2 / (4 w^2)
/// for a frame, never below lambda_1 of the domain).
Interval superset_lambda1(const Superset& s, const Rectangle& domain);

/// flags: grid of u_hat against the threshold r_inf (L-infinity error bound).
/// Throws SupersetDoesNotCover / StrategyInapplicable / InvalidArgument.
CheckResult check_corollary_a1(const ProblemSpec& p, const CellFlagGrid& flags,
                               const Superset& superset,
                               const std::map<int, Interval>& negative_norms, const Interval& rho,
                               const ConstantsRegistry& reg, double grad_norm_lower = 0.0);

}  // namespace ellipcert
