#pragma once

// Verified spectral bounds for the linearization F'(u_hat) = -Laplace - g,
// g = f'(u_hat):
//   * a lower bound of mu_1 = inf (<F' v, v>) / ||v||^2_{L^2},
//   * an upper bound of ||F'^{-1}|| from V* to V (V = H^1_0, ||v|| = ||grad v||).
//
// Both reduce an inequality for a quadratic form on V to a matrix inequality
// on V_N. Write v = v_N + e with v_N the V-orthogonal projection. Then
// (grad e, grad phi) = 0 on V_N, ||e||_{L^2} <= C_N ||grad e||, and e is
// L^2-orthogonal to Laplace(V_N). For a weight w and any matrix Z,
//   (1-c)||grad v||^2 - (w v, v)
//     >= v_N^T [ (1-c) A - M_w - gamma R ] v_N,
//   gamma = C_N^2 / (1 - c - max(w,0) C_N^2),
//   R = Gram matrix of w v_N + Laplace(Z v_N),
// where the cross term (w v_N, e) is bounded by ||w v_N + Laplace(Z v_N)|| ||e||
// and Young's inequality absorbs ||grad e||^2.

#include <string>
#include <vector>

#include "ellipcert/interval.hpp"
#include "ellipcert/interval_matrix.hpp"
#include "ellipcert/legendre.hpp"
#include "ellipcert/problem.hpp"

namespace ellipcert {

/// Enclosures of all eigenvalues theta of B x = theta A x, ascending
/// (A symmetric positive definite, B symmetric; entries are symmetrized by
/// taking the hull of (i,j) and (j,i)). Throws NotSPD / EnclosureFail.
std::vector<Interval> verified_sym_geig(const MRMatrix& A, const MRMatrix& B);

/// Merge overlapping enclosures (sorted input) into cluster hulls.
std::vector<Interval> merge_clusters(const std::vector<Interval>& enclosures);

/// Constant with ||v - P_N v||_V <= C_N ||Laplace v||_{L^2} on V cap H^2.
struct ProjectionConstant {
  Interval value;
  std::string provenance;  // "closed-form" or "supplied"

  /// max(a,b) / (2 sqrt((N+1)(N+2))) for the tensor Legendre space on an a x b
  /// rectangle (1-D Legendre truncation bound combined across directions).
  static ProjectionConstant closed_form(int N, const Rectangle& domain);
  static ProjectionConstant supplied(const Interval& value);
};

/// Enclosure of {f'(u_hat(x)) : x in domain} from the 2^depth grid.
Interval dprime_range(const LegendreFunction& u, const ProblemSpec& p, int depth = 7);

/// Rigorous Galerkin matrices shared by the spectral bounds.
class SpectralContext {
 public:
  SpectralContext(const LegendreFunction& u, const ProblemSpec& p, ProjectionConstant cn,
                  int depth = 7);

  int N() const { return N_; }
  const MRMatrix& stiffness() const { return A_; }
  const MRMatrix& mass() const { return M_; }
  const MRMatrix& potential_mass() const { return Mg_; }  // (g phi, phi)
  const Interval& g_range() const { return g_range_; }
  const ProjectionConstant& cn() const { return cn_; }

  /// Gram matrix R of (g + t) v_N + Laplace(Z v_N) for the float least-squares Z.
  MRMatrix correction_gram(double t) const;

 private:
  int N_;
  ProjectionConstant cn_;
  Interval g_range_;
  MRMatrix A_, M_, Mg_, Mg2_, Bg_, G_;
};

struct Mu1Bound {
  double lower = 0.0;       // mu_1 >= lower (rigorous)
  double ritz = 0.0;        // float Galerkin approximation (upper estimate)
  double gamma = 0.0;       // projection-correction weight used
  int attempts = 0;
};

/// Throws EnclosureFail / NotCoercive.
Mu1Bound mu1_lower_bound(const SpectralContext& ctx);

struct InverseNormBound {
  Interval value;           // [1, 1/tau]
  double tau = 0.0;         // |nu| >= tau on the spectrum of v -> F' v relative to V
  double nu_ritz = 0.0;     // float estimate of min |nu|
  int negative_count = 0;   // verified number of nu < 0 (Morse index)
  double gamma = 0.0;
};

/// Throws PossiblySingular when no tau > 0 can be verified.
InverseNormBound inverse_norm_bound(const SpectralContext& ctx);

}  // namespace ellipcert
