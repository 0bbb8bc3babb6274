#pragma once

// End-to-end certification: Galerkin solve, verified norms, inverse-norm bound,
// Newton-Kantorovich existence, then the positivity checker chosen by sign class.
// Every stage failure is caught and recorded; run_pipeline only throws for
// invalid configurations.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellipcert/certify.hpp"
#include "ellipcert/galerkin.hpp"

namespace ellipcert {

struct PipelineConfig {
  int N = 40;
  int depth = 7;       // cell subdivision 2^depth per side
  int max_depth = 10;  // adaptive refinement for ||u_hat_-||_V
  SolveOptions solver;
  std::optional<LegendreFunction> approximation;  // skip the solve stage
  std::optional<Strategy> strategy_override;
  bool always_mu1 = false;  // also bound mu_1 when the strategy does not need it
  std::optional<Interval> r_inf;  // external L-infinity error bound (corollaryA1)
  Superset superset;
  std::map<int, Interval> supplied_embeddings;
  std::optional<Interval> supplied_projection;
};

struct Certificate {
  static constexpr int schema_version = 1;

  ProblemSpec problem;
  int N = 0;
  std::string approximation_digest;

  std::optional<Interval> residual_l2;     // ||Laplace u_hat + f(u_hat)||_{L^2}
  std::optional<Interval> residual_dual;   // C_2 * residual_l2 >= ||F(u_hat)||_{V*}
  std::optional<Interval> inverse_norm;
  std::optional<int> morse_index;
  std::optional<Interval> alpha, beta, rho, radius, lipschitz, alpha_beta, unique_radius;
  std::optional<Interval> grad_norm;
  std::map<int, Interval> term_norms;
  std::map<int, Interval> negative_norms;
  std::optional<Interval> negative_h10;
  std::optional<double> mu1_lower, mu1_ritz;

  std::string strategy_cell;
  std::optional<Strategy> strategy;
  std::optional<CheckResult> check;
  Verdict verdict = Verdict::failed;
  std::string failed_stage;
  std::optional<ErrorKind> error;
  std::string error_message;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, Constant>> constants;

  std::vector<std::pair<std::string, double>> timings;  // seconds per stage, not serialized
};

/// Stable FNV-1a digest of N, the domain and the coefficient bytes.
std::string approximation_digest(const LegendreFunction& u);

Certificate run_pipeline(const ProblemSpec& p, const PipelineConfig& config);

/// Single JSON document; intervals as {"lo": rounded down, "hi": rounded up}.
std::string to_json(const Certificate& c, int indent = 2);

}  // namespace ellipcert
