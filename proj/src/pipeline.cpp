#include "ellipcert/pipeline.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <type_traits>

#include <json.hpp>

#include "ellipcert/eigen_bounds.hpp"
#include "ellipcert/rigor_norms.hpp"

namespace ellipcert {

namespace {

using json = nlohmann::ordered_json;

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void fnv(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void record_failure(Certificate& c, const char* stage, const Error& e) {
  c.failed_stage = stage;
  c.error = e.kind();
  c.error_message = e.what();
}

json interval_json(const Interval& x) {
  return json{{"lo", to_decimal_lower(x, 17)}, {"hi", to_decimal_upper(x, 17)}};
}

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (!v) return;
  if constexpr (std::is_same_v<T, Interval>) j[key] = interval_json(*v);
  else j[key] = *v;
}

json norms_json(const std::map<int, Interval>& m) {
  json j = json::object();
  for (const auto& [i, v] : m) j["L" + std::to_string(i + 1)] = interval_json(v);
  return j;
}

}  // namespace

std::string approximation_digest(const LegendreFunction& u) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int32_t N = u.N();
  fnv(h, &N, sizeof N);
  const Rectangle& d = u.domain();
  const double box[4] = {d.x0, d.x1, d.y0, d.y1};
  fnv(h, box, sizeof box);
  const Eigen::MatrixXd& c = u.coeffs();
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) {
      const double v = c(i, j);
      fnv(h, &v, sizeof v);
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Certificate run_pipeline(const ProblemSpec& p, const PipelineConfig& cfg) {
  p.validate();
  if (cfg.N < 2) throw Error(ErrorKind::InvalidArgument, "N must be >= 2");
  if (cfg.depth < 1 || cfg.depth > 12 || cfg.max_depth < cfg.depth)
    throw Error(ErrorKind::InvalidArgument, "depth must lie in [1, 12] and not exceed max_depth");

  Certificate c;
  c.problem = p;
  c.N = cfg.N;
  Stopwatch clock;

  ConstantsRegistry reg(p.domain);
  for (const auto& [q, v] : cfg.supplied_embeddings) reg.supply_embedding(q, v);
  if (cfg.supplied_projection) reg.supply_projection(*cfg.supplied_projection);
  try {
    c.constants = reg.report(cfg.N);
  } catch (const Error& e) {
    record_failure(c, "constants", e);
    return c;
  }

  StrategyPlan plan;
  try {
    plan = select_strategy(p, reg);
  } catch (const Error& e) {
    record_failure(c, "strategy", e);
    return c;
  }
  c.strategy_cell = plan.cell;
  if (plan.no_positive_solution && !cfg.strategy_override) {
    c.verdict = Verdict::no_positive_solution;
    c.notes.push_back(
        "sign class '" + plan.cell +
        "' admits no positive solution: testing the equation with the first Dirichlet "
        "eigenfunction gives (lambda_1 - lambda) (u, phi_1) = sum a_i (u^i, phi_1) with "
        "incompatible signs; nothing was computed");
    return c;
  }
  if (cfg.strategy_override) c.strategy = *cfg.strategy_override;
  else if (!plan.strategies.empty()) c.strategy = plan.strategies.front();

  // Approximate solution.
  std::optional<LegendreFunction> u;
  try {
    if (cfg.approximation) {
      if (cfg.approximation->N() != cfg.N || !(cfg.approximation->domain() == p.domain))
        throw Error(ErrorKind::InvalidArgument, "approximation does not match N or the domain");
      u = *cfg.approximation;
    } else {
      u = solve(p, cfg.N, cfg.solver).u;
    }
  } catch (const Error& e) {
    record_failure(c, "solve", e);
    return c;
  }
  c.approximation_digest = approximation_digest(*u);
  c.timings.emplace_back("solve", clock.lap());

  const Interval c2 = reg.c2().value;
  try {
    c.residual_l2 = residual_l2(*u, p);
    c.residual_dual = c2 * *c.residual_l2;
  } catch (const Error& e) {
    record_failure(c, "residual", e);
    return c;
  }
  c.timings.emplace_back("residual", clock.lap());

  try {
    c.term_norms = term_norms(*u, p, cfg.depth);
    c.grad_norm = h10_norm(*u);
  } catch (const Error& e) {
    record_failure(c, "norms", e);
    return c;
  }
  c.timings.emplace_back("norms", clock.lap());

  std::optional<SpectralContext> ctx;
  try {
    ctx.emplace(*u, p, reg.projection(cfg.N), cfg.depth);
    const InverseNormBound inv = inverse_norm_bound(*ctx);
    c.inverse_norm = inv.value;
    c.morse_index = inv.negative_count;
  } catch (const Error& e) {
    record_failure(c, "inverse-norm", e);
    return c;
  }
  c.timings.emplace_back("inverse-norm", clock.lap());

  try {
    c.alpha = compute_alpha(*c.inverse_norm, c2, *c.residual_l2);
    c.radius = Interval(domain_radius(*c.alpha));
    c.lipschitz = lipschitz_bound(p, c.term_norms, reg, *c.radius);
    c.beta = *c.inverse_norm * *c.lipschitz;
    c.notes.push_back(p.terms.size() > 1
                          ? "Lipschitz bound is the term-wise sum of single-term bounds"
                          : "Lipschitz bound from the single-term estimate");
    const Kantorovich k = newton_kantorovich(*c.alpha, *c.beta);
    c.rho = k.rho;
    c.alpha_beta = k.alpha_beta;
    c.unique_radius = k.unique_radius;
  } catch (const Error& e) {
    record_failure(c, "kantorovich", e);
    return c;
  }
  c.timings.emplace_back("kantorovich", clock.lap());
  c.verdict = Verdict::existence_only;

  const bool needs_mu1 = c.strategy == Strategy::theorem2 || cfg.always_mu1;
  if (needs_mu1) {
    try {
      const Mu1Bound m = mu1_lower_bound(*ctx);
      c.mu1_lower = m.lower;
      c.mu1_ritz = m.ritz;
    } catch (const Error& e) {
      record_failure(c, "mu1", e);
      return c;
    }
    c.timings.emplace_back("mu1", clock.lap());
  }
  ctx.reset();

  if (!c.strategy) return c;
  const double grad_lo = c.grad_norm->lo();
  try {
    switch (*c.strategy) {
      case Strategy::theorem1:
        c.negative_norms = negative_term_norms(*u, p, cfg.depth);
        c.check = check_theorem1(p, c.negative_norms, *c.rho, reg, reg.lambda1().value, grad_lo);
        break;
      case Strategy::theorem2: {
        const AdaptiveH10 neg =
            negative_part_h10_adaptive(*u, cfg.depth, cfg.max_depth, c.rho->hi());
        c.negative_h10 = neg.bound;
        const CellFlagGrid grid = build_flag_grid(*u, Interval(0.0), cfg.depth);
        Theorem2Inputs in;
        in.mu1_lower = *c.mu1_lower;
        in.negative_h10 = neg.bound;
        in.has_positive_cell = grid.count(CellFlag::provably_positive) > 0;
        in.grad_norm_lower = grad_lo;
        c.check = check_theorem2(p, in, *c.rho);
        break;
      }
      case Strategy::corollaryA1: {
        if (!cfg.r_inf)
          throw Error(ErrorKind::StrategyInapplicable,
                      "corollaryA1 needs an external L-infinity error bound r_inf");
        c.negative_norms = negative_term_norms(*u, p, cfg.depth);
        const CellFlagGrid grid = build_flag_grid(*u, *cfg.r_inf, cfg.depth);
        c.check = check_corollary_a1(p, grid, cfg.superset, c.negative_norms, *c.rho, reg, grad_lo);
        break;
      }
    }
  } catch (const Error& e) {
    record_failure(c, "positivity", e);
    c.timings.emplace_back("positivity", clock.lap());
    return c;
  }
  c.timings.emplace_back("positivity", clock.lap());
  c.verdict = c.check->verdict;
  if (c.check->failure) {
    c.failed_stage = "positivity";
    c.error = c.check->failure;
    c.error_message = c.check->notes.empty() ? "" : c.check->notes.front();
  }
  for (const auto& n : c.check->notes) c.notes.push_back(n);
  return c;
}

std::string to_json(const Certificate& c, int indent) {
  json j;
  j["schema_version"] = Certificate::schema_version;

  json prob;
  prob["digest"] = c.problem.digest();
  prob["lambda"] = interval_json(c.problem.lambda);
  json terms = json::array();
  for (const Term& t : c.problem.terms)
    terms.push_back(json{{"exponent", t.exponent}, {"a", interval_json(t.a)}});
  prob["terms"] = terms;
  const Rectangle& d = c.problem.domain;
  prob["domain"] = json::array({d.x0, d.x1, d.y0, d.y1});
  if (c.problem.epsilon) prob["epsilon"] = interval_json(*c.problem.epsilon);
  j["problem"] = prob;

  j["N"] = c.N;
  if (!c.approximation_digest.empty()) j["approximation_digest"] = c.approximation_digest;

  json b = json::object();
  put(b, "residual_l2", c.residual_l2);
  put(b, "residual_dual", c.residual_dual);
  put(b, "inverse_norm", c.inverse_norm);
  put(b, "morse_index", c.morse_index);
  put(b, "grad_norm", c.grad_norm);
  if (!c.term_norms.empty()) b["term_norms"] = norms_json(c.term_norms);
  put(b, "lipschitz", c.lipschitz);
  put(b, "radius", c.radius);
  put(b, "alpha", c.alpha);
  put(b, "beta", c.beta);
  put(b, "alpha_beta", c.alpha_beta);
  put(b, "rho", c.rho);
  put(b, "unique_radius", c.unique_radius);
  if (!c.negative_norms.empty()) b["negative_norms"] = norms_json(c.negative_norms);
  put(b, "negative_h10", c.negative_h10);
  put(b, "mu1_lower", c.mu1_lower);
  put(b, "mu1_ritz", c.mu1_ritz);
  j["bounds"] = b;

  j["strategy_cell"] = c.strategy_cell;
  if (c.strategy) j["strategy"] = to_string(*c.strategy);
  if (c.check) {
    json ch;
    ch["passed"] = c.check->passed;
    ch["lhs"] = interval_json(c.check->lhs);
    ch["rhs"] = interval_json(c.check->rhs);
    j["condition"] = ch;
  }
  j["verdict"] = to_string(c.verdict);
  if (!c.failed_stage.empty()) {
    json f;
    f["stage"] = c.failed_stage;
    if (c.error) f["kind"] = to_string(*c.error);
    f["message"] = c.error_message;
    j["failure"] = f;
  }
  j["notes"] = c.notes;
  json consts = json::array();
  for (const auto& [name, k] : c.constants)
    consts.push_back(json{{"name", name}, {"value", interval_json(k.value)},
                          {"provenance", k.provenance}});
  j["constants"] = consts;
  return j.dump(indent);
}

}  // namespace ellipcert
