#include "ellipcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ellipcert/kernels.hpp"

namespace ellipcert {

using namespace rounding;

namespace {

// Upper bounds on the unit square, ||u||_{L^q} <= C_q ||grad u||.
const char* pinned_embedding(int q) {
  switch (q) {
    case 4: return "0.31830989";
    case 6: return "0.39585400";
    default: return nullptr;
  }
}

Interval require_norm(const std::map<int, Interval>& norms, int i) {
  auto it = norms.find(i);
  if (it == norms.end())
    throw Error(ErrorKind::InvalidArgument, "missing norm for exponent " + std::to_string(i));
  return it->second;
}

Interval nonneg_upper(const Interval& x) { return Interval(0.0, std::max(x.hi(), 0.0)); }

std::string decimal(const Interval& x) { return to_decimal_upper(x, 9); }

bool allen_cahn_form(const ProblemSpec& p) {
  if (p.epsilon) return true;
  return p.terms.size() == 1 && p.terms[0].exponent == 3 && p.lambda.is_point() &&
         p.terms[0].a.is_point() && p.lambda.lo() > 0.0 && p.terms[0].a.lo() == -p.lambda.lo();
}

}  // namespace

ConstantsRegistry::ConstantsRegistry(Rectangle domain) : domain_(domain) { domain_.validate(); }

Constant ConstantsRegistry::lambda1() const {
  return {first_dirichlet_eigenvalue(domain_), "closed-form"};
}

Constant ConstantsRegistry::c2() const {
  return {Interval(1.0) / sqrt(lambda1().value), "closed-form"};
}

Constant ConstantsRegistry::embedding(int q) const {
  if (auto it = supplied_.find(q); it != supplied_.end()) return {it->second, "supplied"};
  if (q == 2) return c2();
  if (const char* s = pinned_embedding(q)) {
    const Interval unit = from_decimal(s);
    if (domain_.is_unit_square()) return {unit, "pinned"};
    // Extend by zero into the square of side s = max(a, b) and rescale: the
    // Dirichlet integral is scale invariant in 2-D, ||u||_q scales by s^(2/q).
    const Interval a = domain_.width_x(), b = domain_.width_y();
    const Interval side = a.hi() >= b.hi() ? a : b;
    return {unit * root(sqr(side), static_cast<unsigned>(q)), "scaled-pinned"};
  }
  throw Error(ErrorKind::ConstantUnavailable,
              "no embedding constant C_" + std::to_string(q) + " (supply one)");
}

void ConstantsRegistry::supply_embedding(int q, const Interval& value) {
  if (q < 2 || !(value.lo() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "embedding constant needs q >= 2 and a positive value");
  supplied_[q] = value;
}

ProjectionConstant ConstantsRegistry::projection(int N) const {
  if (supplied_cn_) return ProjectionConstant::supplied(*supplied_cn_);
  return ProjectionConstant::closed_form(N, domain_);
}

void ConstantsRegistry::supply_projection(const Interval& value) {
  if (!(value.lo() > 0.0)) throw Error(ErrorKind::InvalidArgument, "C_N must be positive");
  supplied_cn_ = value;
}

std::vector<std::pair<std::string, Constant>> ConstantsRegistry::report(std::optional<int> N) const {
  std::vector<std::pair<std::string, Constant>> out;
  out.emplace_back("lambda1", lambda1());
  out.emplace_back("C2", embedding(2));
  std::vector<int> qs{4, 6};
  for (const auto& [q, v] : supplied_)
    if (std::find(qs.begin(), qs.end(), q) == qs.end() && q != 2) qs.push_back(q);
  std::sort(qs.begin(), qs.end());
  for (int q : qs) out.emplace_back("C" + std::to_string(q), embedding(q));
  if (N) {
    const ProjectionConstant cn = projection(*N);
    out.emplace_back("CN", Constant{cn.value, cn.provenance});
  }
  return out;
}

std::map<int, Interval> term_norms(const LegendreFunction& u, const ProblemSpec& p, int depth) {
  std::map<int, Interval> out;
  for (const Term& t : p.terms) out[t.exponent] = lq_norm(u, t.exponent + 1, depth);
  return out;
}

std::map<int, Interval> negative_term_norms(const LegendreFunction& u, const ProblemSpec& p,
                                            int depth) {
  std::map<int, Interval> out;
  for (const Term& t : p.terms) out[t.exponent] = negative_part_lq(u, t.exponent + 1, depth);
  return out;
}

Interval lipschitz_bound(const ProblemSpec& p, const std::map<int, Interval>& norms,
                         const ConstantsRegistry& reg, const Interval& r) {
  if (r.lo() < 0.0) throw Error(ErrorKind::InvalidArgument, "radius must be nonnegative");
  Interval L(0.0);
  for (const Term& t : p.terms) {
    const int i = t.exponent;
    const Interval C = reg.embedding(i + 1).value;
    const Interval ball = nonneg_upper(require_norm(norms, i)) + C * r;
    const Interval coef = Interval(mag(t.a)) * Interval(static_cast<double>(i) * (i - 1));
    L += coef * pow_int(C, 3) * pow_int(ball, static_cast<unsigned>(i - 2));
  }
  return L;
}

Kantorovich newton_kantorovich(const Interval& alpha, const Interval& beta) {
  if (alpha.lo() < 0.0 || !(beta.lo() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0 and beta > 0");
  const double ab_hi = mul_up(alpha.hi(), beta.hi());
  const double ab_lo = mul_down(alpha.lo(), beta.lo());
  if (!(ab_hi <= 0.5))
    throw Error(ErrorKind::KantorovichFail, "alpha * beta = " + decimal(Interval(ab_lo, ab_hi)) +
                                                " exceeds 1/2");
  // rho = 2 alpha / (1 + sqrt(1 - 2 alpha beta)), free of cancellation.
  const double den_lo = add_down(1.0, sqrt_down(sub_down(1.0, mul_up(2.0, ab_hi))));
  const double den_hi = add_up(1.0, sqrt_up(sub_up(1.0, mul_down(2.0, ab_lo))));
  const double two_a_hi = mul_up(2.0, alpha.hi());
  const double two_a_lo = mul_down(2.0, alpha.lo());
  Kantorovich k;
  k.rho = Interval(div_down(two_a_lo, den_hi), div_up(two_a_hi, den_lo));
  k.unique_radius = Interval(two_a_lo, two_a_hi);
  k.alpha_beta = Interval(ab_lo, ab_hi);
  return k;
}

Interval compute_alpha(const Interval& inverse_norm, const Interval& c2, const Interval& residual) {
  return inverse_norm * c2 * residual;
}

double domain_radius(const Interval& alpha) { return next_up(mul_up(2.0, alpha.hi())); }

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::theorem1: return "theorem1";
    case Strategy::theorem2: return "theorem2";
    case Strategy::corollaryA1: return "corollaryA1";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::existence_only: return "existence-only";
    case Verdict::nonnegative: return "nonnegative";
    case Verdict::positive: return "positive";
    case Verdict::failed: return "failed";
    case Verdict::no_positive_solution: return "no-positive-solution";
  }
  return "?";
}

StrategyPlan select_strategy(const ProblemSpec& p, const ConstantsRegistry& reg) {
  const Interval l1 = reg.lambda1().value;
  const bool below = p.lambda.hi() < l1.lo();
  const bool above = p.lambda.lo() > l1.hi();
  if (!below && !above)
    throw Error(ErrorKind::Indeterminate, "lambda cannot be separated from lambda_1 = " +
                                              decimal(l1));
  const bool nonneg = p.all_terms_nonnegative();
  const bool nonpos = p.all_terms_nonpositive();
  const bool some_pos = std::any_of(p.terms.begin(), p.terms.end(),
                                    [](const Term& t) { return t.a.lo() > 0.0; });
  const bool some_neg = std::any_of(p.terms.begin(), p.terms.end(),
                                    [](const Term& t) { return t.a.hi() < 0.0; });
  const bool mixed = some_pos && some_neg;
  const char* side = below ? "lambda < lambda_1" : "lambda > lambda_1";

  StrategyPlan plan;
  if (nonneg && !nonpos) {
    plan.cell = std::string("a_i >= 0, ") + side;
    if (below) plan.strategies = {Strategy::theorem1};
    else plan.no_positive_solution = true;
  } else if (nonpos && !nonneg) {
    plan.cell = std::string("a_i <= 0, ") + side;
    if (below) plan.no_positive_solution = true;
    else plan.strategies = {Strategy::theorem2};
  } else if (mixed) {
    plan.cell = std::string("mixed signs, ") + side;
    plan.strategies = {below ? Strategy::theorem1 : Strategy::corollaryA1};
  } else if (below && some_pos) {
    // Undecided signs, but both candidate cells (a_i >= 0 and mixed) use theorem1.
    plan.cell = std::string("a_i >= 0 or mixed signs, ") + side;
    plan.strategies = {Strategy::theorem1};
  } else {
    throw Error(ErrorKind::Indeterminate, "coefficient signs cannot be decided");
  }
  return plan;
}

CheckResult check_theorem1(const ProblemSpec& p, const std::map<int, Interval>& negative_norms,
                           const Interval& rho, const ConstantsRegistry& reg,
                           const Interval& lambda1_lower, double grad_norm_lower) {
  if (!(p.lambda.hi() < lambda1_lower.lo()))
    throw Error(ErrorKind::StrategyInapplicable,
                "requires lambda < lambda_1 (lambda_1 >= " + to_decimal_lower(lambda1_lower, 9) + ")");
  CheckResult res;
  res.strategy = Strategy::theorem1;
  // Terms with a_i <= 0 only help and are dropped.
  Interval lhs(0.0);
  for (const Term& t : p.terms) {
    if (!(t.a.hi() > 0.0)) continue;
    const int i = t.exponent;
    const Interval C = reg.embedding(i + 1).value;
    const Interval base = nonneg_upper(require_norm(negative_norms, i)) + C * nonneg_upper(rho);
    lhs += Interval(t.a.hi()) * sqr(C) * pow_int(base, static_cast<unsigned>(i - 1));
  }
  res.lhs = lhs;
  // Lower bound of 1 - lambda / lambda_1; for lambda <= 0 it is at least 1.
  if (p.lambda.hi() > 0.0)
    res.rhs = Interval(1.0) - Interval(p.lambda.hi()) / Interval(lambda1_lower.lo());
  else
    res.rhs = Interval(1.0);
  res.passed = lhs.hi() < res.rhs.lo();
  if (!res.passed) {
    res.notes.push_back("condition " + decimal(lhs) + " is not below " +
                        to_decimal_lower(res.rhs, 9));
    return res;
  }
  res.verdict = Verdict::nonnegative;
  if (p.polynomial() && grad_norm_lower > rho.hi()) {
    res.verdict = Verdict::positive;
    res.notes.push_back(
        "positivity via maximum principle: ||grad u|| >= ||grad u_hat|| - rho > 0 and f is "
        "polynomial, so u >= 0 is a nonzero classical solution of -Laplace(u) + c u >= 0");
  }
  return res;
}

CheckResult check_theorem2(const ProblemSpec& p, const Theorem2Inputs& in, const Interval& rho) {
  for (const Term& t : p.terms)
    if (t.a.hi() > 0.0)
      throw Error(ErrorKind::StrategyInapplicable,
                  "f(t) >= f'(t) t needs every a_i <= 0 (exponent " + std::to_string(t.exponent) +
                      ")");
  CheckResult res;
  res.strategy = Strategy::theorem2;
  res.lhs = in.negative_h10;
  res.rhs = rho;
  if (!(in.mu1_lower > 0.0)) {
    res.failure = ErrorKind::Mu1NotPositive;
    std::ostringstream os;
    os.precision(9);
    os << "mu_1 lower bound " << in.mu1_lower << " is not positive";
    res.notes.push_back(os.str());
    return res;
  }
  if (!in.has_positive_cell) {
    res.failure = ErrorKind::Assumption4Unverified;
    res.notes.push_back("max(u_hat, 0) is not shown to be nonzero");
    return res;
  }
  if (!(in.negative_h10.hi() < rho.hi())) {
    res.failure = ErrorKind::Assumption4Unverified;
    res.notes.push_back("||u_hat_-||_V <= " + decimal(in.negative_h10) + " is not below rho <= " +
                        decimal(rho));
    return res;
  }
  res.passed = true;
  res.verdict = Verdict::nonnegative;
  if (allen_cahn_form(p) && in.grad_norm_lower > rho.hi()) {
    res.verdict = Verdict::positive;
    res.notes.push_back(
        "positivity for f(t) = lambda (t - t^3): the nonzero nonnegative solution satisfies "
        "-Laplace(u) + c u >= 0, maximum principle");
  }
  return res;
}

Interval superset_lambda1(const Superset& s, const Rectangle& domain) {
  if (s.frame_width && !s.rectangles.empty())
    throw Error(ErrorKind::InvalidArgument, "give either rectangles or a frame width, not both");
  if (s.frame_width) {
    const double w = *s.frame_width;
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorKind::InvalidArgument, "frame width must be positive");
    // Every point of the frame lies within w of a straight Dirichlet edge; a
    // quarter-period sine in the distance to that edge gives pi^2 / (4 w^2).
    const Interval pi = pi_enclosure();
    const Interval slab = sqr(pi) / (Interval(4.0) * sqr(Interval(w)));
    return max(slab, first_dirichlet_eigenvalue(domain));
  }
  if (s.rectangles.empty()) throw Error(ErrorKind::InvalidArgument, "empty superset");
  for (std::size_t i = 0; i < s.rectangles.size(); ++i) {
    s.rectangles[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      const Rectangle& a = s.rectangles[i];
      const Rectangle& b = s.rectangles[j];
      const bool apart = a.x1 < b.x0 || b.x1 < a.x0 || a.y1 < b.y0 || b.y1 < a.y0;
      if (!apart)
        throw Error(ErrorKind::InvalidArgument, "superset rectangles must have disjoint closures");
    }
  }
  Interval out = first_dirichlet_eigenvalue(s.rectangles[0]);
  for (std::size_t i = 1; i < s.rectangles.size(); ++i)
    out = min(out, first_dirichlet_eigenvalue(s.rectangles[i]));
  return out;
}

namespace {

bool box_in_rectangle(const Box& c, const Rectangle& r) {
  return r.x0 <= c.x.lo() && c.x.hi() <= r.x1 && r.y0 <= c.y.lo() && c.y.hi() <= r.y1;
}

bool box_in_frame(const Box& c, const Rectangle& d, double w) {
  return c.x.hi() <= add_down(d.x0, w) || c.x.lo() >= sub_up(d.x1, w) ||
         c.y.hi() <= add_down(d.y0, w) || c.y.lo() >= sub_up(d.y1, w);
}

}  // namespace

CheckResult check_corollary_a1(const ProblemSpec& p, const CellFlagGrid& flags,
                               const Superset& superset,
                               const std::map<int, Interval>& negative_norms, const Interval& rho,
                               const ConstantsRegistry& reg, double grad_norm_lower) {
  if (!(flags.domain == reg.domain()))
    throw Error(ErrorKind::InvalidArgument, "flag grid and registry domains differ");
  const Interval l0 = superset_lambda1(superset, reg.domain());
  const int n = flags.n();
  std::size_t flagged = 0;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) {
      if (flags.at(ix, iy) != CellFlag::possibly_negative) continue;
      ++flagged;
      const Box cell = grid_cell(flags.domain, flags.depth, ix, iy);
      bool covered = false;
      if (superset.frame_width) covered = box_in_frame(cell, flags.domain, *superset.frame_width);
      for (const Rectangle& r : superset.rectangles) covered = covered || box_in_rectangle(cell, r);
      if (!covered) {
        std::ostringstream os;
        os << "cell (" << ix << ", " << iy << ") at depth " << flags.depth
           << " may have u <= 0 but lies outside the superset";
        throw Error(ErrorKind::SupersetDoesNotCover, os.str());
      }
    }
  if (flagged == 0) {
    CheckResult res;
    res.strategy = Strategy::corollaryA1;
    res.passed = true;
    res.verdict = Verdict::positive;
    res.notes.push_back("u_hat - r_inf > 0 on every cell, so u > 0 directly");
    return res;
  }
  CheckResult res = check_theorem1(p, negative_norms, rho, reg, l0, grad_norm_lower);
  res.strategy = Strategy::corollaryA1;
  res.notes.push_back("lambda_1 replaced by the superset bound " + to_decimal_lower(l0, 9) + " (" +
                      std::to_string(flagged) + " flagged cells)");
  return res;
}

}  // namespace ellipcert
