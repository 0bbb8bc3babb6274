#include "ellipcert/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "ellipcert/error.hpp"

namespace ellipcert {

ProblemSpec ProblemSpec::emden(int p, Rectangle domain) {
  ProblemSpec s;
  s.terms.push_back({Interval(1.0), p});
  s.domain = domain;
  s.validate();
  return s;
}

ProblemSpec ProblemSpec::allen_cahn(const std::string& eps_decimal, Rectangle domain) {
  const Interval eps = from_decimal(eps_decimal);
  if (eps.lo() <= 0.0) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  ProblemSpec s;
  s.epsilon = eps;
  s.lambda = Interval(1.0) / sqr(eps);
  s.terms.push_back({-s.lambda, 3});
  s.domain = domain;
  s.validate();
  return s;
}

void ProblemSpec::validate() const {
  domain.validate();
  if (terms.empty()) throw Error(ErrorKind::InvalidArgument, "at least one nonlinear term is required");
  std::set<int> seen;
  bool nonzero = false;
  for (const auto& t : terms) {
    if (t.exponent < 2) throw Error(ErrorKind::InvalidArgument, "exponents must be >= 2");
    if (!seen.insert(t.exponent).second) throw Error(ErrorKind::InvalidArgument, "duplicate exponent");
    if (!(t.a.lo() == 0.0 && t.a.hi() == 0.0)) nonzero = true;
  }
  if (!nonzero) throw Error(ErrorKind::InvalidArgument, "some coefficient a_i must be nonzero");
}

int ProblemSpec::max_exponent() const {
  int m = 1;
  for (const auto& t : terms) m = std::max(m, t.exponent);
  return m;
}

bool ProblemSpec::all_terms_nonnegative() const {
  return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.a.lo() >= 0.0; });
}

bool ProblemSpec::all_terms_nonpositive() const {
  return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.a.hi() <= 0.0; });
}

bool ProblemSpec::polynomial() const {
  return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.exponent % 2 == 1; });
}

double ProblemSpec::f(double t) const {
  double v = lambda.mid() * t;
  for (const auto& term : terms) v += term.a.mid() * t * std::pow(std::fabs(t), term.exponent - 1);
  return v;
}

double ProblemSpec::df(double t) const {
  double v = lambda.mid();
  for (const auto& term : terms) v += term.a.mid() * term.exponent * std::pow(std::fabs(t), term.exponent - 1);
  return v;
}

Interval ProblemSpec::f(const Interval& t) const {
  Interval v = lambda * t;
  for (const auto& term : terms) {
    const Interval p = term.exponent % 2 == 1 ? pow_int(t, term.exponent)
                                              : t * pow_int(abs(t), term.exponent - 1);
    v += term.a * p;
  }
  return v;
}

Interval ProblemSpec::df(const Interval& t) const {
  Interval v = lambda;
  for (const auto& term : terms) {
    const Interval p = term.exponent % 2 == 1 ? pow_int(t, term.exponent - 1)
                                              : pow_int(abs(t), term.exponent - 1);
    v += term.a * Interval(static_cast<double>(term.exponent)) * p;
  }
  return v;
}

std::string ProblemSpec::digest() const {
  char buf[128];
  std::string s;
  std::snprintf(buf, sizeof buf, "lambda=[%a,%a]", lambda.lo(), lambda.hi());
  s += buf;
  auto sorted = terms;
  std::sort(sorted.begin(), sorted.end(), [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
  for (const auto& t : sorted) {
    std::snprintf(buf, sizeof buf, ";a%d=[%a,%a]", t.exponent, t.a.lo(), t.a.hi());
    s += buf;
  }
  std::snprintf(buf, sizeof buf, ";domain=[%a,%a]x[%a,%a]", domain.x0, domain.x1, domain.y0, domain.y1);
  s += buf;
  return s;
}

Interval first_dirichlet_eigenvalue(const Rectangle& r) {
  const Interval pi = pi_enclosure();
  return sqr(pi) * (Interval(1.0) / sqr(r.width_x()) + Interval(1.0) / sqr(r.width_y()));
}

}  // namespace ellipcert
