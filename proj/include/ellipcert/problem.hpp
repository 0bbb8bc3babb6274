#pragma once

// The boundary value problem -Laplace(u) = f(u) in a rectangle, u = 0 on the
// boundary, with f(t) = lambda t + sum_i a_i t |t|^(i-1).

#include <optional>
#include <string>
#include <vector>

#include "ellipcert/interval.hpp"
#include "ellipcert/legendre.hpp"

namespace ellipcert {

struct Term {
  Interval a;    // coefficient enclosure (point unless parsed from an inexact decimal)
  int exponent;  // i >= 2
};

struct ProblemSpec {
  Interval lambda{0.0};
  std::vector<Term> terms;
  Rectangle domain;
  /// Set when built from the Allen-Cahn shortcut f(t) = (t - t^3) / eps^2.
  std::optional<Interval> epsilon;

  /// -Laplace(u) = u |u|^(p-1).
  static ProblemSpec emden(int p, Rectangle domain = Rectangle::unit());
  /// -Laplace(u) = (u - u^3) / eps^2, eps enclosed outward from its decimal text.
  static ProblemSpec allen_cahn(const std::string& eps_decimal, Rectangle domain = Rectangle::unit());

  /// Throws InvalidArgument: empty/duplicate/low exponents, all a_i zero, bad domain.
  void validate() const;

  int max_exponent() const;
  bool all_terms_nonnegative() const;  // every a_i >= 0 (certainly)
  bool all_terms_nonpositive() const;  // every a_i <= 0 (certainly)
  /// True when every exponent is odd, so f and f' are polynomials.
  bool polynomial() const;

  double f(double t) const;
  double df(double t) const;
  Interval f(const Interval& t) const;
  Interval df(const Interval& t) const;

  /// Short stable text describing the problem (used to tag stored approximations).
  std::string digest() const;
};

/// First Dirichlet eigenvalue pi^2 (1/a^2 + 1/b^2) of a rectangle, enclosed.
Interval first_dirichlet_eigenvalue(const Rectangle& r);

}  // namespace ellipcert
