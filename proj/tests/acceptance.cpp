// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
//
//   acceptance [--configs DIR] [--only 1,3,8] [--stretch] [--expect-red 3]
//
// The exit status is 0 when the set of failing criteria equals --expect-red
// (empty by default), so a criterion that is known to be red stays visible in
// the output without hiding a new regression or an unexpected recovery.

#include <CLI11.hpp>
#include <mpfr.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ellipcert/certify.hpp"
#include "ellipcert/config.hpp"
#include "ellipcert/eigen_bounds.hpp"
#include "ellipcert/kernels.hpp"
#include "ellipcert/pipeline.hpp"
#include "ellipcert/rigor_norms.hpp"
#include "rational_poly.hpp"

using namespace ellipcert;
using oracle::Rat;

namespace {

// ---------------------------------------------------------------------------
// Pinned tolerances

constexpr double kC2Width = 1e-12;
constexpr double kStiffnessWidth = 1e-12;
constexpr int kStiffnessMaxN = 20;
constexpr double kEmden3Rho = 1e-6;
constexpr double kEmden3Condition = 1e-3;
constexpr double kEmden5Rho = 2e-2;
constexpr double kAllenCahn01Mu1 = 100.0;
constexpr double kAllenCahn01Rho = 1e-7;
constexpr double kAllenCahn005Mu1 = 350.0;
constexpr int kPropertyCases = 10000;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string up(const Interval& x, int digits = 9) { return to_decimal_upper(x, digits); }

// MPFR value compared against binary64 endpoints.
bool mpfr_inside(const mpfr_t v, const Interval& x) {
  return mpfr_cmp_d(v, x.lo()) >= 0 && mpfr_cmp_d(v, x.hi()) <= 0;
}

// ---------------------------------------------------------------------------
// 1. Constants

Outcome constants() {
  const ConstantsRegistry reg(Rectangle::unit());
  mpfr_t pi2, c2;
  mpfr_inits2(256, pi2, c2, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_pi(pi2, MPFR_RNDN);
  mpfr_sqr(pi2, pi2, MPFR_RNDN);
  mpfr_mul_ui(pi2, pi2, 2, MPFR_RNDN);  // 2 pi^2
  mpfr_rec_sqrt(c2, pi2, MPFR_RNDN);
  const Constant C2 = reg.c2(), L1 = reg.lambda1();
  const bool c2_ok = mpfr_inside(c2, C2.value) && C2.value.width() < kC2Width;
  const bool l1_ok = mpfr_inside(pi2, L1.value);
  mpfr_clears(pi2, c2, static_cast<mpfr_ptr>(nullptr));

  const Constant C4 = reg.embedding(4), C6 = reg.embedding(6);
  const bool pinned = C4.value == from_decimal("0.31830989") && C6.value == from_decimal("0.39585400") &&
                      C4.provenance == "pinned" && C6.provenance == "pinned";
  std::ostringstream os;
  os << "C2 in [" << to_decimal_lower(C2.value, 13) << ", " << up(C2.value, 13) << "] width "
     << fmt("%.1e", C2.value.width()) << (c2_ok ? "" : " (BAD)") << "; lambda1 contains 2 pi^2: "
     << (l1_ok ? "yes" : "no") << "; C4 " << up(C4.value, 8) << ", C6 " << up(C6.value, 8) << " "
     << C4.provenance;
  return {c2_ok && l1_ok && pinned, os.str()};
}

// ---------------------------------------------------------------------------
// 2. Stiffness identity against exact rationals

Outcome stiffness() {
  const auto ph = oracle::bubble_family(kStiffnessMaxN);
  const auto S = stiffness_1d_diagonal(kStiffnessMaxN);
  int bad = 0;
  double widest = 0.0;
  for (int m = 0; m < kStiffnessMaxN; ++m)
    for (int n = 0; n < kStiffnessMaxN; ++n) {
      const Rat exact = oracle::integrate01(oracle::mul(oracle::derivative(ph[m]), oracle::derivative(ph[n])));
      const Rat expected = m == n ? Rat(1, 2 * (n + 1) + 1) : Rat(0, 1);
      if (!(exact == expected)) ++bad;
      if (m == n) {
        if (!oracle::encloses(S[n], exact)) ++bad;
        widest = std::max(widest, S[n].width());
      }
    }
  const bool ok = bad == 0 && widest <= kStiffnessWidth;
  return {ok, "n = 1.." + std::to_string(kStiffnessMaxN) + ", mismatches " + std::to_string(bad) +
                  ", widest enclosure " + fmt("%.1e", widest)};
}

// ---------------------------------------------------------------------------
// 3. Newton-Kantorovich replay of published (alpha, beta) -> rho

Outcome replay() {
  struct Row {
    const char* alpha;
    const char* beta;
    const char* rho;
  };
  const Row rows[] = {{"4.49954173e-8", "1.15548221", "4.63295216e-8"},
                      {"4.55317005e-3", "15.2944468", "5.47604979e-3"},
                      {"5.34945174e-5", "2.03118712e+2", "5.37883476e-5"}};
  bool all = true;
  std::ostringstream os;
  for (const Row& r : rows) {
    const Interval a = from_decimal(r.alpha), b = from_decimal(r.beta), printed = from_decimal(r.rho);
    const Kantorovich k = newton_kantorovich(Interval(a.hi()), Interval(b.hi()));
    const std::string got = up(k.rho);
    const bool bounded = k.rho.hi() <= printed.hi();
    const bool digits = from_decimal(got) == printed;
    all = all && bounded && digits;
    os << "\n      rho(" << r.alpha << ", " << r.beta << ") <= " << got << " vs printed " << r.rho
       << (digits ? "  digits match" : bounded ? "  below printed, digits differ" : "  ABOVE printed");
  }
  return {all, os.str()};
}

// ---------------------------------------------------------------------------
// 4-7. End-to-end runs from the shipped configurations

struct Run {
  Certificate cert;
  double seconds;
};

Run run_config(const std::string& path) {
  const RunConfig rc = load_config(path);
  const auto t0 = std::chrono::steady_clock::now();
  Certificate c = run_pipeline(rc.problem(), rc.pipeline());
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(c), s};
}

std::string summary(const Run& r) {
  const Certificate& c = r.cert;
  std::ostringstream os;
  os << "N=" << c.N;
  if (c.alpha_beta) os << ", alpha*beta <= " << up(*c.alpha_beta, 4);
  if (c.rho) os << ", rho <= " << up(*c.rho, 4);
  if (c.check && c.strategy != Strategy::theorem2) os << ", condition <= " << up(c.check->lhs, 4);
  if (c.mu1_lower) os << ", mu1 >= " << fmt("%.6g", *c.mu1_lower);
  if (c.negative_h10) os << ", ||u_hat_-||_V <= " << up(*c.negative_h10, 4);
  os << ", verdict " << to_string(c.verdict);
  if (!c.failed_stage.empty()) os << " (stage " << c.failed_stage << ": " << c.error_message << ")";
  os << ", " << fmt("%.0f", r.seconds) << " s";
  return os.str();
}

bool kantorovich_ok(const Certificate& c) { return c.rho && c.alpha_beta && c.alpha_beta->hi() <= 0.5; }

Outcome emden3(const std::string& dir) {
  const Run r = run_config(dir + "/emden3.toml");
  const Certificate& c = r.cert;
  const bool ok = c.N == 40 && kantorovich_ok(c) && c.rho->hi() <= kEmden3Rho && c.check &&
                  c.check->lhs.hi() <= kEmden3Condition && c.verdict == Verdict::positive;
  return {ok, summary(r)};
}

Outcome emden5(const std::string& dir) {
  const Run r = run_config(dir + "/emden5.toml");
  const Certificate& c = r.cert;
  const bool ok = kantorovich_ok(c) && c.rho->hi() <= kEmden5Rho && c.check && c.check->lhs.hi() < 1.0 &&
                  c.check->passed && c.verdict == Verdict::positive;
  return {ok, summary(r)};
}

Outcome allen_cahn_01(const std::string& dir) {
  const Run r = run_config(dir + "/allen_cahn_0.1.toml");
  const Certificate& c = r.cert;
  const bool mu1 = c.mu1_lower && *c.mu1_lower >= kAllenCahn01Mu1;
  const bool rho = kantorovich_ok(c) && c.rho->hi() <= kAllenCahn01Rho;
  const bool verdict = c.verdict == Verdict::positive || c.verdict == Verdict::nonnegative ||
                       (c.error == ErrorKind::Assumption4Unverified && c.negative_h10);
  return {c.N == 40 && mu1 && rho && verdict, summary(r)};
}

Outcome allen_cahn_005(const std::string& dir) {
  const Run r = run_config(dir + "/allen_cahn_0.05.toml");
  const Certificate& c = r.cert;
  return {c.mu1_lower && *c.mu1_lower >= kAllenCahn005Mu1, summary(r)};
}

// ---------------------------------------------------------------------------
// 8. Property suites, 10^4 randomized cases each

LegendreFunction random_function(std::mt19937_64& rng, int N, double bias) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXd c(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) c(i, j) = U(rng) / (1 + i + j);
  c(0, 0) += bias;
  return LegendreFunction(c);
}

// Dyadic random double in [-8, 8] with at most 20 significant bits.
double dyadic(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(static_cast<int>(rng() % (1 << 20)) - (1 << 19)), -16);
}

bool subset(const Interval& a, const Interval& b) { return b.lo() <= a.lo() && a.hi() <= b.hi(); }

int interval_suite(std::mt19937_64& rng) {
  int bad = 0;
  std::uniform_real_distribution<double> F(0.0, 1.0);
  for (int k = 0; k < kPropertyCases; ++k) {
    double a = dyadic(rng), b = dyadic(rng), c = dyadic(rng), d = dyadic(rng);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const Interval X(a, b), Y(c, d);
    // Sub-intervals X' in X, Y' in Y and points x in X', y in Y'.
    const double a2 = a + (b - a) * 0.25 * F(rng), b2 = b - (b - a) * 0.25 * F(rng);
    const double c2 = c + (d - c) * 0.25 * F(rng), d2 = d - (d - c) * 0.25 * F(rng);
    const Interval Xs(a2, b2), Ys(c2, d2);
    const double x = a2 + (b2 - a2) * F(rng), y = c2 + (d2 - c2) * F(rng);
    const Rat qx(x), qy(y);

    const std::vector<std::pair<std::function<Interval(const Interval&, const Interval&)>,
                                std::function<Rat(const Rat&, const Rat&)>>>
        ops = {{[](auto& u, auto& v) { return u + v; }, [](auto& u, auto& v) { return u + v; }},
               {[](auto& u, auto& v) { return u - v; }, [](auto& u, auto& v) { return u - v; }},
               {[](auto& u, auto& v) { return u * v; }, [](auto& u, auto& v) { return u * v; }}};
    for (const auto& [iop, rop] : ops) {
      if (!subset(iop(Xs, Ys), iop(X, Y))) ++bad;
      if (!oracle::encloses(iop(Xs, Ys), rop(qx, qy))) ++bad;
    }
    if (!Y.contains_zero()) {
      if (!subset(Xs / Ys, X / Y)) ++bad;
      if (!oracle::encloses(Xs / Ys, qx / qy)) ++bad;
    }
    const unsigned n = static_cast<unsigned>(rng() % 6);
    if (!subset(pow_int(Xs, n), pow_int(X, n))) ++bad;
    Rat xn(1, 1);
    for (unsigned i = 0; i < n; ++i) xn = xn * qx;
    if (!oracle::encloses(pow_int(Xs, n), xn)) ++bad;
    if (!subset(abs(Xs), abs(X)) || !subset(positive_part(Xs), positive_part(X))) ++bad;
    const Interval Ax = abs(X), Axs = abs(Xs);
    if (!subset(sqrt(Axs), sqrt(Ax))) ++bad;
    const Interval r = sqrt(Interval(std::fabs(x)));
    const Rat ax(std::fabs(x));
    if (ax < Rat(r.lo()) * Rat(r.lo()) || Rat(r.hi()) * Rat(r.hi()) < ax) ++bad;
  }
  return bad;
}

int refinement_suite(std::mt19937_64& rng) {
  int bad = 0;
  for (int k = 0; k < kPropertyCases; ++k) {
    const LegendreFunction u = random_function(rng, 3 + static_cast<int>(rng() % 3), 0.4);
    const int depth = 1 + static_cast<int>(rng() % 3);
    const int q = k % 2 ? 4 : 6;
    if (negative_part_lq(u, q, depth + 1).hi() > negative_part_lq(u, q, depth).hi()) ++bad;
    if (k % 10 == 0 && negative_part_h10(u, depth + 1).hi() > negative_part_h10(u, depth).hi()) ++bad;
  }
  return bad;
}

// (u_hat + rho w)_- <= (u_hat)_- + rho w_- at random points, ||w||_V <= 1, exact arithmetic.
int proof_inequality_suite(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> P(0.0, 1.0), R(1e-9, 1.0);
  int bad = 0, done = 0;
  const auto neg = [](const Rat& t) { return oracle::sign(t) < 0 ? Rat(0, 1) - t : Rat(0, 1); };
  while (done < kPropertyCases) {
    const LegendreFunction u = random_function(rng, 5, 0.3);
    LegendreFunction w = random_function(rng, 5, 0.0);
    w.coeffs() /= h10_norm(w).hi() * 1.0000001;
    if (h10_norm(w).hi() > 1.0) continue;
    for (int s = 0; s < 100; ++s, ++done) {
      const double x = P(rng), y = P(rng), rho = R(rng);
      const Rat uv(u.value(x, y)), wv(w.value(x, y)), r(rho);
      if (neg(uv) + r * neg(wv) < neg(uv + r * wv)) ++bad;
    }
  }
  return bad;
}

// Small dyadic entries keep the exact characteristic polynomial cheap.
Eigen::MatrixXd dyadic_symmetric(std::mt19937_64& rng, int n) {
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) b(i, j) = b(j, i) = std::ldexp(static_cast<double>(rng() % 257) - 128.0, -7);
  return b;
}

std::vector<std::vector<Rat>> exact(const Eigen::MatrixXd& m) {
  std::vector<std::vector<Rat>> r(m.rows(), std::vector<Rat>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[i][j] = Rat(m(i, j));
  return r;
}

int eigen_suite(std::mt19937_64& rng) {
  int bad = 0;
  for (int k = 0; k < kPropertyCases; ++k) {
    const int n = 1 + k % 8;
    const Eigen::MatrixXd B = dyadic_symmetric(rng, n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    if (k % 2) {
      const Eigen::MatrixXd R = dyadic_symmetric(rng, n);
      A = R * R.transpose() + A;  // exact: entries have few bits
    }
    std::vector<Interval> enc;
    try {
      enc = verified_sym_geig(MRMatrix(A), MRMatrix(B));
    } catch (const Error&) {
      continue;  // refusing is sound; containment is what is checked
    }
    const auto seq = oracle::sturm_sequence(oracle::pencil_polynomial(exact(A), exact(B)));
    int covered = 0;
    for (const auto& cl : merge_clusters(enc))
      covered += oracle::roots_in(seq, Rat(std::nextafter(cl.lo(), -1e300)), Rat(cl.hi()));
    if (covered != n) ++bad;
  }
  return bad;
}

// Enclosures over refined cells contain exact values and gradients at points of the cell.
int eval_grad_suite(std::mt19937_64& rng) {
  const int N = 5;
  const auto ph = oracle::bubble_family(N);
  std::vector<oracle::Poly> dph;
  for (const auto& p : ph) dph.push_back(oracle::derivative(p));
  std::uniform_real_distribution<double> P(0.0, 1.0);
  int bad = 0;
  for (int k = 0; k < kPropertyCases; ++k) {
    const LegendreFunction u = random_function(rng, N, 0.0);
    const int depth = static_cast<int>(rng() % 7);
    const int n = 1 << depth;
    const Box cell = grid_cell(u.domain(), depth, static_cast<int>(rng() % n), static_cast<int>(rng() % n));
    const double x = std::ldexp(std::floor(P(rng) * 1024), -10) * cell.x.width() + cell.x.lo();
    const double y = std::ldexp(std::floor(P(rng) * 1024), -10) * cell.y.width() + cell.y.lo();
    const Rat qx(x), qy(y);
    Rat v, gx, gy;
    for (int i = 0; i < N; ++i) {
      const Rat pi = oracle::evaluate(ph[i], qx), di = oracle::evaluate(dph[i], qx);
      for (int j = 0; j < N; ++j) {
        const Rat c(u.coeffs()(i, j)), pj = oracle::evaluate(ph[j], qy), dj = oracle::evaluate(dph[j], qy);
        v = v + c * pi * pj;
        gx = gx + c * di * pj;
        gy = gy + c * pi * dj;
      }
    }
    const RangeMode mode = static_cast<RangeMode>(k % 4);
    if (!oracle::encloses(eval(u, cell, mode), v)) ++bad;
    const auto g = grad(u, cell);
    if (!oracle::encloses(g[0], gx) || !oracle::encloses(g[1], gy)) ++bad;
  }
  return bad;
}

Outcome properties() {
  std::mt19937_64 rng(20261018);
  struct Suite {
    const char* name;
    int (*fn)(std::mt19937_64&);
  };
  const Suite suites[] = {{"interval containment and inclusion monotonicity", interval_suite},
                          {"negative-part refinement monotonicity", refinement_suite},
                          {"(u_hat + rho w)_- <= u_hat_- + rho w_-", proof_inequality_suite},
                          {"verified_sym_geig against exact roots, n <= 8", eigen_suite},
                          {"eval/grad containment on refined cells", eval_grad_suite}};
  bool all = true;
  std::ostringstream os;
  for (const Suite& s : suites) {
    const auto t0 = std::chrono::steady_clock::now();
    const int bad = s.fn(rng);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && bad == 0;
    os << "\n      " << s.name << ": " << bad << " violations in " << kPropertyCases << " cases ("
       << fmt("%.1f", sec) << " s)";
  }
  return {all, os.str()};
}

// ---------------------------------------------------------------------------
// 9. Negative results

Outcome negative_results() {
  ConstantsRegistry reg(Rectangle::unit());
  ProblemSpec p = ProblemSpec::emden(3);
  p.lambda = Interval(3.0) * reg.lambda1().value;
  const StrategyPlan plan = select_strategy(p, reg);
  const Certificate c = run_pipeline(p, PipelineConfig{});
  const bool nothing_computed = c.approximation_digest.empty() && c.timings.empty() && !c.residual_l2;
  const bool refused_plan = plan.no_positive_solution && plan.strategies.empty();
  const bool refused_run = c.verdict == Verdict::no_positive_solution && nothing_computed;

  int refusals = 0;
  for (const Interval& lambda : {reg.lambda1().value, Interval(reg.lambda1().value.lo(), 1e3),
                                 Interval(2.0) * reg.lambda1().value}) {
    ProblemSpec q = ProblemSpec::emden(3);
    q.lambda = lambda;
    try {
      check_theorem1(q, {{3, Interval(0.0)}}, Interval(1e-9), reg, reg.lambda1().value);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::StrategyInapplicable) ++refusals;
    }
  }
  std::ostringstream os;
  os << "lambda = 3 lambda_1, a3 = 1: cell '" << plan.cell << "', verdict " << to_string(c.verdict)
     << (nothing_computed ? ", nothing computed" : ", COMPUTED") << "; theorem1 refusals for lambda >= lambda_1: "
     << refusals << "/3";
  return {refused_plan && refused_run && refusals == 3, os.str()};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ellipcert acceptance criteria"};
  std::string configs = ELLIPCERT_CONFIG_DIR, only, expect_red;
  bool stretch = false;
  app.add_option("--configs", configs, "directory with the shipped configurations");
  app.add_option("--only", only, "comma-separated criteria to run");
  app.add_option("--expect-red", expect_red, "comma-separated criteria known to fail");
  app.add_flag("--stretch", stretch, "also run Allen-Cahn eps = 0.025 at N = 60");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected = parse_list(only), expected = parse_list(expect_red);
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "constants", constants},
      {2, "stiffness identity vs exact rationals", stiffness},
      {3, "Newton-Kantorovich replay, all printed digits", replay},
      {4, "Emden p=3, N=40", [&] { return emden3(configs); }},
      {5, "Emden p=5", [&] { return emden5(configs); }},
      {6, "Allen-Cahn eps=0.1, N=40", [&] { return allen_cahn_01(configs); }},
      {7, "Allen-Cahn eps=0.05", [&] { return allen_cahn_005(configs); }},
      {8, "property suites", properties},
      {9, "negative results", negative_results},
  };

  std::cout << "threads: " << kernel_threads() << "\n";
  std::set<int> red;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) red.insert(c.id);
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail
              << std::endl;
  }

  if (stretch) {
    try {
      const Run r = run_config(configs + "/allen_cahn_0.025.toml");
      std::cout << "INFO stretch Allen-Cahn eps=0.025: " << summary(r) << std::endl;
    } catch (const std::exception& e) {
      std::cout << "INFO stretch Allen-Cahn eps=0.025: exception: " << e.what() << std::endl;
    }
  }

  std::set<int> expected_here;
  for (int id : expected)
    if (selected.empty() || selected.count(id)) expected_here.insert(id);
  std::cout << "failing criteria:";
  for (int id : red) std::cout << " " << id;
  if (red.empty()) std::cout << " none";
  std::cout << "\n";
  if (red != expected_here) {
    std::cout << "failing set differs from the expected red set\n";
    return 1;
  }
  return 0;
}
