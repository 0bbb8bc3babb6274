// ellipcert: solve, certify, plot-data, constants.
//
// Exit codes: 0 verified nonnegative/positive (or a plain success), 2 parse or
// usage error, 3 failed or existence-only, 4 no positivity strategy applies.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ellipcert/config.hpp"
#include "ellipcert/kernels.hpp"
#include "ellipcert/pipeline.hpp"
#include "ellipcert/rigor_norms.hpp"

using namespace ellipcert;

namespace {

constexpr int kOk = 0;
constexpr int kParse = 2;
constexpr int kFailed = 3;
constexpr int kInapplicable = 4;

void apply_jobs(int jobs) {
  if (jobs <= 0) {
    if (const char* env = std::getenv("ELLIPCERT_THREADS")) jobs = std::atoi(env);
  }
  if (jobs > 0) set_kernel_threads(jobs);
}

std::string up(const Interval& x) { return to_decimal_upper(x, 9); }
std::string down(const Interval& x) { return to_decimal_lower(x, 9); }

// Float samples on a uniform (res x res) grid, rows by y then x.
Eigen::MatrixXd sample(const LegendreFunction& u, int res) {
  const int N = u.N();
  Eigen::MatrixXd Phi(res, N);
  for (int i = 0; i < res; ++i) Phi.row(i) = phi_values(static_cast<double>(i) / (res - 1), N);
  return Phi * u.coeffs() * Phi.transpose();  // (ix, iy)
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

int cmd_solve(const std::string& config_path, const std::string& out_path) {
  const RunConfig rc = load_config(config_path);
  const ProblemSpec p = rc.problem();
  SolveOptions opt;
  opt.tol = rc.tol;
  opt.max_iter = rc.max_iter;
  opt.amplitude = rc.amplitude;
  std::optional<NewtonResult> solved;
  try {
    solved = solve(p, rc.N, opt);
  } catch (const Error& e) {
    std::cerr << "stage solve: " << e.what() << "\n";
    return kFailed;
  }
  const NewtonResult& r = *solved;
  const std::string path = !out_path.empty() ? out_path : rc.approx_path;
  if (!path.empty()) write_approximation(path, r.u, p.digest());

  const int res = 401;
  const Eigen::MatrixXd U = sample(r.u, res);
  Eigen::Index ix = 0, iy = 0;
  const double mx = U.maxCoeff(&ix, &iy);
  const Rectangle& d = p.domain;
  const double x = d.x0 + (d.x1 - d.x0) * ix / (res - 1);
  const double y = d.y0 + (d.y1 - d.y0) * iy / (res - 1);
  std::cout << std::setprecision(6) << "solve: N=" << rc.N << " newton_iterations=" << r.report.iterations
            << " residual=" << r.report.residual << " max u_hat ~ " << std::setprecision(5) << mx
            << " at (" << x << ", " << y << ")";
  if (!path.empty()) std::cout << " -> " << path;
  std::cout << "\n";
  return kOk;
}

void print_table(const Certificate& c) {
  auto row = [](const std::string& name, const std::string& value) {
    std::cout << "  " << std::left << std::setw(26) << name << value << "\n";
  };
  std::cout << "Verification results (upper bounds unless marked)\n";
  if (c.inverse_norm) row("||F'^-1||", up(*c.inverse_norm));
  if (c.residual_dual) row("||F(u_hat)||_{V*}", up(*c.residual_dual));
  if (c.lipschitz) row("L", up(*c.lipschitz));
  if (c.alpha) row("alpha", up(*c.alpha));
  if (c.beta) row("beta", up(*c.beta));
  if (c.rho) row("rho", up(*c.rho));
  for (const auto& [name, k] : c.constants)
    if (name != "lambda1" && name != "C2" && name != "CN") {
      const int q = std::stoi(name.substr(1));
      if (c.term_norms.count(q - 1)) row(name + " (" + k.provenance + ")", to_decimal_upper(k.value, 8));
    }
  for (const auto& [i, v] : c.negative_norms) row("||u_hat_-||_{L^" + std::to_string(i + 1) + "}", up(v));
  if (c.negative_h10) row("||u_hat_-||_V", up(*c.negative_h10));
  if (c.check && c.strategy != Strategy::theorem2) row("condition value", up(c.check->lhs));
  if (c.check && c.strategy != Strategy::theorem2) row("  must be below", down(c.check->rhs));
  if (c.mu1_lower) {
    std::ostringstream os;
    os << std::setprecision(9) << *c.mu1_lower;
    row("mu_1(u_hat) >= (lower)", os.str());
  }
  if (c.morse_index) row("Morse index", std::to_string(*c.morse_index));
  std::cout << "verdict: " << to_string(c.verdict);
  if (c.strategy) std::cout << " (" << to_string(*c.strategy) << ")";
  std::cout << "\n";
}

int cmd_certify(const std::string& config_path, const std::string& approx_path, int depth,
                const std::string& out_path) {
  const RunConfig rc = load_config(config_path);
  const ProblemSpec p = rc.problem();
  PipelineConfig pc = rc.pipeline();
  if (depth > 0) {
    if (depth > 12) throw Error(ErrorKind::ParseError, "--depth must lie in [1, 12]");
    pc.depth = depth;
    pc.max_depth = std::max(pc.max_depth, depth);
  }
  const std::string ap = !approx_path.empty() ? approx_path : rc.approx_path;
  if (!ap.empty()) {
    std::ifstream probe(ap);
    if (probe || !approx_path.empty()) {
      StoredApproximation s = read_approximation(ap);
      if (s.digest != p.digest())
        std::cerr << "warning: approximation was computed for " << s.digest << "\n";
      pc.N = s.u.N();
      pc.approximation = std::move(s.u);
    }
  }
  const Certificate c = run_pipeline(p, pc);
  print_table(c);
  for (const auto& [stage, t] : c.timings)
    std::cerr << "  time " << std::left << std::setw(14) << stage << std::fixed << std::setprecision(2)
              << t << " s\n";
  const std::string cp = !out_path.empty() ? out_path : rc.certificate_path;
  if (!cp.empty()) write_text(cp, to_json(c) + "\n");
  if (!c.failed_stage.empty())
    std::cerr << "stage " << c.failed_stage << ": " << c.error_message << "\n";

  switch (c.verdict) {
    case Verdict::positive:
    case Verdict::nonnegative: return kOk;
    case Verdict::no_positive_solution: return kInapplicable;
    default: break;
  }
  if (c.error == ErrorKind::StrategyInapplicable || c.error == ErrorKind::Indeterminate)
    return kInapplicable;
  return kFailed;
}

int cmd_plot(const std::string& approx_path, int res, const std::string& out_path, int depth,
             const std::string& flags_path, const std::string& threshold) {
  const StoredApproximation s = read_approximation(approx_path);
  const Rectangle& d = s.u.domain();
  const Eigen::MatrixXd U = sample(s.u, res);
  std::ostringstream os;
  os.precision(17);
  os << "x,y,u\n";
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix)
      os << d.x0 + (d.x1 - d.x0) * ix / (res - 1) << ',' << d.y0 + (d.y1 - d.y0) * iy / (res - 1)
         << ',' << U(ix, iy) << '\n';
  if (out_path.empty() || out_path == "-") std::cout << os.str();
  else write_text(out_path, os.str());
  if (!flags_path.empty()) {
    if (depth < 1 || depth > 12) throw Error(ErrorKind::ParseError, "--depth must lie in [1, 12]");
    const CellFlagGrid g = build_flag_grid(s.u, from_decimal(threshold), depth);
    write_text(flags_path, g.to_csv());
  }
  return kOk;
}

int cmd_constants(const std::string& config_path, const std::string& domain_text, int N) {
  Rectangle d;
  RunConfig rc;
  if (!config_path.empty()) {
    rc = load_config(config_path);
    d = rc.domain;
    if (N <= 0) N = rc.N;
  } else if (!domain_text.empty()) {
    rc = parse_config("[problem]\na3 = 1\ndomain = " + domain_text + "\n");
    d = rc.domain;
  }
  ConstantsRegistry reg(d);
  for (const auto& [q, v] : rc.embeddings) reg.supply_embedding(q, from_decimal(v));
  if (rc.projection) reg.supply_projection(from_decimal(*rc.projection));
  std::cout << "domain [" << d.x0 << ", " << d.x1 << "] x [" << d.y0 << ", " << d.y1 << "]\n";
  for (const auto& [name, k] : reg.report(N > 0 ? std::optional<int>(N) : std::nullopt))
    std::cout << "  " << std::left << std::setw(8) << name << "[" << to_decimal_lower(k.value, 12)
              << ", " << to_decimal_upper(k.value, 12) << "]  " << k.provenance << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verified existence and positivity for -Laplace(u) = f(u) on rectangles"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (default: ELLIPCERT_THREADS or all cores)");

  std::string config, approx, out, flags, domain, threshold = "0";
  int depth = 0, res = 101, N = 0;

  auto* solve_cmd = app.add_subcommand("solve", "Galerkin Newton solve; writes the approximation");
  solve_cmd->add_option("--config", config, "run configuration")->required();
  solve_cmd->add_option("--out", out, "approximation file (overrides output.approx)");

  auto* cert_cmd = app.add_subcommand("certify", "run the verification pipeline");
  cert_cmd->add_option("--config", config, "run configuration")->required();
  cert_cmd->add_option("--approx", approx, "approximation file (solved if absent)");
  cert_cmd->add_option("--depth", depth, "cell subdivision depth k (2^k cells per side)");
  cert_cmd->add_option("--out", out, "certificate JSON (overrides output.certificate)");

  auto* plot_cmd = app.add_subcommand("plot-data", "CSV samples of u_hat and optional flag grid");
  plot_cmd->add_option("--approx", approx, "approximation file")->required();
  plot_cmd->add_option("--out", out, "CSV path (default stdout)");
  plot_cmd->add_option("--resolution", res, "grid points per side")->check(CLI::Range(2, 10001));
  plot_cmd->add_option("--depth", depth, "flag grid depth k (4^k cells)");
  plot_cmd->add_option("--flags", flags, "flag grid CSV path");
  plot_cmd->add_option("--threshold", threshold, "flag threshold r_inf (decimal)");

  auto* const_cmd = app.add_subcommand("constants", "print the constants registry");
  const_cmd->add_option("--config", config, "take the domain (and supplied constants) from a config");
  const_cmd->add_option("--domain", domain, "\"x0 x1 y0 y1\" (default unit square)");
  const_cmd->add_option("--N", N, "also report the projection constant C_N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    apply_jobs(jobs);
    if (*solve_cmd) return cmd_solve(config, out);
    if (*cert_cmd) return cmd_certify(config, approx, depth, out);
    if (*plot_cmd) {
      if (!flags.empty() && depth == 0) depth = 4;
      return cmd_plot(approx, res, out, depth, flags, threshold);
    }
    if (*const_cmd) return cmd_constants(config, domain, N);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ParseError ? kParse : kFailed;
  }
  return kOk;
}
