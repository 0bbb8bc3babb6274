// Serial reference vs OpenMP kernels: wall time and agreement. The contract
// reference is the direct quadruple sum, so its ratio includes the algorithmic
// gain of the factored kernel as well as any thread speedup.
//
//   bench_kernels [--N 24] [--nodes 40] [--depth 8] [--reps 3] [--jobs n]

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "ellipcert/kernels.hpp"

using namespace ellipcert;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, const char* agree) {
  std::printf("%-28s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel, agree);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel benchmark"};
  int N = 24, nodes = 40, depth = 8, reps = 3, jobs = 0;
  app.add_option("--N", N, "basis size");
  app.add_option("--nodes", nodes, "quadrature nodes per direction");
  app.add_option("--depth", depth, "grid depth for range enclosures");
  app.add_option("--reps", reps, "repetitions (best time is reported)");
  app.add_option("--jobs", jobs, "OpenMP threads");
  CLI11_PARSE(app, argc, argv);
  if (jobs > 0) set_kernel_threads(jobs);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1, 1);
  auto random = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = U(rng);
    return m;
  };
  const Eigen::MatrixXd W = random(nodes, nodes), Ax = random(nodes, N), Bx = random(nodes, N),
                        Ay = random(nodes, N), By = random(nodes, N);

  std::printf("threads %d, N %d, nodes %d, depth %d\n", kernel_threads(), N, nodes, depth);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial s", "omp s", "ratio");

  Eigen::MatrixXd ms, mp;
  const double ts = best_of(reps, [&] { ms = contract_serial(W, Ax, Bx, Ay, By); });
  const double tp = best_of(reps, [&] { mp = contract(W, Ax, Bx, Ay, By); });
  char agree[64];
  std::snprintf(agree, sizeof agree, "max diff %.1e", (ms - mp).cwiseAbs().maxCoeff());
  row("contract (binary64)", ts, tp, agree);

  const int n_small = std::min(N, 10), nodes_small = std::min(nodes, 14);
  const MRMatrix iW(Eigen::MatrixXd(W.topLeftCorner(nodes_small, nodes_small))), iAx(Eigen::MatrixXd(Ax.topLeftCorner(nodes_small, n_small))),
      iBx(Eigen::MatrixXd(Bx.topLeftCorner(nodes_small, n_small))), iAy(Eigen::MatrixXd(Ay.topLeftCorner(nodes_small, n_small))),
      iBy(Eigen::MatrixXd(By.topLeftCorner(nodes_small, n_small)));
  MRMatrix is, ip;
  const double tis = best_of(reps, [&] { is = contract_serial(iW, iAx, iBx, iAy, iBy); });
  const double tip = best_of(reps, [&] { ip = contract(iW, iAx, iBx, iAy, iBy); });
  bool overlap = true;
  for (Eigen::Index i = 0; i < is.rows(); ++i)
    for (Eigen::Index j = 0; j < is.cols(); ++j) {
      const Interval a = is.at(i, j), b = ip.at(i, j);
      overlap = overlap && a.lo() <= b.hi() && b.lo() <= a.hi();
    }
  std::snprintf(agree, sizeof agree, "N=%d: enclosures %s", n_small, overlap ? "overlap" : "DISJOINT");
  row("contract (interval)", tis, tip, agree);

  Eigen::MatrixXd c = random(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) c(i, j) /= (1 + i + j) * (1 + i + j);
  const LegendreFunction u(c);
  std::vector<Interval> gs, gp;
  const double tgs = best_of(reps, [&] { gs = grid_ranges_serial(u, depth); });
  const double tgp = best_of(reps, [&] { gp = grid_ranges(u, depth); });
  std::snprintf(agree, sizeof agree, "%s", gs == gp ? "identical" : "DIFFERENT");
  row("grid_ranges", tgs, tgp, agree);
  return 0;
}
