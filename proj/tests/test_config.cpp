#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "ellipcert/config.hpp"
#include "ellipcert/error.hpp"

using namespace ellipcert;

namespace {

ErrorKind parse_kind(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

const char* kEmden = R"(# Emden p = 3
[problem]
lambda = 0
a3 = 1
domain = 0 1 0 1

[solver]
N = 40
tol = 1e-12

[rigor]
depth = 7

[output]
approx = emden3.approx
certificate = emden3.json
)";

}  // namespace

TEST_CASE("config parses problems and pipeline settings") {
  const RunConfig c = parse_config(kEmden);
  CHECK(c.N == 40);
  CHECK(c.depth == 7);
  CHECK(c.approx_path == "emden3.approx");
  const ProblemSpec p = c.problem();
  CHECK(p.lambda == Interval(0.0));
  REQUIRE(p.terms.size() == 1);
  CHECK(p.terms[0].exponent == 3);
  CHECK(p.terms[0].a == Interval(1.0));
  CHECK(p.digest() == ProblemSpec::emden(3).digest());

  const RunConfig ac = parse_config(
      "[problem]\nepsilon = 0.1\n[solver]\nN = 24\n[rigor]\nmu1 = true\nstrategy = theorem2\n");
  CHECK(ac.problem().digest() == ProblemSpec::allen_cahn("0.1").digest());
  CHECK(ac.pipeline().always_mu1);
  CHECK(ac.pipeline().strategy_override == Strategy::theorem2);

  // Inexact decimals are enclosed outward.
  const RunConfig tenth = parse_config("[problem]\nlambda = 0.1\na3 = -2.5\n");
  CHECK(tenth.problem().lambda.contains(0.1));
  CHECK_FALSE(tenth.problem().lambda.is_point());

  const RunConfig sup = parse_config(
      "[problem]\nlambda = 30\na3 = 1\na5 = -1\n[rigor]\nr_inf = 1e-6\n"
      "superset = 0 0.25 0 0.25; 0.5 0.75 0.5 0.75\nC8 = 0.5\nCN = 0.01\n");
  const PipelineConfig pc = sup.pipeline();
  CHECK(pc.superset.rectangles.size() == 2);
  CHECK(pc.r_inf->contains(1e-6));
  CHECK(pc.supplied_embeddings.at(8).contains(0.5));
  CHECK(pc.supplied_projection->contains(0.01));
}

TEST_CASE("config rejects invalid input with ParseError") {
  CHECK(parse_kind("[problem]\na3 = 1\n[solver]\nN = 0\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\n[rigor]\ndepth = 13\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\n[rigor]\nmax_depth = 13\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\nlambda = 0  # inline comments are not stripped\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\n[solver]\nN = forty\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\nfoo = 2\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\n[bogus]\nx = 1\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\nlambda = 1\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\nepsilon = 0.1\na3 = 1\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\ndomain = 0 0.1 0 1\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\ndomain = 0 1 0\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1x\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na1 = 1\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\n[rigor]\nstrategy = magic\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[problem]\na3 = 1\n[rigor]\nframe_width = 0.1\nsuperset = 0 1 0 1\n") ==
        ErrorKind::ParseError);
  CHECK(parse_kind("a3 = 1\n") == ErrorKind::ParseError);
}

TEST_CASE("config round trip is idempotent") {
  const char* texts[] = {
      kEmden,
      "[problem]\nepsilon = 0.025\ndomain = 0 2 0 1\n[solver]\nN = 60\namplitude = 0.9\n",
      "[problem]\nlambda = 30\na3 = 1\na5 = -1\n[rigor]\nr_inf = 1e-6\nframe_width = 0.0625\n"
      "C8 = 0.5\n[output]\nflags = f.csv\nplot_resolution = 33\n",
      "[problem]\nlambda = 1\na3 = 1\n[rigor]\nsuperset = 0 0.25 0 0.25; 0.5 0.75 0.5 0.75\n"
      "strategy = corollaryA1\nmu1 = true\nCN = 0.01\n",
  };
  for (const char* t : texts) {
    const RunConfig a = parse_config(t);
    const std::string s1 = serialize_config(a);
    const RunConfig b = parse_config(s1);
    CHECK(a == b);
    CHECK(serialize_config(b) == s1);
  }
}

TEST_CASE("approximation files round-trip bit-exactly") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int t = 0; t < 20; ++t) {
    const int N = 1 + t % 9;
    Eigen::MatrixXd c(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double v;
        do v = std::bit_cast<double>(bits(rng));
        while (!std::isfinite(v));
        c(i, j) = v;
      }
    const LegendreFunction u(c, Rectangle{-0.5, 1.0 / 3.0, 0.0, 2.0});
    std::stringstream ss;
    write_approximation(ss, u, "digest text");
    const StoredApproximation back = read_approximation(ss);
    CHECK(back.digest == "digest text");
    CHECK(back.u.domain() == u.domain());
    REQUIRE(back.u.N() == N);
    CHECK(std::memcmp(back.u.coeffs().data(), c.data(), sizeof(double) * N * N) == 0);
  }
}

TEST_CASE("approximation file errors") {
  auto kind = [](const std::string& s) {
    std::stringstream ss(s);
    try {
      read_approximation(ss);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  CHECK(kind("not a file\n") == ErrorKind::ParseError);
  std::stringstream ok;
  write_approximation(ok, LegendreFunction(Eigen::MatrixXd::Ones(3, 3)), "x");
  std::string full = ok.str();
  CHECK(kind(full.substr(0, full.size() - 3)) == ErrorKind::ParseError);
  CHECK(kind(full) == ErrorKind::InvalidArgument);  // well formed
}
