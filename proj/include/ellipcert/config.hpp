#pragma once

// Run configuration (sectioned key = value text) and approximation files.
//
//   [problem]  lambda, a<i> (coefficient of t|t|^(i-1)), or epsilon for
//              (t - t^3) / eps^2; domain = "x0 x1 y0 y1"
//   [solver]   N, tol, max_iter, amplitude
//   [rigor]    depth, max_depth, strategy, mu1, r_inf, frame_width,
//              superset = "x0 x1 y0 y1; ...", C<q>, CN
//   [output]   approx, certificate, plot, plot_resolution, flags
//
// Decimals feeding rigorous stages keep their text and are enclosed outward.
// Comments are whole lines starting with '#' or ';'.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ellipcert/pipeline.hpp"

namespace ellipcert {

struct RunConfig {
  // [problem]; decimal text as written
  std::optional<std::string> lambda;
  std::map<int, std::string> coefficients;
  std::optional<std::string> epsilon;
  Rectangle domain;

  // [solver]
  int N = 40;
  double tol = 1e-12;
  int max_iter = 50;
  std::optional<double> amplitude;

  // [rigor]
  int depth = 7;
  int max_depth = 10;
  std::optional<Strategy> strategy;
  bool mu1 = false;
  std::optional<std::string> r_inf;
  std::optional<double> frame_width;
  std::vector<Rectangle> superset;
  std::map<int, std::string> embeddings;
  std::optional<std::string> projection;

  // [output]
  std::string approx_path;
  std::string certificate_path;
  std::string plot_path;
  int plot_resolution = 101;
  std::string flags_path;

  ProblemSpec problem() const;
  PipelineConfig pipeline() const;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ParseError (unknown keys, malformed values, N < 2, depth outside [1, 12]).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical text; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& c);

std::optional<Strategy> parse_strategy(const std::string& s);

/// Text header (format tag, N, domain as hex floats, problem digest) followed
/// by N*N little-endian binary64 coefficients, row-major.
void write_approximation(std::ostream& os, const LegendreFunction& u, const std::string& digest);
void write_approximation(const std::string& path, const LegendreFunction& u,
                         const std::string& digest);

struct StoredApproximation {
  LegendreFunction u;
  std::string digest;
};
/// Throws ParseError on malformed or truncated files.
StoredApproximation read_approximation(std::istream& is);
StoredApproximation read_approximation(const std::string& path);

}  // namespace ellipcert
