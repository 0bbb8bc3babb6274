#include "ellipcert/config.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ellipcert {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

std::string strip(std::string s) {
  auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && sp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && sp(s[i])) ++i;
  s.erase(0, i);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(strip(cur));
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) parse_fail(key + ": expected an integer, got '" + v + "'");
  return x;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x))
    parse_fail(key + ": expected a number, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  parse_fail(key + ": expected true or false");
}

// Decimal text that must enclose to a finite interval.
std::string checked_decimal(const std::string& key, const std::string& v) {
  try {
    from_decimal(v);
  } catch (const Error&) {
    parse_fail(key + ": malformed decimal '" + v + "'");
  }
  return v;
}

// Rectangle corners must be exact binary64 values so the domain is the one written.
Rectangle to_rectangle(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  std::string tok;
  std::vector<double> xs;
  while (is >> tok) {
    Interval x;
    try {
      x = from_decimal(tok);
    } catch (const Error&) {
      parse_fail(key + ": malformed number '" + tok + "'");
    }
    if (!x.is_point()) parse_fail(key + ": '" + tok + "' is not exactly representable");
    xs.push_back(x.lo());
  }
  if (xs.size() != 4) parse_fail(key + ": expected 'x0 x1 y0 y1'");
  Rectangle r{xs[0], xs[1], xs[2], xs[3]};
  try {
    r.validate();
  } catch (const Error& e) {
    parse_fail(key + ": " + e.what());
  }
  return r;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_rectangle(const Rectangle& r) {
  return fmt_double(r.x0) + " " + fmt_double(r.x1) + " " + fmt_double(r.y0) + " " +
         fmt_double(r.y1);
}

// "a3" -> 3, "C8" -> 8; 0 when the key does not have that shape.
int indexed_key(const std::string& key, char prefix) {
  if (key.size() < 2 || key.size() > 4 || key[0] != prefix) return 0;
  if (!std::all_of(key.begin() + 1, key.end(), [](unsigned char c) { return std::isdigit(c); }))
    return 0;
  return std::stoi(key.substr(1));
}

void write_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double read_le(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) parse_fail("approximation file is truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

const char* kApproxTag = "ellipcert-approximation 1";

}  // namespace

std::optional<Strategy> parse_strategy(const std::string& s) {
  if (s == "auto") return std::nullopt;
  if (s == "theorem1") return Strategy::theorem1;
  if (s == "theorem2") return Strategy::theorem2;
  if (s == "corollaryA1") return Strategy::corollaryA1;
  parse_fail("strategy must be auto, theorem1, theorem2 or corollaryA1");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    parse_fail(std::string("config: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) parse_fail("key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string v = strip(node.data());
      const std::string where = section + "." + key;
      if (section == "problem") {
        if (key == "lambda") c.lambda = checked_decimal(where, v);
        else if (key == "epsilon") c.epsilon = checked_decimal(where, v);
        else if (key == "domain") c.domain = to_rectangle(where, v);
        else if (int i = indexed_key(key, 'a'); i >= 2) c.coefficients[i] = checked_decimal(where, v);
        else parse_fail("unknown key " + where);
      } else if (section == "solver") {
        if (key == "N") c.N = to_int(where, v);
        else if (key == "tol") c.tol = to_double(where, v);
        else if (key == "max_iter") c.max_iter = to_int(where, v);
        else if (key == "amplitude") c.amplitude = to_double(where, v);
        else parse_fail("unknown key " + where);
      } else if (section == "rigor") {
        if (key == "depth") c.depth = to_int(where, v);
        else if (key == "max_depth") c.max_depth = to_int(where, v);
        else if (key == "strategy") c.strategy = parse_strategy(v);
        else if (key == "mu1") c.mu1 = to_bool(where, v);
        else if (key == "r_inf") c.r_inf = checked_decimal(where, v);
        else if (key == "frame_width") c.frame_width = to_double(where, v);
        else if (key == "superset") {
          c.superset.clear();
          for (const auto& part : split(v, ';'))
            if (!part.empty()) c.superset.push_back(to_rectangle(where, part));
        } else if (key == "CN") c.projection = checked_decimal(where, v);
        else if (int q = indexed_key(key, 'C'); q >= 2) c.embeddings[q] = checked_decimal(where, v);
        else parse_fail("unknown key " + where);
      } else if (section == "output") {
        if (key == "approx") c.approx_path = v;
        else if (key == "certificate") c.certificate_path = v;
        else if (key == "plot") c.plot_path = v;
        else if (key == "plot_resolution") c.plot_resolution = to_int(where, v);
        else if (key == "flags") c.flags_path = v;
        else parse_fail("unknown key " + where);
      } else {
        parse_fail("unknown section [" + section + "]");
      }
    }
  }
  if (c.N < 2) parse_fail("solver.N must be >= 2");
  if (c.max_iter < 1) parse_fail("solver.max_iter must be >= 1");
  if (!(c.tol > 0.0)) parse_fail("solver.tol must be positive");
  if (c.depth < 1 || c.depth > 12) parse_fail("rigor.depth must lie in [1, 12]");
  if (c.max_depth < c.depth || c.max_depth > 12)
    parse_fail("rigor.max_depth must lie in [depth, 12]");
  if (c.plot_resolution < 2) parse_fail("output.plot_resolution must be >= 2");
  if (c.epsilon && (c.lambda || !c.coefficients.empty()))
    parse_fail("problem.epsilon excludes lambda and a<i>");
  if (!c.epsilon && c.coefficients.empty()) parse_fail("problem needs epsilon or some a<i>");
  if (c.frame_width && !c.superset.empty())
    parse_fail("rigor.frame_width and rigor.superset are exclusive");
  try {
    c.problem().validate();
  } catch (const Error& e) {
    parse_fail(std::string("problem: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[problem]\n";
  if (c.epsilon) os << "epsilon = " << *c.epsilon << "\n";
  if (c.lambda) os << "lambda = " << *c.lambda << "\n";
  for (const auto& [i, v] : c.coefficients) os << "a" << i << " = " << v << "\n";
  os << "domain = " << fmt_rectangle(c.domain) << "\n";
  os << "\n[solver]\n";
  os << "N = " << c.N << "\n";
  os << "tol = " << fmt_double(c.tol) << "\n";
  os << "max_iter = " << c.max_iter << "\n";
  if (c.amplitude) os << "amplitude = " << fmt_double(*c.amplitude) << "\n";
  os << "\n[rigor]\n";
  os << "depth = " << c.depth << "\n";
  os << "max_depth = " << c.max_depth << "\n";
  os << "strategy = " << (c.strategy ? to_string(*c.strategy) : "auto") << "\n";
  os << "mu1 = " << (c.mu1 ? "true" : "false") << "\n";
  if (c.r_inf) os << "r_inf = " << *c.r_inf << "\n";
  if (c.frame_width) os << "frame_width = " << fmt_double(*c.frame_width) << "\n";
  if (!c.superset.empty()) {
    os << "superset = ";
    for (std::size_t i = 0; i < c.superset.size(); ++i)
      os << (i ? "; " : "") << fmt_rectangle(c.superset[i]);
    os << "\n";
  }
  for (const auto& [q, v] : c.embeddings) os << "C" << q << " = " << v << "\n";
  if (c.projection) os << "CN = " << *c.projection << "\n";
  os << "\n[output]\n";
  if (!c.approx_path.empty()) os << "approx = " << c.approx_path << "\n";
  if (!c.certificate_path.empty()) os << "certificate = " << c.certificate_path << "\n";
  if (!c.plot_path.empty()) os << "plot = " << c.plot_path << "\n";
  os << "plot_resolution = " << c.plot_resolution << "\n";
  if (!c.flags_path.empty()) os << "flags = " << c.flags_path << "\n";
  return os.str();
}

ProblemSpec RunConfig::problem() const {
  if (epsilon) return ProblemSpec::allen_cahn(*epsilon, domain);
  ProblemSpec p;
  p.domain = domain;
  p.lambda = lambda ? from_decimal(*lambda) : Interval(0.0);
  for (const auto& [i, v] : coefficients) p.terms.push_back(Term{from_decimal(v), i});
  return p;
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.N = N;
  p.depth = depth;
  p.max_depth = max_depth;
  p.solver.tol = tol;
  p.solver.max_iter = max_iter;
  p.solver.amplitude = amplitude;
  p.strategy_override = strategy;
  p.always_mu1 = mu1;
  if (r_inf) p.r_inf = from_decimal(*r_inf);
  p.superset.frame_width = frame_width;
  p.superset.rectangles = superset;
  for (const auto& [q, v] : embeddings) p.supplied_embeddings[q] = from_decimal(v);
  if (projection) p.supplied_projection = from_decimal(*projection);
  return p;
}

void write_approximation(std::ostream& os, const LegendreFunction& u, const std::string& digest) {
  const Rectangle& d = u.domain();
  char buf[160];
  os << kApproxTag << "\n";
  os << "N " << u.N() << "\n";
  std::snprintf(buf, sizeof buf, "domain %a %a %a %a\n", d.x0, d.x1, d.y0, d.y1);
  os << buf;
  os << "problem " << digest << "\n";
  os << "data\n";
  const Eigen::MatrixXd& c = u.coeffs();
  for (int i = 0; i < u.N(); ++i)
    for (int j = 0; j < u.N(); ++j) write_le(os, c(i, j));
}

void write_approximation(const std::string& path, const LegendreFunction& u,
                         const std::string& digest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  write_approximation(out, u, digest);
  if (!out) throw Error(ErrorKind::InvalidArgument, "write to '" + path + "' failed");
}

StoredApproximation read_approximation(std::istream& is) {
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(is, line)) parse_fail(std::string("approximation file: missing ") + what);
    return line;
  };
  if (next("format tag") != kApproxTag) parse_fail("not an approximation file");
  int N = 0;
  if (std::sscanf(next("N").c_str(), "N %d", &N) != 1 || N < 1 || N > 4096)
    parse_fail("approximation file: bad N");
  Rectangle d;
  if (std::sscanf(next("domain").c_str(), "domain %la %la %la %la", &d.x0, &d.x1, &d.y0, &d.y1) != 4)
    parse_fail("approximation file: bad domain");
  try {
    d.validate();
  } catch (const Error& e) {
    parse_fail(std::string("approximation file: ") + e.what());
  }
  next("problem");
  if (line.rfind("problem ", 0) != 0) parse_fail("approximation file: bad problem line");
  std::string digest = line.substr(8);
  if (next("data") != "data") parse_fail("approximation file: missing data marker");
  Eigen::MatrixXd c(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      c(i, j) = read_le(is);
      if (!std::isfinite(c(i, j))) parse_fail("approximation file: non-finite coefficient");
    }
  return {LegendreFunction(c, d), digest};
}

StoredApproximation read_approximation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot read approximation '" + path + "'");
  return read_approximation(in);
}

}  // namespace ellipcert
