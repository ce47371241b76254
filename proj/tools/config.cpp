#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "mfe/errors.hpp"

namespace mfe::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKeys{
    {"run", {"command", "output_dir", "seed"}},
    {"problem", {"variant", "lambda", "measure", "measure_param", "measure_file", "side_length", "resolution", "dealias"}},
    {"initial", {"preset", "amplitude", "scale", "sign", "center_x1", "center_x2", "max_mode", "file"}},
    {"solver",
     {"method", "tol", "max_iter", "damping", "linesearch_c", "fd_eps", "divergence_floor", "krylov_max",
      "krylov_rtol"}},
    {"continuation", {"lambdas", "lambda_start", "lambda_stop", "lambda_step"}},
    {"blowup", {"source", "scales", "radii", "threshold", "lambda_factor"}},
    {"tm", {"scales", "lambdas", "bracket", "direction", "slope_tol"}},
    {"quantize", {"support", "weights", "masses", "first_masses"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::optional<double> to_real(const std::string& text) {
  const std::string s = trim(text);
  double x = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return x;
}

template <class Int>
std::optional<Int> to_int(const std::string& text) {
  const std::string s = trim(text);
  Int x = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return x;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::vector<std::string>& violations) : tree_(tree), violations_(violations) {}

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(path(key)).has_value(); }

  std::optional<std::string> text(const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(path(key));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  double real(const std::string& key, double fallback) {
    const auto t = text(key);
    if (!t) return fallback;
    const auto x = to_real(*t);
    if (!x || !std::isfinite(*x)) {
      fail(key, "not a finite number: '" + *t + "'");
      return fallback;
    }
    return *x;
  }

  template <class Int>
  Int integer(const std::string& key, Int fallback) {
    const auto t = text(key);
    if (!t) return fallback;
    const auto x = to_int<Int>(*t);
    if (!x) {
      fail(key, "not an integer: '" + *t + "'");
      return fallback;
    }
    return *x;
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto t = text(key);
    if (!t) return fallback;
    if (*t == "true" || *t == "1" || *t == "yes") return true;
    if (*t == "false" || *t == "0" || *t == "no") return false;
    fail(key, "not a boolean: '" + *t + "'");
    return fallback;
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback) {
    const auto t = text(key);
    if (!t) return fallback;
    std::vector<double> out;
    std::stringstream ss(*t);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto x = to_real(item);
      if (!x || !std::isfinite(*x)) {
        fail(key, "not a list of finite numbers: '" + *t + "'");
        return fallback;
      }
      out.push_back(*x);
    }
    return out;
  }

  void fail(const std::string& key, const std::string& what) { violations_.push_back(key + ": " + what); }

 private:
  static pt::ptree::path_type path(const std::string& key) { return pt::ptree::path_type(key, '.'); }

  const pt::ptree& tree_;
  std::vector<std::string>& violations_;
};

bool increasing_positive(const std::vector<double>& xs) {
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!(xs[k] > 0.0) || (k > 0 && !(xs[k] > xs[k - 1]))) return false;
  }
  return true;
}

std::optional<IntensityMeasure> read_measure(Reader& r, const std::filesystem::path& base) {
  const std::string name = r.text("problem.measure").value_or("dirac_one");
  if (name == "dirac_one") return IntensityMeasure::dirac_one();
  if (name == "two_mass") {
    if (!r.has("problem.measure_param")) {
      r.fail("problem.measure_param", "two_mass needs t");
      return std::nullopt;
    }
    const double t = r.real("problem.measure_param", 0.5);
    if (!(t >= 0.0 && t <= 1.0)) {
      r.fail("problem.measure_param", "t ∉ [0,1]");
      return std::nullopt;
    }
    return IntensityMeasure::two_mass(t);
  }
  if (name == "uniform_quadrature") {
    const int n = r.integer<int>("problem.measure_param", 0);
    if (n < 1) {
      r.fail("problem.measure_param", "uniform_quadrature needs an integer n >= 1");
      return std::nullopt;
    }
    return IntensityMeasure::uniform_quadrature(n);
  }
  if (name == "file") {
    const auto file = r.text("problem.measure_file");
    if (!file) {
      r.fail("problem.measure_file", "measure = file needs measure_file");
      return std::nullopt;
    }
    std::ifstream in(base / *file);
    if (!in) {
      r.fail("problem.measure_file", "cannot open '" + *file + "'");
      return std::nullopt;
    }
    try {
      return IntensityMeasure::parse(in);
    } catch (const Error& e) {
      r.fail("problem.measure_file", e.what());
      return std::nullopt;
    }
  }
  r.fail("problem.measure", "unknown measure preset '" + name + "'");
  return std::nullopt;
}

void read_problem(Reader& r, RunConfig& c, const std::filesystem::path& base) {
  Variant variant = Variant::SawadaSuzuki;
  if (const auto v = r.text("problem.variant")) {
    try {
      variant = parse_variant(*v);
    } catch (const Error&) {
      r.fail("problem.variant", "unknown variant '" + *v + "'");
    }
  }
  bool ok = true;
  if (!r.has("problem.lambda")) {
    r.fail("problem.lambda", "missing");
    ok = false;
  }
  const double lambda = r.real("problem.lambda", 1.0);
  if (!(lambda > 0.0)) {
    r.fail("problem.lambda", "lambda must be positive");
    ok = false;
  }
  const double side = r.real("problem.side_length", 2.0 * std::numbers::pi);
  if (!(side > 0.0)) {
    r.fail("problem.side_length", "side length must be positive");
    ok = false;
  }
  const int n = r.integer<int>("problem.resolution", 64);
  if (n % 2 != 0) {
    r.fail("problem.resolution", "resolution must be even");
    ok = false;
  } else if (n < 8) {
    r.fail("problem.resolution", "resolution must be >= 8");
    ok = false;
  }
  const bool dealias = r.boolean("problem.dealias", false);
  const auto measure = read_measure(r, base);
  if (ok && measure) c.problem = ProblemSpec{variant, lambda, *measure, TorusGrid(side, n), dealias};
}

void read_initial(Reader& r, RunConfig& c) {
  auto& in = c.initial;
  in.preset = r.text("initial.preset").value_or("zero");
  if (in.preset != "zero" && in.preset != "cos" && in.preset != "bubble" && in.preset != "random" &&
      in.preset != "file") {
    r.fail("initial.preset", "unknown preset '" + in.preset + "'");
  }
  in.amplitude = r.real("initial.amplitude", in.preset == "random" ? 0.1 : 1.0);
  in.scale = r.real("initial.scale", 10.0);
  if (!(in.scale > 0.0)) r.fail("initial.scale", "bubble scale must be positive");
  const std::string sign = r.text("initial.sign").value_or("+");
  if (sign == "+" || sign == "plus") {
    in.sign = Side::Plus;
  } else if (sign == "-" || sign == "minus") {
    in.sign = Side::Minus;
  } else {
    r.fail("initial.sign", "sign must be + or -");
  }
  if (r.has("initial.center_x1") != r.has("initial.center_x2")) {
    r.fail("initial.center_x1", "give both center_x1 and center_x2 or neither");
  } else if (r.has("initial.center_x1")) {
    in.center = Point{r.real("initial.center_x1", 0.0), r.real("initial.center_x2", 0.0)};
  }
  in.max_mode = r.integer<int>("initial.max_mode", 4);
  if (in.max_mode < 1) r.fail("initial.max_mode", "max_mode must be >= 1");
  if (c.problem && in.max_mode >= c.problem->grid.resolution() / 2) {
    r.fail("initial.max_mode", "max_mode must be below resolution / 2");
  }
  in.file = r.text("initial.file").value_or("");
  if (in.preset == "file" && in.file.empty()) r.fail("initial.file", "preset = file needs a file");
}

void read_solver(Reader& r, RunConfig& c) {
  c.method = r.text("solver.method").value_or(c.command == "minimize" ? "minimize" : "newton");
  if (c.method != "newton" && c.method != "minimize") r.fail("solver.method", "method must be newton or minimize");
  // each option is checked on its own so every bad field is reported
  auto check = [&](const std::string& key, auto setter) {
    SolverOptions probe;
    setter(probe);
    try {
      probe.validate();
      setter(c.solver);
    } catch (const Error& e) {
      r.fail(key, e.what());
    }
  };
  const SolverOptions d;
  check("solver.tol", [v = r.real("solver.tol", d.tol)](SolverOptions& o) { o.tol = v; });
  check("solver.max_iter", [v = r.integer<int>("solver.max_iter", d.max_iter)](SolverOptions& o) { o.max_iter = v; });
  check("solver.damping", [v = r.real("solver.damping", d.damping)](SolverOptions& o) { o.damping = v; });
  check("solver.linesearch_c",
        [v = r.real("solver.linesearch_c", d.linesearch_c)](SolverOptions& o) { o.linesearch_c = v; });
  check("solver.fd_eps", [v = r.real("solver.fd_eps", d.fd_eps)](SolverOptions& o) { o.fd_eps = v; });
  check("solver.divergence_floor",
        [v = r.real("solver.divergence_floor", d.divergence_floor)](SolverOptions& o) { o.divergence_floor = v; });
  check("solver.krylov_max",
        [v = r.integer<int>("solver.krylov_max", d.krylov_max)](SolverOptions& o) { o.krylov_max = v; });
  check("solver.krylov_rtol",
        [v = r.real("solver.krylov_rtol", d.krylov_rtol)](SolverOptions& o) { o.krylov_rtol = v; });
}

void read_lambdas(Reader& r, RunConfig& c, bool required) {
  if (r.has("continuation.lambdas")) {
    c.lambdas = r.list("continuation.lambdas", {});
  } else if (r.has("continuation.lambda_start")) {
    const double a = r.real("continuation.lambda_start", 1.0);
    const double b = r.real("continuation.lambda_stop", a);
    const double h = r.real("continuation.lambda_step", 1.0);
    if (!(h > 0.0) || b < a) {
      r.fail("continuation.lambda_step", "need lambda_step > 0 and lambda_stop >= lambda_start");
    } else {
      const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9));
      for (long k = 0; k <= count; ++k) c.lambdas.push_back(a + static_cast<double>(k) * h);
    }
  }
  if (required && c.lambdas.empty()) r.fail("continuation.lambdas", "continuation needs a nonempty lambda path");
  for (double l : c.lambdas) {
    if (!(l > 0.0)) {
      r.fail("continuation.lambdas", "every lambda must be positive");
      break;
    }
  }
}

void read_blowup(Reader& r, RunConfig& c) {
  auto& b = c.blowup;
  b.source = r.text("blowup.source").value_or(b.source);
  if (b.source != "bubble-family" && b.source != "continuation") {
    r.fail("blowup.source", "source must be bubble-family or continuation");
  }
  b.scales = r.list("blowup.scales", b.scales);
  if (b.scales.empty() || !increasing_positive(b.scales)) r.fail("blowup.scales", "scales must be positive and increasing");
  b.radii = r.list("blowup.radii", {});
  for (std::size_t k = 0; k < b.radii.size(); ++k) {
    if (!(b.radii[k] > 0.0) || (k > 0 && !(b.radii[k] < b.radii[k - 1]))) {
      r.fail("blowup.radii", "radii must be positive and decreasing");
      break;
    }
  }
  if (c.problem && !b.radii.empty() && !(b.radii.front() < c.problem->grid.side_length() / 2)) {
    r.fail("blowup.radii", "radii must be below L/2");
  }
  b.lambda_factor = r.real("blowup.lambda_factor", b.lambda_factor);
  if (!(b.lambda_factor > 0.0)) r.fail("blowup.lambda_factor", "lambda_factor must be positive");
  b.threshold = r.real("blowup.threshold", b.threshold);
  if (!(b.threshold >= 0.0)) r.fail("blowup.threshold", "threshold must be nonnegative");
  if (b.source == "continuation") read_lambdas(r, c, true);
}

void read_tm(Reader& r, RunConfig& c) {
  auto& t = c.tm;
  t.scales = r.list("tm.scales", t.scales);
  if (t.scales.size() < 2 || !increasing_positive(t.scales)) {
    r.fail("tm.scales", "need at least two positive increasing scales");
  }
  t.lambdas = r.list("tm.lambdas", {});
  for (double l : t.lambdas) {
    if (!(l > 0.0)) {
      r.fail("tm.lambdas", "every lambda must be positive");
      break;
    }
  }
  if (r.has("tm.bracket")) {
    const auto b = r.list("tm.bracket", {});
    if (b.size() != 2 || !(b[0] > 0.0) || !(b[1] > b[0])) {
      r.fail("tm.bracket", "bracket must be 'lo, hi' with 0 < lo < hi");
    } else {
      t.bracket = std::make_pair(b[0], b[1]);
    }
  }
  if (t.lambdas.empty() && !t.bracket) r.fail("tm.lambdas", "tm-sweep needs lambdas, a bracket, or both");
  t.direction = r.text("tm.direction").value_or("auto");
  if (t.direction != "auto" && t.direction != "+" && t.direction != "-") {
    r.fail("tm.direction", "direction must be auto, + or -");
  }
  t.slope_tol = r.real("tm.slope_tol", t.slope_tol);
  if (!(t.slope_tol >= 0.0)) r.fail("tm.slope_tol", "slope_tol must be nonnegative");
}

void read_quantize(Reader& r, RunConfig& c) {
  auto& q = c.quantize;
  q.support = r.list("quantize.support", {});
  q.weights = r.list("quantize.weights", {});
  q.masses = r.list("quantize.masses", {});
  q.first_masses = r.list("quantize.first_masses", {});
  if (q.support.empty()) r.fail("quantize.support", "missing");
  for (double a : q.support) {
    if (!(a >= -1.0 && a <= 1.0)) {
      r.fail("quantize.support", "alpha ∉ [-1,1]");
      break;
    }
  }
  if (q.support.size() > 2) {
    if (q.masses.size() != q.support.size()) {
      r.fail("quantize.masses", "three or more atoms: give one mass per atom (residual only)");
    }
    if (!q.weights.empty() && q.weights.size() != q.support.size()) {
      r.fail("quantize.weights", "one weight per atom");
    }
  }
  for (double m : q.masses) {
    if (!(m >= 0.0)) r.fail("quantize.masses", "masses must be nonnegative");
  }
  for (double m : q.first_masses) {
    if (!(m >= 0.0)) r.fail("quantize.first_masses", "masses must be nonnegative");
  }
}

}  // namespace

Loaded load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config is not valid INI: ") + e.what());
  }

  Loaded out;
  auto& c = out.config;
  auto& v = out.violations;
  for (const auto& [section, body] : tree) {
    const auto known = kKeys.find(section);
    if (known == kKeys.end() || body.empty()) {
      v.push_back(section + ": unknown section");
      continue;
    }
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) v.push_back(section + "." + key + ": unknown key");
      c.raw.emplace_back(section + "." + key, trim(value.data()));
    }
  }

  Reader r(tree, v);
  c.command = r.text("run.command").value_or("");
  if (c.command.empty()) {
    r.fail("run.command", "missing");
  } else if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    r.fail("run.command", "unknown command '" + c.command + "'");
  }
  if (const auto o = r.text("run.output_dir")) c.output_dir = *o;
  c.seed = r.integer<std::uint64_t>("run.seed", 0);

  const auto base = path.parent_path();
  if (c.command != "quantize") {
    read_problem(r, c, base);
    read_initial(r, c);
    if (c.initial.preset == "file") c.initial.file = (base / c.initial.file).string();
  }
  if (c.command == "solve" || c.command == "minimize" || c.command == "continue" || c.command == "blowup-scan") {
    read_solver(r, c);
  }
  if (c.command == "continue") read_lambdas(r, c, true);
  if (c.command == "blowup-scan") read_blowup(r, c);
  if (c.command == "tm-sweep") read_tm(r, c);
  if (c.command == "quantize") read_quantize(r, c);
  return out;
}

}  // namespace mfe::cli
