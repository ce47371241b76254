#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "mfe/blowup.hpp"
#include "mfe/errors.hpp"
#include "mfe/field_io.hpp"
#include "mfe/random.hpp"
#include "mfe/text.hpp"
#include "mfe/tmprober.hpp"

namespace mfe::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kAnalytic = 2;

// Collects every file a run produces, in creation order.
class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw IoError("cannot write '" + (dir_ / name).string() + "'");
    body(out);
    out.flush();
    if (!out) throw IoError("write failed for '" + (dir_ / name).string() + "'");
    files_.push_back(name);
  }

  void field(const std::string& name, const Field& f) {
    save_mfe1(dir_ / name, f);
    files_.push_back(name);
  }

  void json_file(const std::string& name, const json& j) {
    text(name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string indexed(const std::string& stem, std::size_t k, const std::string& ext) {
  std::string num = std::to_string(k);
  if (num.size() < 3) num.insert(0, 3 - num.size(), '0');
  return stem + "_" + num + ext;
}

Point default_center(const TorusGrid& g) { return g.cell_center(g.resolution() / 2, g.resolution() / 2); }

void warn_resolution(const TorusGrid& g, double mu) {
  if (under_resolved(g, {default_center(g), mu, Side::Plus})) {
    std::cerr << "warning: bubble scale " << format_real(mu) << " is under-resolved at N = " << g.resolution()
              << '\n';
  }
}

Field initial_field(const RunConfig& c) {
  const auto& g = c.problem->grid;
  const auto& in = c.initial;
  if (in.preset == "zero") return Field(g);
  if (in.preset == "cos") {
    const double k = 2.0 * std::numbers::pi / g.side_length();
    return Field::from_function(g, [&](double x, double) { return in.amplitude * std::cos(k * x); });
  }
  if (in.preset == "bubble") {
    warn_resolution(g, in.scale);
    return liouville_bubble(g, {in.center.value_or(default_center(g)), in.scale, in.sign});
  }
  if (in.preset == "random") {
    Xoshiro256 rng(c.seed);
    return random_band_limited(g, rng, in.max_mode, in.amplitude);
  }
  Field f = load_mfe1(in.file);
  if (!(f.grid() == g)) throw BadParameter("initial.file: grid does not match [problem]");
  return f;
}

json solution_summary(const Solution& s) {
  return {{"lambda", s.spec.lambda},
          {"variant", to_string(s.spec.variant)},
          {"status", to_string(s.status)},
          {"converged", s.converged},
          {"iterations", s.iterations},
          {"residual_norm", s.residual_norm},
          {"functional_value", s.functional_value},
          {"l2_norm", l2_norm(s.v)},
          {"sup_norm", max_abs(s.v)}};
}

int cmd_solve(const RunConfig& c, Output& out) {
  const Field v0 = initial_field(c);
  const Solution s = c.method == "minimize" ? minimize(*c.problem, v0, c.solver) : newton_solve(*c.problem, v0, c.solver);
  out.field("solution.mfe1", s.v);
  json j = solution_summary(s);
  j["method"] = c.method;
  out.json_file("solution.json", j);
  out.text("trace.csv", [&](std::ostream& o) { write_trace_csv(o, s.trace); });
  return s.converged ? kOk : kAnalytic;
}

int cmd_continue(const RunConfig& c, Output& out) {
  const auto path = continuation(*c.problem, c.lambdas, initial_field(c), c.solver);
  bool all = true;
  out.text("continuation.csv", [&](std::ostream& o) {
    o << "lambda,status,iterations,residual_norm,functional_value,l2_norm,sup_norm\r\n";
    for (const auto& e : path) {
      o << format_real(e.lambda) << ',';
      if (!e.solution) {
        o << "unsolved,,,,,\r\n";
        all = false;
        continue;
      }
      const auto& s = *e.solution;
      all = all && s.converged;
      o << to_string(s.status) << ',' << s.iterations << ',' << format_real(s.residual_norm) << ','
        << format_real(s.functional_value) << ',' << format_real(l2_norm(s.v)) << ',' << format_real(max_abs(s.v))
        << "\r\n";
    }
  });
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k].solution) out.field(indexed("solution", k, ".mfe1"), path[k].solution->v);
  }
  return all ? kOk : kAnalytic;
}

int cmd_blowup(const RunConfig& c, Output& out) {
  const auto& g = c.problem->grid;
  const auto radii = c.blowup.radii.empty() ? default_radii(g) : c.blowup.radii;
  std::vector<BlowupReport> reports;
  std::vector<double> params;
  int status = kOk;

  auto analyse = [&](const ProblemSpec& spec, const Field& v, double param) {
    const auto peaks = detect_peaks(v, c.blowup.threshold);
    const std::size_t k = reports.size();
    reports.push_back(estimate_masses(spec, v, peaks, radii));
    params.push_back(param);
    json j = to_json(reports.back());
    j["parameter"] = param;
    out.json_file(indexed("report", k, ".json"), j);
    out.text(indexed("masses", k, ".csv"), [&](std::ostream& o) { write_mass_csv(o, reports.back()); });
  };

  if (c.blowup.source == "bubble-family") {
    const Point center = c.initial.center.value_or(default_center(g));
    for (double mu : c.blowup.scales) {
      warn_resolution(g, mu);
      const double lambda = c.blowup.lambda_factor * integrate(liouville_density(g, center, mu));
      analyse(c.problem->with_lambda(lambda), liouville_bubble(g, {center, mu, c.initial.sign}), mu);
    }
  } else {
    const auto path = continuation(*c.problem, c.lambdas, initial_field(c), c.solver);
    for (const auto& e : path) {
      if (e.solution && e.solution->converged) {
        analyse(e.solution->spec, e.solution->v, e.lambda);
      } else {
        status = kAnalytic;
      }
    }
  }

  out.text("blowup.csv", [&](std::ostream& o) {
    o << "report,parameter,lambda,peaks_plus,peaks_minus,max_n_plus,max_n_minus,c0_estimate\r\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const auto& r = reports[k];
      const auto top = [](const std::vector<double>& xs) {
        return xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
      };
      o << k << ',' << format_real(params[k]) << ',' << format_real(r.lambda) << ',' << r.peaks_plus.size() << ','
        << r.peaks_minus.size() << ',' << format_real(top(r.n_plus)) << ',' << format_real(top(r.n_minus)) << ','
        << format_real(r.c0_estimate) << "\r\n";
    }
  });

  if (reports.size() >= 3) {
    const auto t = residual_vanishing_probe(reports);
    out.text("vanishing.csv", [&](std::ostream& o) {
      o << "report,parameter,alpha,sup_k_outside\r\n";
      for (std::size_t k = 0; k < reports.size(); ++k) {
        for (std::size_t i = 0; i < t.sup_k[k].size(); ++i) {
          o << k << ',' << format_real(params[k]) << ',' << format_real(reports[k].measure[i].alpha) << ','
            << format_real(t.sup_k[k][i]) << "\r\n";
        }
      }
    });
    out.json_file("vanishing.json", {{"overall_decay", t.overall_decay},
                                     {"decay_ok", t.decay_ok},
                                     {"hypothesis_met", t.hypothesis_met},
                                     {"consistent_with_vanishing", t.consistent_with_vanishing}});
  }
  return status;
}

int cmd_tm(const RunConfig& c, Output& out) {
  const auto& spec = *c.problem;
  const Side dir = c.tm.direction == "auto" ? choose_direction(spec.measure)
                   : c.tm.direction == "+"  ? Side::Plus
                                            : Side::Minus;
  for (double mu : c.tm.scales) warn_resolution(spec.grid, mu);
  const auto family = probe_family(spec.grid, c.tm.scales, dir);
  int status = kOk;
  if (!c.tm.lambdas.empty()) {
    const auto r = sweep(spec, c.tm.lambdas, family, c.tm.slope_tol);
    out.text("sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, r); });
    if (!r.skipped.empty()) status = kAnalytic;
  }
  if (c.tm.bracket) {
    const auto [lo, hi] = *c.tm.bracket;
    std::string estimate, verdict = "ok";
    try {
      estimate = format_real(threshold_estimate(spec, *c.tm.bracket, family, c.tm.slope_tol));
    } catch (const NoBracket&) {
      verdict = "no-bracket";
      status = kAnalytic;
    }
    out.text("threshold.csv", [&](std::ostream& o) {
      o << "variant,direction,lambda_lo,lambda_hi,estimate,status\r\n"
        << to_string(spec.variant) << ',' << (dir == Side::Plus ? '+' : '-') << ',' << format_real(lo) << ','
        << format_real(hi) << ',' << estimate << ',' << verdict << "\r\n";
    });
  }
  return status;
}

int cmd_quantize(const RunConfig& c, Output& out) {
  const auto& q = c.quantize;
  if (q.support.size() <= 2) {
    const auto fam = quantization_solve(q.support);
    out.text("quantize.csv", [&](std::ostream& o) {
      if (fam.support().size() == 1) {
        o << "alpha,mass,n\r\n"
          << format_real(fam.support()[0]) << ',' << format_real(fam.single_mass()) << ','
          << format_real(fam.single_n()) << "\r\n";
        return;
      }
      o << "alpha_1,alpha_2,c_1,c_2\r\n";
      const auto firsts = q.first_masses.empty() ? std::vector<double>{0.0} : q.first_masses;
      for (double c1 : firsts) {
        for (double c2 : fam.partner_masses(c1)) {
          o << format_real(fam.support()[0]) << ',' << format_real(fam.support()[1]) << ',' << format_real(c1) << ','
            << format_real(c2) << "\r\n";
        }
      }
    });
  }
  if (!q.masses.empty()) {
    if (q.masses.size() != q.support.size()) throw BadParameter("quantize.masses: one mass per atom");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < q.support.size(); ++i) {
      atoms.push_back({q.support[i], q.weights.empty() ? 1.0 / static_cast<double>(q.support.size()) : q.weights[i]});
    }
    out.text("residual.csv", [&](std::ostream& o) {
      o << "quantization_residual\r\n" << format_real(quantization_residual(atoms, q.masses)) << "\r\n";
    });
  }
  return kOk;
}

int cmd_assumptions(const RunConfig& c, Output& out) {
  const auto& spec = *c.problem;
  const Field v = initial_field(c);
  const auto rep = check_assumptions(spec, v);
  // increasing in |alpha| on each side; the minus side is the plus side of -v
  std::vector<double> plus, minus;
  for (const auto& a : spec.measure.atoms()) {
    if (a.alpha > 0.0) plus.push_back(a.alpha);
    if (a.alpha < 0.0) minus.insert(minus.begin(), -a.alpha);
  }
  const bool monotone = monotonicity_check(v, plus) && monotonicity_check(-v, minus);
  const double slack = 1e-10;
  const bool c1_ok = rep.c1_prime <= (1.0 + slack) / spec.grid.area();
  const bool c2_ok = rep.c2_prime <= 1.0 + slack;
  out.text("assumptions.txt", [&](std::ostream& o) {
    o << rep.to_text() << "c1_prime_ok = " << (c1_ok ? "true" : "false") << '\n'
      << "c2_prime_ok = " << (c2_ok ? "true" : "false") << '\n'
      << "monotone = " << (monotone ? "true" : "false") << '\n';
  });
  return rep.jensen_ok && rep.sign_ok && c1_ok && c2_ok && monotone ? kOk : kAnalytic;
}

json manifest(const RunConfig& c, const Output& out, int code, const std::string& message) {
  json files = json::array();
  std::vector<std::string> names = out.files();
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    files.push_back({{"path", name},
                     {"bytes", static_cast<std::uint64_t>(fs::file_size(out.dir() / name))},
                     {"sha256", sha256_file(out.dir() / name)}});
  }
  json config = json::object();
  for (const auto& [k, v] : c.raw) config[k] = v;
  return {{"schema", "mfe.manifest"},
          {"schema_version", 1},
          {"command", c.command},
          {"seed", c.seed},
          {"generator", Xoshiro256::kName},
          {"config", config},
          {"exit_code", code},
          {"status", code == kOk ? "ok" : code == kAnalytic ? "analytic-outcome" : "error"},
          {"message", message},
          {"files", files}};
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

int run(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << c.output_dir.string() << "': " << ec.message() << '\n';
    return kError;
  }
  Output out(c.output_dir);
  int code = kError;
  std::string message;
  try {
    if (c.command == "solve" || c.command == "minimize") {
      code = cmd_solve(c, out);
    } else if (c.command == "continue") {
      code = cmd_continue(c, out);
    } else if (c.command == "blowup-scan") {
      code = cmd_blowup(c, out);
    } else if (c.command == "tm-sweep") {
      code = cmd_tm(c, out);
    } else if (c.command == "quantize") {
      code = cmd_quantize(c, out);
    } else if (c.command == "check-assumptions") {
      code = cmd_assumptions(c, out);
    } else {
      throw ConfigError("unknown command '" + c.command + "'");
    }
  } catch (const std::exception& e) {
    code = kError;
    message = e.what();
    std::cerr << "error: " << message << '\n';
  }
  try {
    const json m = manifest(c, out, code, message);
    std::ofstream f(out.dir() / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
    if (!f) throw IoError("cannot write manifest.json");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return code;
}

}  // namespace mfe::cli
