#include "mfe/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "mfe/errors.hpp"
#include "mfe/kernels.hpp"
#include "mfe/text.hpp"

namespace mfe {
namespace {

constexpr double kPi = std::numbers::pi;

// Intercept at r^2 = 0 of the least-squares line through (r^2, mass).
double extrapolate_to_zero(const std::vector<double>& radii, const std::vector<double>& mass) {
  if (radii.size() == 1) return mass.front();
  const double n = static_cast<double>(radii.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double x = radii[k] * radii[k];
    sx += x;
    sy += mass[k];
    sxx += x * x;
    sxy += x * mass[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return (sy - slope * sx) / n;
}

// Zero the density inside every ball.
Field mask_balls(Field f, const std::vector<Point>& centers, double r) {
  const auto& grid = f.grid();
  const int n = grid.resolution();
  for (const auto& p : centers) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (grid.distance(grid.cell_center(i, j), p) < r) f(i, j) = 0.0;
      }
    }
  }
  return f;
}

nlohmann::json field_summary(const std::optional<Field>& f) {
  if (!f) return nullptr;
  return {{"resolution", f->grid().resolution()},
          {"side_length", f->grid().side_length()},
          {"integral", integrate(*f)},
          {"max", kernels::max_value(f->values())},
          {"min", kernels::min_value(f->values())}};
}

}  // namespace

bool under_resolved(const TorusGrid& grid, const BubbleSpec& spec) {
  return spec.scale > grid.resolution() / (4.0 * grid.side_length()) * 2.0 * kPi;
}

Field liouville_density(const TorusGrid& grid, const Point& center, double scale) {
  if (!(scale > 0.0)) throw BadParameter("bubble scale must be positive");
  const double mu2 = scale * scale;
  Field out(grid);
  const int n = grid.resolution();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = grid.distance(grid.cell_center(i, j), center);
      const double q = 1.0 + mu2 * d * d;
      out(i, j) = 8.0 * mu2 / (q * q);
    }
  }
  return out;
}

Field liouville_bubble(const TorusGrid& grid, const BubbleSpec& spec) {
  if (!(spec.scale > 0.0)) throw BadParameter("bubble scale must be positive");
  const double mu2 = spec.scale * spec.scale;
  Field out(grid);
  const int n = grid.resolution();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = grid.distance(grid.cell_center(i, j), spec.center);
      // log(8 mu^2 / (1 + mu^2 d^2)^2) without forming the ratio
      out(i, j) = std::log(8.0 * mu2) - 2.0 * std::log1p(mu2 * d * d);
    }
  }
  out = project_mean_zero(std::move(out));
  if (spec.sign == Side::Minus) out *= -1.0;
  return out;
}

Peaks detect_peaks(const Field& v, double threshold) {
  const int n = v.grid().resolution();
  auto wrap = [n](int i) { return (i + n) % n; };
  Peaks out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = v(i, j);
      const bool candidate_max = c > threshold;
      const bool candidate_min = c < -threshold;
      if (!candidate_max && !candidate_min) continue;
      bool is_max = candidate_max, is_min = candidate_min;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const double nb = v(wrap(i + di), wrap(j + dj));
          if (!(c > nb)) is_max = false;
          if (!(c < nb)) is_min = false;
        }
      }
      if (is_max) out.plus.push_back(v.grid().cell_center(i, j));
      if (is_min) out.minus.push_back(v.grid().cell_center(i, j));
    }
  }
  return out;
}

double ball_mass(const Field& density, const Point& p, double r) {
  const auto& grid = density.grid();
  if (!(r > 0.0) || !(r < grid.side_length() / 2.0)) throw BadRadius("ball radius must lie in (0, L/2)");
  const int n = grid.resolution();
  std::vector<double> inside;
  inside.reserve(static_cast<std::size_t>(4 * r * r / grid.cell_area()) + 16);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (grid.distance(grid.cell_center(i, j), p) < r) inside.push_back(density(i, j));
    }
  }
  return kernels::sum(inside) * grid.cell_area();
}

std::vector<double> default_radii(const TorusGrid& grid) {
  const double s = grid.side_length() / (2.0 * kPi);
  return {0.5 * s, 0.35 * s, 0.25 * s};
}

BlowupReport estimate_masses(const ProblemSpec& spec, const Field& v, const Peaks& peaks,
                             const std::vector<double>& r_schedule) {
  if (r_schedule.empty()) throw BadParameter("estimate_masses: empty radius schedule");
  for (std::size_t k = 1; k < r_schedule.size(); ++k) {
    if (!(r_schedule[k] < r_schedule[k - 1])) throw BadParameter("estimate_masses: radii must be decreasing");
  }
  const double rmax = r_schedule.front();
  const auto& grid = v.grid();

  std::vector<Point> all = peaks.plus;
  all.insert(all.end(), peaks.minus.begin(), peaks.minus.end());
  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t b = a + 1; b < all.size(); ++b) {
      if (grid.distance(all[a], all[b]) < 2.0 * rmax) throw OverlappingBalls("peaks closer than 2 max(r)");
    }
  }

  BlowupReport rep;
  rep.peaks_plus = peaks.plus;
  rep.peaks_minus = peaks.minus;
  rep.lambda = spec.lambda;
  rep.measure = spec.measure.atoms();
  rep.radii = r_schedule;

  const auto& atoms = spec.measure.atoms();
  const auto mus = mu_product_densities(spec, v);
  for (const auto& p : all) {
    std::vector<Atom> zeta;
    std::vector<double> masses;
    double np = 0.0, nm = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      std::vector<double> m;
      for (double r : r_schedule) m.push_back(ball_mass(mus[i], p, r));
      const double mass = std::max(0.0, extrapolate_to_zero(r_schedule, m));
      zeta.push_back({atoms[i].alpha, mass});
      masses.push_back(mass);
      const double contrib = atoms[i].weight * std::abs(atoms[i].alpha) * mass;
      (on_side(atoms[i].alpha, Side::Plus) ? np : nm) += contrib;
    }
    rep.n_plus.push_back(np);
    rep.n_minus.push_back(nm);
    rep.quantization_residual.push_back(quantization_residual(atoms, masses));
    rep.zeta_atoms.push_back(std::move(zeta));
  }

  auto [nu_plus, nu_minus] = nu_densities(spec, v);
  rep.s_plus_field = mask_balls(std::move(nu_plus), all, rmax);
  rep.s_minus_field = mask_balls(std::move(nu_minus), all, rmax);

  const auto pot = potential(spec, v);
  const auto lp = log_partition(spec, v);
  const double log_area = std::log(grid.area());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    rep.k_estimate.emplace_back(grid, pot[i]);
    const Field outside = mask_balls(Field(grid, std::abs(pot[i])), all, rmax);
    rep.k_sup_outside.push_back(all.empty() ? std::abs(pot[i]) : kernels::max_value(outside.values()));
    // int V e^{a v} = a Z_i / Z_norm
    const double norm = spec.variant == Variant::SawadaSuzuki ? lp.per_atom[i] : lp.total;
    rep.c0_estimate += atoms[i].weight * atoms[i].alpha * std::exp(lp.per_atom[i] - norm);
  }
  rep.c0_estimate *= spec.lambda * std::exp(-log_area);
  return rep;
}

double quantization_residual(const std::vector<Atom>& weights, const std::vector<double>& masses) {
  double total = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i].weight * masses[i];
    moment += weights[i].weight * weights[i].alpha * masses[i];
  }
  return 8.0 * kPi * total - moment * moment;
}

QuantizationFamily::QuantizationFamily(std::vector<double> support) : support_(std::move(support)) {}

double QuantizationFamily::single_mass() const {
  if (support_.size() != 1) throw Unsupported("single_mass needs a one-atom support");
  return 8.0 * kPi / (support_[0] * support_[0]);
}

double QuantizationFamily::single_n() const { return std::abs(support_.at(0)) * single_mass(); }

std::vector<double> QuantizationFamily::partner_masses(double first_mass) const {
  if (support_.size() != 2) throw Unsupported("partner_masses needs a two-atom support");
  if (!(first_mass >= 0.0)) throw BadParameter("masses must be nonnegative");
  const double a1 = support_[0], a2 = support_[1], c1 = first_mass;
  // a2^2 c2^2 + (2 a1 a2 c1 - 8 pi) c2 + (a1^2 c1^2 - 8 pi c1) = 0
  const double qa = a2 * a2;
  const double qb = 2.0 * a1 * a2 * c1 - 8.0 * kPi;
  const double qc = a1 * a1 * c1 * c1 - 8.0 * kPi * c1;
  std::vector<double> roots;
  if (qa == 0.0) {
    roots.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    const double scale = qb * qb + std::abs(4.0 * qa * qc);
    if (disc < -1e-14 * scale) return {};
    const double sq = std::sqrt(std::max(0.0, disc));
    // numerically stable pair
    const double q = -0.5 * (qb + std::copysign(sq, qb));
    roots.push_back(q / qa);
    roots.push_back(q != 0.0 ? qc / q : q / qa);
  }
  std::vector<double> out;
  const double tol = 1e-12 * (1.0 + c1 + 8.0 * kPi);
  for (double r : roots) {
    if (r >= -tol) out.push_back(std::max(0.0, r));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

QuantizationFamily quantization_solve(std::vector<double> support) {
  if (support.empty() || support.size() > 2) {
    throw Unsupported("closed-form quantization needs 1 or 2 atoms; use quantization_residual instead");
  }
  for (double a : support) {
    if (!(a >= -1.0 && a <= 1.0)) throw BadParameter("support alpha outside [-1,1]");
  }
  if (support.size() == 2) {
    if (support[0] == support[1]) throw BadParameter("support atoms must be distinct");
    if (support[0] < 0.0 && support[1] >= 0.0) std::swap(support[0], support[1]);
  } else if (support[0] == 0.0) {
    throw BadParameter("a lone atom at alpha = 0 admits only zero mass");
  }
  return QuantizationFamily(std::move(support));
}

VanishingTable residual_vanishing_probe(const std::vector<BlowupReport>& reports) {
  if (reports.size() < 3) throw BadParameter("residual_vanishing_probe needs at least 3 reports");
  VanishingTable t;
  for (const auto& r : reports) t.sup_k.push_back(r.k_sup_outside);
  auto top = [](const std::vector<double>& xs) { return xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end()); };
  const double first = top(t.sup_k.front());
  const double last = top(t.sup_k.back());
  t.overall_decay = last > 0.0 ? first / last : (first > 0.0 ? INFINITY : 1.0);
  t.decay_ok = t.overall_decay >= 10.0;

  const auto& fin = reports.back();
  const bool endpoints = std::any_of(fin.measure.begin(), fin.measure.end(),
                                     [](const Atom& a) { return std::abs(a.alpha) == 1.0; });
  bool heavy_plus = false;
  for (std::size_t k = 0; k < fin.peaks_plus.size(); ++k) heavy_plus = heavy_plus || fin.n_plus[k] > 4.0 * kPi;
  t.hypothesis_met = endpoints && heavy_plus;
  t.consistent_with_vanishing = t.decay_ok && t.hypothesis_met;
  return t;
}

nlohmann::json to_json(const BlowupReport& r) {
  using nlohmann::json;
  json j;
  j["schema"] = "mfe.blowup_report";
  j["schema_version"] = BlowupReport::kSchemaVersion;
  j["lambda"] = r.lambda;
  j["measure"] = json::array();
  for (const auto& a : r.measure) j["measure"].push_back({{"alpha", a.alpha}, {"weight", a.weight}});
  j["radii"] = r.radii;
  auto points = [](const std::vector<Point>& ps) {
    json arr = json::array();
    for (const auto& p : ps) arr.push_back({p[0], p[1]});
    return arr;
  };
  j["peaks_plus"] = points(r.peaks_plus);
  j["peaks_minus"] = points(r.peaks_minus);
  j["n_plus"] = r.n_plus;
  j["n_minus"] = r.n_minus;
  j["zeta_atoms"] = json::array();
  for (const auto& z : r.zeta_atoms) {
    json arr = json::array();
    for (const auto& a : z) arr.push_back({{"alpha", a.alpha}, {"mass", a.weight}});
    j["zeta_atoms"].push_back(arr);
  }
  j["quantization_residual"] = r.quantization_residual;
  j["s_plus_field"] = field_summary(r.s_plus_field);
  j["s_minus_field"] = field_summary(r.s_minus_field);
  j["k_estimate"] = json::array();
  for (std::size_t i = 0; i < r.k_estimate.size(); ++i) {
    j["k_estimate"].push_back(field_summary(r.k_estimate[i]));
  }
  j["k_sup_outside"] = r.k_sup_outside;
  j["c0_estimate"] = r.c0_estimate;
  return j;
}

void write_mass_csv(std::ostream& out, const BlowupReport& r) {
  out << "peak,sign,x1,x2,alpha,zeta_mass,n_plus,n_minus,quantization_residual\r\n";
  for (std::size_t k = 0; k < r.peak_count(); ++k) {
    const bool plus = k < r.peaks_plus.size();
    const Point& p = plus ? r.peaks_plus[k] : r.peaks_minus[k - r.peaks_plus.size()];
    for (const auto& z : r.zeta_atoms[k]) {
      out << k << ',' << (plus ? '+' : '-') << ',' << format_real(p[0]) << ',' << format_real(p[1]) << ','
          << format_real(z.alpha) << ',' << format_real(z.weight) << ',' << format_real(r.n_plus[k]) << ','
          << format_real(r.n_minus[k]) << ',' << format_real(r.quantization_residual[k]) << "\r\n";
    }
  }
}

}  // namespace mfe
