#include "mfe/tmprober.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mfe/blowup.hpp"
#include "mfe/errors.hpp"
#include "mfe/text.hpp"

namespace mfe {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Evaluation {
  std::vector<double> values;
  double slope = kNaN;
  std::vector<std::pair<std::size_t, std::string>> skipped;
};

Evaluation evaluate(const ProblemSpec& spec, const ProbeFamily& family) {
  Evaluation e;
  for (std::size_t m = 0; m < family.fields.size(); ++m) {
    double f = kNaN;
    try {
      f = functional(spec, family.fields[m]);
      if (!std::isfinite(f)) throw Overflow("functional not finite");
    } catch (const Overflow& err) {
      f = kNaN;
      e.skipped.emplace_back(m, err.what());
    }
    e.values.push_back(f);
  }
  // two largest usable scales
  std::vector<std::size_t> usable;
  for (std::size_t m = family.fields.size(); m-- > 0 && usable.size() < 2;) {
    if (!std::isnan(e.values[m])) usable.push_back(m);
  }
  if (usable.size() == 2) {
    const std::size_t hi = usable[0], lo = usable[1];
    e.slope = (e.values[hi] - e.values[lo]) / (std::log(family.scales[hi]) - std::log(family.scales[lo]));
  }
  return e;
}

}  // namespace

ProbeFamily probe_family(const TorusGrid& grid, const std::vector<double>& mu_list, Side direction) {
  if (mu_list.empty()) throw BadParameter("probe_family: empty scale list");
  for (std::size_t k = 0; k < mu_list.size(); ++k) {
    if (!(mu_list[k] > 0.0)) throw BadParameter("probe_family: scales must be positive");
    if (k > 0 && !(mu_list[k] > mu_list[k - 1])) throw BadParameter("probe_family: scales must be increasing");
  }
  ProbeFamily fam;
  fam.direction = direction;
  fam.scales = mu_list;
  const Point c = grid.cell_center(grid.resolution() / 2, grid.resolution() / 2);
  for (double mu : mu_list) {
    const BubbleSpec b{c, mu, direction};
    fam.fields.push_back(liouville_bubble(grid, b));
    fam.under_resolved.push_back(under_resolved(grid, b));
  }
  return fam;
}

Side choose_direction(const IntensityMeasure& p) {
  double plus = 0.0, minus = 0.0;
  for (const auto& a : p.atoms()) {
    const double s = std::abs(a.alpha);
    (a.alpha >= 0.0 ? plus : minus) += a.weight * std::max(0.0, 4.0 * s - 2.0);
  }
  return minus > plus ? Side::Minus : Side::Plus;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::BoundedLooking: return "bounded-looking";
    case Verdict::UnboundedLooking: return "unbounded-looking";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

Verdict classify(double slope, double slope_tol) {
  if (std::isnan(slope)) return Verdict::Indeterminate;
  if (slope < -slope_tol) return Verdict::UnboundedLooking;
  if (slope > slope_tol) return Verdict::BoundedLooking;
  return Verdict::Indeterminate;
}

SweepResult sweep(const ProblemSpec& spec, const std::vector<double>& lambdas, const ProbeFamily& family,
                  double slope_tol) {
  if (family.fields.empty()) throw BadParameter("sweep: empty probe family");
  if (!(slope_tol >= 0.0)) throw BadParameter("sweep: slope_tol must be nonnegative");
  SweepResult r;
  r.lambdas = lambdas;
  r.scales = family.scales;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const auto e = evaluate(spec.with_lambda(lambdas[k]), family);
    double inf = kNaN;
    for (double f : e.values) {
      if (!std::isnan(f) && !(inf <= f)) inf = f;
    }
    r.values.push_back(e.values);
    r.family_infima.push_back(inf);
    r.slopes.push_back(e.slope);
    r.verdicts.push_back(classify(e.slope, slope_tol));
    for (const auto& [m, why] : e.skipped) r.skipped.push_back({k, m, why});
  }
  return r;
}

double threshold_estimate(const ProblemSpec& spec, std::pair<double, double> bracket, const ProbeFamily& family,
                          double slope_tol) {
  auto [lo, hi] = bracket;
  if (!(lo > 0.0 && hi > lo)) throw BadParameter("threshold_estimate: need 0 < lo < hi");
  auto unbounded = [&](double lambda) {
    return classify(evaluate(spec.with_lambda(lambda), family).slope, slope_tol) == Verdict::UnboundedLooking;
  };
  const bool ulo = unbounded(lo);
  if (ulo == unbounded(hi)) throw NoBracket("threshold_estimate: bracket ends share a verdict");
  while ((hi - lo) > 0.01 * 0.5 * (hi + lo)) {
    const double mid = 0.5 * (lo + hi);
    (unbounded(mid) == ulo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "lambda,mu,value,slope,verdict\r\n";
  for (std::size_t k = 0; k < r.lambdas.size(); ++k) {
    for (std::size_t m = 0; m < r.scales.size(); ++m) {
      out << format_real(r.lambdas[k]) << ',' << format_real(r.scales[m]) << ',' << format_real(r.values[k][m]) << ','
          << format_real(r.slopes[k]) << ',' << to_string(r.verdicts[k]) << "\r\n";
    }
  }
}

}  // namespace mfe
