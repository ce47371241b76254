#include "mfe/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfe/errors.hpp"
#include "mfe/kernels.hpp"
#include "mfe/text.hpp"

namespace mfe {
namespace {

int padded_resolution(int n) {
  const int m = (3 * n) / 2;
  return m % 2 == 0 ? m : m + 1;
}

// Grid on which the exponential nonlinearity is sampled.
Field evaluation_field(const ProblemSpec& spec, const Field& v) {
  return spec.dealias ? resample(v, padded_resolution(v.grid().resolution())) : v;
}

double log_sum_exp(const std::vector<double>& terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

// log of the normalization used by atom i's density.
double log_normalizer(const ProblemSpec& spec, const LogPartition& lp, std::size_t i) {
  const double z = spec.variant == Variant::SawadaSuzuki ? lp.per_atom[i] : lp.total;
  if (!std::isfinite(z)) throw Overflow("exponential integral is not finite (under-resolved spike?)");
  return z;
}

// e^{a_i v} / Z_i pointwise on the field's own grid.
Field normalized_exponential(const Field& v, double alpha, double log_norm) {
  Field out(v.grid());
  kernels::exp_shifted(v.values(), alpha, log_norm, out.values());
  return out;
}

LogPartition log_partition_on(const ProblemSpec& spec, const Field& ve) {
  LogPartition lp;
  const auto& atoms = spec.measure.atoms();
  lp.per_atom.reserve(atoms.size());
  std::vector<double> weighted;
  weighted.reserve(atoms.size());
  for (const auto& a : atoms) {
    const double lz = log_exp_integral(ve, a.alpha);
    lp.per_atom.push_back(lz);
    weighted.push_back(std::log(a.weight) + lz);
  }
  lp.total = log_sum_exp(weighted);
  return lp;
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::SawadaSuzuki ? "sawada-suzuki" : "neri"; }

Variant parse_variant(const std::string& name) {
  if (name == "sawada-suzuki" || name == "sawada_suzuki" || name == "SawadaSuzuki") return Variant::SawadaSuzuki;
  if (name == "neri" || name == "Neri") return Variant::Neri;
  throw BadParameter("unknown variant '" + name + "' (expected sawada-suzuki or neri)");
}

void ProblemSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw BadParameter("lambda must be positive");
}

ProblemSpec ProblemSpec::with_lambda(double l) const {
  ProblemSpec s = *this;
  s.lambda = l;
  return s;
}

ProblemSpec ProblemSpec::with_variant(Variant v) const {
  ProblemSpec s = *this;
  s.variant = v;
  return s;
}

double log_exp_integral(const Field& v, double alpha) {
  if (alpha == 0.0) return std::log(v.grid().area());
  const double shift = alpha > 0.0 ? alpha * kernels::max_value(v.values()) : alpha * kernels::min_value(v.values());
  const double s = kernels::sum_exp_shifted(v.values(), alpha, shift);
  return shift + std::log(s * v.grid().cell_area());
}

LogPartition log_partition(const ProblemSpec& spec, const Field& v) {
  return log_partition_on(spec, evaluation_field(spec, v));
}

std::vector<double> potential_over_alpha(const ProblemSpec& spec, const Field& v) {
  const auto lp = log_partition(spec, v);
  std::vector<double> out;
  out.reserve(lp.per_atom.size());
  for (std::size_t i = 0; i < lp.per_atom.size(); ++i) {
    const double lz = log_normalizer(spec, lp, i);
    if (!std::isfinite(std::exp(lz))) throw Overflow("exponential integral overflows double precision");
    out.push_back(std::exp(-lz));
  }
  return out;
}

std::vector<double> potential(const ProblemSpec& spec, const Field& v) {
  auto out = potential_over_alpha(spec, v);
  const auto& atoms = spec.measure.atoms();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= atoms[i].alpha;
  return out;
}

Field rhs(const ProblemSpec& spec, const Field& v) {
  const Field ve = evaluation_field(spec, v);
  const auto lp = log_partition_on(spec, ve);
  const auto& atoms = spec.measure.atoms();
  Field density(ve.grid());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].alpha == 0.0) continue;
    const Field e = normalized_exponential(ve, atoms[i].alpha, log_normalizer(spec, lp, i));
    density.add_scaled(atoms[i].weight * atoms[i].alpha, e);
  }
  if (spec.dealias) density = resample(density, v.grid().resolution());
  density.add_constant(-mean(density));
  density *= spec.lambda;
  return density;
}

Field residual(const ProblemSpec& spec, const Field& v) {
  Field r = -laplacian(v);
  r -= rhs(spec, v);
  return r;
}

double functional(const ProblemSpec& spec, const Field& v) {
  const auto lp = log_partition(spec, v);
  double log_term = 0.0;
  if (spec.variant == Variant::SawadaSuzuki) {
    const auto& atoms = spec.measure.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) log_term += atoms[i].weight * lp.per_atom[i];
  } else {
    log_term = lp.total;
  }
  if (!std::isfinite(log_term)) throw Overflow("functional: exponential integral is not finite");
  return 0.5 * dirichlet_energy(v) - spec.lambda * log_term;
}

Field functional_gradient(const ProblemSpec& spec, const Field& v) { return residual(spec, v); }

double functional_change(const ProblemSpec& spec, const Field& v, const Field& d, double step) {
  const Field minus_lap_d = -laplacian(d);
  const double energy = step * inner(minus_lap_d, v) + 0.5 * step * step * inner(minus_lap_d, d);

  const Field ve = evaluation_field(spec, v);
  const Field de = evaluation_field(spec, d);
  const auto lp = log_partition_on(spec, ve);
  const auto& atoms = spec.measure.atoms();
  const double cell = ve.grid().cell_area();

  // relative growth of int e^{a v} along the step, per atom
  std::vector<double> growth(atoms.size(), 0.0);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].alpha == 0.0) continue;
    const Field e = normalized_exponential(ve, atoms[i].alpha, lp.per_atom[i]);
    growth[i] = kernels::sum_weighted_expm1(e.values(), de.values(), atoms[i].alpha * step) * cell;
  }
  double log_change = 0.0;
  if (spec.variant == Variant::SawadaSuzuki) {
    for (std::size_t i = 0; i < atoms.size(); ++i) log_change += atoms[i].weight * std::log1p(growth[i]);
  } else {
    double g = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      g += atoms[i].weight * std::exp(lp.per_atom[i] - lp.total) * growth[i];
    }
    log_change = std::log1p(g);
  }
  return energy - spec.lambda * log_change;
}

std::pair<Field, Field> nu_densities(const ProblemSpec& spec, const Field& v) {
  const auto lp = log_partition(spec, v);
  const auto& atoms = spec.measure.atoms();
  Field plus(v.grid());
  Field minus(v.grid());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].alpha == 0.0) continue;
    const Field e = normalized_exponential(v, atoms[i].alpha, log_normalizer(spec, lp, i));
    (atoms[i].alpha > 0.0 ? plus : minus).add_scaled(spec.lambda * atoms[i].weight * std::abs(atoms[i].alpha), e);
  }
  return {std::move(plus), std::move(minus)};
}

std::vector<Field> mu_product_densities(const ProblemSpec& spec, const Field& v) {
  const auto lp = log_partition(spec, v);
  const auto& atoms = spec.measure.atoms();
  std::vector<Field> out;
  out.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    Field e = normalized_exponential(v, atoms[i].alpha, log_normalizer(spec, lp, i));
    e *= spec.lambda;
    out.push_back(std::move(e));
  }
  return out;
}

std::pair<Field, Field> u_pm_decomposition(const ProblemSpec& spec, const Field& v) {
  auto [plus, minus] = nu_densities(spec, v);
  return {green_convolve(plus), green_convolve(minus)};
}

std::string AssumptionReport::to_text() const {
  std::ostringstream out;
  out << "c1_prime = " << format_real(c1_prime) << '\n'
      << "c2_prime = " << format_real(c2_prime) << '\n'
      << "min_jensen_ratio = " << format_real(min_jensen_ratio) << '\n'
      << "jensen_ok = " << (jensen_ok ? "true" : "false") << '\n'
      << "sign_ok = " << (sign_ok ? "true" : "false") << '\n';
  return out.str();
}

AssumptionReport check_assumptions(const ProblemSpec& spec, const Field& v) {
  const auto lp = log_partition(spec, v);
  const auto& atoms = spec.measure.atoms();
  const double log_area = std::log(v.grid().area());
  AssumptionReport rep;
  rep.jensen_ok = true;
  rep.sign_ok = true;
  rep.min_jensen_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double lz = log_normalizer(spec, lp, i);
    const double over_alpha = std::exp(-lz);
    rep.c1_prime = std::max(rep.c1_prime, over_alpha);
    // int |V| e^{a v} = |a| int e^{a v} / Z_norm
    rep.c2_prime += atoms[i].weight * std::abs(atoms[i].alpha) * std::exp(lp.per_atom[i] - lz);
    const double ratio = std::exp(lp.per_atom[i] - log_area);
    rep.min_jensen_ratio = std::min(rep.min_jensen_ratio, ratio);
    if (ratio < 1.0 - 1e-10) rep.jensen_ok = false;
    if (atoms[i].alpha * (atoms[i].alpha * over_alpha) < 0.0) rep.sign_ok = false;
  }
  return rep;
}

bool monotonicity_check(const Field& v, const std::vector<double>& alphas) {
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (!(alphas[k] > 0.0 && alphas[k] <= 1.0)) throw BadParameter("monotonicity_check: alphas must lie in (0,1]");
    if (k > 0 && !(alphas[k] > alphas[k - 1])) throw BadParameter("monotonicity_check: alphas must be ascending");
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    const double lz = log_exp_integral(v, a);
    // compare in log space: Z(a) >= Z(prev) (1 - 1e-12)
    if (lz < prev + std::log1p(-1e-12)) return false;
    prev = std::max(prev, lz);
  }
  return true;
}

}  // namespace mfe
