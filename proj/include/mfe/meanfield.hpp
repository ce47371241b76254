#pragma once

// Mean-field equations with a probability measure of vortex intensities:
//
//   -Lap v = lambda sum_i w_i [ V(a_i,v) e^{a_i v} - |Omega|^-1 int V(a_i,v) e^{a_i v} ]
//
// with V1 = a / int e^{a v}            (Sawada-Suzuki)
// and  V2 = a / sum_j w_j int e^{a_j v} (Neri).
//
// Every exponential integral is carried as a logarithm with a max-shift, so
// strongly concentrated fields do not overflow.

#include <string>
#include <utility>
#include <vector>

#include "mfe/field.hpp"
#include "mfe/measure.hpp"

namespace mfe {

enum class Variant { SawadaSuzuki, Neri };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

struct ProblemSpec {
  Variant variant;
  double lambda;
  IntensityMeasure measure;
  TorusGrid grid;
  // Evaluate e^{a v} on a 3/2-refined grid and filter back.
  bool dealias = false;

  // Throws BadParameter on lambda <= 0 or non-finite.
  void validate() const;
  ProblemSpec with_lambda(double l) const;
  ProblemSpec with_variant(Variant v) const;
};

// log int_Omega e^{alpha v} dx, computed with a max-shift.
double log_exp_integral(const Field& v, double alpha);

struct LogPartition {
  std::vector<double> per_atom;  // log int e^{a_i v}
  double total;                  // log sum_i w_i int e^{a_i v}
};

LogPartition log_partition(const ProblemSpec& spec, const Field& v);

// a_i^{-1} V(a_i, v) per atom; for Neri one shared constant repeated.
// Throws Overflow when an exponential integral is not representable.
std::vector<double> potential_over_alpha(const ProblemSpec& spec, const Field& v);

// V(a_i, v) per atom (spatially constant for both variants).
std::vector<double> potential(const ProblemSpec& spec, const Field& v);

Field rhs(const ProblemSpec& spec, const Field& v);
Field residual(const ProblemSpec& spec, const Field& v);

// J_lambda for Sawada-Suzuki, K_lambda for Neri.
double functional(const ProblemSpec& spec, const Field& v);
// L2 gradient of functional(); identical to residual().
Field functional_gradient(const ProblemSpec& spec, const Field& v);
// functional(v + step d) - functional(v) without cancellation (expm1/log1p).
double functional_change(const ProblemSpec& spec, const Field& v, const Field& d, double step);

// nu_+ and nu_- densities: lambda sum over a_i in I_+ (resp. I_-) of w_i |V| e^{a_i v}.
std::pair<Field, Field> nu_densities(const ProblemSpec& spec, const Field& v);
// mu_{a_i} = lambda (V/a_i) e^{a_i v}, one field per atom.
std::vector<Field> mu_product_densities(const ProblemSpec& spec, const Field& v);
// (G * nu_+, G * nu_-)
std::pair<Field, Field> u_pm_decomposition(const ProblemSpec& spec, const Field& v);

struct AssumptionReport {
  double c1_prime = 0.0;  // max_i a_i^{-1} V(a_i, v)
  double c2_prime = 0.0;  // sum_i w_i int |V(a_i,v)| e^{a_i v}
  double min_jensen_ratio = 0.0;  // min_i int e^{a_i v} / |Omega|
  bool jensen_ok = false;
  bool sign_ok = false;

  // `key = value` lines.
  std::string to_text() const;
};

AssumptionReport check_assumptions(const ProblemSpec& spec, const Field& v);

// True iff alpha -> int e^{alpha v} is nondecreasing over `alphas`, which
// must be ascending in (0,1] (BadParameter otherwise)
// (up to a relative slack of 1e-12 for rounding).
bool monotonicity_check(const Field& v, const std::vector<double>& alphas);

}  // namespace mfe
