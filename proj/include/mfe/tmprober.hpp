#pragma once

// Trudinger-Moser threshold probes: evaluate J/K along a family of
// concentrating Liouville bubbles and read boundedness off the slope of
// the functional against log(mu).

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mfe/field.hpp"
#include "mfe/measure.hpp"
#include "mfe/meanfield.hpp"

namespace mfe {

struct ProbeFamily {
  std::vector<double> scales;
  std::vector<Field> fields;
  Side direction = Side::Plus;
  std::vector<bool> under_resolved;
};

// Mean-zero bubbles centred on the cell (N/2, N/2). Throws BadParameter
// unless mu_list is nonempty, positive and strictly increasing.
ProbeFamily probe_family(const TorusGrid& grid, const std::vector<double>& mu_list, Side direction);

// Side whose one-signed bubbles make the functional fall fastest: the
// one maximizing sum_side w g(|alpha|) with g(a) = max(0, 4a - 2), the
// growth rate of log int e^{a v} along the family.
Side choose_direction(const IntensityMeasure& p);

enum class Verdict { BoundedLooking, UnboundedLooking, Indeterminate };
std::string to_string(Verdict v);

struct SkippedMember {
  std::size_t lambda_index;
  std::size_t member;
  std::string reason;
};

struct SweepResult {
  std::vector<double> lambdas;
  std::vector<double> scales;
  // values[k][m]: functional at lambdas[k] on member m (NaN if skipped)
  std::vector<std::vector<double>> values;
  std::vector<double> family_infima;
  // d(functional)/d(log mu) between the two largest usable scales
  std::vector<double> slopes;
  std::vector<Verdict> verdicts;
  std::vector<SkippedMember> skipped;
};

constexpr double kDefaultSlopeTol = 0.05;

// slope < -tol: unbounded-looking; slope > tol: bounded-looking;
// otherwise (or fewer than two usable members) indeterminate.
Verdict classify(double slope, double slope_tol);

// Functional is J for Sawada-Suzuki, K for Neri. Throws BadParameter on an
// empty family.
SweepResult sweep(const ProblemSpec& spec, const std::vector<double>& lambdas, const ProbeFamily& family,
                  double slope_tol = kDefaultSlopeTol);

// Bisection on lambda until the bracket is within 1% relative width; the
// midpoint of the final bracket is returned. A step counts as unbounded
// iff the verdict is unbounded-looking. Throws NoBracket when both ends
// agree.
double threshold_estimate(const ProblemSpec& spec, std::pair<double, double> bracket, const ProbeFamily& family,
                          double slope_tol = kDefaultSlopeTol);

// lambda,mu,value,slope,verdict; one row per (lambda, member).
void write_sweep_csv(std::ostream& out, const SweepResult& r);

}  // namespace mfe
