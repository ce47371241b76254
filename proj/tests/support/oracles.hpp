#pragma once

// Test-only oracles. Nothing here calls into the spectral or mean-field
// code paths it is used to check.

#include <functional>
#include <vector>

#include "mfe/field.hpp"

namespace oracle {

// Mean-zero solution of the 5-point finite-difference Poisson problem
// -Lap_h u = g - mean(g), solved densely (bordered system with the
// mean-zero constraint).
mfe::Field fd_poisson_dense(const mfe::Field& g);

// int_0^{2 pi} e^{a cos t} dt by an n-point periodic trapezoid rule.
double exp_cos_period_integral(double a, int n = 4096);

// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope;
  double intercept;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Central difference of f at 0 with Richardson extrapolation over a sweep
// of steps; returns the extrapolated value whose successive estimates agree
// best.
double richardson_derivative(const std::function<double(double)>& f, double h0 = 1e-2, int levels = 5);

// Mass of the unit Liouville density 8 mu^2 / (1 + mu^2 r^2)^2 in a planar
// disc of radius r.
double liouville_disc_mass(double mu, double r);

}  // namespace oracle
