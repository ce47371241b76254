#pragma once

// Data-parallel inner loops used by the field and mean-field code.
//
// Two implementations share one interface: mfe::kernels (OpenMP) and
// mfe::kernels::serial (plain loops, kept as the reference the tests and
// the benchmark compare against). Reductions in the OpenMP version split
// the input into fixed-size blocks and combine block partials in a fixed
// order, so results are bitwise identical for any thread count.

#include <complex>
#include <cstddef>
#include <span>

namespace mfe::kernels {

inline constexpr std::size_t kReductionBlock = 2048;

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double max_value(std::span<const double> x);
double min_value(std::span<const double> x);

// out[i] = exp(scale * in[i] - shift)
void exp_shifted(std::span<const double> in, double scale, double shift, std::span<double> out);

// sum_i exp(scale * in[i] - shift)
double sum_exp_shifted(std::span<const double> in, double scale, double shift);

// sum_i weight[i] * expm1(scale * in[i])
double sum_weighted_expm1(std::span<const double> weight, std::span<const double> in, double scale);

// y[i] += a * x[i]
void axpy(double a, std::span<const double> x, std::span<double> y);

// spectrum[k] *= multiplier[k]
void multiply_spectrum(std::span<std::complex<double>> spectrum, std::span<const double> multiplier);

namespace serial {

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double max_value(std::span<const double> x);
double min_value(std::span<const double> x);
void exp_shifted(std::span<const double> in, double scale, double shift, std::span<double> out);
double sum_exp_shifted(std::span<const double> in, double scale, double shift);
double sum_weighted_expm1(std::span<const double> weight, std::span<const double> in, double scale);
void axpy(double a, std::span<const double> x, std::span<double> y);
void multiply_spectrum(std::span<std::complex<double>> spectrum, std::span<const double> multiplier);

}  // namespace serial

}  // namespace mfe::kernels
