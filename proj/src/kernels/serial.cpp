#include "mfe/kernels.hpp"

#include <cmath>
#include <limits>

namespace mfe::kernels::serial {
namespace {

// Neumaier-compensated accumulation; the reference is allowed to be more
// accurate than the blocked parallel sum, never less.
class Accumulator {
 public:
  void add(double v) {
    const double t = s_ + v;
    if (std::abs(s_) >= std::abs(v)) {
      c_ += (s_ - t) + v;
    } else {
      c_ += (v - t) + s_;
    }
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace

double sum(std::span<const double> x) {
  Accumulator acc;
  for (double v : x) acc.add(v);
  return acc.value();
}

double dot(std::span<const double> x, std::span<const double> y) {
  Accumulator acc;
  for (std::size_t i = 0; i < x.size(); ++i) acc.add(x[i] * y[i]);
  return acc.value();
}

double max_value(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = v > m ? v : m;
  return m;
}

double min_value(std::span<const double> x) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : x) m = v < m ? v : m;
  return m;
}

void exp_shifted(std::span<const double> in, double scale, double shift, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::exp(scale * in[i] - shift);
}

double sum_exp_shifted(std::span<const double> in, double scale, double shift) {
  Accumulator acc;
  for (double v : in) acc.add(std::exp(scale * v - shift));
  return acc.value();
}

double sum_weighted_expm1(std::span<const double> weight, std::span<const double> in, double scale) {
  Accumulator acc;
  for (std::size_t i = 0; i < in.size(); ++i) acc.add(weight[i] * std::expm1(scale * in[i]));
  return acc.value();
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void multiply_spectrum(std::span<std::complex<double>> spectrum, std::span<const double> multiplier) {
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= multiplier[i];
}

}  // namespace mfe::kernels::serial
