#include "mfe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mfe::kernels {
namespace {

// Pairwise combination of block partials; the tree shape depends only on
// the number of blocks.
double pairwise(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise(x, half) + pairwise(x + half, n - half);
}

template <class BlockFn>
double blocked_sum(std::size_t n, BlockFn&& block) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block(lo, hi);
  }
  return pairwise(partial.data(), partial.size());
}

template <class Op>
double blocked_extreme(std::span<const double> x, double init, Op&& pick) {
  const std::size_t n = x.size();
  if (n == 0) return init;
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks, init);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double m = init;
    for (std::size_t i = lo; i < hi; ++i) m = pick(m, x[i]);
    partial[static_cast<std::size_t>(b)] = m;
  }
  double m = init;
  for (double p : partial) m = pick(m, p);
  return m;
}

}  // namespace

double sum(std::span<const double> x) {
  return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) { return pairwise(x.data() + lo, hi - lo); });
}

double dot(std::span<const double> x, std::span<const double> y) {
  return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
    double buf[kReductionBlock];
    for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = x[i] * y[i];
    return pairwise(buf, hi - lo);
  });
}

double max_value(std::span<const double> x) {
  return blocked_extreme(x, -std::numeric_limits<double>::infinity(),
                         [](double a, double b) { return b > a ? b : a; });
}

double min_value(std::span<const double> x) {
  return blocked_extreme(x, std::numeric_limits<double>::infinity(),
                         [](double a, double b) { return b < a ? b : a; });
}

void exp_shifted(std::span<const double> in, double scale, double shift, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = std::exp(scale * in[i] - shift);
}

double sum_exp_shifted(std::span<const double> in, double scale, double shift) {
  return blocked_sum(in.size(), [&](std::size_t lo, std::size_t hi) {
    double buf[kReductionBlock];
    for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = std::exp(scale * in[i] - shift);
    return pairwise(buf, hi - lo);
  });
}

double sum_weighted_expm1(std::span<const double> weight, std::span<const double> in, double scale) {
  return blocked_sum(in.size(), [&](std::size_t lo, std::size_t hi) {
    double buf[kReductionBlock];
    for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = weight[i] * std::expm1(scale * in[i]);
    return pairwise(buf, hi - lo);
  });
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void multiply_spectrum(std::span<std::complex<double>> spectrum, std::span<const double> multiplier) {
  const auto n = static_cast<std::ptrdiff_t>(spectrum.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) spectrum[i] *= multiplier[i];
}

}  // namespace mfe::kernels
