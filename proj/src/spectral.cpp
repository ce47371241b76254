// Fourier-multiplier operators on the torus, backed by FFTW real-to-complex
// transforms. Plans are created once per resolution (FFTW planning is not
// thread-safe) and executed through the new-array interface, which is.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include "mfe/field.hpp"
#include "mfe/kernels.hpp"

namespace mfe {
namespace {

using cplx = std::complex<double>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

class Plans {
 public:
  explicit Plans(int n) : n_(n) {
    auto real = fftw_buffer<double>(real_size());
    auto spec = fftw_buffer<fftw_complex>(spectrum_size());
    forward_ = fftw_plan_dft_r2c_2d(n, n, real.get(), spec.get(), FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_2d(n, n, spec.get(), real.get(), FFTW_ESTIMATE);
  }
  ~Plans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;

  std::size_t real_size() const { return static_cast<std::size_t>(n_) * n_; }
  std::size_t spectrum_size() const { return static_cast<std::size_t>(n_) * (n_ / 2 + 1); }

  void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(forward_, in, out); }
  // c2r destroys its input.
  void inverse(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(inverse_, in, out); }

 private:
  int n_;
  fftw_plan forward_;
  fftw_plan inverse_;
};

const Plans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plans>(n);
  return *slot;
}

// Signed mode number for storage index m on an n-point axis.
int mode(int m, int n) { return m <= n / 2 ? m : m - n; }

// Spectrum of a field plus the transforms to get in and out of it.
class Spectrum {
 public:
  explicit Spectrum(const Field& f)
      : grid_(f.grid()),
        n_(grid_.resolution()),
        plans_(plans_for(n_)),
        data_(fftw_buffer<fftw_complex>(plans_.spectrum_size())) {
    auto real = fftw_buffer<double>(plans_.real_size());
    std::copy(f.values().begin(), f.values().end(), real.get());
    plans_.forward(real.get(), data_.get());
  }

  int resolution() const { return n_; }
  int half() const { return n_ / 2 + 1; }
  double wavenumber(int m) const { return 2.0 * std::numbers::pi * mode(m, n_) / grid_.side_length(); }

  std::span<cplx> coefficients() {
    return {reinterpret_cast<cplx*>(data_.get()), plans_.spectrum_size()};
  }
  cplx& at(int m1, int m2) { return coefficients()[static_cast<std::size_t>(m1) * half() + m2]; }

  template <class Multiplier>
  void apply(Multiplier&& mult) {
    const int h = half();
    std::vector<double> factor(plans_.spectrum_size());
    for (int m1 = 0; m1 < n_; ++m1) {
      for (int m2 = 0; m2 < h; ++m2) factor[static_cast<std::size_t>(m1) * h + m2] = mult(m1, m2);
    }
    kernels::multiply_spectrum(coefficients(), factor);
  }

  Field to_field() {
    auto real = fftw_buffer<double>(plans_.real_size());
    plans_.inverse(data_.get(), real.get());
    const double scale = 1.0 / static_cast<double>(plans_.real_size());
    std::vector<double> values(real.get(), real.get() + plans_.real_size());
    for (double& v : values) v *= scale;
    return Field(grid_, std::move(values));
  }

 private:
  TorusGrid grid_;
  int n_;
  const Plans& plans_;
  FftwBuffer<fftw_complex> data_;
};

}  // namespace

Field laplacian(const Field& f) {
  Spectrum s(f);
  s.apply([&](int m1, int m2) {
    const double k1 = s.wavenumber(m1);
    const double k2 = s.wavenumber(m2);
    return -(k1 * k1 + k2 * k2);
  });
  return s.to_field();
}

Field solve_poisson(const Field& g) {
  Spectrum s(g);
  s.apply([&](int m1, int m2) {
    if (m1 == 0 && m2 == 0) return 0.0;
    const double k1 = s.wavenumber(m1);
    const double k2 = s.wavenumber(m2);
    return 1.0 / (k1 * k1 + k2 * k2);
  });
  return s.to_field();
}

Field green_convolve(const Field& density) { return solve_poisson(density); }

std::array<Field, 2> gradient(const Field& f) {
  const int n = f.grid().resolution();
  const int nyquist = n / 2;
  std::array<Field, 2> out{Field(f.grid()), Field(f.grid())};
  for (int axis = 0; axis < 2; ++axis) {
    Spectrum s(f);
    auto c = s.coefficients();
    const int h = s.half();
    for (int m1 = 0; m1 < n; ++m1) {
      for (int m2 = 0; m2 < h; ++m2) {
        const int m = axis == 0 ? m1 : m2;
        cplx& z = c[static_cast<std::size_t>(m1) * h + m2];
        z = (m == nyquist) ? cplx(0.0) : z * cplx(0.0, s.wavenumber(m));
      }
    }
    out[static_cast<std::size_t>(axis)] = s.to_field();
  }
  return out;
}

double dirichlet_energy(const Field& f) { return -inner(f, laplacian(f)); }

Field resample(const Field& f, int resolution) {
  const TorusGrid target(f.grid().side_length(), resolution);
  const int n = f.grid().resolution();
  if (resolution == n) return f;
  Spectrum src(f);
  Field zero(target);
  Spectrum dst(zero);

  const int keep = std::min(n, resolution) / 2;  // |mode| < keep
  const double h_src = f.grid().spacing();
  const double h_dst = target.spacing();
  const double scale = static_cast<double>(target.size()) / static_cast<double>(f.grid().size());
  // cell-centred samples carry a half-cell phase that differs between grids
  auto phase = [&](int signed_mode) {
    const double k = 2.0 * std::numbers::pi * signed_mode / f.grid().side_length();
    return std::polar(1.0, 0.5 * k * (h_dst - h_src));
  };
  for (int q1 = -keep + 1; q1 < keep; ++q1) {
    const int s1 = q1 >= 0 ? q1 : q1 + n;
    const int d1 = q1 >= 0 ? q1 : q1 + resolution;
    for (int q2 = 0; q2 < keep; ++q2) {
      dst.at(d1, q2) = scale * src.at(s1, q2) * phase(q1) * phase(q2);
    }
  }
  return dst.to_field();
}

}  // namespace mfe
