#pragma once

// Scalar fields on the flat square torus [0,L)^2, sampled at the N x N cell
// centers x_i = (i + 1/2) L / N. Storage is row-major with the first
// coordinate as the row index: value(i, j) lives at x = (x_i, x_j).

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mfe {

using Point = std::array<double, 2>;

class TorusGrid {
 public:
  // Throws BadParameter unless L > 0 and N is even and >= 8.
  TorusGrid(double side_length, int resolution);

  double side_length() const { return side_length_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return static_cast<std::size_t>(resolution_) * resolution_; }
  double spacing() const { return side_length_ / resolution_; }
  double cell_area() const { return spacing() * spacing(); }
  double area() const { return side_length_ * side_length_; }
  double coordinate(int i) const { return (i + 0.5) * spacing(); }
  Point cell_center(int i, int j) const { return {coordinate(i), coordinate(j)}; }

  // Minimum-image distance on the torus.
  double distance(const Point& a, const Point& b) const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  double side_length_;
  int resolution_;
};

class Field {
 public:
  explicit Field(const TorusGrid& grid, double fill = 0.0);
  Field(const TorusGrid& grid, std::vector<double> values);

  template <class F>
  static Field from_function(const TorusGrid& grid, F&& f) {
    Field out(grid);
    const int n = grid.resolution();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out(i, j) = f(grid.coordinate(i), grid.coordinate(j));
    }
    return out;
  }

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double a);
  Field& add_scaled(double a, const Field& o);
  Field& add_constant(double c);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_.resolution()) + static_cast<std::size_t>(j);
  }
  void check_same_grid(const Field& o) const;

  TorusGrid grid_;
  std::vector<double> values_;
};

// Quadrature: cell-area-weighted sums (exact for band-limited integrands).
double integrate(const Field& f);
double mean(const Field& f);
double inner(const Field& f, const Field& g);
double l2_norm(const Field& f);
double max_abs(const Field& f);

inline constexpr double kMeanZeroTol = 1e-10;

// |integral f| <= 1e-10 * ||f||_2
bool is_mean_zero(const Field& f);
Field project_mean_zero(Field f);

// Spectral operators (Fourier multipliers on the N x N grid).
Field laplacian(const Field& f);
// Unique mean-zero u with -Lap u = g - mean(g).
Field solve_poisson(const Field& g);
// G * density with the mean-zero periodic Green's function of -Lap.
Field green_convolve(const Field& density);
std::array<Field, 2> gradient(const Field& f);
// <f, -Lap f>; equals ||grad f||^2 for fields without Nyquist content.
double dirichlet_energy(const Field& f);

// Trigonometric interpolation onto a `resolution` grid of the same side
// length. Nyquist modes are dropped in both directions.
Field resample(const Field& f, int resolution);

}  // namespace mfe
