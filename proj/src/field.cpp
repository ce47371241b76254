#include "mfe/field.hpp"

#include <cmath>
#include <string>

#include "mfe/errors.hpp"
#include "mfe/kernels.hpp"

namespace mfe {

TorusGrid::TorusGrid(double side_length, int resolution) : side_length_(side_length), resolution_(resolution) {
  if (!(side_length > 0.0) || !std::isfinite(side_length)) throw BadParameter("side length must be positive");
  if (resolution < 8) throw BadParameter("resolution must be >= 8");
  if (resolution % 2 != 0) throw BadParameter("resolution must be even");
}

double TorusGrid::distance(const Point& a, const Point& b) const {
  double d2 = 0.0;
  for (int c = 0; c < 2; ++c) {
    double d = std::fmod(std::abs(a[c] - b[c]), side_length_);
    d = std::min(d, side_length_ - d);
    d2 += d * d;
  }
  return std::sqrt(d2);
}

Field::Field(const TorusGrid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const TorusGrid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw BadParameter("field value count does not match grid");
}

bool Field::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Field::check_same_grid(const Field& o) const {
  if (!(grid_ == o.grid_)) throw BadParameter("fields live on different grids");
}

Field& Field::operator+=(const Field& o) { return add_scaled(1.0, o); }
Field& Field::operator-=(const Field& o) { return add_scaled(-1.0, o); }

Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

Field& Field::add_scaled(double a, const Field& o) {
  check_same_grid(o);
  kernels::axpy(a, o.values_, values_);
  return *this;
}

Field& Field::add_constant(double c) {
  for (double& v : values_) v += c;
  return *this;
}

double integrate(const Field& f) { return kernels::sum(f.values()) * f.grid().cell_area(); }

double mean(const Field& f) { return kernels::sum(f.values()) / static_cast<double>(f.size()); }

double inner(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw BadParameter("fields live on different grids");
  return kernels::dot(f.values(), g.values()) * f.grid().cell_area();
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

double max_abs(const Field& f) {
  return std::max(kernels::max_value(f.values()), -kernels::min_value(f.values()));
}

bool is_mean_zero(const Field& f) { return std::abs(integrate(f)) <= kMeanZeroTol * l2_norm(f); }

Field project_mean_zero(Field f) {
  f.add_constant(-mean(f));
  return f;
}

}  // namespace mfe
