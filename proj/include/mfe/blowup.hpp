#pragma once

// Concentration diagnostics: synthetic Liouville bubbles, peak detection,
// ball masses, per-intensity atom masses at blow-up points, the
// quantization identity 8 pi int zeta = (int alpha zeta)^2 and the
// residual-vanishing probe.

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

#include "mfe/field.hpp"
#include "mfe/measure.hpp"
#include "mfe/meanfield.hpp"

namespace mfe {

struct BubbleSpec {
  Point center;
  double scale;  // mu
  Side sign = Side::Plus;
};

// mu > (N / 4L) 2 pi: the bubble core is narrower than about two cells.
bool under_resolved(const TorusGrid& grid, const BubbleSpec& spec);

// 8 mu^2 / (1 + mu^2 d^2)^2 with d the torus distance to the center.
Field liouville_density(const TorusGrid& grid, const Point& center, double scale);

// sign * (log liouville_density - its mean); mean-zero.
Field liouville_bubble(const TorusGrid& grid, const BubbleSpec& spec);

struct Peaks {
  std::vector<Point> plus;   // strict local maxima above +threshold
  std::vector<Point> minus;  // strict local minima below -threshold
};

// 8-neighbour strict extrema; each list sorted lexicographically.
Peaks detect_peaks(const Field& v, double threshold);

// Cell-area-weighted sum over cells whose centre lies within torus
// distance r of p. Throws BadRadius unless 0 < r < L/2.
double ball_mass(const Field& density, const Point& p, double r);

// Ball-radius schedule {0.5, 0.35, 0.25} scaled by L / 2 pi.
std::vector<double> default_radii(const TorusGrid& grid);

struct BlowupReport {
  static constexpr int kSchemaVersion = 1;

  std::vector<Point> peaks_plus;
  std::vector<Point> peaks_minus;
  // Per peak, plus peaks first, then minus peaks.
  std::vector<double> n_plus;
  std::vector<double> n_minus;
  // (alpha, mass of mu_alpha at the peak), one entry per atom of P.
  std::vector<std::vector<Atom>> zeta_atoms;
  std::vector<double> quantization_residual;
  std::optional<Field> s_plus_field;
  std::optional<Field> s_minus_field;
  // V(alpha_i, v) per atom: the finite-n stand-in for k(alpha, x).
  std::vector<Field> k_estimate;
  double c0_estimate = 0.0;

  // Context needed to interpret the report on its own.
  double lambda = 0.0;
  std::vector<Atom> measure;
  std::vector<double> radii;
  // sup over Omega minus the balls of |k_estimate|, per atom.
  std::vector<double> k_sup_outside;

  std::size_t peak_count() const { return peaks_plus.size() + peaks_minus.size(); }
};

// Throws OverlappingBalls when two peaks are closer than 2 max(r_schedule),
// BadParameter when r_schedule is empty or not decreasing.
BlowupReport estimate_masses(const ProblemSpec& spec, const Field& v, const Peaks& peaks,
                             const std::vector<double>& r_schedule);

// Quantization identity at one point: masses are zeta densities with
// respect to P, so atom i contributes weight_i * mass_i.
double quantization_residual(const std::vector<Atom>& weights, const std::vector<double>& masses);

// Solutions of 8 pi sum c_i = (sum alpha_i c_i)^2 for atomic zeta = sum c_i delta_{alpha_i}.
class QuantizationFamily {
 public:
  explicit QuantizationFamily(std::vector<double> support);

  const std::vector<double>& support() const { return support_; }

  // One atom: c = 8 pi / alpha^2.
  double single_mass() const;
  // One atom: n = |alpha| c = 8 pi / |alpha|.
  double single_n() const;
  // Two atoms: admissible c_2 >= 0 given c_1 >= 0 (0, 1 or 2 values,
  // ascending). The first support entry is the positive atom when the
  // signs differ.
  std::vector<double> partner_masses(double first_mass) const;

 private:
  std::vector<double> support_;
};

// Throws Unsupported unless 1 or 2 distinct atoms; BadParameter for a lone
// atom at alpha = 0 (the identity then forces c = 0 for every scale).
QuantizationFamily quantization_solve(std::vector<double> support);

struct VanishingTable {
  // sup_k[r][i]: sup over Omega minus balls of |k_estimate| for report r, atom i.
  std::vector<std::vector<double>> sup_k;
  double overall_decay = 0.0;  // first / last of max_i sup_k
  bool decay_ok = false;       // overall_decay >= 10
  bool hypothesis_met = false;  // supp P meets {-1,1} and a plus-only peak has n_+ > 4 pi
  bool consistent_with_vanishing = false;
};

// Needs at least 3 reports ordered by increasing concentration.
VanishingTable residual_vanishing_probe(const std::vector<BlowupReport>& reports);

nlohmann::json to_json(const BlowupReport& report);
// peak,sign,x1,x2,alpha,zeta_mass,n_plus,n_minus,quantization_residual
void write_mass_csv(std::ostream& out, const BlowupReport& report);

}  // namespace mfe
