#pragma once

// Probability measures on the intensity interval [-1, 1], stored as
// weighted atoms. Continuous measures enter through quadrature presets.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mfe {

struct Atom {
  double alpha;
  double weight;

  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class Side { Plus, Minus };

// Finite nonnegative atom list, not necessarily normalized. Returned by
// restrict(); also the input type for IntensityMeasure construction.
struct AtomSet {
  std::vector<Atom> atoms;

  double total() const;
  bool empty() const { return atoms.empty(); }
};

// Immutable probability measure: alphas in [-1,1] strictly increasing,
// weights positive, total mass one within 1e-12. Duplicate alphas passed
// to the constructor are merged by summing their weights.
class IntensityMeasure {
 public:
  static constexpr double kNormalizationTol = 1e-12;
  static constexpr std::size_t kMaxEnumerationAtoms = 20;

  explicit IntensityMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double integrate(const std::function<double(double)>& f) const;

  // I+ = [0,1], I- = [-1,0).
  AtomSet restrict(Side side) const;

  // True when some atom sits at alpha = +1 or alpha = -1.
  bool touches_endpoints() const;

  // Presets.
  static IntensityMeasure dirac_one();
  static IntensityMeasure two_mass(double t);
  static IntensityMeasure uniform_quadrature(int n);

  // name in {dirac_one, two_mass, uniform_quadrature}; `param` is t or n.
  static IntensityMeasure preset(const std::string& name, double param = 0.0);

  // Plain-text `alpha weight` lines. Blank lines and lines starting with
  // '#' are skipped on input.
  static IntensityMeasure parse(std::istream& in);
  void write(std::ostream& out) const;

  friend bool operator==(const IntensityMeasure&, const IntensityMeasure&) = default;

 private:
  std::vector<Atom> atoms_;
};

inline bool on_side(double alpha, Side side) { return side == Side::Plus ? alpha >= 0.0 : alpha < 0.0; }

// inf over nonempty one-signed atom subsets K of 8 pi P(K) / (sum_K alpha w)^2.
// Subsets with zero first moment are skipped. Throws NoAdmissibleSubset when
// nothing is left, BadParameter above kMaxEnumerationAtoms atoms.
double best_constant_J(const IntensityMeasure& p);

}  // namespace mfe
