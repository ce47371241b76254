#include "mfe/measure.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "mfe/errors.hpp"

namespace mfe {

double AtomSet::total() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

IntensityMeasure::IntensityMeasure(std::vector<Atom> atoms) {
  if (atoms.empty()) throw BadParameter("intensity measure needs at least one atom");
  for (const auto& a : atoms) {
    if (!std::isfinite(a.alpha) || a.alpha < -1.0 || a.alpha > 1.0) {
      throw BadParameter("atom alpha " + std::to_string(a.alpha) + " outside [-1,1]");
    }
    if (!std::isfinite(a.weight) || a.weight <= 0.0) {
      throw BadParameter("atom weight " + std::to_string(a.weight) + " must be positive");
    }
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.alpha < b.alpha; });
  for (const auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().alpha == a.alpha) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
  double total = 0.0;
  for (const auto& a : atoms_) total += a.weight;
  if (std::abs(total - 1.0) > kNormalizationTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "intensity measure weights sum to " << total << ", expected 1";
    throw BadParameter(msg.str());
  }
}

double IntensityMeasure::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight * f(a.alpha);
  return s;
}

AtomSet IntensityMeasure::restrict(Side side) const {
  AtomSet out;
  for (const auto& a : atoms_) {
    if (on_side(a.alpha, side)) out.atoms.push_back(a);
  }
  return out;
}

bool IntensityMeasure::touches_endpoints() const {
  return std::any_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return std::abs(a.alpha) == 1.0; });
}

IntensityMeasure IntensityMeasure::dirac_one() { return IntensityMeasure({{1.0, 1.0}}); }

IntensityMeasure IntensityMeasure::two_mass(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw BadParameter("two_mass: t not in [0,1]");
  if (t == 1.0) return IntensityMeasure({{1.0, 1.0}});
  if (t == 0.0) return IntensityMeasure({{-1.0, 1.0}});
  return IntensityMeasure({{-1.0, 1.0 - t}, {1.0, t}});
}

IntensityMeasure IntensityMeasure::uniform_quadrature(int n) {
  if (n < 1) throw BadParameter("uniform_quadrature: n must be >= 1");
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(n));
  const double h = 2.0 / n;
  for (int i = 0; i < n; ++i) {
    // midpoint of cell i; written as a ratio so symmetric cells give exact negatives
    const double alpha = static_cast<double>(2 * i + 1 - n) / n;
    atoms.push_back({alpha, h / 2.0});
  }
  // weights 1/n summed n times can miss 1 by a few ulp; fold the difference
  // into the last atom so the stored measure is exactly normalized
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  atoms.back().weight += 1.0 - total;
  return IntensityMeasure(std::move(atoms));
}

IntensityMeasure IntensityMeasure::preset(const std::string& name, double param) {
  if (name == "dirac_one") return dirac_one();
  if (name == "two_mass") return two_mass(param);
  if (name == "uniform_quadrature") {
    if (param != std::floor(param)) throw BadParameter("uniform_quadrature: n must be an integer");
    return uniform_quadrature(static_cast<int>(param));
  }
  throw BadParameter("unknown measure preset '" + name + "'");
}

IntensityMeasure IntensityMeasure::parse(std::istream& in) {
  std::vector<Atom> atoms;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    Atom a{};
    std::string rest;
    if (!(ls >> a.alpha >> a.weight) || (ls >> rest)) {
      throw BadParameter("measure line " + std::to_string(lineno) + ": expected `alpha weight`");
    }
    atoms.push_back(a);
  }
  return IntensityMeasure(std::move(atoms));
}

void IntensityMeasure::write(std::ostream& out) const {
  const auto old = out.precision(17);
  for (const auto& a : atoms_) out << a.alpha << ' ' << a.weight << '\n';
  out.precision(old);
}

double best_constant_J(const IntensityMeasure& p) {
  if (p.size() > IntensityMeasure::kMaxEnumerationAtoms) {
    throw BadParameter("best_constant_J: subset enumeration limited to 20 atoms");
  }
  double best = std::numeric_limits<double>::infinity();
  for (Side side : {Side::Plus, Side::Minus}) {
    const auto set = p.restrict(side);
    const std::size_t m = set.atoms.size();
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      double mass = 0.0;
      double moment = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (mask & (1u << i)) {
          mass += set.atoms[i].weight;
          moment += set.atoms[i].alpha * set.atoms[i].weight;
        }
      }
      if (moment == 0.0) continue;
      best = std::min(best, 8.0 * std::numbers::pi * mass / (moment * moment));
    }
  }
  if (!std::isfinite(best)) throw NoAdmissibleSubset("every one-signed atom subset has zero first moment");
  return best;
}

}  // namespace mfe
