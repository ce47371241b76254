#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "mfe/blowup.hpp"
#include "mfe/errors.hpp"
#include "mfe/kernels.hpp"
#include "mfe/tmprober.hpp"

using mfe::Field;
using mfe::IntensityMeasure;
using mfe::ProblemSpec;
using mfe::Side;
using mfe::TorusGrid;
using mfe::Variant;
using mfe::Verdict;

namespace {

constexpr double kPi = std::numbers::pi;
const TorusGrid kGrid(2 * kPi, 128);
const std::vector<double> kScales{4.0, 8.0, 16.0};

}  // namespace

TEST_CASE("probe family") {
  const auto one = mfe::probe_family(kGrid, {10.0}, Side::Plus);
  REQUIRE(one.fields.size() == 1);
  const auto c = kGrid.cell_center(64, 64);
  CHECK(mfe::max_abs(one.fields[0] - mfe::liouville_bubble(kGrid, {c, 10.0, Side::Plus})) == 0.0);

  const auto plus = mfe::probe_family(kGrid, kScales, Side::Plus);
  const auto minus = mfe::probe_family(kGrid, kScales, Side::Minus);
  CHECK(minus.direction == Side::Minus);
  std::vector<double> x, y;
  for (std::size_t m = 0; m < kScales.size(); ++m) {
    CHECK(mfe::max_abs(plus.fields[m] + minus.fields[m]) == 0.0);
    CHECK(mfe::is_mean_zero(plus.fields[m]));
    CHECK(!plus.under_resolved[m]);
    x.push_back(std::log(kScales[m]));
    y.push_back(mfe::kernels::max_value(plus.fields[m].values()));
  }
  CHECK(oracle::fit_line(x, y).slope == doctest::Approx(4.0).epsilon(0.05));
  CHECK(mfe::probe_family(kGrid, {100.0}, Side::Plus).under_resolved[0]);

  CHECK_THROWS_AS(mfe::probe_family(kGrid, {}, Side::Plus), mfe::BadParameter);
  CHECK_THROWS_AS(mfe::probe_family(kGrid, {8.0, 4.0}, Side::Plus), mfe::BadParameter);
  CHECK_THROWS_AS(mfe::probe_family(kGrid, {0.0, 4.0}, Side::Plus), mfe::BadParameter);
}

TEST_CASE("direction chooser picks the heavier side") {
  CHECK(mfe::choose_direction(IntensityMeasure::dirac_one()) == Side::Plus);
  CHECK(mfe::choose_direction(IntensityMeasure::two_mass(0.7)) == Side::Plus);
  CHECK(mfe::choose_direction(IntensityMeasure::two_mass(0.3)) == Side::Minus);
  CHECK(mfe::choose_direction(IntensityMeasure::two_mass(0.5)) == Side::Plus);
  // atoms with |alpha| <= 1/2 do not grow along a bubble family
  CHECK(mfe::choose_direction(IntensityMeasure({{0.4, 0.6}, {-1.0, 0.4}})) == Side::Minus);
}

TEST_CASE("classify") {
  CHECK(mfe::classify(-1.0, 0.05) == Verdict::UnboundedLooking);
  CHECK(mfe::classify(1.0, 0.05) == Verdict::BoundedLooking);
  CHECK(mfe::classify(0.01, 0.05) == Verdict::Indeterminate);
  CHECK(mfe::classify(std::nan(""), 0.05) == Verdict::Indeterminate);
  CHECK(mfe::to_string(Verdict::BoundedLooking) == "bounded-looking");
}

TEST_CASE("sweep around 8 pi") {
  const auto fam = mfe::probe_family(kGrid, kScales, Side::Plus);
  const ProblemSpec spec{Variant::SawadaSuzuki, 1.0, IntensityMeasure::dirac_one(), kGrid};
  const auto r = mfe::sweep(spec, {8 * kPi - 2, 8 * kPi + 2}, fam);
  REQUIRE(r.slopes.size() == 2);
  CHECK(r.values.size() == 2);
  CHECK(r.family_infima.size() == 2);
  CHECK(r.verdicts[0] == Verdict::BoundedLooking);
  CHECK(r.verdicts[1] == Verdict::UnboundedLooking);
  // the bubble energy grows like 16 pi log mu and log int e^v like 2 log mu
  CHECK(r.slopes[0] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(r.slopes[1] == doctest::Approx(-4.0).epsilon(0.1));
  CHECK(r.family_infima[1] == *std::min_element(r.values[1].begin(), r.values[1].end()));
  CHECK(r.skipped.empty());

  const auto none = mfe::sweep(spec, {}, fam);
  CHECK(none.lambdas.empty());
  CHECK(none.verdicts.empty());
  CHECK_THROWS_AS(mfe::sweep(spec, {1.0}, mfe::ProbeFamily{}), mfe::BadParameter);
}

TEST_CASE("functional values are nonincreasing in lambda and K dominates its J-type bound") {
  const auto fam = mfe::probe_family(kGrid, kScales, Side::Plus);
  for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
    const ProblemSpec spec{variant, 1.0, IntensityMeasure::two_mass(0.3), kGrid};
    const auto r = mfe::sweep(spec, {5.0, 10.0, 20.0, 40.0}, fam);
    for (std::size_t k = 1; k < r.lambdas.size(); ++k) {
      for (std::size_t m = 0; m < kScales.size(); ++m) CHECK(r.values[k][m] <= r.values[k - 1][m]);
    }
  }
  const ProblemSpec k_spec{Variant::Neri, 30.0, IntensityMeasure::uniform_quadrature(5), kGrid};
  for (const auto& v : fam.fields) {
    double worst = -INFINITY;
    for (const auto& a : k_spec.measure.atoms()) worst = std::max(worst, mfe::log_exp_integral(v, a.alpha));
    const double bound = 0.5 * mfe::dirichlet_energy(v) - k_spec.lambda * worst;
    CHECK(mfe::functional(k_spec, v) >= bound - 1e-9 * std::abs(bound));
  }
}

TEST_CASE("threshold estimates") {
  const auto fam = mfe::probe_family(kGrid, kScales, Side::Plus);
  const ProblemSpec j{Variant::SawadaSuzuki, 1.0, IntensityMeasure::dirac_one(), kGrid};
  const double tj = mfe::threshold_estimate(j, {20.0, 32.0}, fam);
  const double tk = mfe::threshold_estimate(j.with_variant(Variant::Neri), {20.0, 32.0}, fam);
  CHECK(tj == doctest::Approx(8 * kPi).epsilon(0.05));
  CHECK(tj == tk);
  CHECK(tj == mfe::threshold_estimate(j, {20.0, 32.0}, fam));

  const ProblemSpec two{Variant::SawadaSuzuki, 1.0, IntensityMeasure::two_mass(0.5), kGrid};
  CHECK(mfe::threshold_estimate(two, {40.0, 60.0}, fam) == doctest::Approx(16 * kPi).epsilon(0.1));
  CHECK(mfe::threshold_estimate(two.with_variant(Variant::Neri), {20.0, 32.0}, fam) ==
        doctest::Approx(8 * kPi).epsilon(0.1));

  // heavier side of an asymmetric two-mass measure: 8 pi / max(t, 1 - t)
  const ProblemSpec asym{Variant::SawadaSuzuki, 1.0, IntensityMeasure::two_mass(0.25), kGrid};
  const auto side = mfe::probe_family(kGrid, kScales, mfe::choose_direction(asym.measure));
  CHECK(mfe::threshold_estimate(asym, {20.0, 60.0}, side) == doctest::Approx(8 * kPi / 0.75).epsilon(0.1));

  CHECK_THROWS_AS(mfe::threshold_estimate(j, {5.0, 10.0}, fam), mfe::NoBracket);
  CHECK_THROWS_AS(mfe::threshold_estimate(j, {10.0, 5.0}, fam), mfe::BadParameter);
}

TEST_CASE("sweep csv") {
  const auto fam = mfe::probe_family(kGrid, kScales, Side::Plus);
  const ProblemSpec spec{Variant::Neri, 1.0, IntensityMeasure::dirac_one(), kGrid};
  const auto r = mfe::sweep(spec, {10.0, 30.0}, fam);
  std::ostringstream out;
  mfe::write_sweep_csv(out, r);
  const std::string s = out.str();
  CHECK(s.rfind("lambda,mu,value,slope,verdict\r\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 2 * 3);
  CHECK(s.find("unbounded-looking") != std::string::npos);
}
