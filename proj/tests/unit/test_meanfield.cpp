#include <cmath>
#include <limits>
#include <numbers>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "mfe/errors.hpp"
#include "mfe/kernels.hpp"
#include "mfe/meanfield.hpp"
#include "mfe/random.hpp"

using mfe::Field;
using mfe::IntensityMeasure;
using mfe::ProblemSpec;
using mfe::TorusGrid;
using mfe::Variant;

namespace {

constexpr double kPi = std::numbers::pi;
const double kArea = 4 * kPi * kPi;
const TorusGrid kGrid(2 * kPi, 32);

ProblemSpec make(Variant variant, double lambda, IntensityMeasure m, const TorusGrid& grid = kGrid) {
  return ProblemSpec{variant, lambda, std::move(m), grid};
}

Field cos_x(const TorusGrid& grid = kGrid) {
  return Field::from_function(grid, [](double x, double) { return std::cos(x); });
}

const std::vector<IntensityMeasure>& measures() {
  static const std::vector<IntensityMeasure> all{IntensityMeasure::dirac_one(), IntensityMeasure::two_mass(0.3),
                                                 IntensityMeasure::uniform_quadrature(5)};
  return all;
}

}  // namespace

TEST_CASE("potential_over_alpha") {
  for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
    for (const auto& m : measures()) {
      for (double p : mfe::potential_over_alpha(make(variant, 3.0, m), Field(kGrid))) {
        CHECK(p == doctest::Approx(1 / kArea).epsilon(1e-14));
      }
    }
  }
  const auto neri = mfe::potential_over_alpha(make(Variant::Neri, 1.0, IntensityMeasure::two_mass(0.3)), cos_x());
  REQUIRE(neri.size() == 2);
  CHECK(neri[0] == neri[1]);

  mfe::Xoshiro256 rng(3);
  for (int t = 0; t < 10; ++t) {
    const Field v = mfe::random_band_limited(kGrid, rng, 4);
    for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
      for (double p : mfe::potential_over_alpha(make(variant, 1.0, IntensityMeasure::two_mass(0.6)), v)) {
        CHECK(p < 1 / kArea);
      }
    }
  }
}

TEST_CASE("potential_over_alpha reports overflow") {
  Field v(kGrid);
  v(3, 3) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(mfe::potential_over_alpha(make(Variant::SawadaSuzuki, 1.0, IntensityMeasure::dirac_one()), v),
                  mfe::Overflow);
  Field huge(kGrid);
  huge(3, 3) = 800.0;
  CHECK_THROWS_AS(mfe::potential_over_alpha(make(Variant::Neri, 1.0, IntensityMeasure::dirac_one()), huge),
                  mfe::Overflow);
  // the log-shifted right-hand side still evaluates
  CHECK(mfe::rhs(make(Variant::Neri, 1.0, IntensityMeasure::dirac_one()), huge).all_finite());
}

TEST_CASE("rhs") {
  for (const auto& m : measures()) {
    CHECK(mfe::max_abs(mfe::rhs(make(Variant::Neri, 7.0, m), Field(kGrid))) <= 1e-14);
    CHECK(mfe::max_abs(mfe::rhs(make(Variant::SawadaSuzuki, 7.0, m), Field(kGrid))) <= 1e-14);
  }
  // single atom at 1 reduces to lambda (e^v / int e^v - 1/|Omega|)
  mfe::Xoshiro256 rng(8);
  const Field v = mfe::random_band_limited(kGrid, rng, 4);
  const double lambda = 12.0;
  Field expected(kGrid);
  double z = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) z += std::exp(v[k]);
  z *= kGrid.cell_area();
  for (std::size_t k = 0; k < v.size(); ++k) expected[k] = lambda * (std::exp(v[k]) / z - 1 / kArea);
  const auto ss = make(Variant::SawadaSuzuki, lambda, IntensityMeasure::dirac_one());
  const auto ne = make(Variant::Neri, lambda, IntensityMeasure::dirac_one());
  CHECK(mfe::max_abs(mfe::rhs(ss, v) - expected) <= 1e-13);
  const Field a = mfe::rhs(ss, v);
  const Field b = mfe::rhs(ne, v);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST_CASE("rhs is mean-zero for every variant and measure") {
  mfe::Xoshiro256 rng(21);
  for (int t = 0; t < 10; ++t) {
    const Field v = mfe::random_band_limited(kGrid, rng, 5, 2.0);
    for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
      for (const auto& m : measures()) CHECK(std::abs(mfe::integrate(mfe::rhs(make(variant, 20.0, m), v))) <= 1e-12);
    }
  }
}

TEST_CASE("residual") {
  const auto spec = make(Variant::SawadaSuzuki, 1.0, IntensityMeasure::dirac_one());
  CHECK(mfe::max_abs(mfe::residual(spec, Field(kGrid))) == 0.0);
  // v = cos x1: residual = cos x1 - (e^{cos x1} / Z - 1/|Omega|), Z = 2 pi int_0^{2pi} e^{cos t} dt
  const double z = 2 * kPi * oracle::exp_cos_period_integral(1.0);
  const Field expected = Field::from_function(kGrid, [&](double x, double) {
    return std::cos(x) - (std::exp(std::cos(x)) / z - 1 / kArea);
  });
  CHECK(mfe::max_abs(mfe::residual(spec, cos_x()) - expected) <= 1e-12);
  // the same expression at x = 0
  const double spot = 1 - (std::exp(1.0) / z - 1 / kArea);
  CHECK(spot == doctest::Approx(1 - (std::exp(1.0) / (4 * kPi * kPi * std::cyl_bessel_i(0.0, 1.0)) - 1 / kArea)));
}

TEST_CASE("functional") {
  for (const auto& m : measures()) {
    for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
      CHECK(mfe::functional(make(variant, 5.0, m), Field(kGrid)) ==
            doctest::Approx(-5.0 * std::log(kArea)).epsilon(1e-14));
    }
  }
  mfe::Xoshiro256 rng(4);
  for (int t = 0; t < 10; ++t) {
    const Field v = mfe::random_band_limited(kGrid, rng, 4, 2.0);
    CHECK(mfe::functional(make(Variant::SawadaSuzuki, 9.0, IntensityMeasure::dirac_one()), v) ==
          mfe::functional(make(Variant::Neri, 9.0, IntensityMeasure::dirac_one()), v));
    for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
      const auto spec = make(variant, 9.0, IntensityMeasure::two_mass(0.5));
      CHECK(std::abs(mfe::functional(spec, v) - mfe::functional(spec, -v)) <= 1e-12);
    }
  }
}

TEST_CASE("functional_gradient matches finite differences") {
  mfe::Xoshiro256 rng(99);
  for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
    for (const auto& m : measures()) {
      const auto spec = make(variant, 17.0, m);
      CHECK(mfe::max_abs(mfe::functional_gradient(spec, Field(kGrid))) <= 1e-14);
      for (int t = 0; t < 3; ++t) {
        const Field v = mfe::random_band_limited(kGrid, rng, 5);
        const Field phi = mfe::random_band_limited(kGrid, rng, 5);
        const double analytic = mfe::inner(mfe::functional_gradient(spec, v), phi);
        const double fd = oracle::richardson_derivative([&](double e) {
          Field w = v;
          w.add_scaled(e, phi);
          return mfe::functional(spec, w);
        });
        CHECK(std::abs(analytic - fd) <= 1e-6 * mfe::l2_norm(phi));
      }
    }
  }
}

TEST_CASE("functional_change agrees with direct differences") {
  mfe::Xoshiro256 rng(31);
  for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
    const auto spec = make(variant, 11.0, IntensityMeasure::uniform_quadrature(4));
    const Field v = mfe::random_band_limited(kGrid, rng, 4);
    const Field d = mfe::random_band_limited(kGrid, rng, 4);
    for (double s : {1.0, 0.1, 1e-3}) {
      Field w = v;
      w.add_scaled(s, d);
      const double direct = mfe::functional(spec, w) - mfe::functional(spec, v);
      CHECK(mfe::functional_change(spec, v, d, s) == doctest::Approx(direct).epsilon(1e-9));
    }
    // tiny steps: first-order term dominates
    const double slope = mfe::inner(mfe::functional_gradient(spec, v), d);
    CHECK(mfe::functional_change(spec, v, d, 1e-12) / 1e-12 == doctest::Approx(slope).epsilon(1e-6));
  }
}

TEST_CASE("de-aliased evaluation") {
  mfe::Xoshiro256 rng(12);
  const Field v = mfe::random_band_limited(kGrid, rng, 4, 0.3);
  const Field phi = mfe::random_band_limited(kGrid, rng, 4);
  for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
    auto plain = make(variant, 10.0, IntensityMeasure::two_mass(0.4));
    auto padded = plain;
    padded.dealias = true;
    CHECK(mfe::max_abs(mfe::rhs(plain, v) - mfe::rhs(padded, v)) <= 1e-6);
    CHECK(std::abs(mfe::integrate(mfe::rhs(padded, v))) <= 1e-12);
    const double analytic = mfe::inner(mfe::functional_gradient(padded, v), phi);
    const double fd = oracle::richardson_derivative([&](double e) {
      Field w = v;
      w.add_scaled(e, phi);
      return mfe::functional(padded, w);
    });
    CHECK(std::abs(analytic - fd) <= 1e-6 * mfe::l2_norm(phi));
  }
}

TEST_CASE("nu densities") {
  const auto spec = make(Variant::SawadaSuzuki, 1.0, IntensityMeasure::dirac_one());
  const auto [p0, m0] = mfe::nu_densities(spec, Field(kGrid));
  CHECK(mfe::max_abs(p0 - Field(kGrid, 1 / kArea)) <= 1e-15);
  CHECK(mfe::max_abs(m0) == 0.0);

  mfe::Xoshiro256 rng(5);
  for (int t = 0; t < 10; ++t) {
    const Field v = mfe::random_band_limited(kGrid, rng, 4, 2.0);
    for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
      for (const auto& m : measures()) {
        const double lambda = 8.0;
        const auto s = make(variant, lambda, m);
        const auto [plus, minus] = mfe::nu_densities(s, v);
        CHECK(mfe::kernels::min_value(plus.values()) >= 0.0);
        CHECK(mfe::kernels::min_value(minus.values()) >= 0.0);
        CHECK(mfe::integrate(plus) + mfe::integrate(minus) <= lambda * (1 + 1e-12));

        const auto mus = mfe::mu_product_densities(s, v);
        Field recon(kGrid);
        double total = 0.0;
        for (std::size_t i = 0; i < mus.size(); ++i) {
          CHECK(mfe::kernels::min_value(mus[i].values()) >= 0.0);
          recon.add_scaled(m.atoms()[i].weight * std::abs(m.atoms()[i].alpha), mus[i]);
          total += m.atoms()[i].weight * mfe::integrate(mus[i]);
        }
        CHECK(mfe::max_abs(recon - (plus + minus)) <= 1e-12 * (1 + mfe::max_abs(plus + minus)));
        CHECK(total <= lambda + 1);
      }
      const auto sym = make(variant, 3.0, IntensityMeasure::two_mass(0.5));
      const auto [a_plus, a_minus] = mfe::nu_densities(sym, v);
      const auto [b_plus, b_minus] = mfe::nu_densities(sym, -v);
      CHECK(mfe::max_abs(a_plus - b_minus) <= 1e-14);
      CHECK(mfe::max_abs(a_minus - b_plus) <= 1e-14);
    }
  }
  const auto single = mfe::mu_product_densities(spec, Field(kGrid));
  REQUIRE(single.size() == 1);
  CHECK(mfe::max_abs(single[0] - Field(kGrid, 1 / kArea)) <= 1e-15);
}

TEST_CASE("u_pm decomposition") {
  const auto spec = make(Variant::Neri, 6.0, IntensityMeasure::two_mass(0.5));
  const auto [u0p, u0m] = mfe::u_pm_decomposition(spec, Field(kGrid));
  CHECK(mfe::max_abs(u0p) <= 1e-15);
  CHECK(mfe::max_abs(u0m) <= 1e-15);

  Field spike(kGrid);
  spike(0, 0) = 1.0 / kGrid.cell_area();
  const double a = -mfe::kernels::min_value(mfe::green_convolve(spike).values());
  mfe::Xoshiro256 rng(6);
  for (int t = 0; t < 5; ++t) {
    const Field v = mfe::random_band_limited(kGrid, rng, 4, 3.0);
    const auto [up, um] = mfe::u_pm_decomposition(spec, v);
    CHECK(mfe::kernels::min_value(up.values()) >= -a * (spec.lambda + 1));
    CHECK(mfe::kernels::min_value(um.values()) >= -a * (spec.lambda + 1));
  }
}

TEST_CASE("check_assumptions") {
  for (const auto& m : measures()) {
    for (auto variant : {Variant::SawadaSuzuki, Variant::Neri}) {
      const auto rep = mfe::check_assumptions(make(variant, 2.0, m), Field(kGrid));
      CHECK(rep.c1_prime == doctest::Approx(1 / kArea).epsilon(1e-14));
      CHECK(rep.c2_prime == doctest::Approx(m.integrate([](double a) { return std::abs(a); })).epsilon(1e-14));
      CHECK(rep.jensen_ok);
      CHECK(rep.sign_ok);
    }
  }
  mfe::Xoshiro256 rng(77);
  for (int t = 0; t < 20; ++t) {
    const Field v = mfe::random_band_limited(kGrid, rng, 5, 3.0);
    const auto ss = mfe::check_assumptions(make(Variant::SawadaSuzuki, 2.0, IntensityMeasure::two_mass(0.3)), v);
    const auto ne = mfe::check_assumptions(make(Variant::Neri, 2.0, IntensityMeasure::uniform_quadrature(6)), v);
    CHECK(ss.c1_prime <= 1 / kArea);
    CHECK(ne.c2_prime <= 1 + 1e-10);
    CHECK(ss.jensen_ok);
    CHECK(ne.jensen_ok);
  }
  const auto text = mfe::check_assumptions(make(Variant::Neri, 2.0, IntensityMeasure::dirac_one()), cos_x()).to_text();
  CHECK(text.find("jensen_ok = true\n") != std::string::npos);
  CHECK(text.rfind("c1_prime = ", 0) == 0);
}

TEST_CASE("monotonicity_check") {
  CHECK(mfe::monotonicity_check(Field(kGrid), {0.25, 0.5, 0.75, 1.0}));
  const Field c = cos_x();
  const std::vector<double> alphas{0.25, 0.5, 0.75, 1.0};
  CHECK(mfe::monotonicity_check(c, alphas));
  // oracle: int e^{a cos x1} = |Omega| I0(a), strictly increasing
  double prev = 0.0;
  for (double a : alphas) {
    const double z = std::exp(mfe::log_exp_integral(c, a));
    CHECK(z == doctest::Approx(kArea * std::cyl_bessel_i(0.0, a)).epsilon(1e-13));
    CHECK(z > prev);
    prev = z;
  }
  // a field that is not mean-zero can decrease
  CHECK_FALSE(mfe::monotonicity_check(Field(kGrid, -1.0), {0.5, 1.0}));
  CHECK_THROWS_AS(mfe::monotonicity_check(c, {-1.0, 0.5}), mfe::BadParameter);
  CHECK_THROWS_AS(mfe::monotonicity_check(c, {0.0, 0.5}), mfe::BadParameter);
  CHECK_THROWS_AS(mfe::monotonicity_check(c, {0.5, 0.25}), mfe::BadParameter);
  mfe::Xoshiro256 rng(13);
  for (int t = 0; t < 20; ++t) {
    CHECK(mfe::monotonicity_check(mfe::random_band_limited(kGrid, rng, 5, 2.0), {0.1, 0.2, 0.5, 0.9, 1.0}));
  }
}
