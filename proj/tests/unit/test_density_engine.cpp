#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "common/error.hpp"
#include "density_engine/density_point.hpp"
#include "density_engine/density_table.hpp"
#include "density_engine/engine.hpp"
#include "doctest.h"
#include "verification/oracles.hpp"

using rlb::CharacteristicExponent;
namespace oracle = rlb::oracle;

TEST_CASE("smooth sizes") {
  CHECK(rlb::smooth_ceil(1) == 1);
  CHECK(rlb::smooth_ceil(7) == 8);
  CHECK(rlb::smooth_ceil(31) == 32);
  CHECK(rlb::smooth_ceil(1025) == 1080);
}

TEST_CASE("cutoff search") {
  auto m = CharacteristicExponent::cauchy();
  const double u = rlb::find_cutoff(m, 1.0);
  CHECK(std::exp(m(u)) < 1e-16);
  CHECK(std::exp(m(0.999 * u)) >= 1e-16);
  CHECK_THROWS_AS(rlb::find_cutoff(CharacteristicExponent::stable(0.1), 1e-3), rlb::Error);
}

TEST_CASE("density_point against closed forms") {
  auto c = CharacteristicExponent::cauchy();
  auto g = CharacteristicExponent::gaussian(1.0);
  CHECK(rlb::density_point(c, 1.0, 0.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-13));
  CHECK(rlb::density_point(g, 1.0, 1.0) == doctest::Approx(std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-13));
  CHECK(rlb::mass_at_zero(c, 2.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-13));
  double worst = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    for (double x = -10.0; x <= 10.0; x += 0.37) {
      worst = std::max(worst, std::fabs(rlb::density_point(c, t, x) - oracle::cauchy_density(t, x)));
      worst = std::max(worst, std::fabs(rlb::density_point(g, t, x) - oracle::gaussian_density(t, x)));
    }
  }
  CHECK(worst <= 1e-12);
  auto s = CharacteristicExponent::stable(1.5);
  CHECK(rlb::mass_at_zero(s, 3.0) == doctest::Approx(oracle::stable_density_at_zero(1.5, 3.0)).epsilon(1e-11));
  auto nig = CharacteristicExponent::nig();
  for (double x : {0.0, 0.5, 3.0}) {
    CHECK(rlb::density_point(nig, 0.7, x) == doctest::Approx(oracle::nig_density(0.7, x)).epsilon(1e-11));
  }
  CHECK(rlb::density_point(s, 1.0, 2.5) == rlb::density_point(s, 1.0, -2.5));
}

TEST_CASE("tables agree with closed forms and quadrature") {
  for (double t : {0.5, 1.0, 2.0}) {
    rlb::DensityEngine ce(CharacteristicExponent::cauchy());
    rlb::DensityEngine ge(CharacteristicExponent::gaussian(1.0));
    auto ct = ce.table(t);
    auto gt = ge.table(t);
    double worst = 0.0;
    for (double x = -10.0; x <= 10.0; x += 0.013) {
      worst = std::max(worst, std::fabs(ce.density(*ct, x) - oracle::cauchy_density(t, x)));
      worst = std::max(worst, std::fabs(ge.density(*gt, x) - oracle::gaussian_density(t, x)));
    }
    MESSAGE("t=" << t << " worst interpolated error " << worst);
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("table nodes agree with density_point") {
  for (const char* spec : {"stable:alpha=1.5", "tempered:alpha=0.5,c=1,lambda=1", "mts:alpha=0.7", "nig"}) {
    auto m = CharacteristicExponent::parse(spec);
    rlb::DensityEngine e(m);
    auto tab = e.table(1.0);
    double worst = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, tab->half_points() / 200);
    for (std::size_t k = 0; k <= tab->half_points(); k += stride) {
      worst = std::max(worst, std::fabs(tab->value(static_cast<std::ptrdiff_t>(k)) -
                                        e.point(1.0, static_cast<double>(k) * tab->dx())));
    }
    MESSAGE(std::string(spec) << " node error " << worst << " K=" << tab->half_points());
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("normalization of the catalog models") {
  for (const char* spec : {"stable:alpha=1.5", "tempered:alpha=0.5,c=1,lambda=1", "mts:alpha=0.7", "nig"}) {
    rlb::DensityEngine e(CharacteristicExponent::parse(spec));
    for (double t : {0.25, 1.0, 4.0}) {
      const double mass = e.table(t)->trapezoid_mass();
      MESSAGE(std::string(spec) << " t=" << t << " mass-1=" << mass - 1.0);
      CHECK(std::fabs(mass - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("symmetry and unimodality of the stable table") {
  rlb::DensityEngine e(CharacteristicExponent::stable(1.5));
  auto tab = e.table(1.0);
  const auto v = tab->values();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) CHECK(v[i] == v[n - 1 - i]);
  // Increments are compared against the double-precision noise of the transform.
  const double noise = 1e-15 * tab->peak();
  double worst_rise = 0.0;
  for (std::size_t k = 1; k <= tab->half_points(); ++k) {
    worst_rise = std::max(worst_rise, tab->value(static_cast<std::ptrdiff_t>(k)) -
                                          tab->value(static_cast<std::ptrdiff_t>(k - 1)));
  }
  MESSAGE("largest rise away from the mode " << worst_rise);
  CHECK(worst_rise <= noise);
}

TEST_CASE("convolution reproduces the Cauchy semigroup") {
  auto m = CharacteristicExponent::cauchy();
  const std::array<double, 3> times{1.0, 1.0, 2.0};
  auto plan = rlb::plan_common(m, times);
  auto a = rlb::density_grid(m, 1.0, plan);
  auto two = rlb::density_grid(m, 2.0, plan);
  auto c = rlb::convolve(a, a);
  CHECK(c.t() == 2.0);
  double gap = 0.0;
  for (std::size_t k = 0; k <= c.half_points(); ++k) {
    gap = std::max(gap, std::fabs(c.value(static_cast<std::ptrdiff_t>(k)) - two.value(static_cast<std::ptrdiff_t>(k))));
  }
  MESSAGE("Cauchy convolution gap " << gap);
  CHECK(gap <= 1e-5);
  const double x = 1.0;
  CHECK(rlb::DensityEngine(m).density(c, x) == doctest::Approx(oracle::cauchy_density(2.0, x)).epsilon(1e-4));

  auto other = rlb::density_grid(m, 1.0, rlb::plan_for(m, 1.0));
  if (other.dx() != a.dx() || other.half_points() != a.half_points()) {
    CHECK_THROWS_AS(rlb::convolve(a, other), rlb::Error);
  }
}

TEST_CASE("plan overrides") {
  auto m = CharacteristicExponent::cauchy();
  rlb::PlanOverrides o;
  o.x_max = 10.0;
  auto plan = rlb::plan_for(m, 1.0, o);
  CHECK(plan.x_max() == doctest::Approx(10.0).epsilon(1e-15));
  auto tab = rlb::density_grid(m, 1.0, plan);
  CHECK(tab.value(0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-9));
  o.cutoff = 5.0;
  CHECK_THROWS_AS(rlb::plan_for(m, 1.0, o), rlb::Error);
  rlb::PlanOverrides even;
  even.grid_points = 100;
  CHECK_THROWS_AS(rlb::plan_for(m, 1.0, even), rlb::Error);
}

TEST_CASE("asymptotic ratio and small-time probe for stable") {
  auto m = CharacteristicExponent::stable(1.5);
  const double gap100 = std::fabs(rlb::mass_at_zero(m, 99.0) / rlb::mass_at_zero(m, 100.0) - 1.0);
  const double gap10 = std::fabs(rlb::mass_at_zero(m, 9.0) / rlb::mass_at_zero(m, 10.0) - 1.0);
  CHECK(gap100 <= 0.01);
  CHECK(gap100 < gap10);
  CHECK(gap100 == doctest::Approx(std::pow(99.0 / 100.0, -1.0 / 1.5) - 1.0).epsilon(1e-8));
  double prev = 0.0;
  for (double t : {1e-3, 1e-2, 1e-1}) {
    const double f = rlb::density_point(m, t, 1.0);
    CHECK(std::isfinite(f));
    CHECK(f > prev);
    prev = f;
  }
}
