#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "bridge_fixed/fixed_bridge.hpp"
#include "common/error.hpp"
#include "doctest.h"
#include "verification/oracles.hpp"

using rlb::CharacteristicExponent;
using rlb::DensityEngine;
using rlb::FixedBridge;

namespace {
std::shared_ptr<DensityEngine> engine(const char* spec) {
  return std::make_shared<DensityEngine>(CharacteristicExponent::parse(spec));
}
}  // namespace

TEST_CASE("kernel values from closed forms") {
  FixedBridge g(engine("gaussian:sigma=1"), 1.0, 0.0);
  CHECK(g.transition_density(0.0, 0.0, 0.5, 0.0) == doctest::Approx(2.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-9));
  FixedBridge c(engine("cauchy"), 2.0, 0.0);
  CHECK(c.transition_density(0.0, 0.0, 1.0, 0.0) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("time order and denominator guards") {
  FixedBridge c(engine("cauchy"), 2.0, 0.0);
  CHECK_THROWS_AS(c.transition_density(1.0, 0.0, 1.0, 0.0), rlb::Error);
  CHECK_THROWS_AS(c.transition_density(0.0, 0.0, 2.0, 0.0), rlb::Error);
  try {
    FixedBridge g(engine("gaussian:sigma=1"), 0.01, 100.0);
    FAIL("expected denominator underflow");
  } catch (const rlb::Error& e) {
    CHECK(e.code() == rlb::ErrorCode::denominator_underflow);
  }
}

TEST_CASE("kernel integrates to one") {
  for (const char* spec : {"gaussian:sigma=1", "cauchy", "stable:alpha=1.5", "nig", "tempered:alpha=0.5,c=1,lambda=1",
                           "mts:alpha=0.7"}) {
    FixedBridge b(engine(spec), 2.0, 0.5);
    for (auto [t, x, u] : {std::tuple{0.0, 0.0, 1.0}, std::tuple{0.5, -1.0, 1.9}, std::tuple{1.0, 2.0, 1.25}}) {
      const double m = b.kernel(t, x, u).mass();
      MESSAGE(std::string(spec) << " (" << t << "," << x << "," << u << ") mass-1=" << m - 1.0);
      CHECK(std::fabs(m - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("fdd consistency") {
  FixedBridge c(engine("cauchy"), 2.0, 0.0);
  const double t1 = 0.7, x1 = 0.3;
  const double one[] = {t1};
  const double xs[] = {x1};
  CHECK(c.fdd(one, xs) == doctest::Approx(rlb::oracle::cauchy_density(t1, x1) *
                                          rlb::oracle::cauchy_density(2.0 - t1, -x1) /
                                          rlb::oracle::cauchy_density(2.0, 0.0)).epsilon(1e-8));
  CHECK(c.fdd(one, xs) == doctest::Approx(c.transition_density(0.0, 0.0, t1, x1)).epsilon(1e-12));

  // Integrating the first coordinate out of the two-time fdd.
  const double t2 = 1.4, x2 = -0.4;
  const double two[] = {t1, t2};
  auto k = c.kernel(0.0, 0.0, t1, rlb::KernelDomain::full, std::vector<rlb::Center>{{x2, 0.5}});
  double marg = 0.0;
  for (const auto& n : k.rule()) {
    const double v[] = {n.x, x2};
    marg += n.w * c.fdd(two, v);
  }
  const double single[] = {t2};
  const double sv[] = {x2};
  CHECK(std::fabs(marg - c.fdd(single, sv)) <= 1e-5);
}

TEST_CASE("paths end at z and are reproducible") {
  FixedBridge g(engine("gaussian:sigma=1"), 1.0, 0.3);
  const auto grid = rlb::uniform_grid(1.0, 16);
  auto a = rlb::sample_bridge_paths(g, grid, 50, 7);
  auto b = rlb::sample_bridge_paths(g, grid, 50, 7, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].values == b[i].values);
    CHECK(a[i].values.front() == 0.0);
    CHECK(a[i].values.back() == 0.3);
    CHECK(a[i].absorbed.back());
    CHECK_FALSE(a[i].absorbed[15]);
  }
}

TEST_CASE("gaussian midpoint variance") {
  FixedBridge g(engine("gaussian:sigma=1"), 1.0, 0.0);
  const auto grid = rlb::uniform_grid(1.0, 64);
  const auto start = std::chrono::steady_clock::now();
  auto paths = rlb::sample_bridge_paths(g, grid, 2000, 42);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double s = 0.0, s2 = 0.0;
  for (const auto& p : paths) {
    s += p.values[32];
    s2 += p.values[32] * p.values[32];
  }
  const double n = static_cast<double>(paths.size());
  const double var = s2 / n - (s / n) * (s / n);
  MESSAGE("variance " << var << " in " << secs << " s");
  // 3 sigma band for 2000 draws: 0.25 * sqrt(2/2000) * 3 ~ 0.024
  CHECK(std::fabs(var - 0.25) <= 0.024);
}
