#include <cmath>
#include <limits>

#include "common/error.hpp"
#include "doctest.h"
#include "levy_models/length_law.hpp"

using rlb::LengthLaw;

namespace {
LengthLaw two_atoms() { return LengthLaw({{1.0, 0.5}, {2.0, 0.5}}); }
LengthLaw uniform_1_2() { return LengthLaw({}, rlb::DensityPart{{1.0, 2.0}, {1.0, 1.0}}); }
LengthLaw mixed() {
  return LengthLaw({{0.5, 0.2}, {1.5, 0.3}}, rlb::DensityPart{{1.0, 2.0, 3.0}, {0.0, 0.5, 0.0}});
}
}  // namespace

TEST_CASE("cdf of two atoms") {
  auto law = two_atoms();
  CHECK(law.cdf(0.0) == 0.0);
  CHECK(law.cdf(0.999) == 0.0);
  CHECK(law.cdf(1.0) == 0.5);
  CHECK(law.cdf(3.0) == 1.0);
}

TEST_CASE("integrate honours half-open intervals") {
  auto law = two_atoms();
  CHECK(law.integrate([](double) { return 1.0; }) == 1.0);
  CHECK(law.integrate([](double r) { return r; }) == doctest::Approx(1.5));
  CHECK(law.integrate([](double) { return 1.0; }, 1.0, 2.0) == 0.5);
}

TEST_CASE("integrate is additive and linear on a mixed law") {
  auto law = mixed();
  auto g = [](double r) { return std::sin(3.0 * r) + 2.0; };
  CHECK(law.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  const double whole = law.integrate(g, 0.0);
  double pieces = 0.0;
  const double cuts[] = {0.0, 0.5, 0.7, 1.5, 1.9, 2.0, 2.6, LengthLaw::kInf};
  for (int i = 0; i + 1 < 8; ++i) pieces += law.integrate(g, cuts[i], cuts[i + 1]);
  CHECK(std::fabs(whole - pieces) < 1e-14);
}

TEST_CASE("cdf is monotone and right-continuous at atoms") {
  auto law = mixed();
  double prev = 0.0;
  for (double t = 0.0; t < 3.5; t += 0.01) {
    const double c = law.cdf(t);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(law.cdf(0.5) - law.cdf(std::nextafter(0.5, 0.0)) == doctest::Approx(0.2));
  CHECK(law.cdf(1.5) - law.cdf(std::nextafter(1.5, 0.0)) == doctest::Approx(0.3));
  CHECK(law.cdf(3.0) == doctest::Approx(1.0));
}

TEST_CASE("quantile inverts the cdf") {
  auto law = mixed();
  for (double q = 0.01; q <= 1.0; q += 0.01) {
    const double r = law.quantile(q);
    CHECK(law.cdf(r) >= q - 1e-12);
    CHECK(law.cdf(std::nextafter(r, 0.0) - 1e-9) <= q + 1e-12);
  }
}

TEST_CASE("sampling a single atom") {
  auto law = LengthLaw::point(0.75);
  rlb::Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK(law.sample(rng) == 0.75);
}

TEST_CASE("sampling frequencies") {
  rlb::Rng rng(42);
  auto law = two_atoms();
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += law.sample(rng) == 1.0;
  CHECK(ones / double(n) >= 0.49);
  CHECK(ones / double(n) <= 0.51);

  auto uni = uniform_1_2();
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += uni.sample(rng);
  CHECK(std::fabs(mean / n - 1.5) <= 0.01);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(LengthLaw({{1.0, 0.5}}), rlb::Error);
  CHECK_THROWS_AS(LengthLaw({{0.0, 1.0}}), rlb::Error);
  CHECK_THROWS_AS(LengthLaw({{2.0, 0.5}, {1.0, 0.5}}), rlb::Error);
  CHECK_THROWS_AS(LengthLaw({}, rlb::DensityPart{{1.0, 1.0}, {1.0, 1.0}}), rlb::Error);
}

TEST_CASE("json round trip") {
  auto law = mixed();
  auto back = LengthLaw::from_json(law.to_json());
  CHECK(back.to_json() == law.to_json());
  auto parsed = LengthLaw::from_json(nlohmann::json::parse(R"({"atoms":[{"r":1.0,"p":0.5},{"r":2.0,"p":0.5}]})"));
  CHECK(parsed.cdf(1.0) == 0.5);
}

TEST_CASE("reweighting restricts and normalizes") {
  auto law = mixed();
  double norm = 0.0;
  auto post = law.reweighted(1.2, 2.5, [](double r) { return r; }, &norm);
  CHECK(norm == doctest::Approx(law.integrate([](double r) { return r; }, 1.2, 2.5)).epsilon(1e-14));
  CHECK(post.cdf(1.2) == 0.0);
  CHECK(post.cdf(2.5) == doctest::Approx(1.0).epsilon(1e-13));
  REQUIRE(post.atoms().size() == 1);
  CHECK(post.atoms()[0].r == 1.5);
  CHECK(post.atoms()[0].p == doctest::Approx(0.3 * 1.5 / norm).epsilon(1e-14));
  CHECK(post.density()->grid.front() == 1.2);
  CHECK(post.density()->grid.back() == 2.5);
  CHECK_THROWS_AS(law.reweighted(3.5, LengthLaw::kInf, [](double) { return 1.0; }), rlb::Error);
}
