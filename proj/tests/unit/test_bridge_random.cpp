#include <cmath>
#include <memory>

#include "bridge_random/random_bridge.hpp"
#include "common/error.hpp"
#include "doctest.h"
#include "verification/oracles.hpp"

using rlb::CharacteristicExponent;
using rlb::DensityEngine;
using rlb::LengthLaw;
using rlb::Observation;
using rlb::RandomBridge;

namespace {
std::shared_ptr<DensityEngine> engine(const char* spec) {
  return std::make_shared<DensityEngine>(CharacteristicExponent::parse(spec));
}
LengthLaw two_atoms() { return LengthLaw({{1.0, 0.5}, {2.0, 0.5}}); }
}  // namespace

TEST_CASE("phi") {
  RandomBridge rb(engine("cauchy"), 0.0, two_atoms());
  CHECK(rb.phi(1.0, 1.0, 0.3) == 0.0);
  CHECK(rb.phi(1.0, 1.5, 0.3) == 0.0);
  CHECK(rb.phi(2.0, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rb.phi(1.7, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single observation posterior") {
  RandomBridge rb(engine("cauchy"), 0.0, two_atoms());
  auto post = rb.posterior_single(0.5, 0.0);
  REQUIRE(post.atoms().size() == 2);
  CHECK(post.atoms()[0].p == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(post.atoms()[1].p == doctest::Approx(0.4).epsilon(1e-12));

  RandomBridge point(engine("cauchy"), 0.0, LengthLaw::point(3.0));
  auto p = point.posterior_single(1.2, 0.7);
  REQUIRE(p.atoms().size() == 1);
  CHECK(p.atoms()[0].r == 3.0);
  CHECK(p.atoms()[0].p == doctest::Approx(1.0));

  try {
    rb.posterior_single(2.5, 0.3);
    FAIL("expected zero normalizer");
  } catch (const rlb::Error& e) {
    CHECK(e.code() == rlb::ErrorCode::zero_normalizer);
  }
}

TEST_CASE("multi observation branches") {
  RandomBridge rb(engine("cauchy"), 0.0, two_atoms());
  const Observation absorbed_first[] = {{1.5, std::nullopt}};
  auto a = rb.posterior(absorbed_first);
  REQUIRE(a.atoms().size() == 1);
  CHECK(a.atoms()[0].r == 1.0);

  const Observation bracket[] = {{0.5, 0.0}, {1.5, std::nullopt}};
  auto b = rb.posterior(bracket);
  REQUIRE(b.atoms().size() == 1);
  CHECK(b.atoms()[0].r == 1.0);
  CHECK(b.atoms()[0].p == doctest::Approx(1.0));

  const Observation bad[] = {{0.5, std::nullopt}, {1.5, 0.2}};
  CHECK_THROWS_AS(rb.posterior(bad), rlb::Error);

  const Observation one[] = {{0.5, 0.25}};
  auto s = rb.posterior(one);
  auto s1 = rb.posterior_single(0.5, 0.25);
  CHECK(s.atoms()[0].p == s1.atoms()[0].p);
}

TEST_CASE("posterior matches brute-force Bayes") {
  const std::vector<double> r{0.4, 0.9, 1.3, 2.0, 3.1};
  const std::vector<double> p{0.1, 0.25, 0.2, 0.3, 0.15};
  std::vector<rlb::Atom> atoms;
  for (std::size_t i = 0; i < r.size(); ++i) atoms.push_back({r[i], p[i]});
  const double z = 0.4;
  RandomBridge rb(engine("cauchy"), z, LengthLaw(atoms));
  const std::vector<Observation> obs{{0.3, 0.8}, {1.0, -0.5}, {1.5, std::nullopt}};
  auto post = rb.posterior(obs);
  std::vector<rlb::oracle::Obs> o;
  for (const auto& ob : obs) o.emplace_back(ob.t, ob.value);
  auto ref = rlb::oracle::bruteforce_posterior(rlb::oracle::cauchy_density, z, r, p, o);
  for (const auto& a : post.atoms()) {
    const auto i = static_cast<std::size_t>(std::find(r.begin(), r.end(), a.r) - r.begin());
    CHECK(std::fabs(a.p - ref[i]) <= 1e-10 * ref[i]);
  }
}

TEST_CASE("transition examples") {
  RandomBridge rb(engine("cauchy"), 0.0, two_atoms());
  auto absorbed = rb.transition(0.5, std::nullopt, 1.0);
  CHECK(absorbed.atom_mass() == 1.0);
  CHECK(absorbed.nodes().empty());

  auto tr = rb.transition(0.5, 0.0, 1.5);
  CHECK(tr.atom_mass() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(std::fabs(tr.total_mass() - 1.0) <= 1e-5);

  auto origin = rb.transition(0.0, 0.0, 1.2);
  CHECK(origin.atom_mass() == doctest::Approx(rb.law().cdf(1.2)).epsilon(1e-12));
  CHECK_THROWS_AS(rb.transition(1.0, 0.0, 1.0), rlb::Error);
}

TEST_CASE("conditional expectations") {
  RandomBridge rb(engine("cauchy"), 0.0, two_atoms());
  CHECK(std::fabs(rb.conditional_expectation(0.5, 0.3, 1.5, [](double) { return 1.0; }) - 1.0) <= 1e-5);
  auto tr = rb.transition(0.5, 0.3, 1.5);
  CHECK(rb.conditional_expectation(0.5, 0.3, 1.5, [](double y) { return y == 0.0 ? 1.0 : 0.0; }) ==
        doctest::Approx(tr.atom_mass()).epsilon(1e-12));

  const double r = 1.0, z = 0.5, t = 0.2, x = -0.3, u = 0.6;
  RandomBridge g(engine("gaussian:sigma=1"), z, LengthLaw::point(r));
  const double mean = g.conditional_expectation(t, x, u, [](double y) { return y; });
  CHECK(std::fabs(mean - (x + (u - t) * (z - x) / (r - t))) <= 1e-4);
}

TEST_CASE("joint conditional") {
  RandomBridge rb(engine("cauchy"), 0.0, two_atoms());
  const double t = 0.5, x = 0.3, u = 1.5;
  CHECK(std::fabs(rb.joint_conditional(t, x, u, [](double, double) { return 1.0; }) - 1.0) <= 1e-5);
  auto h = [](double y) { return std::cos(y); };
  CHECK(std::fabs(rb.joint_conditional(t, x, u, [&](double, double y) { return h(y); }) -
                  rb.conditional_expectation(t, x, u, h)) <= 1e-6);
  auto tr = rb.transition(t, x, u);
  CHECK(rb.joint_conditional(t, x, u, [&](double r, double) { return r > u ? 1.0 : 0.0; }) ==
        doctest::Approx(tr.continuous_mass()).epsilon(1e-10));
}

TEST_CASE("random bridge paths") {
  RandomBridge rb(engine("cauchy"), 0.0, two_atoms());
  const auto grid = rlb::uniform_grid(2.0, 8);
  auto paths = rlb::sample_random_bridge_paths(rb, grid, 400, 11);
  int absorbed_by_15 = 0;
  for (const auto& p : paths) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK((p.values[i] == 0.0 && i > 0) == (p.realized_length <= grid[i]));
      CHECK(p.absorbed[i] == (p.realized_length <= grid[i]));
    }
    absorbed_by_15 += p.absorbed[6];
  }
  const double frac = absorbed_by_15 / 400.0;
  CHECK(std::fabs(frac - 0.5) <= 3.0 * std::sqrt(0.25 / 400.0));
}
