#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rlb/rlb.h"

namespace {

rlb_engine* engine_for(const char* spec) {
  rlb_model* m = nullptr;
  REQUIRE(rlb_model_parse(spec, &m) == RLB_OK);
  rlb_engine* e = nullptr;
  REQUIRE(rlb_engine_create(m, nullptr, &e) == RLB_OK);
  rlb_model_free(m);
  return e;
}

rlb_law* two_atoms() {
  const double r[] = {1.0, 2.0};
  const double p[] = {0.5, 0.5};
  rlb_law* law = nullptr;
  REQUIRE(rlb_law_from_atoms(r, p, 2, &law) == RLB_OK);
  return law;
}

double cosine(double y, void*) { return std::cos(y); }
double product(double r, double y, void* ctx) { return r * y * *static_cast<double*>(ctx); }

}  // namespace

TEST_CASE("models parse and report errors with codes") {
  rlb_model* m = nullptr;
  CHECK(rlb_model_parse("stable:alpha=1.5", &m) == RLB_OK);
  CHECK(std::string(rlb_model_spec(m)) == "stable:alpha=1.5");
  double v = 0.0;
  CHECK(rlb_model_exponent(m, 2.0, &v) == RLB_OK);
  CHECK(v == doctest::Approx(-std::pow(2.0, 1.5)).epsilon(1e-15));
  rlb_model_free(m);

  rlb_model* bad = nullptr;
  CHECK(rlb_model_parse("stable:alpha=3", &bad) == RLB_ERR_PARAMETER_DOMAIN);
  CHECK(bad == nullptr);
  CHECK(std::string(rlb_last_error()).size() > 0);
  CHECK(std::string(rlb_status_name(RLB_ERR_PARAMETER_DOMAIN)) == "parameter-domain");
  CHECK(rlb_model_parse(nullptr, &bad) == RLB_ERR_INVALID_ARGUMENT);
  rlb_model_free(nullptr);
}

TEST_CASE("engine densities and tables through the C interface") {
  rlb_engine* e = engine_for("cauchy");
  double f = 0.0;
  CHECK(rlb_engine_density(e, 1.0, 0.0, &f) == RLB_OK);
  CHECK(f == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-9));
  CHECK(rlb_engine_point(e, 2.0, 1.0, &f) == RLB_OK);
  CHECK(f == doctest::Approx(2.0 / (std::numbers::pi * 5.0)).epsilon(1e-12));
  CHECK(rlb_engine_density(e, -1.0, 0.0, &f) != RLB_OK);

  const double times[] = {1.0, 1.0, 2.0};
  rlb_table* tabs[3] = {nullptr, nullptr, nullptr};
  REQUIRE(rlb_engine_common_tables(e, times, 3, tabs) == RLB_OK);
  rlb_table* conv = nullptr;
  REQUIRE(rlb_table_convolve(tabs[0], tabs[1], &conv) == RLB_OK);
  CHECK(rlb_table_time(conv) == 2.0);
  const std::size_t n = rlb_table_size(conv);
  std::vector<double> x(n), a(n), b(n);
  CHECK(rlb_table_copy(conv, x.data(), a.data(), n) == n);
  rlb_table_copy(tabs[2], nullptr, b.data(), n);
  double gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::fabs(a[i] - b[i]));
  CHECK(gap <= 1e-5);
  CHECK(x[n / 2] == 0.0);
  for (auto* t : tabs) rlb_table_free(t);
  rlb_table_free(conv);

  rlb_plan_options opts{0.0, 0, 10.0};
  rlb_model* m = nullptr;
  REQUIRE(rlb_model_parse("cauchy", &m) == RLB_OK);
  rlb_engine* small = nullptr;
  REQUIRE(rlb_engine_create(m, &opts, &small) == RLB_OK);
  rlb_table* t = nullptr;
  REQUIRE(rlb_engine_table(small, 1.0, &t) == RLB_OK);
  CHECK(rlb_table_dx(t) * static_cast<double>(rlb_table_size(t) - 1) / 2.0 == doctest::Approx(10.0));
  rlb_table_free(t);
  rlb_engine_free(small);
  rlb_model_free(m);
  rlb_engine_free(e);
}

TEST_CASE("fixed bridge sampling is reproducible") {
  rlb_engine* e = engine_for("gaussian:sigma=1");
  rlb_bridge* b = nullptr;
  REQUIRE(rlb_bridge_create(e, 1.0, 0.0, &b) == RLB_OK);
  double k = 0.0;
  CHECK(rlb_bridge_transition_density(b, 0.0, 0.0, 0.5, 0.0, &k) == RLB_OK);
  CHECK(k == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * 0.25)).epsilon(1e-8));
  CHECK(rlb_bridge_transition_density(b, 0.5, 0.0, 0.25, 0.0, &k) == RLB_ERR_TIME_ORDER);

  const double times[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  rlb_paths* p1 = nullptr;
  rlb_paths* p2 = nullptr;
  REQUIRE(rlb_bridge_sample(b, times, 5, 20, 9, 1, &p1) == RLB_OK);
  REQUIRE(rlb_bridge_sample(b, times, 5, 20, 9, 2, &p2) == RLB_OK);
  CHECK(rlb_paths_count(p1) == 20);
  CHECK(rlb_paths_steps(p1) == 5);
  for (std::size_t i = 0; i < 20; ++i) {
    double v1[5], v2[5], len = 0.0;
    unsigned char a1[5];
    REQUIRE(rlb_paths_get(p1, i, v1, a1, &len) == RLB_OK);
    REQUIRE(rlb_paths_get(p2, i, v2, nullptr, nullptr) == RLB_OK);
    for (int j = 0; j < 5; ++j) CHECK(v1[j] == v2[j]);
    CHECK(len == 1.0);
    CHECK(a1[4] == 1);
    CHECK(v1[4] == 0.0);
  }
  CHECK(rlb_paths_get(p1, 20, nullptr, nullptr, nullptr) == RLB_ERR_INVALID_ARGUMENT);
  rlb_paths_free(p1);
  rlb_paths_free(p2);
  rlb_bridge_free(b);
  rlb_engine_free(e);
}

TEST_CASE("random bridge posterior, transition and expectations") {
  rlb_engine* e = engine_for("cauchy");
  rlb_law* law = two_atoms();
  rlb_random_bridge* rb = nullptr;
  REQUIRE(rlb_random_bridge_create(e, 0.0, law, &rb) == RLB_OK);

  const double t[] = {0.5};
  const double x[] = {0.0};
  rlb_law* post = nullptr;
  REQUIRE(rlb_random_bridge_posterior(rb, t, x, nullptr, 1, &post) == RLB_OK);
  REQUIRE(rlb_law_atom_count(post) == 2);
  double r = 0.0, p = 0.0;
  rlb_law_atom(post, 0, &r, &p);
  CHECK(r == 1.0);
  CHECK(p == doctest::Approx(0.6).epsilon(1e-12));
  char* text = nullptr;
  REQUIRE(rlb_law_to_json(post, &text) == RLB_OK);
  CHECK(nlohmann::json::parse(text)["atoms"].size() == 2);
  rlb_string_free(text);
  rlb_law_free(post);

  const unsigned char absorbed[] = {1};
  CHECK(rlb_random_bridge_posterior(rb, t, x, absorbed, 1, &post) == RLB_ERR_ZERO_NORMALIZER);

  rlb_transition* tr = nullptr;
  const double x0 = 0.0;
  REQUIRE(rlb_random_bridge_transition(rb, 0.5, &x0, 1.5, &tr) == RLB_OK);
  CHECK(rlb_transition_atom_mass(tr) == doctest::Approx(0.6).epsilon(1e-10));
  const std::size_t n = rlb_transition_size(tr);
  std::vector<double> w(n), d(n);
  rlb_transition_copy(tr, nullptr, w.data(), d.data(), n);
  double mass = rlb_transition_atom_mass(tr);
  for (std::size_t i = 0; i < n; ++i) mass += w[i] * d[i];
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  rlb_transition_free(tr);

  REQUIRE(rlb_random_bridge_transition(rb, 1.2, nullptr, 1.5, &tr) == RLB_OK);
  CHECK(rlb_transition_atom_mass(tr) == 1.0);
  rlb_transition_free(tr);

  double ev = 0.0;
  CHECK(rlb_random_bridge_conditional_expectation(rb, 0.5, nullptr, 1.0, cosine, nullptr, &ev) == RLB_OK);
  CHECK(ev == 1.0);
  double scale = 2.0;
  CHECK(rlb_random_bridge_joint_conditional(rb, 0.5, 0.0, 1.5, product, &scale, &ev) == RLB_OK);
  CHECK(std::isfinite(ev));
  CHECK(rlb_random_bridge_conditional_expectation(rb, 0.5, &x0, 1.5, nullptr, nullptr, &ev) ==
        RLB_ERR_INVALID_ARGUMENT);

  const double times[] = {0.0, 0.5, 1.0, 1.5, 2.0};
  rlb_paths* paths = nullptr;
  REQUIRE(rlb_random_bridge_sample(rb, times, 5, 50, 3, 1, &paths) == RLB_OK);
  for (std::size_t i = 0; i < 50; ++i) {
    double v[5], len = 0.0;
    unsigned char a[5];
    rlb_paths_get(paths, i, v, a, &len);
    for (int j = 0; j < 5; ++j) CHECK((v[j] == 0.0 && j > 0) == (len <= times[j]));
  }
  rlb_paths_free(paths);
  rlb_random_bridge_free(rb);
  rlb_law_free(law);
  rlb_engine_free(e);
}

TEST_CASE("laws from json") {
  rlb_law* law = nullptr;
  CHECK(rlb_law_from_json(R"({"atoms":[{"r":1,"p":0.25},{"r":3,"p":0.75}]})", &law) == RLB_OK);
  double c = 0.0;
  rlb_law_cdf(law, 2.0, &c);
  CHECK(c == 0.25);
  rlb_law_free(law);
  CHECK(rlb_law_from_json("{not json", &law) == RLB_ERR_INVALID_ARGUMENT);
  CHECK(rlb_law_from_json(R"({"atoms":[{"r":1,"p":0.5}]})", &law) == RLB_ERR_INVALID_ARGUMENT);
  CHECK(rlb_law_load("/nonexistent/law.json", &law) == RLB_ERR_IO);
}

TEST_CASE("verification entry points") {
  CHECK(rlb_check_manifest_size() == 21);
  CHECK(rlb_check_manifest_id(rlb_check_manifest_size()) == nullptr);
  rlb_verify_options opts;
  rlb_verify_defaults(&opts);
  CHECK(opts.seed == 42);
  CHECK(opts.paths == 10000);
  const char* none[] = {nullptr};
  opts.models = none;
  opts.n_models = 0;
  char* report = nullptr;
  int passed = 0;
  REQUIRE(rlb_verify(&opts, &report, &passed) == RLB_OK);
  const auto j = nlohmann::json::parse(report);
  CHECK(j["checks"].empty());
  CHECK(passed == 1);
  rlb_string_free(report);
}
