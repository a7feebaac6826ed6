#include "rlb/rlb.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "bridge_fixed/fixed_bridge.hpp"
#include "bridge_random/random_bridge.hpp"
#include "common/error.hpp"
#include "density_engine/engine.hpp"
#include "levy_models/characteristic_exponent.hpp"
#include "levy_models/length_law.hpp"
#include "verification/checks.hpp"

struct rlb_model {
  rlb::CharacteristicExponent model;
  std::string spec;
};

struct rlb_law {
  rlb::LengthLaw law;
};

struct rlb_engine {
  std::shared_ptr<const rlb::DensityEngine> engine;
};

struct rlb_table {
  std::shared_ptr<const rlb::DensityTable> table;
};

struct rlb_bridge {
  rlb::FixedBridge bridge;
};

struct rlb_random_bridge {
  rlb::RandomBridge bridge;
};

struct rlb_transition {
  rlb::MixedTransition transition;
};

struct rlb_paths {
  std::vector<double> times;
  std::vector<rlb::PathSample> paths;
};

namespace {

thread_local std::string last_error;

class NullArgument : public std::exception {};

template <class T>
void need(const T* p) {
  if (p == nullptr) throw NullArgument();
}

template <class F>
rlb_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return RLB_OK;
  } catch (const rlb::Error& e) {
    last_error = e.what();
    return static_cast<rlb_status>(static_cast<int>(e.code()));
  } catch (const NullArgument&) {
    last_error = "null argument";
    return RLB_ERR_INVALID_ARGUMENT;
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return RLB_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RLB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RLB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return RLB_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<double> state(const double* x) {
  return x ? std::optional<double>(*x) : std::nullopt;
}

}  // namespace

extern "C" {

const char* rlb_version(void) { return "1.0.0"; }

const char* rlb_last_error(void) { return last_error.c_str(); }

const char* rlb_status_name(rlb_status status) {
  switch (status) {
    case RLB_OK:
      return "ok";
    case RLB_ERR_INTERNAL:
      return "internal";
    default:
      if (status >= RLB_ERR_INVALID_ARGUMENT && status <= RLB_ERR_IO) {
        return rlb::error_code_name(static_cast<rlb::ErrorCode>(status));
      }
      return "unknown";
  }
}

void rlb_string_free(char* s) { delete[] s; }

rlb_status rlb_model_parse(const char* spec, rlb_model** out) {
  return guard([&] {
    need(spec);
    need(out);
    auto m = rlb::CharacteristicExponent::parse(spec);
    *out = new rlb_model{m, m.spec()};
  });
}

const char* rlb_model_spec(const rlb_model* model) { return model ? model->spec.c_str() : ""; }

rlb_status rlb_model_exponent(const rlb_model* model, double u, double* out) {
  return guard([&] {
    need(model);
    need(out);
    *out = model->model(u);
  });
}

void rlb_model_free(rlb_model* model) { delete model; }

rlb_status rlb_law_from_atoms(const double* r, const double* p, size_t n, rlb_law** out) {
  return guard([&] {
    need(out);
    if (n > 0) {
      need(r);
      need(p);
    }
    std::vector<rlb::Atom> atoms;
    for (size_t i = 0; i < n; ++i) atoms.push_back({r[i], p[i]});
    *out = new rlb_law{rlb::LengthLaw(std::move(atoms))};
  });
}

rlb_status rlb_law_from_json(const char* json, rlb_law** out) {
  return guard([&] {
    need(json);
    need(out);
    *out = new rlb_law{rlb::LengthLaw::from_json(nlohmann::json::parse(json))};
  });
}

rlb_status rlb_law_load(const char* path, rlb_law** out) {
  return guard([&] {
    need(path);
    need(out);
    *out = new rlb_law{rlb::LengthLaw::load(path)};
  });
}

rlb_status rlb_law_to_json(const rlb_law* law, char** out) {
  return guard([&] {
    need(law);
    need(out);
    *out = copy_string(law->law.to_json().dump());
  });
}

rlb_status rlb_law_cdf(const rlb_law* law, double t, double* out) {
  return guard([&] {
    need(law);
    need(out);
    *out = law->law.cdf(t);
  });
}

size_t rlb_law_atom_count(const rlb_law* law) { return law ? law->law.atoms().size() : 0; }

rlb_status rlb_law_atom(const rlb_law* law, size_t i, double* r, double* p) {
  return guard([&] {
    need(law);
    if (i >= law->law.atoms().size()) rlb::fail(rlb::ErrorCode::invalid_argument, "atom index out of range");
    if (r) *r = law->law.atoms()[i].r;
    if (p) *p = law->law.atoms()[i].p;
  });
}

void rlb_law_free(rlb_law* law) { delete law; }

rlb_status rlb_engine_create(const rlb_model* model, const rlb_plan_options* options, rlb_engine** out) {
  return guard([&] {
    need(model);
    need(out);
    rlb::EngineOptions opts;
    if (options) {
      if (options->cutoff != 0.0) opts.overrides.cutoff = options->cutoff;
      if (options->grid_points != 0) opts.overrides.grid_points = options->grid_points;
      if (options->x_max != 0.0) opts.overrides.x_max = options->x_max;
    }
    *out = new rlb_engine{std::make_shared<const rlb::DensityEngine>(model->model, opts)};
  });
}

rlb_status rlb_engine_density(const rlb_engine* engine, double t, double x, double* out) {
  return guard([&] {
    need(engine);
    need(out);
    *out = engine->engine->density(t, x);
  });
}

rlb_status rlb_engine_point(const rlb_engine* engine, double t, double x, double* out) {
  return guard([&] {
    need(engine);
    need(out);
    *out = engine->engine->point(t, x);
  });
}

rlb_status rlb_engine_table(const rlb_engine* engine, double t, rlb_table** out) {
  return guard([&] {
    need(engine);
    need(out);
    *out = new rlb_table{engine->engine->table(t)};
  });
}

rlb_status rlb_engine_common_tables(const rlb_engine* engine, const double* times, size_t n, rlb_table** out) {
  return guard([&] {
    need(engine);
    need(times);
    need(out);
    if (n == 0) rlb::fail(rlb::ErrorCode::invalid_argument, "no times given");
    const auto plan = rlb::plan_common(engine->engine->model(), std::span<const double>(times, n));
    std::vector<std::shared_ptr<const rlb::DensityTable>> tables;
    for (size_t i = 0; i < n; ++i) tables.push_back(engine->engine->table(times[i], plan));
    for (size_t i = 0; i < n; ++i) out[i] = new rlb_table{tables[i]};
  });
}

void rlb_engine_free(rlb_engine* engine) { delete engine; }

double rlb_table_time(const rlb_table* table) { return table ? table->table->t() : 0.0; }

double rlb_table_dx(const rlb_table* table) { return table ? table->table->dx() : 0.0; }

size_t rlb_table_size(const rlb_table* table) { return table ? table->table->size() : 0; }

size_t rlb_table_copy(const rlb_table* table, double* x, double* f, size_t cap) {
  if (!table) return 0;
  const auto& t = *table->table;
  const auto k = static_cast<std::ptrdiff_t>(t.half_points());
  const size_t n = std::min(cap, t.size());
  for (size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::ptrdiff_t>(i) - k;
    if (x) x[i] = static_cast<double>(j) * t.dx();
    if (f) f[i] = t.value(j);
  }
  return n;
}

double rlb_table_mass(const rlb_table* table) { return table ? table->table->trapezoid_mass() : 0.0; }

rlb_status rlb_table_convolve(const rlb_table* a, const rlb_table* b, rlb_table** out) {
  return guard([&] {
    need(a);
    need(b);
    need(out);
    *out = new rlb_table{std::make_shared<const rlb::DensityTable>(rlb::convolve(*a->table, *b->table))};
  });
}

void rlb_table_free(rlb_table* table) { delete table; }

rlb_status rlb_bridge_create(const rlb_engine* engine, double r, double z, rlb_bridge** out) {
  return guard([&] {
    need(engine);
    need(out);
    *out = new rlb_bridge{rlb::FixedBridge(engine->engine, r, z)};
  });
}

rlb_status rlb_bridge_transition_density(const rlb_bridge* bridge, double t, double x, double u, double y,
                                         double* out) {
  return guard([&] {
    need(bridge);
    need(out);
    *out = bridge->bridge.transition_density(t, x, u, y);
  });
}

rlb_status rlb_bridge_sample(const rlb_bridge* bridge, const double* times, size_t n_times, size_t n_paths,
                             uint64_t seed, unsigned threads, rlb_paths** out) {
  return guard([&] {
    need(bridge);
    need(times);
    need(out);
    std::vector<double> grid(times, times + n_times);
    auto paths = rlb::sample_bridge_paths(bridge->bridge, grid, n_paths, seed, threads);
    *out = new rlb_paths{std::move(grid), std::move(paths)};
  });
}

void rlb_bridge_free(rlb_bridge* bridge) { delete bridge; }

size_t rlb_paths_count(const rlb_paths* paths) { return paths ? paths->paths.size() : 0; }

size_t rlb_paths_steps(const rlb_paths* paths) { return paths ? paths->times.size() : 0; }

const double* rlb_paths_times(const rlb_paths* paths) { return paths ? paths->times.data() : nullptr; }

rlb_status rlb_paths_get(const rlb_paths* paths, size_t i, double* values, unsigned char* absorbed,
                         double* realized_length) {
  return guard([&] {
    need(paths);
    if (i >= paths->paths.size()) rlb::fail(rlb::ErrorCode::invalid_argument, "path index out of range");
    const auto& p = paths->paths[i];
    for (size_t k = 0; k < p.values.size(); ++k) {
      if (values) values[k] = p.values[k];
      if (absorbed) absorbed[k] = p.absorbed[k] ? 1 : 0;
    }
    if (realized_length) *realized_length = p.realized_length;
  });
}

void rlb_paths_free(rlb_paths* paths) { delete paths; }

rlb_status rlb_random_bridge_create(const rlb_engine* engine, double z, const rlb_law* law,
                                    rlb_random_bridge** out) {
  return guard([&] {
    need(engine);
    need(law);
    need(out);
    *out = new rlb_random_bridge{rlb::RandomBridge(engine->engine, z, law->law)};
  });
}

rlb_status rlb_random_bridge_phi(const rlb_random_bridge* rb, double r, double t, double x, double* out) {
  return guard([&] {
    need(rb);
    need(out);
    *out = rb->bridge.phi(r, t, x);
  });
}

rlb_status rlb_random_bridge_posterior(const rlb_random_bridge* rb, const double* times, const double* values,
                                       const unsigned char* absorbed, size_t n, rlb_law** out) {
  return guard([&] {
    need(rb);
    need(out);
    if (n > 0) {
      need(times);
      need(values);
    }
    std::vector<rlb::Observation> obs;
    for (size_t i = 0; i < n; ++i) {
      const bool at_z = absorbed && absorbed[i];
      obs.push_back({times[i], at_z ? std::nullopt : std::optional<double>(values[i])});
    }
    *out = new rlb_law{rb->bridge.posterior(obs)};
  });
}

rlb_status rlb_random_bridge_transition(const rlb_random_bridge* rb, double t, const double* x, double u,
                                        rlb_transition** out) {
  return guard([&] {
    need(rb);
    need(out);
    *out = new rlb_transition{rb->bridge.transition(t, state(x), u)};
  });
}

rlb_status rlb_random_bridge_conditional_expectation(const rlb_random_bridge* rb, double t, const double* x,
                                                     double u, double (*g)(double, void*), void* ctx,
                                                     double* out) {
  return guard([&] {
    need(rb);
    need(out);
    if (!g) throw NullArgument();
    *out = rb->bridge.conditional_expectation(t, state(x), u, [&](double y) { return g(y, ctx); });
  });
}

rlb_status rlb_random_bridge_joint_conditional(const rlb_random_bridge* rb, double t, double x, double u,
                                               double (*g)(double, double, void*), void* ctx, double* out) {
  return guard([&] {
    need(rb);
    need(out);
    if (!g) throw NullArgument();
    *out = rb->bridge.joint_conditional(t, x, u, [&](double r, double y) { return g(r, y, ctx); });
  });
}

rlb_status rlb_random_bridge_sample(const rlb_random_bridge* rb, const double* times, size_t n_times,
                                    size_t n_paths, uint64_t seed, unsigned threads, rlb_paths** out) {
  return guard([&] {
    need(rb);
    need(times);
    need(out);
    std::vector<double> grid(times, times + n_times);
    auto paths = rlb::sample_random_bridge_paths(rb->bridge, grid, n_paths, seed, threads);
    *out = new rlb_paths{std::move(grid), std::move(paths)};
  });
}

void rlb_random_bridge_free(rlb_random_bridge* rb) { delete rb; }

double rlb_transition_atom_mass(const rlb_transition* tr) { return tr ? tr->transition.atom_mass() : 0.0; }

size_t rlb_transition_size(const rlb_transition* tr) { return tr ? tr->transition.nodes().size() : 0; }

size_t rlb_transition_copy(const rlb_transition* tr, double* y, double* w, double* density, size_t cap) {
  if (!tr) return 0;
  const auto& nodes = tr->transition.nodes();
  const auto& dens = tr->transition.density();
  const size_t n = std::min(cap, nodes.size());
  for (size_t i = 0; i < n; ++i) {
    if (y) y[i] = nodes[i].x;
    if (w) w[i] = nodes[i].w;
    if (density) density[i] = dens[i];
  }
  return n;
}

rlb_status rlb_transition_density_at(const rlb_transition* tr, double y, double* out) {
  return guard([&] {
    need(tr);
    need(out);
    *out = tr->transition.density_at(y);
  });
}

rlb_status rlb_transition_to_json(const rlb_transition* tr, char** out) {
  return guard([&] {
    need(tr);
    need(out);
    *out = copy_string(tr->transition.to_json().dump());
  });
}

void rlb_transition_free(rlb_transition* tr) { delete tr; }

void rlb_verify_defaults(rlb_verify_options* options) {
  if (!options) return;
  const rlb::VerifyConfig d;
  options->seed = d.seed;
  options->models = nullptr;
  options->n_models = 0;
  options->paths = d.paths;
  options->threads = d.threads;
  options->density_scale = d.density_scale;
}

rlb_status rlb_verify(const rlb_verify_options* options, char** report, int* passed) {
  return guard([&] {
    need(report);
    rlb::VerifyConfig config;
    if (options) {
      config.seed = options->seed;
      if (options->models) {
        config.models.clear();
        for (size_t i = 0; i < options->n_models; ++i) {
          need(options->models[i]);
          config.models.emplace_back(options->models[i]);
        }
      }
      if (options->paths < 2) rlb::fail(rlb::ErrorCode::invalid_argument, "verification needs at least 2 paths");
      config.paths = options->paths;
      config.threads = options->threads;
      config.density_scale = options->density_scale;
    }
    const auto reports = rlb::run_all(config);
    *report = copy_string(rlb::report_json(reports, config).dump(2));
    if (passed) *passed = rlb::all_passed(reports) ? 1 : 0;
  });
}

size_t rlb_check_manifest_size(void) { return rlb::check_manifest().size(); }

const char* rlb_check_manifest_id(size_t i) {
  const auto& ids = rlb::check_manifest();
  return i < ids.size() ? ids[i].c_str() : nullptr;
}

}  // extern "C"
