// Command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_config.hpp"
#include "json.hpp"
#include "rlb/rlb.h"

namespace {

using rlbcli::CliConfig;
using rlbcli::number;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct Failure {
  rlb_status status;
  std::string message;
};

void check(rlb_status s) {
  if (s != RLB_OK) throw Failure{s, rlb_last_error()};
}

int exit_code(rlb_status s) {
  switch (s) {
    case RLB_ERR_INVALID_ARGUMENT:
    case RLB_ERR_PARAMETER_DOMAIN:
    case RLB_ERR_TIME_ORDER:
    case RLB_ERR_INVALID_OBSERVATION:
    case RLB_ERR_IO:
      return kExitUsage;
    default:
      return kExitNumeric;
  }
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Model = std::unique_ptr<rlb_model, Deleter<rlb_model, rlb_model_free>>;
using Engine = std::unique_ptr<rlb_engine, Deleter<rlb_engine, rlb_engine_free>>;
using Law = std::unique_ptr<rlb_law, Deleter<rlb_law, rlb_law_free>>;
using Table = std::unique_ptr<rlb_table, Deleter<rlb_table, rlb_table_free>>;
using Bridge = std::unique_ptr<rlb_bridge, Deleter<rlb_bridge, rlb_bridge_free>>;
using RandomBridge = std::unique_ptr<rlb_random_bridge, Deleter<rlb_random_bridge, rlb_random_bridge_free>>;
using Paths = std::unique_ptr<rlb_paths, Deleter<rlb_paths, rlb_paths_free>>;
using Transition = std::unique_ptr<rlb_transition, Deleter<rlb_transition, rlb_transition_free>>;

struct CString {
  char* p = nullptr;
  ~CString() { rlb_string_free(p); }
};

Engine make_engine(const CliConfig& c) {
  rlb_model* m = nullptr;
  check(rlb_model_parse(c.model.c_str(), &m));
  Model model(m);
  rlb_plan_options opts{c.cutoff.value_or(0.0), c.grid_points.value_or(0), c.x_max.value_or(0.0)};
  rlb_engine* e = nullptr;
  check(rlb_engine_create(model.get(), &opts, &e));
  return Engine(e);
}

Law load_law(const CliConfig& c) {
  if (c.tau_path.empty()) throw Failure{RLB_ERR_INVALID_ARGUMENT, "--tau is required"};
  rlb_law* l = nullptr;
  check(rlb_law_load(c.tau_path.c_str(), &l));
  return Law(l);
}

RandomBridge make_random_bridge(const CliConfig& c, const Engine& engine) {
  const Law law = load_law(c);
  rlb_random_bridge* rb = nullptr;
  check(rlb_random_bridge_create(engine.get(), c.z, law.get(), &rb));
  return RandomBridge(rb);
}

std::vector<double> time_grid(const CliConfig& c) {
  if (!(c.t_max > 0.0) || c.steps < 1) throw Failure{RLB_ERR_INVALID_ARGUMENT, "grid needs --t-max > 0 and --steps >= 1"};
  std::vector<double> times(static_cast<std::size_t>(c.steps) + 1);
  for (int i = 0; i <= c.steps; ++i) times[static_cast<std::size_t>(i)] = c.t_max * i / c.steps;
  times.back() = c.t_max;
  return times;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{RLB_ERR_IO, "cannot open '" + path + "' for writing"};
  out << content;
  if (!out) throw Failure{RLB_ERR_IO, "cannot write '" + path + "'"};
}

std::string paths_output(const CliConfig& c, const rlb_paths* paths) {
  const std::size_t n = rlb_paths_count(paths);
  const std::size_t m = rlb_paths_steps(paths);
  const double* times = rlb_paths_times(paths);
  std::vector<double> values(m);
  std::vector<unsigned char> absorbed(m);
  double length = 0.0;
  if (c.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
      check(rlb_paths_get(paths, i, values.data(), absorbed.data(), &length));
      std::vector<bool> flags(absorbed.begin(), absorbed.end());
      rows.push_back({{"path_id", i}, {"realized_length", length}, {"values", values}, {"absorbed", flags}});
    }
    nlohmann::json j{{"config", c.to_json()},
                     {"times", std::vector<double>(times, times + m)},
                     {"paths", rows}};
    return j.dump() + "\n";
  }
  std::ostringstream os;
  os << "path_id,t,value,absorbed\n";
  for (std::size_t i = 0; i < n; ++i) {
    check(rlb_paths_get(paths, i, values.data(), absorbed.data(), &length));
    for (std::size_t k = 0; k < m; ++k) {
      os << i << ',' << number(times[k]) << ',' << number(values[k]) << ',' << int(absorbed[k]) << '\n';
    }
  }
  return os.str();
}

std::string cmd_density(const CliConfig& c, std::size_t& rows) {
  const Engine engine = make_engine(c);
  rlb_table* raw = nullptr;
  check(rlb_engine_table(engine.get(), c.t, &raw));
  const Table table(raw);
  const std::size_t n = rlb_table_size(table.get());
  std::vector<double> x(n), f(n);
  rlb_table_copy(table.get(), x.data(), f.data(), n);
  const double limit = c.x_range.value_or(c.x_max.value_or(std::numeric_limits<double>::infinity()));
  const double tol = 1e-12 * std::max(1.0, std::fabs(limit));
  std::vector<double> xs, fs;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(x[i]) <= limit + tol) {
      xs.push_back(x[i]);
      fs.push_back(f[i]);
    }
  }
  rows = xs.size();
  if (c.format == "json") {
    return nlohmann::json{{"config", c.to_json()}, {"t", c.t}, {"x", xs}, {"f", fs}}.dump() + "\n";
  }
  std::ostringstream os;
  os << "x,f\n";
  for (std::size_t i = 0; i < xs.size(); ++i) os << number(xs[i]) << ',' << number(fs[i]) << '\n';
  return os.str();
}

std::string cmd_bridge_sample(const CliConfig& c) {
  const Engine engine = make_engine(c);
  rlb_bridge* b = nullptr;
  check(rlb_bridge_create(engine.get(), c.r, c.z, &b));
  const Bridge bridge(b);
  const auto times = time_grid(c);
  rlb_paths* p = nullptr;
  check(rlb_bridge_sample(bridge.get(), times.data(), times.size(), c.n_paths, c.seed, c.threads, &p));
  const Paths paths(p);
  return paths_output(c, paths.get());
}

std::string cmd_rlb_sample(const CliConfig& c) {
  const Engine engine = make_engine(c);
  const RandomBridge rb = make_random_bridge(c, engine);
  const auto times = time_grid(c);
  rlb_paths* p = nullptr;
  check(rlb_random_bridge_sample(rb.get(), times.data(), times.size(), c.n_paths, c.seed, c.threads, &p));
  const Paths paths(p);
  return paths_output(c, paths.get());
}

std::string cmd_posterior(const CliConfig& c) {
  const Engine engine = make_engine(c);
  const RandomBridge rb = make_random_bridge(c, engine);
  std::vector<double> times, values;
  std::vector<unsigned char> absorbed;
  for (const auto& o : c.observations) {
    times.push_back(o.t);
    values.push_back(o.value.value_or(c.z));
    absorbed.push_back(o.value ? 0 : 1);
  }
  rlb_law* l = nullptr;
  check(rlb_random_bridge_posterior(rb.get(), times.data(), values.data(), absorbed.data(), times.size(), &l));
  const Law post(l);
  CString text;
  check(rlb_law_to_json(post.get(), &text.p));
  const auto j = nlohmann::json::parse(text.p);
  if (c.format == "json") {
    return nlohmann::json{{"config", c.to_json()}, {"posterior", j}}.dump() + "\n";
  }
  std::ostringstream os;
  os << "part,r,value\n";
  for (const auto& a : j.at("atoms")) {
    os << "atom," << number(a.at("r").get<double>()) << ',' << number(a.at("p").get<double>()) << '\n';
  }
  if (j.contains("density") && !j.at("density").is_null()) {
    const auto grid = j.at("density").at("grid").get<std::vector<double>>();
    const auto vals = j.at("density").at("values").get<std::vector<double>>();
    for (std::size_t i = 0; i < grid.size(); ++i) os << "density," << number(grid[i]) << ',' << number(vals[i]) << '\n';
  }
  return os.str();
}

std::string cmd_kernel(const CliConfig& c) {
  const Engine engine = make_engine(c);
  const RandomBridge rb = make_random_bridge(c, engine);
  rlb_transition* raw = nullptr;
  const double x = c.x.value_or(c.z);
  check(rlb_random_bridge_transition(rb.get(), c.t, c.x ? &x : nullptr, c.u, &raw));
  const Transition tr(raw);
  if (c.format == "json") {
    CString text;
    check(rlb_transition_to_json(tr.get(), &text.p));
    return nlohmann::json{{"config", c.to_json()}, {"transition", nlohmann::json::parse(text.p)}}.dump() + "\n";
  }
  const std::size_t n = rlb_transition_size(tr.get());
  std::vector<double> y(n), w(n), d(n);
  rlb_transition_copy(tr.get(), y.data(), w.data(), d.data(), n);
  std::ostringstream os;
  os << "part,y,value\n";
  os << "atom," << number(c.z) << ',' << number(rlb_transition_atom_mass(tr.get())) << '\n';
  for (std::size_t i = 0; i < n; ++i) os << "density," << number(y[i]) << ',' << number(d[i]) << '\n';
  return os.str();
}

int cmd_verify(const CliConfig& c, const std::string& path) {
  rlb_verify_options opts;
  rlb_verify_defaults(&opts);
  opts.seed = c.seed;
  opts.paths = c.verify_paths;
  opts.threads = c.threads;
  std::vector<const char*> names;
  if (c.verify_models) {
    for (const auto& m : *c.verify_models) {
      rlb_model* parsed = nullptr;
      check(rlb_model_parse(m.c_str(), &parsed));
      rlb_model_free(parsed);
      names.push_back(m.c_str());
    }
    opts.models = names.data();
    opts.n_models = names.size();
  }
  CString report;
  int passed = 0;
  check(rlb_verify(&opts, &report.p, &passed));
  write_file(path, std::string(report.p) + "\n");
  const auto j = nlohmann::json::parse(report.p);
  std::size_t failed = 0;
  for (const auto& r : j.at("checks")) {
    if (r.at("status") != "pass") ++failed;
  }
  std::cout << "verify: " << j.at("checks").size() - failed << "/" << j.at("checks").size() << " checks passed, seed "
            << c.seed << ", report " << path << "\n";
  return passed ? 0 : kExitVerifyFailed;
}

int run(const CliConfig& c) {
  const std::string path = c.output_path(std::getenv("RLB_OUTPUT_DIR"));
  if (c.subcommand == "verify") return cmd_verify(c, path);
  std::string content;
  std::string summary;
  if (c.subcommand == "density") {
    std::size_t rows = 0;
    content = cmd_density(c, rows);
    summary = std::to_string(rows) + " grid points";
  } else if (c.subcommand == "bridge-sample") {
    content = cmd_bridge_sample(c);
    summary = std::to_string(c.n_paths) + " paths";
  } else if (c.subcommand == "rlb-sample") {
    content = cmd_rlb_sample(c);
    summary = std::to_string(c.n_paths) + " paths";
  } else if (c.subcommand == "posterior") {
    content = cmd_posterior(c);
    summary = "posterior of the length";
  } else if (c.subcommand == "kernel") {
    content = cmd_kernel(c);
    summary = "mixed transition";
  }
  write_file(path, content);
  std::cout << c.subcommand << ": " << summary << " written to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levy bridges of random length: densities, sampling, posteriors, verification"};
  app.require_subcommand(1);
  CliConfig c;

  std::string x_text = "0";
  std::string obs_text;
  double cutoff = 0.0, x_max = 0.0, x_range = 0.0;
  std::size_t grid_points = 0;
  std::vector<std::string> models;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "Output file (default: $RLB_OUTPUT_DIR/<subcommand>.<format>)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  const auto model_opts = [&](CLI::App* sub) {
    sub->add_option("--model", c.model, "Model spec, e.g. stable:alpha=1.5, nig, cauchy");
    sub->add_option("--cutoff", cutoff, "Frequency cutoff U of the density tables");
    sub->add_option("--grid-points", grid_points, "Total table points (odd)");
    sub->add_option("--x-max", x_max, "Half-width of the density tables");
  };
  const auto grid_opts = [&](CLI::App* sub) {
    sub->add_option("--t-max", c.t_max, "Last grid time");
    sub->add_option("--steps", c.steps, "Number of uniform grid steps");
    sub->add_option("--n-paths", c.n_paths, "Number of paths");
    sub->add_option("--seed", c.seed, "Root seed");
    sub->add_option("--threads", c.threads, "Worker threads");
  };

  auto* density = app.add_subcommand("density", "Tabulated transition density f_t (CSV columns x,f)");
  model_opts(density);
  common(density);
  density->add_option("--t", c.t, "Time t > 0");
  density->add_option("--x-range", x_range, "Only write rows with |x| <= this value");

  auto* bridge = app.add_subcommand("bridge-sample", "Paths of a fixed-length bridge (path_id,t,value,absorbed)");
  model_opts(bridge);
  common(bridge);
  grid_opts(bridge);
  bridge->add_option("--r", c.r, "Bridge length r")->required();
  bridge->add_option("--z", c.z, "Endpoint z");

  auto* rlb = app.add_subcommand("rlb-sample", "Paths of the random-length bridge (path_id,t,value,absorbed)");
  model_opts(rlb);
  common(rlb);
  grid_opts(rlb);
  rlb->add_option("--z", c.z, "Endpoint z");
  rlb->add_option("--tau", c.tau_path, "Length law JSON file")->required();

  auto* posterior = app.add_subcommand("posterior", "Posterior of the length (part,r,value)");
  model_opts(posterior);
  common(posterior);
  posterior->add_option("--z", c.z, "Endpoint z");
  posterior->add_option("--tau", c.tau_path, "Length law JSON file")->required();
  posterior->add_option("--obs", obs_text, "Observations t1:x1,t2:x2,... with x = z for absorbed")->required();

  auto* kernel = app.add_subcommand("kernel", "Mixed transition law from (t, x) to u (part,y,value)");
  model_opts(kernel);
  common(kernel);
  kernel->add_option("--z", c.z, "Endpoint z");
  kernel->add_option("--tau", c.tau_path, "Length law JSON file")->required();
  kernel->add_option("--t", c.t, "Start time");
  kernel->add_option("--x", x_text, "Start state, or z for absorbed");
  kernel->add_option("--u", c.u, "End time u > t")->required();

  auto* verify = app.add_subcommand("verify", "Run the verification suite and write a JSON report");
  verify->add_option("--seed", c.seed, "Root seed");
  verify->add_option("--out", c.out, "Report file (default: $RLB_OUTPUT_DIR/report.json)");
  verify->add_option("--paths", c.verify_paths, "Sample size of the statistical checks");
  verify->add_option("--threads", c.threads, "Worker threads");
  verify->add_option("--models", models, "Model specs (default: all six)")->expected(1, CLI::detail::expected_max_vector_size);

  try {
    app.parse(argc, argv);
    for (auto* sub : app.get_subcommands()) c.subcommand = sub->get_name();
    auto* sub = app.get_subcommands().front();
    const auto given = [&](const char* name) {
      auto* opt = sub->get_option_no_throw(name);
      return opt && opt->count() > 0;
    };
    if (given("--cutoff")) c.cutoff = cutoff;
    if (given("--grid-points")) c.grid_points = grid_points;
    if (given("--x-max")) c.x_max = x_max;
    if (given("--x-range")) c.x_range = x_range;
    if (given("--models")) c.verify_models = models;
    if (c.subcommand == "bridge-sample" && !given("--t-max")) c.t_max = c.r;
    if (given("--x")) c.x = rlbcli::parse_state(x_text);
    if (given("--obs")) c.observations = rlbcli::parse_observations(obs_text);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return run(c);
  } catch (const Failure& f) {
    std::cerr << "error (" << rlb_status_name(f.status) << "): " << f.message << "\n";
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
