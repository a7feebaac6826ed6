#include "cli_config.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace rlbcli {
namespace {

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw std::invalid_argument("not a finite number: '" + text + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_state(const std::string& text) {
  const std::string s = trim(text);
  if (s == "z") return std::nullopt;
  return parse_number(s);
}

std::vector<ObservationArg> parse_observations(const std::string& text) {
  std::vector<ObservationArg> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("observation '" + item + "' is not of the form t:x");
    out.push_back({parse_number(trim(item.substr(0, colon))), parse_state(item.substr(colon + 1))});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_observations(const std::vector<ObservationArg>& obs) {
  std::string s;
  for (const auto& o : obs) {
    if (!s.empty()) s += ',';
    s += number(o.t) + ':' + (o.value ? number(*o.value) : std::string("z"));
  }
  return s;
}

nlohmann::json CliConfig::to_json() const {
  return {{"subcommand", subcommand},
          {"model", model},
          {"z", z},
          {"tau", tau_path},
          {"grid", {{"t_max", t_max}, {"steps", steps}}},
          {"seed", seed},
          {"out", out},
          {"format", format},
          {"t", t},
          {"x", optional_json(x)},
          {"u", u},
          {"r", r},
          {"n_paths", n_paths},
          {"threads", threads},
          {"obs", format_observations(observations)},
          {"cutoff", optional_json(cutoff)},
          {"grid_points", optional_json(grid_points)},
          {"x_max", optional_json(x_max)},
          {"x_range", optional_json(x_range)},
          {"verify_models", optional_json(verify_models)},
          {"verify_paths", verify_paths}};
}

CliConfig CliConfig::from_json(const nlohmann::json& j) {
  CliConfig c;
  c.subcommand = j.at("subcommand").get<std::string>();
  c.model = j.at("model").get<std::string>();
  c.z = j.at("z").get<double>();
  c.tau_path = j.at("tau").get<std::string>();
  c.t_max = j.at("grid").at("t_max").get<double>();
  c.steps = j.at("grid").at("steps").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.out = j.at("out").get<std::string>();
  c.format = j.at("format").get<std::string>();
  c.t = j.at("t").get<double>();
  c.x = optional_from<double>(j, "x");
  c.u = j.at("u").get<double>();
  c.r = j.at("r").get<double>();
  c.n_paths = j.at("n_paths").get<std::size_t>();
  c.threads = j.at("threads").get<unsigned>();
  const auto obs = j.at("obs").get<std::string>();
  if (!obs.empty()) c.observations = parse_observations(obs);
  c.cutoff = optional_from<double>(j, "cutoff");
  c.grid_points = optional_from<std::size_t>(j, "grid_points");
  c.x_max = optional_from<double>(j, "x_max");
  c.x_range = optional_from<double>(j, "x_range");
  c.verify_models = optional_from<std::vector<std::string>>(j, "verify_models");
  c.verify_paths = j.at("verify_paths").get<std::size_t>();
  return c;
}

std::string CliConfig::extension() const {
  return subcommand == "verify" ? "json" : format;
}

std::string CliConfig::output_path(const char* env_dir) const {
  if (!out.empty()) return out;
  const std::string dir = env_dir && *env_dir ? env_dir : ".";
  const std::string name = subcommand == "verify" ? "report" : subcommand;
  return dir + "/" + name + "." + extension();
}

}  // namespace rlbcli
