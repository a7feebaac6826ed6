#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace rlbcli {

/// One observation "t:x"; an empty value is the absorbed token "z".
struct ObservationArg {
  double t = 0.0;
  std::optional<double> value;

  friend bool operator==(const ObservationArg&, const ObservationArg&) = default;
};

/// Parses "t1:x1,t2:z,...". Throws std::invalid_argument on malformed input.
std::vector<ObservationArg> parse_observations(const std::string& text);
std::string format_observations(const std::vector<ObservationArg>& obs);

/// Parses a number or the token "z" (absorbed).
std::optional<double> parse_state(const std::string& text);

/// Everything a subcommand needs, after flag parsing.
struct CliConfig {
  std::string subcommand;
  std::string model = "cauchy";
  double z = 0.0;
  std::string tau_path;
  double t_max = 1.0;
  int steps = 64;
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "csv";

  double t = 1.0;
  std::optional<double> x = 0.0;
  double u = 0.5;
  double r = 1.0;
  std::size_t n_paths = 1000;
  unsigned threads = 1;
  std::vector<ObservationArg> observations;

  std::optional<double> cutoff;
  std::optional<std::size_t> grid_points;
  std::optional<double> x_max;
  std::optional<double> x_range;

  std::optional<std::vector<std::string>> verify_models;
  std::size_t verify_paths = 10000;

  nlohmann::json to_json() const;
  static CliConfig from_json(const nlohmann::json& j);

  /// File extension for the output: "csv" or "json".
  std::string extension() const;
  /// --out if given, otherwise <RLB_OUTPUT_DIR or .>/<subcommand>.<ext>.
  std::string output_path(const char* env_dir) const;

  friend bool operator==(const CliConfig&, const CliConfig&) = default;
};

/// Shortest decimal text that parses back to the same double.
std::string number(double v);

}  // namespace rlbcli
