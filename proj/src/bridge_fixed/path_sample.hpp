#pragma once

#include <vector>

namespace rlb {

/// A trajectory on a time grid. Nodes at or after realized_length hold z and
/// are flagged absorbed.
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  double realized_length = 0.0;
  std::vector<bool> absorbed;
};

/// Checks that times start at 0 and increase strictly.
void validate_time_grid(const std::vector<double>& times);

/// times = {0, dt, ..., t_max} with `steps` intervals; the last node is t_max exactly.
std::vector<double> uniform_grid(double t_max, int steps);

}  // namespace rlb
