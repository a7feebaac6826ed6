#pragma once

#include <cstddef>
#include <cstdlib>
#include <vector>

#include "density_engine/inversion_plan.hpp"
#include "levy_models/characteristic_exponent.hpp"

namespace rlb {

/// f_t tabulated at x_k = k dx, |k| <= K. Only k >= 0 is stored, so the table
/// is exactly symmetric. Immutable.
class DensityTable {
 public:
  DensityTable(double t, InversionPlan plan, std::vector<double> half_values);

  double t() const noexcept { return t_; }
  double dx() const noexcept { return plan_.dx; }
  std::size_t half_points() const noexcept { return half_.size() - 1; }
  std::size_t size() const noexcept { return 2 * half_.size() - 1; }
  double x_max() const noexcept { return static_cast<double>(half_points()) * dx(); }
  const InversionPlan& plan() const noexcept { return plan_; }

  double value(std::ptrdiff_t k) const noexcept { return half_[static_cast<std::size_t>(std::llabs(k))]; }
  const std::vector<double>& half_values() const noexcept { return half_; }
  std::vector<double> x_grid() const;
  std::vector<double> values() const;

  /// True when the six-point interpolation stencil around x lies in the table.
  bool covers(double x) const noexcept;
  /// Six-point Lagrange interpolation; requires covers(x).
  double interpolate(double x) const noexcept;

  double peak() const noexcept { return half_.front(); }
  double trapezoid_mass() const noexcept;
  /// Upper quartile of the law (half the interquartile range).
  double quartile() const noexcept { return quartile_; }

  std::size_t bytes() const noexcept { return half_.size() * sizeof(double); }

  /// Copy with every value multiplied by factor (fault injection in checks).
  DensityTable scaled(double factor) const;

 private:
  double t_;
  InversionPlan plan_;
  std::vector<double> half_;
  double quartile_;
};

/// Tabulates f_t by a DCT-I of exp(t psi) on the plan's frequency grid.
DensityTable density_grid(const CharacteristicExponent& model, double t, const InversionPlan& plan);

/// Discrete linear convolution scaled by dx; the result carries time a.t + b.t.
DensityTable convolve(const DensityTable& a, const DensityTable& b);

}  // namespace rlb
