#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>

#include "levy_models/characteristic_exponent.hpp"

namespace rlb {

inline constexpr double kTailTolerance = 1e-16;
inline constexpr double kMaxCutoff = 1048576.0;  // 2^20
inline constexpr double kOversample = 8.0;
inline constexpr double kTableTailMass = 1e-7;
inline constexpr std::size_t kMaxHalfPoints = std::size_t{1} << 20;
inline constexpr std::size_t kMaxTransform = std::size_t{1} << 23;
inline constexpr double kDensityFloor = 1e-300;

/// Discretization of the cosine inversion f_t(x) = (1/pi) int_0^U cos(xu) e^{t psi(u)} du.
///
/// The x-grid is k * dx for |k| <= half_points. The DCT-I of length
/// transform_size samples the frequency axis at du = pi / ((n - 1) dx), so
/// dx * du * 2(n - 1) = 2 pi and the inverted density is periodic with
/// period 2(n - 1) dx.
struct InversionPlan {
  double cutoff = 0.0;
  double dx = 0.0;
  std::size_t half_points = 0;
  std::size_t transform_size = 0;

  double x_max() const noexcept { return static_cast<double>(half_points) * dx; }
  double du() const noexcept {
    return std::numbers::pi / (static_cast<double>(transform_size - 1) * dx);
  }
  double period() const noexcept { return 2.0 * static_cast<double>(transform_size - 1) * dx; }
  std::size_t grid_points() const noexcept { return 2 * half_points + 1; }

  friend bool operator==(const InversionPlan&, const InversionPlan&) = default;
};

/// User overrides for the table plan (CLI --cutoff, --grid-points, --x-max).
struct PlanOverrides {
  std::optional<double> cutoff;
  std::optional<std::size_t> grid_points;  // total, odd
  std::optional<double> x_max;

  bool empty() const noexcept { return !cutoff && !grid_points && !x_max; }
};

/// Smallest U with t psi(U) <= log(tol), located by doubling from 1 and then
/// bisection. Throws tail_not_decayed once the doubling passes 2^20.
double find_cutoff(const CharacteristicExponent& model, double t, double tol = kTailTolerance);

/// Variance per unit time, -psi''(0), for light-tailed models.
double unit_variance(const CharacteristicExponent& model);

/// Smallest 2^a 3^b 5^c that is >= n.
std::size_t smooth_ceil(std::size_t n);

InversionPlan plan_for(const CharacteristicExponent& model, double t, const PlanOverrides& overrides = {});

/// One plan serving several times: cutoff from the smallest, extent from the largest.
InversionPlan plan_common(const CharacteristicExponent& model, std::span<const double> times);

/// Throws invalid_argument if exp(t psi(U)) >= tol or dx > pi / U.
void validate_plan(const CharacteristicExponent& model, double t, const InversionPlan& plan);

}  // namespace rlb
