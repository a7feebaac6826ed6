#include "density_engine/inversion_plan.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/format.hpp"
#include "density_engine/density_point.hpp"

namespace rlb {
namespace {

void require_time(double t) {
  if (!(std::isfinite(t) && t > 0.0)) {
    fail(ErrorCode::invalid_argument, "time must be positive and finite, got " + format_double(t));
  }
}

// Half-width beyond which the table may drop the density.
double natural_extent(const CharacteristicExponent& model, double t) {
  const TailHint tail = model.tail_hint();
  if (tail.heavy()) {
    // Mass beyond X is about 2 A t X^-alpha / alpha.
    return std::pow(2.0 * tail.power_amplitude * t / (tail.power_index * kTableTailMass),
                    1.0 / tail.power_index);
  }
  const double sd = std::sqrt(t * unit_variance(model));
  const double decay = std::isinf(tail.exp_rate) ? 0.0 : 30.0 / tail.exp_rate;
  return 12.0 * sd + decay;
}

// Distance at which a power tail has fallen to 1e-6 of the peak; the aliased
// images must start at least this far beyond the table edge.
double image_clearance(const CharacteristicExponent& model, double t) {
  const TailHint tail = model.tail_hint();
  if (!tail.heavy()) return 0.0;
  const double f0 = mass_at_zero(model, t);
  return std::pow(tail.power_amplitude * t / (1e-6 * f0), 1.0 / (1.0 + tail.power_index));
}

std::size_t transform_for(double period_min, double dx, std::size_t half_points) {
  const auto need = static_cast<std::size_t>(std::ceil(period_min / (2.0 * dx)));
  const std::size_t n1 = std::min(smooth_ceil(std::max(need, half_points)),
                                  std::max(smooth_ceil(half_points), kMaxTransform));
  return n1 + 1;
}

}  // namespace

double find_cutoff(const CharacteristicExponent& model, double t, double tol) {
  require_time(t);
  const double target = std::log(tol);
  double hi = 1.0;
  while (t * model(hi) > target) {
    hi *= 2.0;
    if (hi > kMaxCutoff) {
      fail(ErrorCode::tail_not_decayed,
           "exp(t psi(u)) does not fall below " + format_double(tol) + " for u <= 2^20 (model " +
               model.spec() + ", t=" + format_double(t) + ")");
    }
  }
  double lo = hi == 1.0 ? 0.0 : 0.5 * hi;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (t * model(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double unit_variance(const CharacteristicExponent& model) {
  const double h = 1e-4;
  return 2.0 * -model(h) / (h * h);
}

std::size_t smooth_ceil(std::size_t n) {
  if (n <= 1) return 1;
  std::size_t best = std::size_t{1} << 62;
  for (std::size_t p2 = 1; p2 < best; p2 *= 2) {
    for (std::size_t p3 = p2; p3 < best; p3 *= 3) {
      std::size_t p5 = p3;
      while (p5 < n) p5 *= 5;
      best = std::min(best, p5);
    }
  }
  return best;
}

InversionPlan plan_for(const CharacteristicExponent& model, double t, const PlanOverrides& overrides) {
  require_time(t);
  InversionPlan plan;
  if (overrides.cutoff) {
    if (!(std::isfinite(*overrides.cutoff) && *overrides.cutoff > 0.0)) {
      fail(ErrorCode::invalid_argument, "cutoff override must be positive");
    }
    plan.cutoff = *overrides.cutoff;
  } else {
    plan.cutoff = find_cutoff(model, t);
  }
  const double dx_default = std::numbers::pi / (kOversample * plan.cutoff);

  if (overrides.grid_points) {
    const std::size_t n = *overrides.grid_points;
    if (n < 3 || n % 2 == 0) {
      fail(ErrorCode::invalid_argument, "grid-points must be odd and at least 3");
    }
    plan.half_points = (n - 1) / 2;
  }
  if (overrides.x_max) {
    const double x = *overrides.x_max;
    if (!(std::isfinite(x) && x > 0.0)) fail(ErrorCode::invalid_argument, "x-max must be positive");
    if (!overrides.grid_points) {
      plan.half_points = static_cast<std::size_t>(std::ceil(x / dx_default));
    }
    plan.dx = x / static_cast<double>(plan.half_points);
  } else {
    plan.dx = dx_default;
    if (!overrides.grid_points) {
      const double k = std::ceil(natural_extent(model, t) / dx_default);
      plan.half_points = static_cast<std::size_t>(
          std::clamp(k, 64.0, static_cast<double>(kMaxHalfPoints)));
    }
  }
  if (plan.half_points > kMaxTransform) {
    fail(ErrorCode::invalid_argument, "requested table exceeds " + std::to_string(kMaxTransform) +
                                          " half points");
  }
  const double x_max = plan.x_max();
  const double period_min = std::max(2.0 * x_max, x_max + image_clearance(model, t));
  plan.transform_size = transform_for(period_min, plan.dx, plan.half_points);
  validate_plan(model, t, plan);
  return plan;
}

InversionPlan plan_common(const CharacteristicExponent& model, std::span<const double> times) {
  if (times.empty()) fail(ErrorCode::invalid_argument, "plan_common needs at least one time");
  for (double t : times) require_time(t);
  const auto [tmin, tmax] = std::minmax_element(times.begin(), times.end());
  InversionPlan plan;
  plan.cutoff = find_cutoff(model, *tmin);
  plan.dx = std::numbers::pi / (kOversample * plan.cutoff);
  const double k = std::ceil(natural_extent(model, *tmax) / plan.dx);
  plan.half_points =
      static_cast<std::size_t>(std::clamp(k, 64.0, static_cast<double>(kMaxHalfPoints)));
  const double x_max = plan.x_max();
  double period_min = 2.0 * x_max;
  for (double t : times) period_min = std::max(period_min, x_max + image_clearance(model, t));
  plan.transform_size = transform_for(period_min, plan.dx, plan.half_points);
  for (double t : times) validate_plan(model, t, plan);
  return plan;
}

void validate_plan(const CharacteristicExponent& model, double t, const InversionPlan& plan) {
  require_time(t);
  if (!(plan.cutoff > 0.0) || !(plan.dx > 0.0) || plan.half_points < 1 || plan.transform_size < 2 ||
      plan.transform_size - 1 < plan.half_points) {
    fail(ErrorCode::invalid_argument, "inconsistent inversion plan");
  }
  if (!(std::exp(t * model(plan.cutoff)) < kTailTolerance)) {
    fail(ErrorCode::invalid_argument,
         "plan rejected: exp(t psi(U)) >= 1e-16 at cutoff U=" + format_double(plan.cutoff));
  }
  if (plan.dx > std::numbers::pi / plan.cutoff) {
    fail(ErrorCode::invalid_argument, "plan rejected: dx exceeds pi / U");
  }
}

}  // namespace rlb
