#include "density_engine/density_point.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.hpp"
#include "common/format.hpp"
#include "common/quadrature.hpp"
#include "density_engine/inversion_plan.hpp"

namespace rlb {
namespace {

constexpr int kGradedLevels = 30;

template <class F>
double panel(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (const auto& n : gauss_legendre_20()) s += n.w * f(mid + half * n.x);
  return s * half;
}

}  // namespace

double inversion_integral(const CharacteristicExponent& model, double t, double x, double cutoff) {
  const double ax = std::fabs(x);
  double w = cutoff / 32.0;
  if (ax > 0.0) w = std::min(w, 2.0 * std::numbers::pi / ax);
  auto integrand = [&](double u) { return std::cos(ax * u) * std::exp(t * model(u)); };

  // Geometric panels resolve the non-smooth behaviour of psi at the origin.
  double sum = 0.0;
  double a = 0.0;
  double b = std::ldexp(w, -kGradedLevels);
  for (int level = 0; level <= kGradedLevels; ++level) {
    sum += panel(integrand, a, b);
    a = b;
    b *= 2.0;
  }
  const double rest = cutoff - w;
  if (rest > 0.0) {
    const double count = std::ceil(rest / w);
    const double width = rest / count;
    for (double i = 0.0; i < count; i += 1.0) {
      sum += panel(integrand, w + i * width, w + (i + 1.0) * width);
    }
  }
  return sum / std::numbers::pi;
}

double clamp_density(double raw, double peak, double t, double x) {
  if (raw >= 0.0) return raw;
  if (-raw < 1e-10 * peak) return 0.0;
  fail(ErrorCode::accuracy, "density inversion produced " + format_double(raw) + " at t=" +
                                format_double(t) + ", x=" + format_double(x));
}

double density_point(const CharacteristicExponent& model, double t, double x, double cutoff, double peak) {
  return clamp_density(inversion_integral(model, t, x, cutoff), peak, t, x);
}

double density_point(const CharacteristicExponent& model, double t, double x) {
  const double cutoff = find_cutoff(model, t);
  const double raw = inversion_integral(model, t, x, cutoff);
  if (raw >= 0.0) return raw;
  return clamp_density(raw, inversion_integral(model, t, 0.0, cutoff), t, x);
}

double mass_at_zero(const CharacteristicExponent& model, double t) {
  return inversion_integral(model, t, 0.0, find_cutoff(model, t));
}

}  // namespace rlb
