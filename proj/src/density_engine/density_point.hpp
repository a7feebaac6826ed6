#pragma once

#include "levy_models/characteristic_exponent.hpp"

namespace rlb {

/// (1/pi) int_0^U cos(xu) e^{t psi(u)} du by Gauss-Legendre panels, unclamped.
double inversion_integral(const CharacteristicExponent& model, double t, double x, double cutoff);

/// Applies the negativity rule: values above -1e-10 * peak clamp to 0,
/// anything more negative throws an accuracy error.
double clamp_density(double raw, double peak, double t, double x);

double density_point(const CharacteristicExponent& model, double t, double x);
double density_point(const CharacteristicExponent& model, double t, double x, double cutoff, double peak);

/// f_t(0) = (2 pi)^-1 ||exp(t psi)||_1.
double mass_at_zero(const CharacteristicExponent& model, double t);

}  // namespace rlb
