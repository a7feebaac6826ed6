#pragma once

// Closed-form and brute-force references. Nothing here calls the Fourier
// engine or the bridge code.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace rlb::oracle {

inline double cauchy_density(double t, double x) { return t / (std::numbers::pi * (t * t + x * x)); }

inline double cauchy_cdf(double t, double x) { return 0.5 + std::atan(x / t) / std::numbers::pi; }

inline double gaussian_density(double variance, double x) {
  return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

inline double gaussian_cdf(double variance, double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

/// Symmetric alpha-stable with psi = -|u|^alpha: f_t(0) = Gamma(1 + 1/alpha) / (pi t^(1/alpha)).
inline double stable_density_at_zero(double alpha, double t) {
  return std::tgamma(1.0 + 1.0 / alpha) / (std::numbers::pi * std::pow(t, 1.0 / alpha));
}

/// NIG with psi = 1 - sqrt(1 + u^2) (alpha = 1, beta = 0, delta = t).
inline double nig_density(double t, double x) {
  const double q = std::sqrt(t * t + x * x);
  return t * std::exp(t) / std::numbers::pi * std::cyl_bessel_k(1.0, q) / q;
}

/// Conditional variance of a Brownian bridge pinned at r, from time t to u.
inline double brownian_bridge_variance(double sigma, double t, double u, double r) {
  return sigma * sigma * (u - t) * (r - u) / (r - t);
}

/// Conditional mean of a Brownian bridge from (t, x) pinned at (r, z), at time u.
inline double brownian_bridge_mean(double t, double x, double u, double r, double z) {
  return x + (u - t) / (r - t) * (z - x);
}

/// CDF of X_1 for the Cauchy bridge from 0 to 0 of length 2. Its density is
/// f_1(y)^2 / f_2(0) = (2 / pi) / (1 + y^2)^2.
inline double cauchy_bridge_midpoint_cdf(double y) {
  return 0.5 + (y / (1.0 + y * y) + std::atan(y)) / std::numbers::pi;
}

/// Observation (time, value); an empty value marks the absorbed state z.
using Obs = std::pair<double, std::optional<double>>;

/// Posterior weights of the atoms r_i given the observations, by Bayes on the
/// finite-dimensional densities of the pinned bridges:
/// weight_i ∝ p_i * prod f_{dt}(dx) * f_{r_i - t_k}(z - x_k) / f_{r_i}(z)
/// over the unabsorbed prefix, times 1{r_i <= t_j} for absorbed observations
/// and 1{r_i > t_j} for unabsorbed ones.
inline std::vector<double> bruteforce_posterior(const std::function<double(double, double)>& f,
                                                double z, const std::vector<double>& r,
                                                const std::vector<double>& p,
                                                const std::vector<Obs>& obs) {
  std::vector<double> w(r.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double like = p[i];
    double t_prev = 0.0;
    double x_prev = 0.0;
    for (const auto& [t, x] : obs) {
      if (!x) {
        if (!(r[i] <= t)) like = 0.0;
        continue;
      }
      if (!(r[i] > t)) {
        like = 0.0;
        continue;
      }
      like *= f(t - t_prev, *x - x_prev);
      t_prev = t;
      x_prev = *x;
    }
    if (like > 0.0) like *= f(r[i] - t_prev, z - x_prev) / f(r[i], z);
    w[i] = like;
    total += like;
  }
  if (total > 0.0) {
    for (auto& v : w) v /= total;
  }
  return w;
}

}  // namespace rlb::oracle
