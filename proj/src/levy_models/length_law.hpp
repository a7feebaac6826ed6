#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "json.hpp"

namespace rlb {

struct Atom {
  double r;
  double p;
};

/// Piecewise-linear density on a strictly increasing positive grid.
struct DensityPart {
  std::vector<double> grid;
  std::vector<double> values;
};

/// One node of a quadrature rule against P_tau: integrate(g) = sum weight * g(r).
struct RuleNode {
  double r;
  double weight;
};

/// Law of a strictly positive random length: atoms plus an optional
/// piecewise-linear density part. Immutable.
///
/// Integrals against the density part are exact integrals of the linear
/// interpolant of g * density between the law's own grid nodes, so
/// integrate() is linear in g and additive over adjacent intervals.
class LengthLaw {
 public:
  static constexpr double kMassTolerance = 1e-12;

  LengthLaw(std::vector<Atom> atoms, std::optional<DensityPart> density = std::nullopt);

  static LengthLaw point(double r) { return LengthLaw({{r, 1.0}}); }
  static LengthLaw from_json(const nlohmann::json& j);
  static LengthLaw load(const std::string& path);
  nlohmann::json to_json() const;

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::optional<DensityPart>& density() const noexcept { return density_; }

  /// P(tau <= t).
  double cdf(double t) const;

  /// Smallest t with cdf(t) >= q, for q in (0, 1].
  double quantile(double q) const;

  double sample(Rng& rng) const;

  /// Quadrature nodes realizing integrals over (a, b]. b may be +inf.
  std::vector<RuleNode> rule(double a, double b = kInf) const;

  double integrate(const std::function<double(double)>& g, double a = 0.0, double b = kInf) const;

  /// Density interpolant (zero off the grid).
  double density_at(double r) const noexcept;

  /// Smallest and largest support points.
  double support_min() const noexcept;
  double support_max() const noexcept;

  /// Law proportional to weight(r) P_tau(dr) restricted to (a, b].
  /// Sets *normalizer to the pre-normalization mass when non-null.
  /// Throws zero_normalizer if that mass is below kMassTolerance.
  LengthLaw reweighted(double a, double b, const std::function<double(double)>& weight,
                       double* normalizer = nullptr) const;

  static constexpr double kInf = std::numeric_limits<double>::infinity();

 private:
  std::vector<Atom> atoms_;
  std::optional<DensityPart> density_;
};

}  // namespace rlb
