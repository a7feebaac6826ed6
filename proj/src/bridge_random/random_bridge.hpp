#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bridge_fixed/fixed_bridge.hpp"
#include "common/quadrature.hpp"
#include "density_engine/engine.hpp"
#include "json.hpp"
#include "levy_models/length_law.hpp"

namespace rlb {

/// Observed state of the bridge at time t; an empty value is the absorbed
/// state (the process sits at z because tau <= t).
struct Observation {
  double t;
  std::optional<double> value;

  bool absorbed() const noexcept { return !value.has_value(); }
};

/// Law of zeta_u given zeta_t = x: an atom at z plus a density on a
/// quadrature grid.
class MixedTransition {
 public:
  double atom_mass() const noexcept { return atom_mass_; }
  double z() const noexcept { return z_; }
  double t() const noexcept { return t_; }
  double u() const noexcept { return u_; }
  const std::optional<double>& x() const noexcept { return x_; }

  /// Quadrature nodes (y, weight) and the continuous density at each node.
  const std::vector<QuadNode>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& density() const noexcept { return density_; }

  /// Numeric integral of the continuous part.
  double continuous_mass() const noexcept;
  /// Integral of the continuous part implied by Chapman-Kolmogorov.
  double continuous_mass_exact() const noexcept { return continuous_exact_; }
  double total_mass() const noexcept { return atom_mass_ + continuous_mass(); }

  /// Continuous density evaluated at an arbitrary y.
  double density_at(double y) const;

  /// g(z) * atom + integral of g times the continuous density.
  double expectation(const std::function<double(double)>& g) const;

  /// {"atom_mass", "grid", "density"}.
  nlohmann::json to_json() const;

 private:
  friend class RandomBridge;

  std::shared_ptr<const DensityEngine> engine_;
  double atom_mass_ = 0.0;
  double continuous_exact_ = 0.0;
  double z_ = 0.0, t_ = 0.0, u_ = 0.0;
  std::optional<double> x_;
  // Continuous density = f_{u-t}(y-x) * sum_r coefficient_r f_{r-u}(z-y).
  std::vector<std::pair<double, double>> terms_;
  std::vector<QuadNode> nodes_;
  std::vector<double> density_;
};

/// Levy bridge from 0 to z whose length tau has law P_tau.
class RandomBridge {
 public:
  RandomBridge(std::shared_ptr<const DensityEngine> engine, double z, LengthLaw law);

  double z() const noexcept { return z_; }
  const LengthLaw& law() const noexcept { return law_; }
  const DensityEngine& engine() const noexcept { return *engine_; }

  /// f_{r-t}(z-x) / f_r(z) for t < r, 0 otherwise.
  double phi(double r, double t, double x) const;

  /// Integral of phi(r, t, x) over r in (t, inf) against P_tau.
  double normalizer(double t, double x) const;

  /// Posterior of tau given zeta_t = x (unabsorbed), supported on (t, inf).
  LengthLaw posterior_single(double t, double x) const;

  /// Posterior of tau given observations at increasing times.
  LengthLaw posterior(std::span<const Observation> observations) const;

  MixedTransition transition(double t, std::optional<double> x, double u) const;

  /// Atom and continuous density without building the quadrature grid.
  MixedTransition transition_pointwise(double t, std::optional<double> x, double u) const;

  double conditional_expectation(double t, std::optional<double> x, double u,
                                 const std::function<double(double)>& g) const;

  /// E[g(tau, zeta_u) | zeta_t = x] for unabsorbed x: the (t, u] bracket
  /// contributes g(r, z), lengths beyond u the continuous part.
  double joint_conditional(double t, double x, double u,
                           const std::function<double(double, double)>& g) const;

  /// Draws r from P_tau, then a bridge of length r on the grid, then z.
  PathSample sample_path(const std::vector<double>& times, Rng& rng) const;

 private:
  double endpoint_density(double r) const;
  MixedTransition transition_terms(double t, std::optional<double> x, double u) const;

  std::shared_ptr<const DensityEngine> engine_;
  double z_;
  LengthLaw law_;
  std::map<double, double> f_rz_;
};

std::vector<PathSample> sample_random_bridge_paths(const RandomBridge& bridge, const std::vector<double>& times,
                                                   std::size_t n_paths, std::uint64_t root_seed,
                                                   unsigned threads = 1);

}  // namespace rlb
