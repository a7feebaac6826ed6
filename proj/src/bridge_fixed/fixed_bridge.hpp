#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "bridge_fixed/path_sample.hpp"
#include "common/quadrature.hpp"
#include "common/rng.hpp"
#include "density_engine/engine.hpp"

namespace rlb {

/// Point around which integration panels are refined, with its length scale.
struct Center {
  double c;
  double s;
};

/// Panel edges on [lo, hi]: width s/2 within 4s of each center, growing by
/// 1.5 per panel beyond. Edges closer than 0.3 * min(s)/2 are merged.
std::vector<double> graded_edges(std::span<const Center> centers, double lo, double hi);

/// How far a kernel's y-domain may be extended into the tails.
enum class KernelDomain {
  full,            // until k(y)|y - x| < 1e-10, using quadrature beyond the tables
  table_coverage,  // never beyond the cached tables (sampling)
};

class FixedBridge;

/// y -> f_{u-t}(y-x) f_{r-u}(z-y) / f_{r-t}(z-x) for one (t, x, u).
class BridgeKernel {
 public:
  double operator()(double y) const;

  double t() const noexcept { return t_; }
  double x() const noexcept { return x_; }
  double u() const noexcept { return u_; }
  const std::vector<double>& edges() const noexcept { return edges_; }

  /// Gauss-Legendre nodes on the panels (weights only, kernel not applied).
  std::vector<QuadNode> rule() const { return panel_rule(edges_); }
  double integrate(const std::function<double(double)>& g) const;
  double mass() const;

  /// Inverse-CDF draw from the piecewise-linear interpolant on each panel
  /// split into four cells.
  double sample(Rng& rng) const;

 private:
  friend class FixedBridge;
  BridgeKernel() = default;

  const DensityEngine* engine_ = nullptr;
  std::shared_ptr<const DensityTable> first_;
  std::shared_ptr<const DensityTable> second_;
  double t_ = 0.0, x_ = 0.0, u_ = 0.0, z_ = 0.0;
  double denominator_ = 0.0;
  std::vector<double> edges_;
};

/// Levy bridge of deterministic length r from 0 to z.
class FixedBridge {
 public:
  FixedBridge(std::shared_ptr<const DensityEngine> engine, double r, double z);

  double r() const noexcept { return r_; }
  double z() const noexcept { return z_; }
  const DensityEngine& engine() const noexcept { return *engine_; }
  std::shared_ptr<const DensityEngine> engine_ptr() const noexcept { return engine_; }
  /// f_r(z).
  double endpoint_density() const noexcept { return f_rz_; }

  /// f_{u-t}(y-x) f_{r-u}(z-y) / f_{r-t}(z-x) for 0 <= t < u < r.
  double transition_density(double t, double x, double u, double y) const;

  /// Joint density of (X_{t_1}, ..., X_{t_n}) under the bridge, 0 < t_1 < ... < t_n < r.
  double fdd(std::span<const double> times, std::span<const double> xs) const;

  BridgeKernel kernel(double t, double x, double u, KernelDomain domain = KernelDomain::full,
                      std::span<const Center> extra_centers = {}) const;

  /// Sequential draw on a grid 0 = s_0 < ... < s_m <= r; a node equal to r gets z.
  PathSample sample_path(const std::vector<double>& times, Rng& rng) const;

  /// Values on the nodes of `times` that are strictly before r; later nodes
  /// are set to z and flagged absorbed.
  void fill_path(PathSample& path, Rng& rng) const;

 private:
  std::shared_ptr<const DensityEngine> engine_;
  double r_;
  double z_;
  double f_rz_;
};

/// Paths i = 0..n-1 drawn with mt19937_64 seeded by path_seed(root_seed, i).
std::vector<PathSample> sample_bridge_paths(const FixedBridge& bridge, const std::vector<double>& times,
                                            std::size_t n_paths, std::uint64_t root_seed,
                                            unsigned threads = 1);

}  // namespace rlb
