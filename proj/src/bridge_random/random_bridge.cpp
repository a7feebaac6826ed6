#include "bridge_random/random_bridge.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/format.hpp"
#include "common/parallel.hpp"

namespace rlb {
namespace {

constexpr double kTailStop = 1e-10;
constexpr int kMaxDoublings = 60;

void require_transition_times(double t, double u) {
  if (!(std::isfinite(t) && t >= 0.0)) fail(ErrorCode::time_order, "transition needs t >= 0");
  if (!(u > t) || !std::isfinite(u)) {
    fail(ErrorCode::time_order, "transition needs t < u (t=" + format_double(t) + ", u=" + format_double(u) + ")");
  }
}

}  // namespace

double MixedTransition::continuous_mass() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += nodes_[i].w * density_[i];
  return s;
}

double MixedTransition::density_at(double y) const {
  if (terms_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& [r, c] : terms_) s += c * engine_->density(r - u_, z_ - y);
  return s * engine_->density(u_ - t_, y - *x_);
}

double MixedTransition::expectation(const std::function<double(double)>& g) const {
  double s = atom_mass_ > 0.0 ? atom_mass_ * g(z_) : 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += nodes_[i].w * g(nodes_[i].x) * density_[i];
  return s;
}

nlohmann::json MixedTransition::to_json() const {
  std::vector<double> grid;
  grid.reserve(nodes_.size());
  for (const auto& n : nodes_) grid.push_back(n.x);
  return {{"atom_mass", atom_mass_}, {"grid", grid}, {"density", density_}};
}

RandomBridge::RandomBridge(std::shared_ptr<const DensityEngine> engine, double z, LengthLaw law)
    : engine_(std::move(engine)), z_(z), law_(std::move(law)) {
  if (!std::isfinite(z_)) fail(ErrorCode::invalid_argument, "bridge endpoint z must be finite");
  std::vector<double> support;
  for (const auto& a : law_.atoms()) support.push_back(a.r);
  if (law_.density()) support.insert(support.end(), law_.density()->grid.begin(), law_.density()->grid.end());
  for (double r : support) {
    if (!f_rz_.count(r)) f_rz_.emplace(r, endpoint_density(r));
  }
}

double RandomBridge::endpoint_density(double r) const {
  if (auto it = f_rz_.find(r); it != f_rz_.end()) return it->second;
  const double f = engine_->point(r, z_);
  if (!(f > kDensityFloor) || !std::isfinite(f)) {
    fail(ErrorCode::denominator_underflow,
         "f_r(z) is numerically zero for r=" + format_double(r) + ", z=" + format_double(z_));
  }
  return f;
}

double RandomBridge::phi(double r, double t, double x) const {
  if (t >= r) return 0.0;
  return engine_->point(r - t, z_ - x) / endpoint_density(r);
}

double RandomBridge::normalizer(double t, double x) const {
  double s = 0.0;
  for (const auto& n : law_.rule(t)) s += n.weight * phi(n.r, t, x);
  return s;
}

LengthLaw RandomBridge::posterior_single(double t, double x) const {
  const Observation obs{t, x};
  return posterior(std::span<const Observation>(&obs, 1));
}

LengthLaw RandomBridge::posterior(std::span<const Observation> obs) const {
  if (obs.empty()) return law_;
  std::size_t first_absorbed = obs.size();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& o = obs[i];
    if (!(std::isfinite(o.t) && o.t >= 0.0)) {
      fail(ErrorCode::invalid_observation, "observation times must be finite and nonnegative");
    }
    if (i > 0 && !(o.t > obs[i - 1].t)) {
      fail(ErrorCode::invalid_observation, "observation times must increase strictly");
    }
    if (o.value && !std::isfinite(*o.value)) {
      fail(ErrorCode::invalid_observation, "observed values must be finite");
    }
    if (o.absorbed()) {
      if (o.t == 0.0) fail(ErrorCode::invalid_observation, "the bridge cannot be absorbed at time 0");
      first_absorbed = std::min(first_absorbed, i);
    } else if (first_absorbed < obs.size()) {
      fail(ErrorCode::invalid_observation,
           "observation at t=" + format_double(o.t) + " leaves z after absorption");
    }
  }

  if (first_absorbed == 0) {
    // tau <= t_1: the prior restricted to (0, t_1], normalized by F(t_1).
    return law_.reweighted(0.0, obs[0].t, [](double) { return 1.0; });
  }
  // Only the last unabsorbed coordinate matters.
  const auto& last = obs[first_absorbed - 1];
  const double upper = first_absorbed < obs.size() ? obs[first_absorbed].t : LengthLaw::kInf;
  const double t = last.t;
  const double x = *last.value;
  return law_.reweighted(t, upper, [&](double r) { return phi(r, t, x); });
}

MixedTransition RandomBridge::transition_terms(double t, std::optional<double> x, double u) const {
  require_transition_times(t, u);
  MixedTransition tr;
  tr.engine_ = engine_;
  tr.z_ = z_;
  tr.t_ = t;
  tr.u_ = u;
  tr.x_ = x;
  if (!x) {
    tr.atom_mass_ = 1.0;
    return tr;
  }
  if (!std::isfinite(*x)) fail(ErrorCode::invalid_argument, "transition source must be finite");
  const double norm = normalizer(t, *x);
  if (!(norm >= LengthLaw::kMassTolerance) || !std::isfinite(norm)) {
    fail(ErrorCode::zero_normalizer, "no surviving length is consistent with zeta_" + format_double(t) +
                                         " = " + format_double(*x));
  }
  double atom = 0.0;
  for (const auto& n : law_.rule(t, u)) atom += n.weight * phi(n.r, t, *x);
  double rest = 0.0;
  for (const auto& n : law_.rule(u)) {
    const double w = n.weight * phi(n.r, t, *x);
    if (n.r == u) {
      // A density node at r = u carries lengths just above u, whose bridges
      // sit at z at time u.
      atom += w;
      continue;
    }
    tr.terms_.emplace_back(n.r, n.weight / (endpoint_density(n.r) * norm));
    rest += w;
  }
  tr.atom_mass_ = atom / norm;
  tr.continuous_exact_ = rest / norm;
  return tr;
}

MixedTransition RandomBridge::transition_pointwise(double t, std::optional<double> x, double u) const {
  return transition_terms(t, x, u);
}

MixedTransition RandomBridge::transition(double t, std::optional<double> x, double u) const {
  MixedTransition tr = transition_terms(t, x, u);
  if (tr.terms_.empty()) return tr;

  const double x0 = *x;
  const double sa = engine_->scale(u - t);
  double half_width = 10.0 * sa;
  std::vector<Center> centers{{x0, sa}};
  for (const auto& [r, c] : tr.terms_) {
    const double sb = engine_->scale(r - u);
    half_width = std::max(half_width, std::fabs(z_ - x0) + 10.0 * sb);
    centers.push_back({z_, sb});
    centers.push_back({x0 + (u - t) / (r - t) * (z_ - x0), std::min(sa, sb)});
  }
  double lo = x0 - half_width;
  double hi = x0 + half_width;
  for (int i = 0; i < kMaxDoublings && tr.density_at(hi) * (hi - x0) > kTailStop; ++i) hi = x0 + 2.0 * (hi - x0);
  for (int i = 0; i < kMaxDoublings && tr.density_at(lo) * (x0 - lo) > kTailStop; ++i) lo = x0 - 2.0 * (x0 - lo);

  tr.nodes_ = panel_rule(graded_edges(centers, lo, hi));
  tr.density_.reserve(tr.nodes_.size());
  for (const auto& n : tr.nodes_) tr.density_.push_back(tr.density_at(n.x));
  return tr;
}

double RandomBridge::conditional_expectation(double t, std::optional<double> x, double u,
                                             const std::function<double(double)>& g) const {
  if (!x) {
    require_transition_times(t, u);
    return g(z_);
  }
  return transition(t, x, u).expectation(g);
}

double RandomBridge::joint_conditional(double t, double x, double u,
                                       const std::function<double(double, double)>& g) const {
  const MixedTransition tr = transition(t, x, u);
  const double norm = normalizer(t, x);
  double value = 0.0;
  for (const auto& n : law_.rule(t, u)) value += n.weight * phi(n.r, t, x) * g(n.r, z_);
  value /= norm;
  for (const auto& node : tr.nodes_) {
    const double lead = node.w * engine_->density(u - t, node.x - x);
    for (const auto& [r, c] : tr.terms_) value += lead * c * engine_->density(r - u, z_ - node.x) * g(r, node.x);
  }
  return value;
}

PathSample RandomBridge::sample_path(const std::vector<double>& times, Rng& rng) const {
  validate_time_grid(times);
  const double r = law_.sample(rng);
  const FixedBridge bridge(engine_, r, z_);
  PathSample path;
  path.times = times;
  bridge.fill_path(path, rng);
  return path;
}

std::vector<PathSample> sample_random_bridge_paths(const RandomBridge& bridge, const std::vector<double>& times,
                                                   std::size_t n_paths, std::uint64_t root_seed,
                                                   unsigned threads) {
  validate_time_grid(times);
  std::vector<PathSample> paths(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    Rng rng(path_seed(root_seed, i));
    paths[i] = bridge.sample_path(times, rng);
  });
  return paths;
}

}  // namespace rlb
