#include "bridge_fixed/fixed_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"
#include "common/format.hpp"
#include "common/parallel.hpp"

namespace rlb {
namespace {

constexpr double kTailStop = 1e-10;
constexpr int kMaxDoublings = 60;
constexpr int kCellsPerPanel = 4;

void require_order(double t, double u, double r) {
  if (!(t >= 0.0 && t < u && u < r)) {
    fail(ErrorCode::time_order, "bridge times must satisfy 0 <= t < u < r (t=" + format_double(t) +
                                    ", u=" + format_double(u) + ", r=" + format_double(r) + ")");
  }
}

double reach(const DensityTable& table) {
  return static_cast<double>(table.half_points() - 3) * table.dx();
}

}  // namespace

void validate_time_grid(const std::vector<double>& times) {
  if (times.empty() || times.front() != 0.0) {
    fail(ErrorCode::invalid_argument, "time grid must start at 0");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1]) || !std::isfinite(times[i])) {
      fail(ErrorCode::time_order, "time grid must be strictly increasing");
    }
  }
}

std::vector<double> uniform_grid(double t_max, int steps) {
  if (!(std::isfinite(t_max) && t_max > 0.0) || steps < 1) {
    fail(ErrorCode::invalid_argument, "grid needs t_max > 0 and at least one step");
  }
  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) times[static_cast<std::size_t>(i)] = t_max * i / steps;
  times.back() = t_max;
  return times;
}

std::vector<double> graded_edges(std::span<const Center> centers, double lo, double hi) {
  std::vector<double> e{lo, hi};
  double min_w = std::numeric_limits<double>::infinity();
  for (const auto& [c, s] : centers) {
    if (!(s > 0.0) || !std::isfinite(c)) continue;
    const double w = 0.5 * s;
    min_w = std::min(min_w, w);
    for (int k = -8; k <= 8; ++k) e.push_back(c + k * w);
    double step = 1.5 * w;
    for (double pos = c + 8.0 * w; pos < hi; step *= 1.5) {
      pos += step;
      e.push_back(pos);
    }
    step = 1.5 * w;
    for (double pos = c - 8.0 * w; pos > lo; step *= 1.5) {
      pos -= step;
      e.push_back(pos);
    }
  }
  std::sort(e.begin(), e.end());
  if (!std::isfinite(min_w)) min_w = hi - lo;
  const double gap = 0.3 * min_w;
  std::vector<double> out{lo};
  for (double v : e) {
    if (v <= lo || v >= hi) continue;
    if (v - out.back() >= gap) out.push_back(v);
  }
  if (out.size() > 1 && hi - out.back() < gap) {
    out.back() = hi;
  } else {
    out.push_back(hi);
  }
  return out;
}

double BridgeKernel::operator()(double y) const {
  return engine_->density(*first_, y - x_) * engine_->density(*second_, z_ - y) / denominator_;
}

double BridgeKernel::integrate(const std::function<double(double)>& g) const {
  double s = 0.0;
  for (const auto& n : rule()) s += n.w * g(n.x) * (*this)(n.x);
  return s;
}

double BridgeKernel::mass() const {
  return integrate([](double) { return 1.0; });
}

double BridgeKernel::sample(Rng& rng) const {
  const std::size_t panels = edges_.size() - 1;
  std::vector<double> y;
  std::vector<double> k;
  y.reserve(panels * kCellsPerPanel + 1);
  for (std::size_t i = 0; i < panels; ++i) {
    const double h = (edges_[i + 1] - edges_[i]) / kCellsPerPanel;
    for (int j = 0; j < kCellsPerPanel; ++j) y.push_back(edges_[i] + j * h);
  }
  y.push_back(edges_.back());
  k.reserve(y.size());
  for (double v : y) k.push_back((*this)(v));

  std::vector<double> cum(y.size(), 0.0);
  for (std::size_t i = 1; i < y.size(); ++i) cum[i] = cum[i - 1] + 0.5 * (k[i - 1] + k[i]) * (y[i] - y[i - 1]);
  const double total = cum.back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    fail(ErrorCode::accuracy, "bridge kernel carries no mass at t=" + format_double(t_) +
                                  ", x=" + format_double(x_) + ", u=" + format_double(u_));
  }
  const double q = uniform_open_closed(rng) * total;
  auto it = std::lower_bound(cum.begin() + 1, cum.end(), q);
  if (it == cum.end()) --it;
  const std::size_t i = static_cast<std::size_t>(it - cum.begin());
  const double w = y[i] - y[i - 1];
  return y[i - 1] + invert_linear_cell(k[i - 1], k[i], w, std::max(q - cum[i - 1], 0.0));
}

FixedBridge::FixedBridge(std::shared_ptr<const DensityEngine> engine, double r, double z)
    : engine_(std::move(engine)), r_(r), z_(z) {
  if (!(std::isfinite(r) && r > 0.0) || !std::isfinite(z)) {
    fail(ErrorCode::invalid_argument, "bridge needs a finite length r > 0 and a finite endpoint z");
  }
  f_rz_ = engine_->density(r_, z_);
  if (!(f_rz_ > kDensityFloor) || !std::isfinite(f_rz_)) {
    fail(ErrorCode::denominator_underflow,
         "f_r(z) is numerically zero for r=" + format_double(r_) + ", z=" + format_double(z_));
  }
}

double FixedBridge::transition_density(double t, double x, double u, double y) const {
  require_order(t, u, r_);
  const double den = engine_->density(r_ - t, z_ - x);
  if (!(den > kDensityFloor)) {
    fail(ErrorCode::denominator_underflow,
         "f_{r-t}(z-x) underflows at t=" + format_double(t) + ", x=" + format_double(x));
  }
  return engine_->density(u - t, y - x) * engine_->density(r_ - u, z_ - y) / den;
}

double FixedBridge::fdd(std::span<const double> times, std::span<const double> xs) const {
  if (times.empty() || times.size() != xs.size()) {
    fail(ErrorCode::invalid_argument, "fdd needs matching, nonempty times and values");
  }
  double t_prev = 0.0;
  double x_prev = 0.0;
  double value = 1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > t_prev && times[i] < r_)) {
      fail(ErrorCode::time_order, "fdd times must satisfy 0 < t_1 < ... < t_n < r");
    }
    value *= engine_->density(times[i] - t_prev, xs[i] - x_prev);
    t_prev = times[i];
    x_prev = xs[i];
  }
  return value * engine_->density(r_ - t_prev, z_ - x_prev) / f_rz_;
}

BridgeKernel FixedBridge::kernel(double t, double x, double u, KernelDomain domain,
                                 std::span<const Center> extra_centers) const {
  require_order(t, u, r_);
  if (!std::isfinite(x)) fail(ErrorCode::invalid_argument, "kernel source must be finite");
  BridgeKernel k;
  k.engine_ = engine_.get();
  k.first_ = engine_->table(u - t);
  k.second_ = engine_->table(r_ - u);
  k.t_ = t;
  k.x_ = x;
  k.u_ = u;
  k.z_ = z_;
  k.denominator_ = engine_->density(r_ - t, z_ - x);
  if (!(k.denominator_ > kDensityFloor)) {
    fail(ErrorCode::denominator_underflow,
         "f_{r-t}(z-x) underflows at t=" + format_double(t) + ", x=" + format_double(x));
  }

  const double sa = k.first_->quartile();
  const double sb = k.second_->quartile();
  const double half_width = std::max(10.0 * sa, std::fabs(z_ - x) + 10.0 * sb);
  double lo = x - half_width;
  double hi = x + half_width;

  double lo_cap = -std::numeric_limits<double>::infinity();
  double hi_cap = std::numeric_limits<double>::infinity();
  if (domain == KernelDomain::table_coverage) {
    const double ra = reach(*k.first_);
    const double rb = reach(*k.second_);
    const double cov_lo = std::max(x - ra, z_ - rb);
    const double cov_hi = std::min(x + ra, z_ + rb);
    if (cov_hi > cov_lo) {
      lo_cap = cov_lo;
      hi_cap = cov_hi;
      lo = std::max(lo, lo_cap);
      hi = std::min(hi, hi_cap);
    }
  }
  for (int i = 0; i < kMaxDoublings && k(hi) * (hi - x) > kTailStop; ++i) {
    const double next = x + 2.0 * (hi - x);
    if (next >= hi_cap) {
      hi = hi_cap;
      break;
    }
    hi = next;
  }
  for (int i = 0; i < kMaxDoublings && k(lo) * (x - lo) > kTailStop; ++i) {
    const double next = x - 2.0 * (x - lo);
    if (next <= lo_cap) {
      lo = lo_cap;
      break;
    }
    lo = next;
  }

  const double mean = x + (u - t) / (r_ - t) * (z_ - x);
  std::vector<Center> centers{{x, sa}, {z_, sb}, {mean, std::min(sa, sb)}};
  centers.insert(centers.end(), extra_centers.begin(), extra_centers.end());
  k.edges_ = graded_edges(centers, lo, hi);
  return k;
}

void FixedBridge::fill_path(PathSample& path, Rng& rng) const {
  const auto& times = path.times;
  path.values.assign(times.size(), 0.0);
  path.absorbed.assign(times.size(), false);
  path.realized_length = r_;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] >= r_) {
      path.values[i] = z_;
      path.absorbed[i] = true;
      continue;
    }
    double y = kernel(times[i - 1], path.values[i - 1], times[i], KernelDomain::table_coverage).sample(rng);
    // The continuous part never hits z before r; a draw landing exactly on
    // a cell edge at z is moved off it.
    if (y == z_) y = std::nextafter(z_, std::numeric_limits<double>::infinity());
    path.values[i] = y;
  }
}

PathSample FixedBridge::sample_path(const std::vector<double>& times, Rng& rng) const {
  validate_time_grid(times);
  if (times.back() > r_) {
    fail(ErrorCode::invalid_argument, "bridge grid must end at or before r=" + format_double(r_));
  }
  PathSample path;
  path.times = times;
  fill_path(path, rng);
  return path;
}

std::vector<PathSample> sample_bridge_paths(const FixedBridge& bridge, const std::vector<double>& times,
                                            std::size_t n_paths, std::uint64_t root_seed,
                                            unsigned threads) {
  validate_time_grid(times);
  if (times.back() > bridge.r()) {
    fail(ErrorCode::invalid_argument, "bridge grid must end at or before r=" + format_double(bridge.r()));
  }
  std::vector<PathSample> paths(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    Rng rng(path_seed(root_seed, i));
    paths[i].times = times;
    bridge.fill_path(paths[i], rng);
  });
  return paths;
}

}  // namespace rlb
