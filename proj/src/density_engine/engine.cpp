#include "density_engine/engine.hpp"

#include "density_engine/density_point.hpp"

namespace rlb {

DensityEngine::DensityEngine(CharacteristicExponent model, EngineOptions options)
    : model_(std::move(model)), options_(std::move(options)) {}

double DensityEngine::cutoff(double t) const {
  {
    std::lock_guard lock(scalar_mutex_);
    if (auto it = cutoffs_.find(t); it != cutoffs_.end()) return it->second;
  }
  const double u = find_cutoff(model_, t);
  std::lock_guard lock(scalar_mutex_);
  cutoffs_.emplace(t, u);
  return u;
}

double DensityEngine::mass_at_zero(double t) const {
  {
    std::lock_guard lock(scalar_mutex_);
    if (auto it = peaks_.find(t); it != peaks_.end()) return it->second;
  }
  const double f0 = inversion_integral(model_, t, 0.0, cutoff(t));
  std::lock_guard lock(scalar_mutex_);
  peaks_.emplace(t, f0);
  return f0;
}

double DensityEngine::point(double t, double x) const {
  const double raw = inversion_integral(model_, t, x, cutoff(t));
  if (raw >= 0.0) return raw;
  return clamp_density(raw, mass_at_zero(t), t, x);
}

InversionPlan DensityEngine::plan(double t) const {
  {
    std::lock_guard lock(scalar_mutex_);
    if (auto it = plans_.find(t); it != plans_.end()) return it->second;
  }
  PlanOverrides o = options_.overrides;
  if (o.empty()) o.cutoff = cutoff(t);
  const InversionPlan p = plan_for(model_, t, o);
  std::lock_guard lock(scalar_mutex_);
  plans_.emplace(t, p);
  return p;
}

std::shared_ptr<const DensityTable> DensityEngine::table(double t) const { return table(t, plan(t)); }

std::shared_ptr<const DensityTable> DensityEngine::table(double t, const InversionPlan& plan) const {
  const Key key{t, plan.cutoff, plan.dx, plan.half_points, plan.transform_size};
  {
    std::shared_lock lock(table_mutex_);
    if (auto it = tables_.find(key); it != tables_.end()) return it->second;
  }
  std::lock_guard insert_lock(insert_mutex_);
  {
    std::shared_lock lock(table_mutex_);
    if (auto it = tables_.find(key); it != tables_.end()) return it->second;
  }
  auto built = std::make_shared<const DensityTable>(density_grid(model_, t, plan));
  std::unique_lock lock(table_mutex_);
  tables_.emplace(key, built);
  order_.push_back(key);
  bytes_ += built->bytes();
  while (bytes_ > options_.cache_bytes && order_.size() > 1) {
    auto it = tables_.find(order_.front());
    bytes_ -= it->second->bytes();
    tables_.erase(it);
    order_.pop_front();
  }
  return built;
}

double DensityEngine::density(double t, double x) const { return density(*table(t), x); }

double DensityEngine::density(const DensityTable& table, double x) const {
  if (table.covers(x)) return table.interpolate(x);
  return point(table.t(), x);
}

std::size_t DensityEngine::cached_tables() const {
  std::shared_lock lock(table_mutex_);
  return tables_.size();
}

std::size_t DensityEngine::cached_bytes() const {
  std::shared_lock lock(table_mutex_);
  return bytes_;
}

}  // namespace rlb
