#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "density_engine/density_table.hpp"
#include "density_engine/inversion_plan.hpp"
#include "levy_models/characteristic_exponent.hpp"

namespace rlb {

struct EngineOptions {
  std::size_t cache_bytes = std::size_t{512} << 20;
  PlanOverrides overrides;
};

/// Densities of one model: single points by quadrature, batches through
/// cached tables. Thread-safe; tables are shared immutable objects.
class DensityEngine {
 public:
  explicit DensityEngine(CharacteristicExponent model, EngineOptions options = {});

  const CharacteristicExponent& model() const noexcept { return model_; }

  double cutoff(double t) const;
  /// f_t(0) by quadrature.
  double mass_at_zero(double t) const;
  /// f_t(x) by quadrature.
  double point(double t, double x) const;

  InversionPlan plan(double t) const;
  std::shared_ptr<const DensityTable> table(double t) const;
  std::shared_ptr<const DensityTable> table(double t, const InversionPlan& plan) const;

  /// f_t(x) from the cached table, falling back to quadrature off the grid.
  double density(double t, double x) const;
  double density(const DensityTable& table, double x) const;

  /// Upper quartile of the law of X_t.
  double scale(double t) const { return table(t)->quartile(); }

  std::size_t cached_tables() const;
  std::size_t cached_bytes() const;

 private:
  using Key = std::tuple<double, double, double, std::size_t, std::size_t>;

  CharacteristicExponent model_;
  EngineOptions options_;

  mutable std::mutex scalar_mutex_;
  mutable std::map<double, double> cutoffs_;
  mutable std::map<double, double> peaks_;
  mutable std::map<double, InversionPlan> plans_;

  mutable std::shared_mutex table_mutex_;
  mutable std::mutex insert_mutex_;
  mutable std::map<Key, std::shared_ptr<const DensityTable>> tables_;
  mutable std::deque<Key> order_;
  mutable std::size_t bytes_ = 0;
};

}  // namespace rlb
