#include "levy_models/length_law.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "common/error.hpp"
#include "common/quadrature.hpp"

namespace rlb {
namespace {

double trapezoid(const DensityPart& d) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
    s += 0.5 * (d.values[i] + d.values[i + 1]) * (d.grid[i + 1] - d.grid[i]);
  }
  return s;
}

// Weights on the two cell ends for the exact integral over [lo, hi] of the
// linear function through (x0, 1-s) and (x1, s).
std::pair<double, double> cell_weights(double x0, double x1, double lo, double hi) {
  const double h = x1 - x0;
  const double s0 = (lo - x0) / h;
  const double s1 = (hi - x0) / h;
  const double w1 = 0.5 * h * (s1 * s1 - s0 * s0);
  const double w0 = h * (s1 - s0) - w1;
  return {w0, w1};
}

double lerp_at(double x0, double x1, double v0, double v1, double x) {
  if (x <= x0) return v0;
  if (x >= x1) return v1;
  const double s = (x - x0) / (x1 - x0);
  return v0 + s * (v1 - v0);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

LengthLaw::LengthLaw(std::vector<Atom> atoms, std::optional<DensityPart> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
  double mass = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (!(std::isfinite(a.r) && a.r > 0.0)) {
      fail(ErrorCode::invalid_argument, "length law: atom locations must be finite and positive");
    }
    if (i > 0 && !(a.r > atoms_[i - 1].r)) {
      fail(ErrorCode::invalid_argument, "length law: atom locations must be strictly increasing");
    }
    if (!finite_nonneg(a.p)) {
      fail(ErrorCode::invalid_argument, "length law: atom probabilities must be nonnegative");
    }
    mass += a.p;
  }
  if (density_) {
    const auto& g = density_->grid;
    const auto& v = density_->values;
    if (g.size() < 2 || g.size() != v.size()) {
      fail(ErrorCode::invalid_argument,
           "length law: density grid needs at least two nodes and one value per node");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(std::isfinite(g[i]) && g[i] > 0.0)) {
        fail(ErrorCode::invalid_argument, "length law: density grid must be finite and positive");
      }
      if (i > 0 && !(g[i] > g[i - 1])) {
        fail(ErrorCode::invalid_argument, "length law: density grid must be strictly increasing");
      }
      if (!finite_nonneg(v[i])) {
        fail(ErrorCode::invalid_argument, "length law: density values must be nonnegative");
      }
    }
    mass += trapezoid(*density_);
  }
  if (!(std::fabs(mass - 1.0) <= kMassTolerance)) {
    fail(ErrorCode::invalid_argument, "length law: total mass must be 1, got " + std::to_string(mass));
  }
}

LengthLaw LengthLaw::from_json(const nlohmann::json& j) {
  try {
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
      for (const auto& a : j.at("atoms")) {
        atoms.push_back({a.at("r").get<double>(), a.at("p").get<double>()});
      }
    }
    std::optional<DensityPart> density;
    if (j.contains("density") && !j.at("density").is_null()) {
      const auto& d = j.at("density");
      density = DensityPart{d.at("grid").get<std::vector<double>>(),
                            d.at("values").get<std::vector<double>>()};
    }
    return LengthLaw(std::move(atoms), std::move(density));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("length law json: ") + e.what());
  }
}

LengthLaw LengthLaw::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open length law file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, "length law file '" + path + "': " + e.what());
  }
  return from_json(j);
}

nlohmann::json LengthLaw::to_json() const {
  nlohmann::json j;
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : atoms_) j["atoms"].push_back({{"r", a.r}, {"p", a.p}});
  if (density_) j["density"] = {{"grid", density_->grid}, {"values", density_->values}};
  return j;
}

double LengthLaw::density_at(double r) const noexcept {
  if (!density_) return 0.0;
  const auto& g = density_->grid;
  const auto& v = density_->values;
  if (r < g.front() || r > g.back()) return 0.0;
  auto it = std::upper_bound(g.begin(), g.end(), r);
  if (it == g.end()) return v.back();
  const std::size_t i = static_cast<std::size_t>(it - g.begin()) - 1;
  return lerp_at(g[i], g[i + 1], v[i], v[i + 1], r);
}

double LengthLaw::support_min() const noexcept {
  double m = kInf;
  if (!atoms_.empty()) m = atoms_.front().r;
  if (density_) m = std::min(m, density_->grid.front());
  return m;
}

double LengthLaw::support_max() const noexcept {
  double m = 0.0;
  if (!atoms_.empty()) m = atoms_.back().r;
  if (density_) m = std::max(m, density_->grid.back());
  return m;
}

std::vector<RuleNode> LengthLaw::rule(double a, double b) const {
  std::vector<RuleNode> out;
  for (const auto& atom : atoms_) {
    if (atom.r > a && atom.r <= b && atom.p > 0.0) out.push_back({atom.r, atom.p});
  }
  if (!density_) return out;
  const auto& g = density_->grid;
  const auto& v = density_->values;
  const double lo_all = std::max(a, g.front());
  const double hi_all = std::min(b, g.back());
  if (!(hi_all > lo_all)) return out;
  std::vector<double> w(g.size(), 0.0);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    if (g[i + 1] <= lo_all) continue;
    if (g[i] >= hi_all) break;
    auto [w0, w1] = cell_weights(g[i], g[i + 1], std::max(g[i], lo_all), std::min(g[i + 1], hi_all));
    w[i] += w0 * v[i];
    w[i + 1] += w1 * v[i + 1];
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (w[i] > 0.0) out.push_back({g[i], w[i]});
  }
  return out;
}

double LengthLaw::integrate(const std::function<double(double)>& g, double a, double b) const {
  double s = 0.0;
  for (const auto& node : rule(a, b)) s += node.weight * g(node.r);
  return s;
}

double LengthLaw::cdf(double t) const {
  if (!(t > 0.0)) return 0.0;
  double s = 0.0;
  for (const auto& node : rule(0.0, t)) s += node.weight;
  return std::min(s, 1.0);
}

double LengthLaw::quantile(double q) const {
  if (!(q > 0.0 && q <= 1.0)) fail(ErrorCode::invalid_argument, "quantile level must lie in (0, 1]");
  std::vector<double> pts;
  for (const auto& a : atoms_) pts.push_back(a.r);
  if (density_) pts.insert(pts.end(), density_->grid.begin(), density_->grid.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double cum = 0.0;
  std::size_t ai = 0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double x = pts[k];
    if (k > 0 && density_) {
      // Breakpoints include every grid node, so the density is linear here.
      const double lo = pts[k - 1];
      const double dl = density_at(lo);
      const double dh = density_at(x);
      const double w = x - lo;
      const double m = 0.5 * (dl + dh) * w;
      if (m > 0.0 && cum + m >= q) {
        return std::min(lo + invert_linear_cell(dl, dh, w, std::clamp(q - cum, 0.0, m)), x);
      }
      cum += m;
    }
    if (ai < atoms_.size() && atoms_[ai].r == x) {
      const double p = atoms_[ai].p;
      ++ai;
      cum += p;
      if (p > 0.0 && cum >= q) return x;
    }
  }
  return support_max();
}

double LengthLaw::sample(Rng& rng) const { return quantile(uniform_open_closed(rng)); }

LengthLaw LengthLaw::reweighted(double a, double b, const std::function<double(double)>& weight,
                                double* normalizer) const {
  std::vector<Atom> atoms;
  double total = 0.0;
  for (const auto& atom : atoms_) {
    if (!(atom.r > a && atom.r <= b) || atom.p <= 0.0) continue;
    const double p = atom.p * weight(atom.r);
    if (p > 0.0) {
      atoms.push_back({atom.r, p});
      total += p;
    }
  }

  std::optional<DensityPart> density;
  if (density_) {
    const auto& g = density_->grid;
    const auto& v = density_->values;
    const double lo_all = std::max(a, g.front());
    const double hi_all = std::min(b, g.back());
    if (hi_all > lo_all) {
      // Cells [g[i0], g[i0+1]] ... [g[i1-1], g[i1]] cover [lo_all, hi_all].
      std::size_t i0 = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), lo_all) - g.begin());
      i0 = i0 == 0 ? 0 : i0 - 1;
      if (i0 + 1 >= g.size()) i0 = g.size() - 2;
      std::size_t i1 = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), hi_all) - g.begin());
      i1 = std::max(i1, i0 + 1);
      std::vector<double> wv(i1 - i0 + 1);
      for (std::size_t i = i0; i <= i1; ++i) wv[i - i0] = v[i] > 0.0 ? v[i] * weight(g[i]) : 0.0;

      DensityPart part;
      part.grid.push_back(lo_all);
      part.values.push_back(lerp_at(g[i0], g[i0 + 1], wv[0], wv[1], lo_all));
      for (std::size_t i = i0 + 1; i < i1; ++i) {
        if (g[i] > lo_all && g[i] < hi_all) {
          part.grid.push_back(g[i]);
          part.values.push_back(wv[i - i0]);
        }
      }
      part.grid.push_back(hi_all);
      part.values.push_back(lerp_at(g[i1 - 1], g[i1], wv[i1 - 1 - i0], wv[i1 - i0], hi_all));
      const double m = trapezoid(part);
      if (m > 0.0) {
        total += m;
        density = std::move(part);
      }
    }
  }

  if (normalizer) *normalizer = total;
  if (!(total >= kMassTolerance) || !std::isfinite(total)) {
    fail(ErrorCode::zero_normalizer, "posterior normalizer vanishes on the requested interval");
  }
  for (auto& atom : atoms) atom.p /= total;
  if (density) {
    for (auto& val : density->values) val /= total;
  }
  return LengthLaw(std::move(atoms), std::move(density));
}

}  // namespace rlb
