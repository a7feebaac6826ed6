#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace rlb {

struct QuadNode {
  double x;
  double w;
};

/// 20-point Gauss-Legendre rule on [-1, 1].
inline const std::array<QuadNode, 20>& gauss_legendre_20() {
  static const std::array<QuadNode, 20> rule = [] {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto& a = GL::abscissa();
    const auto& w = GL::weights();
    std::array<QuadNode, 20> out{};
    for (std::size_t i = 0; i < a.size(); ++i) {
      out[9 - i] = {-a[i], w[i]};
      out[10 + i] = {a[i], w[i]};
    }
    return out;
  }();
  return rule;
}

/// Gauss-Legendre nodes mapped onto consecutive panels [edges[i], edges[i+1]].
inline std::vector<QuadNode> panel_rule(const std::vector<double>& edges) {
  const auto& gl = gauss_legendre_20();
  std::vector<QuadNode> out;
  if (edges.size() < 2) return out;
  out.reserve((edges.size() - 1) * gl.size());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double mid = 0.5 * (edges[i] + edges[i + 1]);
    const double half = 0.5 * (edges[i + 1] - edges[i]);
    for (const auto& n : gl) out.push_back({mid + half * n.x, half * n.w});
  }
  return out;
}

/// Solves for the offset y in [0, w] at which a linear density running from
/// dl to dh over a cell of width w has accumulated `target` mass.
inline double invert_linear_cell(double dl, double dh, double w, double target) {
  const double slope = (dh - dl) / w;
  const double disc = std::max(dl * dl + 2.0 * slope * target, 0.0);
  const double denom = dl + std::sqrt(disc);
  const double y = denom > 0.0 ? 2.0 * target / denom : w;
  return std::clamp(y, 0.0, w);
}

}  // namespace rlb
