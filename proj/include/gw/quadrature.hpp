#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gw/vec.hpp"

namespace gw {

/// 1-D Gauss-Legendre rule with n points on [0,1].
/// Exact for polynomials of degree 2n-1.
struct GaussRule1D {
  std::vector<double> points;
  std::vector<double> weights;
};

inline GaussRule1D gauss_rule_1d(int n) {
  if (n < 1) throw std::invalid_argument("gauss_rule_1d: order must be >= 1");
  GaussRule1D r;
  r.points.resize(n);
  r.weights.resize(n);
  // Newton iteration on P_n over [-1,1], then map to [0,1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_n and P_n'
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 0) ? 1.0 : p1;
      double dpn = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dpn = n * (x * p1 - p0) / (x * x - 1.0);
    r.points[n - 1 - i] = 0.5 * (x + 1.0);
    r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dpn * dpn);
  }
  return r;
}

/// Tensor rule on the reference cell [0,1]^2. Weights sum to 1.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

inline QuadratureRule gauss_rule(int order, int d = 2) {
  if (d != 2) throw std::invalid_argument("gauss_rule: only d=2 is supported");
  GaussRule1D g = gauss_rule_1d(order);
  QuadratureRule r;
  r.points.reserve(static_cast<size_t>(order) * order);
  r.weights.reserve(static_cast<size_t>(order) * order);
  for (int j = 0; j < order; ++j)
    for (int i = 0; i < order; ++i) {
      r.points.push_back({g.points[i], g.points[j]});
      r.weights.push_back(g.weights[i] * g.weights[j]);
    }
  return r;
}

}  // namespace gw
