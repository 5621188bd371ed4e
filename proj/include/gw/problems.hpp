#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "gw/transport.hpp"
#include "gw/vec.hpp"

namespace gw {

/// Convection-diffusion benchmark with a closed-form reference solution.
struct AnalyticProblem {
  Vec2 q;
  TransportCoeffs coeffs;
  ScalarFn exact;
  std::function<Vec2(Vec2)> exact_grad;  // null when only values are available
  bool has_excluded = false;
  Vec2 excluded_center{0.0, 0.0};
  double excluded_radius = 0.0;

  bool in_excluded(const Vec2& x) const {
    return has_excluded && norm(x - excluded_center) < excluded_radius;
  }
};

/// Interior-layer problem on the unit square: a circular arctan layer of
/// width O(sqrt(eps)) around the circle |x - (0.5,0.5)| = 0.25, with
/// q = (2,3), mu = 2 and u = 0 on the whole boundary. The source is the
/// strong operator applied to the closed-form solution.
inline AnalyticProblem john_problem(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("john_problem: eps must be positive");
  const Vec2 q{2.0, 3.0};
  const double mu = 2.0;
  const double g = 16.0 / M_PI;
  const double c = 2.0 / std::sqrt(eps);

  struct Parts {
    double u, ux, uy, lap;
  };
  auto parts = [g, c](Vec2 p) {
    const double x = p.x, y = p.y;
    const double px = x - x * x, dpx = 1.0 - 2.0 * x;
    const double ry = y - y * y, dry = 1.0 - 2.0 * y;
    const double xi = 0.0625 - (x - 0.5) * (x - 0.5) - (y - 0.5) * (y - 0.5);
    const double xix = -2.0 * (x - 0.5), xiy = -2.0 * (y - 0.5), xidd = -2.0;
    const double t = c * xi;
    const double den = 1.0 + t * t;
    const double a = M_PI_2 + std::atan(t);
    const double ax = c * xix / den;
    const double ay = c * xiy / den;
    const double axx = (c * xidd * den - 2.0 * t * c * c * xix * xix) / (den * den);
    const double ayy = (c * xidd * den - 2.0 * t * c * c * xiy * xiy) / (den * den);
    Parts r;
    r.u = g * px * ry * a;
    r.ux = g * (dpx * ry * a + px * ry * ax);
    r.uy = g * (px * dry * a + px * ry * ay);
    r.lap = g * (-2.0 * ry * a + 2.0 * dpx * ry * ax + px * ry * axx) +
            g * (-2.0 * px * a + 2.0 * px * dry * ay + px * ry * ayy);
    return r;
  };

  AnalyticProblem p;
  p.q = q;
  p.coeffs = TransportCoeffs::isotropic_eps(eps);
  p.coeffs.mu = [mu](Vec2) { return mu; };
  p.coeffs.source = [parts, q, mu, eps](Vec2 x) {
    const Parts r = parts(x);
    return -eps * r.lap + q.x * r.ux + q.y * r.uy + mu * r.u;
  };
  p.coeffs.dirichlet = [](Vec2) { return 0.0; };
  p.exact = [parts](Vec2 x) { return parts(x).u; };
  p.exact_grad = [parts](Vec2 x) {
    const Parts r = parts(x);
    return Vec2{r.ux, r.uy};
  };
  return p;
}

/// Characteristic-layer problem on the unit square: pure convection-diffusion
/// with q along the diagonal and a jump in the boundary data at the origin,
///   u(x,0) = 1, u(0,y) = 0.
/// The reference is the first-order asymptotic expansion in polar coordinates
/// x = r sin(phi), y = r cos(phi); it is undefined inside the ball U0(r0).
inline AnalyticProblem lopez_problem(double eps, double r0) {
  if (!(eps > 0.0) || !(r0 > 0.0))
    throw std::invalid_argument("lopez_problem: eps and r0 must be positive");
  const Vec2 q{std::sqrt(2.0) / 2.0, std::sqrt(2.0) / 2.0};
  const double w = norm(q) / (2.0 * eps);
  const double beta = M_PI_4;

  auto reference = [w, beta, r0](Vec2 p) {
    const double r = norm(p);
    if (r < r0)
      throw std::domain_error("lopez reference: evaluation inside the excluded region");
    const double phi = std::atan2(p.x, p.y);
    const double s = std::sin(phi + beta);
    const double arg = std::sqrt(std::max(0.0, (1.0 - s) * w * r));
    double u0;
    if (phi < beta)
      u0 = 0.5 * std::erfc(arg);
    else if (phi > beta)
      u0 = 0.5 * (2.0 - std::erfc(arg));
    else
      u0 = 0.5;
    double u1 = 0.0;
    // removable singularity at phi = beta; the branches cancel to O(phi-beta)
    if (std::abs(phi - beta) > 1e-8) {
      const double ca = std::cos(phi - beta), cb = std::cos(phi + beta);
      u1 = std::sqrt(M_PI) *
           ((ca / cb - cb / ca) - 1.0 / (2.0 * std::sin(0.5 * (M_PI_2 - phi - beta))));
    }
    return u0 + std::exp(w * r * (s - 1.0)) / (M_PI * std::sqrt(2.0 * w * r)) * u1;
  };

  AnalyticProblem p;
  p.q = q;
  p.coeffs = TransportCoeffs::isotropic_eps(eps);
  p.coeffs.dirichlet = [](Vec2 x) { return x.x <= 1e-12 ? 0.0 : 1.0; };
  p.exact = reference;
  p.has_excluded = true;
  p.excluded_center = {0.0, 0.0};
  p.excluded_radius = r0;
  return p;
}

}  // namespace gw
