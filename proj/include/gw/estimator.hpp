#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "gw/basis.hpp"
#include "gw/dof.hpp"
#include "gw/mesh.hpp"
#include "gw/quadrature.hpp"
#include "gw/transport.hpp"

namespace gw {

/// Residual error indicator of one cell, split into the element residual,
/// the diffusive face-flux jump, and the solution jump terms.
struct CellIndicator {
  double r_t = 0.0;  // squared element residual term
  double r_f = 0.0;  // squared face flux jump term
  double j_f = 0.0;  // squared solution jump term

  double total_sq() const { return r_t + r_f + j_f; }
  double eta() const { return std::sqrt(total_sq()); }
};

/// Copies a Q1 nodal field into DG(1) cell blocks (per-cell corner values) so
/// the estimator and range sampling run on one representation. Interior jumps
/// of the result are exactly zero.
inline std::vector<double> scatter_cg_to_dg(const Mesh& mesh, const DofLayout& cg,
                                            const std::vector<double>& u) {
  const DofLayout dg = DofLayout::dg(mesh, 1);
  std::vector<double> out(dg.n_dofs());
  for (int id : mesh.leaf_ids()) {
    const Cell& c = mesh.cell(id);
    const auto verts = cg.cell_vertices(c.ix, c.iy);
    for (int i = 0; i < 4; ++i) out[dg.cell_dof(id, i)] = u[verts[i]];
  }
  return out;
}

/// Residual-based indicators for a DG(k) solution. The scalar diffusion used
/// throughout is the smallest diagonal entry of the dispersion tensor at the
/// cell center; faces take the minimum of the two sides. The second-order
/// part of the element residual is dropped for k = 1.
inline std::vector<CellIndicator> cell_indicators(
    const Mesh& mesh, const DofLayout& layout, int k, const std::vector<double>& u,
    const VelocityFn& q, const DivergenceFn& divq, const TransportCoeffs& coeffs,
    const std::vector<BoundaryType>& bclass, double c_gamma = 10.0) {
  std::vector<CellIndicator> ind(mesh.n_leaves());
  QkBasis basis(k);
  const QuadratureRule quad = gauss_rule(k + 1);
  const GaussRule1D fquad = gauss_rule_1d(k + 1);

  // cell-center diffusion scale
  std::vector<double> eps(mesh.n_leaves());
  for (int id : mesh.leaf_ids()) {
    const Mat2 d = coeffs.dispersion(q(id, mesh.cell_center(id)));
    const double e = std::min(d.xx, d.yy);
    if (e <= 0.0) throw std::runtime_error("cell_indicators: zero diffusion in cell");
    eps[mesh.leaf_index(id)] = e;
  }

  // element residual
  std::vector<double> vals;
  std::vector<Vec2> grads, second;
  for (int id : mesh.leaf_ids()) {
    const int li = mesh.leaf_index(id);
    const auto h = mesh.cell_size(mesh.cell(id).level);
    const double vol = h[0] * h[1];
    const double ht = mesh.cell_diameter(id);
    const double div_q = divq(id);
    double acc = 0.0;
    for (size_t qp = 0; qp < quad.points.size(); ++qp) {
      const Vec2 x = mesh.from_reference(id, quad.points[qp]);
      const Vec2 qv = q(id, x);
      const Vec2 g = dg_gradient(mesh, layout, basis, u, id, quad.points[qp]);
      const double uv = dg_value(layout, basis, u, id, quad.points[qp]);
      double lap = 0.0;
      if (k >= 2) {
        basis.eval_second(quad.points[qp], second);
        const int nb = layout.block_size();
        for (int i = 0; i < nb; ++i)
          lap += u[layout.cell_dof(id, i)] *
                 (second[i].x / (h[0] * h[0]) + second[i].y / (h[1] * h[1]));
      }
      const double mu_eff = coeffs.mu(x) + div_q;
      const double res = coeffs.source(x) + eps[li] * lap - dot(qv, g) - mu_eff * uv;
      acc += quad.weights[qp] * vol * res * res;
    }
    ind[li].r_t = ht * ht / eps[li] * acc;
  }

  // face terms
  for (const Face& f : mesh.faces()) {
    const Vec2 n = f.normal;
    const Vec2 tangent = f.axis == 0 ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
    const Vec2 x0 = f.center - 0.5 * f.measure * tangent;
    const double hf = face_diameter(f);
    const int lm = mesh.leaf_index(f.minus_cell);

    if (f.kind == FaceKind::interior) {
      const int lp = mesh.leaf_index(f.plus_cell);
      const double ef = std::min(eps[lm], eps[lp]);
      const Mat2 dm_mat = coeffs.dispersion(q(f.minus_cell, f.center));
      const Mat2 dp_mat = coeffs.dispersion(q(f.plus_cell, f.center));
      const FaceWeights w =
          omega_weights(normal_component(dm_mat, n), normal_component(dp_mat, n));
      const double gamma = penalty_gamma(c_gamma, w.d_eff, k, 2, hf);
      double flux_jump = 0.0, sol_jump = 0.0;
      for (size_t qp = 0; qp < fquad.points.size(); ++qp) {
        const Vec2 x = x0 + fquad.points[qp] * f.measure * tangent;
        const double wq = fquad.weights[qp] * f.measure;
        const Vec2 gm = dg_gradient(mesh, layout, basis, u, f.minus_cell,
                                    mesh.to_reference(f.minus_cell, x));
        const Vec2 gp = dg_gradient(mesh, layout, basis, u, f.plus_cell,
                                    mesh.to_reference(f.plus_cell, x));
        const double um = dg_value(layout, basis, u, f.minus_cell,
                                   mesh.to_reference(f.minus_cell, x));
        const double up = dg_value(layout, basis, u, f.plus_cell,
                                   mesh.to_reference(f.plus_cell, x));
        const double jflux = ef * (dot(n, gm) - dot(n, gp));
        const double jval = um - up;
        flux_jump += wq * jflux * jflux;
        sol_jump += wq * jval * jval;
      }
      const double rf = 0.5 * hf / ef * flux_jump;
      const double jf = 0.5 * (gamma * ef / hf + hf / ef) * sol_jump;
      ind[lm].r_f += rf;
      ind[lp].r_f += rf;
      ind[lm].j_f += jf;
      ind[lp].j_f += jf;
    } else if (bclass[f.id] == BoundaryType::inflow) {
      const double ef = eps[lm];
      const Mat2 d_mat = coeffs.dispersion(q(f.minus_cell, f.center));
      const double gamma = penalty_gamma(c_gamma, normal_component(d_mat, n), k, 2, hf);
      double mismatch = 0.0;
      for (size_t qp = 0; qp < fquad.points.size(); ++qp) {
        const Vec2 x = x0 + fquad.points[qp] * f.measure * tangent;
        const double wq = fquad.weights[qp] * f.measure;
        const double um = dg_value(layout, basis, u, f.minus_cell,
                                   mesh.to_reference(f.minus_cell, x));
        const double diff = um - coeffs.dirichlet(x);
        mismatch += wq * diff * diff;
      }
      ind[lm].j_f += (gamma * ef / hf + hf / ef) * mismatch;
    }
  }
  return ind;
}

inline double global_estimator(const std::vector<CellIndicator>& ind) {
  double s = 0.0;
  for (const CellIndicator& c : ind) s += c.total_sq();
  return std::sqrt(s);
}

namespace detail {

/// Largest realized indicator value v such that pred(v) holds, located by
/// bisection to relative width 1e-6 and snapped onto the realized values.
/// pred must be monotone (true below, false above).
template <class Pred>
double snapped_threshold(const std::vector<double>& eta, Pred pred) {
  double top = 0.0;
  for (double e : eta) top = std::max(top, e);
  if (pred(top)) return top;
  double lo = 0.0, hi = top;
  while (hi - lo > 1e-6 * top) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
  }
  // snap to the nearest realized value, stepping down if it overshoots
  std::vector<double> sorted = eta;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const double mid = 0.5 * (lo + hi);
  auto it = std::lower_bound(sorted.begin(), sorted.end(), mid);
  double best = -1.0;
  if (it != sorted.end() &&
      (it == sorted.begin() || *it - mid <= mid - *(it - 1)))
    best = *it;
  else if (it != sorted.begin())
    best = *(it - 1);
  while (best >= 0.0 && !pred(best)) {
    auto jt = std::lower_bound(sorted.begin(), sorted.end(), best);
    best = jt == sorted.begin() ? -1.0 : *(jt - 1);
  }
  return best;
}

}  // namespace detail

/// Cells with eta_t >= eta*, where eta* is the largest threshold whose marked
/// set still carries at least p_r percent of the squared estimator.
inline std::set<int> mark_refine(const Mesh& mesh, const std::vector<double>& eta, double p_r) {
  double total = 0.0;
  for (double e : eta) total += e * e;
  std::set<int> marks;
  if (total == 0.0) return marks;
  const double target = p_r / 100.0 * total;
  auto mass_at_or_above = [&](double thr) {
    double s = 0.0;
    for (double e : eta)
      if (e >= thr) s += e * e;
    return s;
  };
  const double thr = detail::snapped_threshold(eta, [&](double t) {
    return mass_at_or_above(t) >= target - 1e-12 * total;
  });
  for (int id : mesh.leaf_ids())
    if (eta[mesh.leaf_index(id)] >= thr && eta[mesh.leaf_index(id)] > 0.0) marks.insert(id);
  return marks;
}

/// Cells with eta_t <= rho*, the largest set whose squared-indicator mass
/// stays within p_c percent of the total.
inline std::set<int> mark_coarsen(const Mesh& mesh, const std::vector<double>& eta, double p_c) {
  std::set<int> marks;
  if (p_c <= 0.0) return marks;
  double total = 0.0;
  for (double e : eta) total += e * e;
  if (total == 0.0) return marks;
  const double target = p_c / 100.0 * total;
  auto mass_at_or_below = [&](double thr) {
    double s = 0.0;
    for (double e : eta)
      if (e <= thr) s += e * e;
    return s;
  };
  const double thr = detail::snapped_threshold(eta, [&](double t) {
    return mass_at_or_below(t) <= target + 1e-12 * total;
  });
  if (thr < 0.0) return marks;
  for (int id : mesh.leaf_ids())
    if (eta[mesh.leaf_index(id)] <= thr) marks.insert(id);
  return marks;
}

/// Relative violation of the physical range [0, u_hat]: the larger of the
/// undershoot below 0 and the overshoot above u_hat, scaled by u_hat.
inline double overshoot_metric(double u_min, double u_max, double u_hat) {
  if (!(u_hat > 0.0)) throw std::invalid_argument("overshoot_metric: u_hat must be positive");
  return std::max(std::max(0.0, -u_min) / u_hat, std::max(0.0, u_max - u_hat) / u_hat);
}

/// Extrema of a DG field over Lagrange nodes and volume quadrature points.
struct RangeSample {
  double u_min = 0.0;
  double u_max = 0.0;
};

inline RangeSample dg_range(const Mesh& mesh, const DofLayout& layout, int k,
                            const std::vector<double>& u) {
  QkBasis basis(k);
  const QuadratureRule quad = gauss_rule(k + 1);
  RangeSample r{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  const int nb = layout.block_size();
  for (int id : mesh.leaf_ids()) {
    for (int i = 0; i < nb; ++i) {
      const double v = u[layout.cell_dof(id, i)];
      r.u_min = std::min(r.u_min, v);
      r.u_max = std::max(r.u_max, v);
    }
    for (const Vec2& xhat : quad.points) {
      const double v = dg_value(layout, basis, u, id, xhat);
      r.u_min = std::min(r.u_min, v);
      r.u_max = std::max(r.u_max, v);
    }
  }
  return r;
}

inline RangeSample cg_range(const std::vector<double>& u) {
  RangeSample r{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  for (double v : u) {
    r.u_min = std::min(r.u_min, v);
    r.u_max = std::max(r.u_max, v);
  }
  return r;
}

}  // namespace gw
