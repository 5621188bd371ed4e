#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gw/basis.hpp"
#include "gw/blockmatrix.hpp"
#include "gw/dense.hpp"
#include "gw/dof.hpp"
#include "gw/mesh.hpp"
#include "gw/quadrature.hpp"
#include "gw/random_field.hpp"

namespace gw {

enum class FlowBCKind { dirichlet, neumann };

/// Boundary condition on one side of the rectangle. Neumann prescribes the
/// outward normal flux density (m/s), default zero (no flow).
struct FlowBCSide {
  FlowBCKind kind = FlowBCKind::neumann;
  std::function<double(Vec2)> value = [](Vec2) { return 0.0; };

  static FlowBCSide dirichlet(double v) {
    return {FlowBCKind::dirichlet, [v](Vec2) { return v; }};
  }
  static FlowBCSide dirichlet(std::function<double(Vec2)> f) {
    return {FlowBCKind::dirichlet, std::move(f)};
  }
  static FlowBCSide neumann(double v = 0.0) {
    return {FlowBCKind::neumann, [v](Vec2) { return v; }};
  }
};

struct FlowBC {
  FlowBCSide left, right, bottom, top;

  const FlowBCSide& side_for(const Vec2& outward_normal) const {
    if (outward_normal.x < -0.5) return left;
    if (outward_normal.x > 0.5) return right;
    if (outward_normal.y < -0.5) return bottom;
    return top;
  }
};

inline double harmonic_average(double k_minus, double k_plus) {
  if (!(k_minus > 0.0) || !(k_plus > 0.0))
    throw std::domain_error("harmonic_average: inputs must be positive");
  return 2.0 * k_minus * k_plus / (k_minus + k_plus);
}

namespace detail {

/// Overlap area of a leaf cell with a well box.
inline double well_overlap(const Mesh& mesh, int cell_id, const WellSpec& w) {
  const Vec2 lo = mesh.cell_lower(cell_id);
  const auto h = mesh.cell_size(mesh.cell(cell_id).level);
  const double ox = std::max(0.0, std::min(lo.x + h[0], w.box_hi[0]) - std::max(lo.x, w.box_lo[0]));
  const double oy = std::max(0.0, std::min(lo.y + h[1], w.box_hi[1]) - std::max(lo.y, w.box_lo[1]));
  return ox * oy;
}

/// Signed volumetric source of a cell: injection positive, extraction negative.
inline double well_source(const Mesh& mesh, int cell_id, const std::vector<WellSpec>& wells) {
  double s = 0.0;
  for (const auto& w : wells) {
    const double ov = well_overlap(mesh, cell_id, w);
    if (ov > 0.0) s += (w.kind == WellKind::injection ? 1.0 : -1.0) * w.rate_density() * ov;
  }
  return s;
}

}  // namespace detail

/// Cell-centered finite volume flow system with two-point fluxes. One scalar
/// unknown per leaf cell in leaf order; requires the structured level-0 mesh.
inline void assemble_ccfv(const Mesh& mesh, const ConductivityField& kf,
                          const std::vector<WellSpec>& wells, const FlowBC& bc,
                          BlockSparseMatrix& a, std::vector<double>& rhs) {
  if (!mesh.is_structured())
    throw std::invalid_argument("assemble_ccfv: flow requires the structured level-0 mesh");
  const int n = mesh.n_leaves();
  BlockMatrixBuilder builder(n, 1);
  rhs.assign(n, 0.0);
  bool has_dirichlet = false;
  for (const Face& f : mesh.faces()) {
    const int tm = mesh.leaf_index(f.minus_cell);
    if (f.kind == FaceKind::interior) {
      const int tp = mesh.leaf_index(f.plus_cell);
      const double keff = harmonic_average(kf.k[tm], kf.k[tp]);
      const Vec2 d = mesh.cell_center(f.plus_cell) - mesh.cell_center(f.minus_cell);
      const double t = keff * f.measure / norm(d);
      builder.add(tm, tm, 0, 0, t);
      builder.add(tm, tp, 0, 0, -t);
      builder.add(tp, tp, 0, 0, t);
      builder.add(tp, tm, 0, 0, -t);
    } else {
      const FlowBCSide& side = bc.side_for(f.normal);
      if (side.kind == FlowBCKind::dirichlet) {
        has_dirichlet = true;
        const Vec2 d = f.center - mesh.cell_center(f.minus_cell);
        const double t = kf.k[tm] * f.measure / norm(d);
        builder.add(tm, tm, 0, 0, t);
        rhs[tm] += t * side.value(f.center);
      } else {
        rhs[tm] -= side.value(f.center) * f.measure;
      }
    }
  }
  if (!has_dirichlet)
    throw std::runtime_error("assemble_ccfv: all-Neumann boundary gives a singular system");
  for (int id : mesh.leaf_ids())
    rhs[mesh.leaf_index(id)] += detail::well_source(mesh, id, wells);
  a = builder.build();
}

/// Normal flux density q.n per face, oriented along each face's stored normal.
inline std::vector<double> ccfv_face_fluxes(const Mesh& mesh, const ConductivityField& kf,
                                            const FlowBC& bc, const std::vector<double>& head) {
  std::vector<double> flux(mesh.faces().size(), 0.0);
  for (const Face& f : mesh.faces()) {
    const int tm = mesh.leaf_index(f.minus_cell);
    if (f.kind == FaceKind::interior) {
      const int tp = mesh.leaf_index(f.plus_cell);
      const double keff = harmonic_average(kf.k[tm], kf.k[tp]);
      const Vec2 d = mesh.cell_center(f.plus_cell) - mesh.cell_center(f.minus_cell);
      flux[f.id] = -keff * (head[tp] - head[tm]) / norm(d);
    } else {
      const FlowBCSide& side = bc.side_for(f.normal);
      if (side.kind == FlowBCKind::dirichlet) {
        const Vec2 d = f.center - mesh.cell_center(f.minus_cell);
        flux[f.id] = -kf.k[tm] * (side.value(f.center) - head[tm]) / norm(d);
      } else {
        flux[f.id] = side.value(f.center);
      }
    }
  }
  return flux;
}

/// Lowest-order Raviart-Thomas velocity on the structured flow mesh:
/// per cell and axis, q_i = a_i + b_i x_i interpolates the opposing
/// face-midpoint normal fluxes. Indexed row-major by level-0 coordinates so
/// refined transport cells can read their ancestor's field.
class RT0Velocity {
 public:
  RT0Velocity() = default;
  RT0Velocity(int nx, int ny) : nx_(nx), ny_(ny) {
    const size_t n = static_cast<size_t>(nx) * ny;
    a_[0].assign(n, 0.0);
    a_[1].assign(n, 0.0);
    b_[0].assign(n, 0.0);
    b_[1].assign(n, 0.0);
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }

  double& a(int axis, int idx) { return a_[axis][idx]; }
  double& b(int axis, int idx) { return b_[axis][idx]; }
  double a(int axis, int idx) const { return a_[axis][idx]; }
  double b(int axis, int idx) const { return b_[axis][idx]; }

  /// Row-major level-0 index of the coarse ancestor of any cell.
  int coarse_index(const Mesh& mesh, int cell_id) const {
    const Cell& c = mesh.cell(cell_id);
    return (c.iy >> c.level) * nx_ + (c.ix >> c.level);
  }

  Vec2 eval(const Mesh& mesh, int cell_id, const Vec2& x) const {
    const int i = coarse_index(mesh, cell_id);
    return {a_[0][i] + b_[0][i] * x.x, a_[1][i] + b_[1][i] * x.y};
  }

  double divergence(int coarse_idx) const {
    return b_[0][coarse_idx] + b_[1][coarse_idx];
  }

 private:
  int nx_ = 0, ny_ = 0;
  std::array<std::vector<double>, 2> a_, b_;
};

inline RT0Velocity rt0_reconstruct(const Mesh& mesh, const std::vector<double>& face_fluxes) {
  if (!mesh.is_structured())
    throw std::invalid_argument("rt0_reconstruct: requires the structured level-0 mesh");
  const int nx = mesh.spec().cells_per_axis[0];
  const int ny = mesh.spec().cells_per_axis[1];
  RT0Velocity q(nx, ny);
  // Gather the low/high face normal fluxes per cell, oriented along +axis.
  std::vector<std::array<double, 4>> per_cell(static_cast<size_t>(nx) * ny);  // {xlo,xhi,ylo,yhi}
  for (const Face& f : mesh.faces()) {
    const double v = face_fluxes[f.id];
    if (f.kind == FaceKind::interior) {
      per_cell[mesh.leaf_index(f.minus_cell)][2 * f.axis + 1] = v;
      per_cell[mesh.leaf_index(f.plus_cell)][2 * f.axis] = v;
    } else {
      // outward normal: a low-side face carries -axis orientation
      const bool low_side = (f.axis == 0 ? f.normal.x : f.normal.y) < 0.0;
      per_cell[mesh.leaf_index(f.minus_cell)][2 * f.axis + (low_side ? 0 : 1)] =
          low_side ? -v : v;
    }
  }
  for (int id : mesh.leaf_ids()) {
    const int i = mesh.leaf_index(id);
    const Vec2 lo = mesh.cell_lower(id);
    const auto h = mesh.cell_size(0);
    for (int axis = 0; axis < 2; ++axis) {
      const double qlo = per_cell[i][2 * axis];
      const double qhi = per_cell[i][2 * axis + 1];
      const double x0 = axis == 0 ? lo.x : lo.y;
      q.b(axis, i) = (qhi - qlo) / h[axis];
      q.a(axis, i) = qlo - q.b(axis, i) * x0;
    }
  }
  return q;
}

/// Q1 finite element flow system with cell-wise constant K and strong
/// Dirichlet nodes, eliminated symmetrically.
inline void assemble_fem_flow(const Mesh& mesh, const ConductivityField& kf,
                              const std::vector<WellSpec>& wells, const FlowBC& bc,
                              BlockSparseMatrix& a, std::vector<double>& rhs) {
  const DofLayout layout = DofLayout::cg_q1(mesh);
  const int nx = layout.nx();
  const int ny = layout.ny();
  const int n = layout.n_dofs();
  const auto h = mesh.cell_size(0);

  // Dirichlet nodes: any boundary side marked Dirichlet claims its nodes.
  std::vector<char> fixed(n, 0);
  std::vector<double> fixed_val(n, 0.0);
  auto fix = [&](int vx, int vy, const FlowBCSide& s) {
    if (s.kind != FlowBCKind::dirichlet) return;
    const int d = layout.vertex_dof(vx, vy);
    fixed[d] = 1;
    fixed_val[d] = s.value({vx * h[0], vy * h[1]});
  };
  for (int vy = 0; vy <= ny; ++vy) {
    fix(0, vy, bc.left);
    fix(nx, vy, bc.right);
  }
  for (int vx = 0; vx <= nx; ++vx) {
    fix(vx, 0, bc.bottom);
    fix(vx, ny, bc.top);
  }
  bool has_dirichlet = false;
  for (char c : fixed) has_dirichlet |= (c != 0);
  if (!has_dirichlet)
    throw std::runtime_error("assemble_fem_flow: all-Neumann boundary gives a singular system");

  BlockMatrixBuilder builder(n, 1);
  rhs.assign(n, 0.0);
  QkBasis basis(1);
  const QuadratureRule quad = gauss_rule(2);
  std::vector<double> vals;
  std::vector<Vec2> grads;

  for (int id : mesh.leaf_ids()) {
    const Cell& c = mesh.cell(id);
    const auto dofs = layout.cell_vertices(c.ix, c.iy);
    const double kcell = kf.k[mesh.leaf_index(id)];
    const double vol = h[0] * h[1];
    double ke[4][4] = {};
    for (size_t qp = 0; qp < quad.points.size(); ++qp) {
      basis.eval(quad.points[qp], vals, grads);
      const double wq = quad.weights[qp] * vol;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          ke[i][j] += wq * kcell *
                      (grads[i].x / h[0] * (grads[j].x / h[0]) +
                       grads[i].y / h[1] * (grads[j].y / h[1]));
    }
    const double src = detail::well_source(mesh, id, wells);
    for (int i = 0; i < 4; ++i) {
      if (fixed[dofs[i]]) continue;
      rhs[dofs[i]] += 0.25 * src;
      for (int j = 0; j < 4; ++j) {
        if (fixed[dofs[j]])
          rhs[dofs[i]] -= ke[i][j] * fixed_val[dofs[j]];
        else
          builder.add(dofs[i], dofs[j], 0, 0, ke[i][j]);
      }
    }
  }
  // Neumann flux on free boundary nodes.
  for (const Face& f : mesh.faces()) {
    if (f.kind != FaceKind::boundary) continue;
    const FlowBCSide& side = bc.side_for(f.normal);
    if (side.kind != FlowBCKind::neumann) continue;
    const Cell& c = mesh.cell(f.minus_cell);
    const auto dofs = layout.cell_vertices(c.ix, c.iy);
    // the two Q1 nodes on this face each take half the face integral
    const double g = side.value(f.center) * f.measure * 0.5;
    for (int i = 0; i < 4; ++i) {
      const Vec2 xn = {(c.ix + (i % 2)) * h[0], (c.iy + (i / 2)) * h[1]};
      const bool on_face = f.axis == 0 ? std::abs(xn.x - f.center.x) < 1e-12 * (1.0 + std::abs(xn.x))
                                       : std::abs(xn.y - f.center.y) < 1e-12 * (1.0 + std::abs(xn.y));
      if (on_face && !fixed[dofs[i]]) rhs[dofs[i]] -= g;
    }
  }
  for (int d = 0; d < n; ++d)
    if (fixed[d]) {
      builder.add(d, d, 0, 0, 1.0);
      rhs[d] = fixed_val[d];
    }
  a = builder.build();
}

/// Pointwise Darcy velocity from a Q1 head: q = -K grad(phi) within each cell.
class DarcyDirect {
 public:
  DarcyDirect(const Mesh& mesh, const ConductivityField& kf, std::vector<double> head)
      : mesh_(&mesh), kf_(&kf), head_(std::move(head)), layout_(DofLayout::cg_q1(mesh)), basis_(1) {}

  Vec2 eval(int cell_id, const Vec2& x) const {
    const Cell& c = mesh_->cell(cell_id);
    const auto dofs = layout_.cell_vertices(c.ix >> c.level, c.iy >> c.level);
    const int coarse = mesh_->coarse_ancestor(cell_id);
    const auto h = mesh_->cell_size(0);
    const Vec2 xhat = mesh_->to_reference(coarse, x);
    std::vector<double> vals;
    std::vector<Vec2> grads;
    basis_.eval(xhat, vals, grads);
    Vec2 g{0.0, 0.0};
    for (int i = 0; i < 4; ++i) {
      g.x += head_[dofs[i]] * grads[i].x / h[0];
      g.y += head_[dofs[i]] * grads[i].y / h[1];
    }
    const double k = kf_->k[(c.iy >> c.level) * layout_.nx() + (c.ix >> c.level)];
    return {-k * g.x, -k * g.y};
  }

 private:
  const Mesh* mesh_;
  const ConductivityField* kf_;
  std::vector<double> head_;
  DofLayout layout_;
  QkBasis basis_;
};

/// Quadratic head reconstruction on one coarse cell:
/// phi~ = sum_j (a_j x_j^2 + b_j x_j) + c0, matching the center head value and
/// Darcy's law -K d(phi~)/dx_j = q_j at the face centers.
struct LocalHead {
  std::array<double, 2> a{0.0, 0.0};
  std::array<double, 2> b{0.0, 0.0};
  double c0 = 0.0;

  double eval(const Vec2& x) const {
    return a[0] * x.x * x.x + b[0] * x.x + a[1] * x.y * x.y + b[1] * x.y + c0;
  }
};

inline LocalHead reconstruct_local_head(const Mesh& mesh, int coarse_cell_id,
                                        const RT0Velocity& q, double k, double phi_center) {
  if (k == 0.0) throw std::domain_error("reconstruct_local_head: K = 0");
  const int idx = q.coarse_index(mesh, coarse_cell_id);
  LocalHead lh;
  for (int axis = 0; axis < 2; ++axis) {
    // -K (2 a x + b) = a_RT + b_RT x for all x on the cell
    lh.a[axis] = -q.b(axis, idx) / (2.0 * k);
    lh.b[axis] = -q.a(axis, idx) / k;
  }
  const Vec2 xc = mesh.cell_center(coarse_cell_id);
  lh.c0 = phi_center - (lh.a[0] * xc.x * xc.x + lh.b[0] * xc.x + lh.a[1] * xc.y * xc.y +
                        lh.b[1] * xc.y);
  return lh;
}

/// Head value at every leaf-cell center of a (possibly refined) transport
/// mesh: level-0 cells take the cell head directly, refined cells evaluate
/// the quadratic reconstruction of their level-0 ancestor.
inline std::vector<double> leaf_head_values(const Mesh& transport_mesh, const Mesh& flow_mesh,
                                            const std::vector<double>& fv_head,
                                            const RT0Velocity& q, const ConductivityField& kf) {
  std::vector<double> out(transport_mesh.n_leaves());
  for (int id : transport_mesh.leaf_ids()) {
    const Cell& c = transport_mesh.cell(id);
    const int idx0 = q.coarse_index(transport_mesh, id);
    if (c.level == 0) {
      out[transport_mesh.leaf_index(id)] = fv_head[idx0];
    } else {
      const int coarse_id = flow_mesh.leaf_ids()[idx0];
      const LocalHead lh =
          reconstruct_local_head(flow_mesh, coarse_id, q, kf.k[idx0], fv_head[idx0]);
      out[transport_mesh.leaf_index(id)] = lh.eval(transport_mesh.cell_center(id));
    }
  }
  return out;
}

/// Leaf-cell ids sorted by head descending (downwind last); ties by id.
inline std::vector<int> downwind_order(const Mesh& mesh, const std::vector<double>& head) {
  std::vector<int> order = mesh.leaf_ids();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ha = head[mesh.leaf_index(a)];
    const double hb = head[mesh.leaf_index(b)];
    if (ha != hb) return ha > hb;
    return a < b;
  });
  return order;
}

}  // namespace gw
