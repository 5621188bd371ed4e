#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gw/basis.hpp"
#include "gw/blockmatrix.hpp"
#include "gw/dof.hpp"
#include "gw/flow.hpp"
#include "gw/mesh.hpp"
#include "gw/precond.hpp"
#include "gw/quadrature.hpp"
#include "gw/solvers.hpp"
#include "gw/vec.hpp"

namespace gw {

using ScalarFn = std::function<double(Vec2)>;
using VelocityFn = std::function<Vec2(int cell_id, const Vec2&)>;
using DivergenceFn = std::function<double(int cell_id)>;

inline VelocityFn velocity_from_rt0(const Mesh& mesh, const RT0Velocity& q) {
  return [&mesh, &q](int cell_id, const Vec2& x) { return q.eval(mesh, cell_id, x); };
}

inline DivergenceFn divergence_from_rt0(const Mesh& mesh, const RT0Velocity& q) {
  return [&mesh, &q](int cell_id) { return q.divergence(q.coarse_index(mesh, cell_id)); };
}

inline VelocityFn constant_velocity(Vec2 q) {
  return [q](int, const Vec2&) { return q; };
}

enum class DispersionModel { scheidegger, isotropic };

/// Physical coefficients of the steady transport equation
///   -div(D grad u) + div(q u) + mu u = s,  u = u_D on the inflow boundary.
struct TransportCoeffs {
  DispersionModel model = DispersionModel::scheidegger;
  double theta = 1.0;    // porosity
  double alpha_l = 0.0;  // longitudinal dispersivity (m)
  double alpha_t = 0.0;  // transversal dispersivity (m)
  double dm = 0.0;       // molecular diffusion (m^2/s)
  double eps_iso = 1.0;  // isotropic model diffusion
  ScalarFn mu = [](Vec2) { return 0.0; };
  ScalarFn source = [](Vec2) { return 0.0; };
  ScalarFn dirichlet = [](Vec2) { return 0.0; };

  Mat2 dispersion(const Vec2& q) const;

  static TransportCoeffs isotropic_eps(double eps) {
    TransportCoeffs c;
    c.model = DispersionModel::isotropic;
    c.eps_iso = eps;
    return c;
  }
};

/// Scheidegger tensor from the pore velocity v = q/theta:
/// D = theta * [ (a_l - a_t) v v^T / |v| + (a_t |v| + D_m) I ];  |v| = 0 gives theta D_m I.
inline Mat2 dispersion_tensor(const Vec2& v, double theta, double alpha_l, double alpha_t,
                              double dm) {
  const double nv = norm(v);
  if (nv == 0.0) return Mat2::identity(theta * dm);
  const double c = theta * (alpha_l - alpha_t) / nv;
  const double iso = theta * (alpha_t * nv + dm);
  return {c * v.x * v.x + iso, c * v.x * v.y, c * v.y * v.y + iso};
}

inline Mat2 TransportCoeffs::dispersion(const Vec2& q) const {
  if (model == DispersionModel::isotropic) return Mat2::identity(eps_iso);
  return dispersion_tensor(q * (1.0 / theta), theta, alpha_l, alpha_t, dm);
}

/// Diffusivity-weighted face data from the two one-sided normal diffusivities
/// delta_pm = n' D_pm n. Degenerate delta sum gives (1/2, 1/2) and D_eff = 0.
struct FaceWeights {
  double omega_minus = 0.5;
  double omega_plus = 0.5;
  double d_eff = 0.0;
};

inline FaceWeights omega_weights(double delta_minus, double delta_plus) {
  const double s = delta_minus + delta_plus;
  if (s == 0.0) return {0.5, 0.5, 0.0};
  return {delta_plus / s, delta_minus / s, 2.0 * delta_minus * delta_plus / s};
}

inline double penalty_gamma(double c_gamma, double d_eff, int k, int d, double h_f) {
  return c_gamma * d_eff * k * (k + d - 1) / h_f;
}

/// Upwind trace: the minus side when q.n >= 0 (including 0), else the plus side.
inline double upwind_value(double u_minus, double u_plus, double qn) {
  return qn < 0.0 ? u_plus : u_minus;
}

enum class BoundaryType { none, inflow, outflow, characteristic };

/// Classifies boundary faces by the sign of q.n at the face midpoint.
/// |q.n| below 1e-14 of the largest boundary |q.n| counts as characteristic.
inline std::vector<BoundaryType> classify_boundary(const Mesh& mesh, const VelocityFn& q) {
  std::vector<BoundaryType> cls(mesh.faces().size(), BoundaryType::none);
  double scale = 0.0;
  std::vector<double> qn(mesh.faces().size(), 0.0);
  for (const Face& f : mesh.faces()) {
    if (f.kind != FaceKind::boundary) continue;
    qn[f.id] = dot(q(f.minus_cell, f.center), f.normal);
    scale = std::max(scale, std::abs(qn[f.id]));
  }
  const double tol = 1e-14 * scale;
  for (const Face& f : mesh.faces()) {
    if (f.kind != FaceKind::boundary) continue;
    if (qn[f.id] > tol)
      cls[f.id] = BoundaryType::outflow;
    else if (qn[f.id] < -tol)
      cls[f.id] = BoundaryType::inflow;
    else
      cls[f.id] = BoundaryType::characteristic;
  }
  return cls;
}

/// Where the weak Dirichlet (Nitsche) terms act: only on inflow faces (the
/// physical transport boundary condition), or on every boundary face with the
/// full consistency term (manufactured problems with Dirichlet data all around).
enum class DirichletMode { inflow_only, all_faces };

struct DGOptions {
  double c_gamma = 10.0;
  DirichletMode dirichlet = DirichletMode::inflow_only;
  std::vector<int> cell_order;  // empty: geometric (ascending id) order
};

struct TransportSystem {
  DofLayout layout;
  BlockSparseMatrix a;
  std::vector<double> rhs;
  int degree = 1;
};

namespace detail {

/// Values and physical gradients of a cell's DG basis at a physical point.
struct TraceEval {
  std::vector<double> vals;
  std::vector<Vec2> grads;

  void at(const Mesh& mesh, const QkBasis& basis, int cell_id, const Vec2& x) {
    const auto h = mesh.cell_size(mesh.cell(cell_id).level);
    basis.eval(mesh.to_reference(cell_id, x), vals, grads);
    for (Vec2& g : grads) {
      g.x /= h[0];
      g.y /= h[1];
    }
  }
};

}  // namespace detail

/// Interior-penalty DG(k) assembly of the transport operator with
/// diffusivity-weighted averages, upwinded convection, and weak Dirichlet data.
/// Face weights, penalty, and effective diffusivity are face constants taken
/// at the midpoint; hanging faces are integrated per fine sub-face.
inline TransportSystem assemble_dg(const Mesh& mesh, int k, const VelocityFn& q,
                                   const TransportCoeffs& coeffs,
                                   const std::vector<BoundaryType>& bclass,
                                   const DGOptions& opt = {}) {
  if (k < 1) throw std::invalid_argument("assemble_dg: degree must be >= 1");
  TransportSystem sys;
  sys.degree = k;
  sys.layout = opt.cell_order.empty() ? DofLayout::dg(mesh, k)
                                      : DofLayout::dg(mesh, k, opt.cell_order);
  const int nb = sys.layout.block_size();
  BlockMatrixBuilder builder(sys.layout.n_blocks(), nb);
  sys.rhs.assign(sys.layout.n_dofs(), 0.0);
  QkBasis basis(k);
  const QuadratureRule quad = gauss_rule(k + 1);
  const GaussRule1D fquad = gauss_rule_1d(k + 1);

  // Volume terms: (D grad u, grad v) - (u, q . grad v) + (mu u, v); rhs (s, v).
  std::vector<double> vals;
  std::vector<Vec2> grads;
  std::vector<double> ke(static_cast<size_t>(nb) * nb);
  for (int id : mesh.leaf_ids()) {
    std::fill(ke.begin(), ke.end(), 0.0);
    const auto h = mesh.cell_size(mesh.cell(id).level);
    const double vol = h[0] * h[1];
    const int blk = sys.layout.cell_block(id);
    for (size_t qp = 0; qp < quad.points.size(); ++qp) {
      basis.eval(quad.points[qp], vals, grads);
      for (Vec2& g : grads) {
        g.x /= h[0];
        g.y /= h[1];
      }
      const Vec2 x = mesh.from_reference(id, quad.points[qp]);
      const double wq = quad.weights[qp] * vol;
      const Vec2 qv = q(id, x);
      const Mat2 d = coeffs.dispersion(qv);
      const double mu = coeffs.mu(x);
      const double s = coeffs.source(x);
      for (int i = 0; i < nb; ++i) {
        sys.rhs[blk * nb + i] += wq * s * vals[i];
        const Vec2 dgi = d.apply(grads[i]);
        for (int j = 0; j < nb; ++j)
          ke[static_cast<size_t>(i) * nb + j] +=
              wq * (dot(dgi, grads[j]) - vals[j] * dot(qv, grads[i]) + mu * vals[j] * vals[i]);
      }
    }
    builder.add_block(blk, blk, ke.data());
  }

  // Face terms.
  detail::TraceEval em, ep;
  std::vector<double> fmm(static_cast<size_t>(nb) * nb), fmp(fmm), fpm(fmm), fpp(fmm);
  for (const Face& f : mesh.faces()) {
    const Vec2 n = f.normal;
    const Vec2 tangent = f.axis == 0 ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
    const Vec2 x0 = f.center - 0.5 * f.measure * tangent;
    const double hf = face_diameter(f);

    if (f.kind == FaceKind::interior) {
      const int tm = f.minus_cell, tp = f.plus_cell;
      const int bm = sys.layout.cell_block(tm), bp = sys.layout.cell_block(tp);
      const Mat2 dm_mat = coeffs.dispersion(q(tm, f.center));
      const Mat2 dp_mat = coeffs.dispersion(q(tp, f.center));
      const FaceWeights w = omega_weights(normal_component(dm_mat, n), normal_component(dp_mat, n));
      const double gamma = penalty_gamma(opt.c_gamma, w.d_eff, k, 2, hf);
      std::fill(fmm.begin(), fmm.end(), 0.0);
      std::fill(fmp.begin(), fmp.end(), 0.0);
      std::fill(fpm.begin(), fpm.end(), 0.0);
      std::fill(fpp.begin(), fpp.end(), 0.0);
      for (size_t qp = 0; qp < fquad.points.size(); ++qp) {
        const Vec2 x = x0 + fquad.points[qp] * f.measure * tangent;
        const double wq = fquad.weights[qp] * f.measure;
        em.at(mesh, basis, tm, x);
        ep.at(mesh, basis, tp, x);
        const double qn = dot(q(tm, x), n);
        const bool up_minus = qn >= 0.0;
        for (int i = 0; i < nb; ++i) {
          // diffusive flux averages of the trial side, weighted
          const double dfm = w.omega_minus * dot(n, dm_mat.apply(em.grads[i]));
          const double dfp = w.omega_plus * dot(n, dp_mat.apply(ep.grads[i]));
          for (int j = 0; j < nb; ++j) {
            const double dtm = w.omega_minus * dot(n, dm_mat.apply(em.grads[j]));
            const double dtp = w.omega_plus * dot(n, dp_mat.apply(ep.grads[j]));
            // penalty gamma [u][v], [u] = u- - u+
            fmm[i * nb + j] += wq * gamma * em.vals[j] * em.vals[i];
            fmp[i * nb + j] -= wq * gamma * ep.vals[j] * em.vals[i];
            fpm[i * nb + j] -= wq * gamma * em.vals[j] * ep.vals[i];
            fpp[i * nb + j] += wq * gamma * ep.vals[j] * ep.vals[i];
            // upwinded convection (q.n) u_up [v]
            if (up_minus) {
              fmm[i * nb + j] += wq * qn * em.vals[j] * em.vals[i];
              fpm[i * nb + j] -= wq * qn * em.vals[j] * ep.vals[i];
            } else {
              fmp[i * nb + j] += wq * qn * ep.vals[j] * em.vals[i];
              fpp[i * nb + j] -= wq * qn * ep.vals[j] * ep.vals[i];
            }
            // -(<n.D grad u>, [v]) - (<n.D grad v>, [u])
            fmm[i * nb + j] -= wq * (dtm * em.vals[i] + dfm * em.vals[j]);
            fmp[i * nb + j] -= wq * (dtp * em.vals[i] - dfm * ep.vals[j]);
            fpm[i * nb + j] -= wq * (-dtm * ep.vals[i] + dfp * em.vals[j]);
            fpp[i * nb + j] += wq * (dtp * ep.vals[i] + dfp * ep.vals[j]);
          }
        }
      }
      builder.add_block(bm, bm, fmm.data());
      builder.add_block(bm, bp, fmp.data());
      builder.add_block(bp, bm, fpm.data());
      builder.add_block(bp, bp, fpp.data());
      continue;
    }

    // boundary face
    const BoundaryType bt = bclass[f.id];
    if (bt == BoundaryType::none)
      throw std::runtime_error("assemble_dg: unclassified boundary face " + std::to_string(f.id));
    const int tm = f.minus_cell;
    const int bm = sys.layout.cell_block(tm);
    const Mat2 d_mat = coeffs.dispersion(q(tm, f.center));
    const double d_eff = normal_component(d_mat, n);
    const double gamma = penalty_gamma(opt.c_gamma, d_eff, k, 2, hf);
    const bool dirichlet_here =
        opt.dirichlet == DirichletMode::all_faces || bt == BoundaryType::inflow;
    const bool consistency_here = opt.dirichlet == DirichletMode::all_faces;
    std::fill(fmm.begin(), fmm.end(), 0.0);
    for (size_t qp = 0; qp < fquad.points.size(); ++qp) {
      const Vec2 x = x0 + fquad.points[qp] * f.measure * tangent;
      const double wq = fquad.weights[qp] * f.measure;
      em.at(mesh, basis, tm, x);
      const double qn = dot(q(tm, x), n);
      const double ud = coeffs.dirichlet(x);
      for (int i = 0; i < nb; ++i) {
        const double dfi = dot(n, d_mat.apply(em.grads[i]));
        if (bt == BoundaryType::outflow) {
          // convective outflow (n.q u, v)
          for (int j = 0; j < nb; ++j)
            fmm[i * nb + j] += wq * qn * em.vals[j] * em.vals[i];
        }
        if (bt == BoundaryType::inflow) {
          // inflow convective flux carries the Dirichlet value
          sys.rhs[bm * nb + i] -= wq * qn * ud * em.vals[i];
        }
        if (dirichlet_here) {
          for (int j = 0; j < nb; ++j) {
            const double dfj = dot(n, d_mat.apply(em.grads[j]));
            fmm[i * nb + j] += wq * (gamma * em.vals[j] * em.vals[i] - em.vals[j] * dfi);
            if (consistency_here) fmm[i * nb + j] -= wq * dfj * em.vals[i];
          }
          sys.rhs[bm * nb + i] += wq * ud * (gamma * em.vals[i] - dfi);
        }
      }
    }
    builder.add_block(bm, bm, fmm.data());
  }
  sys.a = builder.build();
  return sys;
}

/// Effective mesh Peclet number of a cell from the cell-center speed.
inline double mesh_peclet(const Mesh& mesh, int cell_id, double qnorm,
                          const TransportCoeffs& coeffs) {
  if (qnorm == 0.0) return 0.0;
  const double h = mesh.cell_diameter(cell_id);
  const double denom = coeffs.model == DispersionModel::isotropic
                           ? coeffs.eps_iso
                           : coeffs.alpha_l * qnorm + coeffs.theta * coeffs.dm;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * qnorm * h / denom;
}

/// Max cell Peclet number over the leaf cells.
inline double max_mesh_peclet(const Mesh& mesh, const VelocityFn& q,
                              const TransportCoeffs& coeffs) {
  double p = 0.0;
  for (int id : mesh.leaf_ids())
    p = std::max(p, mesh_peclet(mesh, id, norm(q(id, mesh.cell_center(id))), coeffs));
  return p;
}

enum class SDFEMZeta { clipped, coth };

/// Streamline stabilization parameter delta = h/(2|q|) zeta(P);
/// zeta is max{0, 1 - 1/P} (default) or coth(P) - 1/P. |q| = 0 gives 0.
inline double sdfem_delta(double h, double qnorm, double peclet, SDFEMZeta variant) {
  if (qnorm == 0.0 || peclet == 0.0) return 0.0;
  double zeta;
  if (variant == SDFEMZeta::clipped)
    zeta = std::max(0.0, 1.0 - 1.0 / peclet);
  else
    zeta = 1.0 / std::tanh(peclet) - 1.0 / peclet;
  return h / (2.0 * qnorm) * zeta;
}

struct SDFEMOptions {
  SDFEMZeta zeta = SDFEMZeta::clipped;
  bool dirichlet_all_boundary = false;  // benchmarks prescribe u on the whole boundary
  bool no_stabilization = false;        // plain Galerkin (delta = 0)
};

/// Streamline-diffusion Q1 assembly of the non-conservative transport form
/// (mu' = mu + div q from expanding div(q u)) with strong Dirichlet nodes on
/// the inflow boundary.
inline TransportSystem assemble_sdfem(const Mesh& mesh, const VelocityFn& q,
                                      const DivergenceFn& divq, const TransportCoeffs& coeffs,
                                      const std::vector<BoundaryType>& bclass,
                                      const SDFEMOptions& opt = {}) {
  TransportSystem sys;
  sys.degree = 1;
  sys.layout = DofLayout::cg_q1(mesh);
  const int n = sys.layout.n_dofs();
  const auto h = mesh.cell_size(0);

  std::vector<char> fixed(n, 0);
  std::vector<double> fixed_val(n, 0.0);
  for (const Face& f : mesh.faces()) {
    if (f.kind != FaceKind::boundary) continue;
    const BoundaryType bt = bclass[f.id];
    if (bt == BoundaryType::none)
      throw std::runtime_error("assemble_sdfem: unclassified boundary face " +
                               std::to_string(f.id));
    if (!(bt == BoundaryType::inflow || opt.dirichlet_all_boundary)) continue;
    const Cell& c = mesh.cell(f.minus_cell);
    // the two vertices of this boundary face
    for (int t = 0; t < 2; ++t) {
      int vx, vy;
      if (f.axis == 0) {
        vx = f.normal.x > 0 ? c.ix + 1 : c.ix;
        vy = c.iy + t;
      } else {
        vy = f.normal.y > 0 ? c.iy + 1 : c.iy;
        vx = c.ix + t;
      }
      const int d = sys.layout.vertex_dof(vx, vy);
      fixed[d] = 1;
      fixed_val[d] = coeffs.dirichlet({vx * h[0], vy * h[1]});
    }
  }

  BlockMatrixBuilder builder(n, 1);
  sys.rhs.assign(n, 0.0);
  QkBasis basis(1);
  const QuadratureRule quad = gauss_rule(3);
  std::vector<double> vals;
  std::vector<Vec2> grads;
  const double vol = h[0] * h[1];

  for (int id : mesh.leaf_ids()) {
    const Cell& c = mesh.cell(id);
    const auto dofs = sys.layout.cell_vertices(c.ix, c.iy);
    const Vec2 xc = mesh.cell_center(id);
    const double qc = norm(q(id, xc));
    const double delta =
        opt.no_stabilization
            ? 0.0
            : sdfem_delta(mesh.cell_diameter(id), qc, mesh_peclet(mesh, id, qc, coeffs),
                          opt.zeta);
    const double div_q = divq(id);
    double ke[4][4] = {};
    double fe[4] = {};
    for (size_t qp = 0; qp < quad.points.size(); ++qp) {
      basis.eval(quad.points[qp], vals, grads);
      for (Vec2& g : grads) {
        g.x /= h[0];
        g.y /= h[1];
      }
      const Vec2 x = mesh.from_reference(id, quad.points[qp]);
      const double wq = quad.weights[qp] * vol;
      const Vec2 qv = q(id, x);
      const Mat2 d = coeffs.dispersion(qv);
      const double mu_eff = coeffs.mu(x) + div_q;
      const double s = coeffs.source(x);
      for (int i = 0; i < 4; ++i) {
        const double test = vals[i] + delta * dot(qv, grads[i]);
        fe[i] += wq * s * test;
        for (int j = 0; j < 4; ++j)
          ke[i][j] += wq * (dot(d.apply(grads[j]), grads[i]) +
                            (dot(qv, grads[j]) + mu_eff * vals[j]) * test);
      }
    }
    for (int i = 0; i < 4; ++i) {
      if (fixed[dofs[i]]) continue;
      sys.rhs[dofs[i]] += fe[i];
      for (int j = 0; j < 4; ++j) {
        if (fixed[dofs[j]])
          sys.rhs[dofs[i]] -= ke[i][j] * fixed_val[dofs[j]];
        else
          builder.add(dofs[i], dofs[j], 0, 0, ke[i][j]);
      }
    }
  }
  for (int d = 0; d < n; ++d)
    if (fixed[d]) {
      builder.add(d, d, 0, 0, 1.0);
      sys.rhs[d] = fixed_val[d];
    }
  sys.a = builder.build();
  return sys;
}

enum class KrylovMethod { bicgstab, gmres, cg };
enum class PrecondKind { identity, ssor, ilu0 };

struct SolverConfig {
  KrylovMethod method = KrylovMethod::bicgstab;
  PrecondKind precond = PrecondKind::ssor;
  double reduction = 1e-8;
  int max_iter = 10000;
  int restart = 50;
  double ssor_omega = 1.0;
};

inline SolveReport solve_linear(const BlockSparseMatrix& a, const std::vector<double>& rhs,
                                std::vector<double>& x, const SolverConfig& cfg) {
  std::unique_ptr<Preconditioner> m;
  switch (cfg.precond) {
    case PrecondKind::ssor: m = std::make_unique<BlockSSOR>(a, cfg.ssor_omega); break;
    case PrecondKind::ilu0: m = std::make_unique<BlockILU0>(a); break;
    default: m = std::make_unique<IdentityPreconditioner>(); break;
  }
  switch (cfg.method) {
    case KrylovMethod::gmres:
      return gmres(a, rhs, x, *m, cfg.reduction, cfg.restart, cfg.max_iter);
    case KrylovMethod::cg: return cg(a, rhs, x, *m, cfg.reduction, cfg.max_iter);
    default: return bicgstab(a, rhs, x, *m, cfg.reduction, cfg.max_iter);
  }
}

/// Solves the assembled transport system; the solution stays in the
/// assembly's cell order inside the returned field.
inline SolveReport solve_transport(const TransportSystem& sys, const SolverConfig& cfg,
                                   DiscreteField& field) {
  field.tag = sys.layout.tag();
  field.degree = sys.degree;
  return solve_linear(sys.a, sys.rhs, field.coeffs, cfg);
}

// --- discrete field evaluation ---------------------------------------------

/// Value of a DG field inside a cell at reference coordinates.
inline double dg_value(const DofLayout& layout, const QkBasis& basis,
                       const std::vector<double>& u, int cell_id, const Vec2& xhat) {
  std::vector<double> vals;
  std::vector<Vec2> grads;
  basis.eval(xhat, vals, grads);
  double s = 0.0;
  const int nb = layout.block_size();
  for (int i = 0; i < nb; ++i) s += u[layout.cell_dof(cell_id, i)] * vals[i];
  return s;
}

/// Physical gradient of a DG field inside a cell at reference coordinates.
inline Vec2 dg_gradient(const Mesh& mesh, const DofLayout& layout, const QkBasis& basis,
                        const std::vector<double>& u, int cell_id, const Vec2& xhat) {
  std::vector<double> vals;
  std::vector<Vec2> grads;
  basis.eval(xhat, vals, grads);
  const auto h = mesh.cell_size(mesh.cell(cell_id).level);
  Vec2 g{0.0, 0.0};
  const int nb = layout.block_size();
  for (int i = 0; i < nb; ++i) {
    g.x += u[layout.cell_dof(cell_id, i)] * grads[i].x / h[0];
    g.y += u[layout.cell_dof(cell_id, i)] * grads[i].y / h[1];
  }
  return g;
}

/// Value of a Q1 field inside a structured-mesh cell at reference coordinates.
inline double cg_value(const DofLayout& layout, const std::vector<double>& u, int ix, int iy,
                       const Vec2& xhat) {
  const auto dofs = layout.cell_vertices(ix, iy);
  const double a = (1.0 - xhat.x) * (1.0 - xhat.y);
  const double b = xhat.x * (1.0 - xhat.y);
  const double c = (1.0 - xhat.x) * xhat.y;
  const double d = xhat.x * xhat.y;
  return a * u[dofs[0]] + b * u[dofs[1]] + c * u[dofs[2]] + d * u[dofs[3]];
}

}  // namespace gw
