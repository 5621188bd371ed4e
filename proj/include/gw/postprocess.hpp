#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gw/basis.hpp"
#include "gw/dof.hpp"
#include "gw/mesh.hpp"
#include "gw/precond.hpp"
#include "gw/quadrature.hpp"
#include "gw/solvers.hpp"
#include "gw/transport.hpp"

namespace gw {

struct ProjectionConfig {
  double eps_h = -1.0;      // negative: use the default 0.5 * (cell diagonal)^2
  double reduction = 1e-8;  // CG + block SSOR solve tolerance
};

/// Projects a DG solution onto continuous Q1 through
///   (eps_h grad u, grad v) + (u, v) = (u_DG, v)   for all v,
/// without boundary conditions. The added diffusion damps DG over- and
/// undershoots at the price of smearing layers over a width O(sqrt(eps_h)).
inline std::vector<double> diffusive_l2_projection(const Mesh& mesh, const DofLayout& dg_layout,
                                                   int k, const std::vector<double>& u_dg,
                                                   const ProjectionConfig& cfg = {}) {
  if (!mesh.is_structured())
    throw std::runtime_error("diffusive_l2_projection: requires the structured mesh");
  const DofLayout cg_layout = DofLayout::cg_q1(mesh);
  const auto h = mesh.cell_size(0);
  const double diag = std::hypot(h[0], h[1]);
  const double eps_h = cfg.eps_h < 0.0 ? 0.5 * diag * diag : cfg.eps_h;

  BlockMatrixBuilder builder(cg_layout.n_dofs(), 1);
  std::vector<double> rhs(cg_layout.n_dofs(), 0.0);
  QkBasis q1(1);
  QkBasis dg_basis(k);
  const QuadratureRule quad = gauss_rule(k + 1);
  const double vol = h[0] * h[1];
  std::vector<double> vals;
  std::vector<Vec2> grads;

  for (int id : mesh.leaf_ids()) {
    const Cell& c = mesh.cell(id);
    const auto dofs = cg_layout.cell_vertices(c.ix, c.iy);
    double ke[4][4] = {};
    double fe[4] = {};
    for (size_t qp = 0; qp < quad.points.size(); ++qp) {
      q1.eval(quad.points[qp], vals, grads);
      for (Vec2& g : grads) {
        g.x /= h[0];
        g.y /= h[1];
      }
      const double wq = quad.weights[qp] * vol;
      const double udg = dg_value(dg_layout, dg_basis, u_dg, id, quad.points[qp]);
      for (int i = 0; i < 4; ++i) {
        fe[i] += wq * udg * vals[i];
        for (int j = 0; j < 4; ++j)
          ke[i][j] += wq * (eps_h * dot(grads[i], grads[j]) + vals[i] * vals[j]);
      }
    }
    for (int i = 0; i < 4; ++i) {
      rhs[dofs[i]] += fe[i];
      for (int j = 0; j < 4; ++j) builder.add(dofs[i], dofs[j], 0, 0, ke[i][j]);
    }
  }
  const BlockSparseMatrix a = builder.build();
  BlockSSOR ssor(a);
  std::vector<double> u;
  const SolveReport rep = cg(a, rhs, u, ssor, cfg.reduction, 20000);
  if (!rep.converged)
    throw std::runtime_error("diffusive_l2_projection: CG did not converge");
  return u;
}

}  // namespace gw
