#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "gw/estimator.hpp"
#include "gw/mesh.hpp"
#include "gw/transport.hpp"

namespace gw {

/// Velocity/divergence accessors that work on any refinement of the flow mesh.
using MeshVelocityFn = std::function<Vec2(const Mesh&, int, const Vec2&)>;
using MeshDivergenceFn = std::function<double(const Mesh&, int)>;
using OrderingFn = std::function<std::vector<int>(const Mesh&)>;

struct TransportProblem {
  TransportCoeffs coeffs;
  MeshVelocityFn velocity;
  MeshDivergenceFn divergence = [](const Mesh&, int) { return 0.0; };
};

inline TransportProblem problem_from_rt0(const RT0Velocity& q, TransportCoeffs coeffs) {
  TransportProblem p;
  p.coeffs = std::move(coeffs);
  p.velocity = [&q](const Mesh& mesh, int cell, const Vec2& x) { return q.eval(mesh, cell, x); };
  p.divergence = [&q](const Mesh& mesh, int cell) {
    return q.divergence(q.coarse_index(mesh, cell));
  };
  return p;
}

struct AdaptConfig {
  double p_r = 20.0;   // refine fraction (percent of squared estimator)
  double p_c = 10.0;   // coarsen fraction
  double tol = 0.0;    // stop when eta <= tol (0: disabled)
  int l_max = 10;      // maximum number of adaptation steps
  double p_osc = 0.0;  // stop when overshoot metric < p_osc (0: disabled)
  double u_hat = 1.0;  // physical solution ceiling
  double dof_cap = 5e6;
};

struct TraceRow {
  int level = 0;
  int dofs = 0;
  double max_peclet = 0.0;         // over all leaf cells
  double eta = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  int iterations = 0;
  double t_assemble = 0.0;
  double t_solve = 0.0;
  double marked_max_peclet = 0.0;  // over the refine-marked cells
  bool converged = true;
};

struct AdaptiveResult {
  Mesh mesh;
  DofLayout layout;
  DiscreteField u;
  std::vector<TraceRow> trace;
  bool solver_failed = false;
};

/// h-adaptive DG solve loop: assemble + solve, estimate, stop on tolerance /
/// overshoot / level or DOF budget, otherwise mark by error fraction and adapt.
inline AdaptiveResult adaptive_solve(const Mesh& mesh0, int degree,
                                     const TransportProblem& problem, const AdaptConfig& acfg,
                                     const SolverConfig& scfg, const DGOptions& dg_base = {},
                                     const OrderingFn& ordering = nullptr) {
  AdaptiveResult result{mesh0, DofLayout(), DiscreteField{}, {}, false};
  Mesh mesh = mesh0;
  for (int level = 0;; ++level) {
    const VelocityFn vel = [&](int cell, const Vec2& x) {
      return problem.velocity(mesh, cell, x);
    };
    const DivergenceFn divq = [&](int cell) { return problem.divergence(mesh, cell); };
    const std::vector<BoundaryType> bclass = classify_boundary(mesh, vel);

    DGOptions opt = dg_base;
    if (ordering) opt.cell_order = ordering(mesh);

    TraceRow row;
    row.level = level;
    detail::Stopwatch t_asm;
    TransportSystem sys = assemble_dg(mesh, degree, vel, problem.coeffs, bclass, opt);
    row.t_assemble = t_asm.seconds();
    row.dofs = sys.layout.n_dofs();

    DiscreteField u;
    const SolveReport rep = solve_transport(sys, scfg, u);
    row.t_solve = rep.seconds;
    row.iterations = rep.iterations;
    row.converged = rep.converged;

    const RangeSample range = dg_range(mesh, sys.layout, degree, u.coeffs);
    row.u_min = range.u_min;
    row.u_max = range.u_max;
    row.max_peclet = max_mesh_peclet(mesh, vel, problem.coeffs);

    const std::vector<CellIndicator> ind = cell_indicators(
        mesh, sys.layout, degree, u.coeffs, vel, divq, problem.coeffs, bclass, opt.c_gamma);
    row.eta = global_estimator(ind);
    std::vector<double> eta(ind.size());
    for (size_t i = 0; i < ind.size(); ++i) eta[i] = ind[i].eta();

    RefinementMarks marks;
    marks.refine = mark_refine(mesh, eta, acfg.p_r);
    marks.coarsen = mark_coarsen(mesh, eta, acfg.p_c);
    for (int id : marks.refine) marks.coarsen.erase(id);
    for (int id : marks.refine)
      row.marked_max_peclet =
          std::max(row.marked_max_peclet,
                   mesh_peclet(mesh, id, norm(vel(id, mesh.cell_center(id))), problem.coeffs));

    result.mesh = mesh;
    result.layout = sys.layout;
    result.u = std::move(u);
    result.trace.push_back(row);

    if (!rep.converged) {
      result.solver_failed = true;
      return result;
    }
    const double osc = overshoot_metric(range.u_min, range.u_max, acfg.u_hat);
    if (acfg.tol > 0.0 && row.eta <= acfg.tol) return result;
    if (acfg.p_osc > 0.0 && osc < acfg.p_osc) return result;
    if (level >= acfg.l_max) return result;
    if (marks.refine.empty()) return result;

    Mesh next = mesh.adapt(marks);
    const double next_dofs =
        static_cast<double>(next.n_leaves()) * (degree + 1) * (degree + 1);
    if (next_dofs > acfg.dof_cap) return result;
    mesh = next;
  }
}

/// Trace CSV matching the per-level adaptation tables.
inline void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
  std::fprintf(f, "L,DOF,maxPeclet,eta,u_min,u_max,IT,T_assemble,T_solve\n");
  for (const TraceRow& r : trace)
    std::fprintf(f, "%d,%d,%.6g,%.10g,%.10g,%.10g,%d,%.4g,%.4g\n", r.level, r.dofs,
                 r.max_peclet, r.eta, r.u_min, r.u_max, r.iterations, r.t_assemble, r.t_solve);
  std::fclose(f);
}

}  // namespace gw
