#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gw/adaptive.hpp"
#include "gw/estimator.hpp"
#include "gw/flow.hpp"
#include "gw/mesh.hpp"
#include "gw/postprocess.hpp"
#include "gw/problems.hpp"
#include "gw/random_field.hpp"
#include "gw/transport.hpp"

namespace gw {

namespace detail {

inline bool cell_intersects_ball(const Mesh& mesh, int cell_id, const Vec2& center,
                                 double radius) {
  const Vec2 lo = mesh.cell_lower(cell_id);
  const auto h = mesh.cell_size(mesh.cell(cell_id).level);
  const double cx = std::clamp(center.x, lo.x, lo.x + h[0]);
  const double cy = std::clamp(center.y, lo.y, lo.y + h[1]);
  return norm(Vec2{cx, cy} - center) < radius;
}

}  // namespace detail

/// L2 distance of a DG field to a reference, quadrature order k+2; cells
/// touching the excluded ball are skipped entirely.
inline double l2_error(const Mesh& mesh, const DofLayout& layout, int k,
                       const std::vector<double>& u, const ScalarFn& reference,
                       bool has_excluded = false, Vec2 excluded_center = {0.0, 0.0},
                       double excluded_radius = 0.0) {
  QkBasis basis(k);
  const QuadratureRule quad = gauss_rule(k + 2);
  double acc = 0.0;
  for (int id : mesh.leaf_ids()) {
    if (has_excluded &&
        detail::cell_intersects_ball(mesh, id, excluded_center, excluded_radius))
      continue;
    const double vol = mesh.cell_volume(id);
    for (size_t qp = 0; qp < quad.points.size(); ++qp) {
      const Vec2 x = mesh.from_reference(id, quad.points[qp]);
      const double d = dg_value(layout, basis, u, id, quad.points[qp]) - reference(x);
      acc += quad.weights[qp] * vol * d * d;
    }
  }
  return std::sqrt(acc);
}

inline double l2_error(const Mesh& mesh, const DofLayout& layout, int k,
                       const std::vector<double>& u, const AnalyticProblem& p) {
  return l2_error(mesh, layout, k, u, p.exact, p.has_excluded, p.excluded_center,
                  p.excluded_radius);
}

/// L2 distance of a Q1 nodal field to a reference (via the DG(1) scatter).
inline double l2_error_cg(const Mesh& mesh, const std::vector<double>& u,
                          const AnalyticProblem& p) {
  const std::vector<double> dg1 = scatter_cg_to_dg(mesh, DofLayout::cg_q1(mesh), u);
  return l2_error(mesh, DofLayout::dg(mesh, 1), 1, dg1, p);
}

enum class Method { sdfem, dg, dg_l2 };

struct StudyRow {
  int level = 0;
  int dofs = 0;
  double error = 0.0;
  double t_assemble = 0.0;
  double t_solve = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Solves an analytic benchmark with one method on a given structured mesh.
/// Returns the DG or scattered-to-DG(1) coefficients plus the study row.
struct BenchSolution {
  DofLayout layout;
  int degree = 1;
  std::vector<double> u;
  StudyRow row;
};

inline BenchSolution solve_benchmark(const Mesh& mesh, const AnalyticProblem& p, Method method,
                                     int degree, const SolverConfig& scfg,
                                     bool dirichlet_everywhere = true) {
  BenchSolution out;
  const VelocityFn vel = constant_velocity(p.q);
  const DivergenceFn divq = [](int) { return 0.0; };
  const std::vector<BoundaryType> bclass = classify_boundary(mesh, vel);
  detail::Stopwatch t_asm;
  if (method == Method::sdfem) {
    SDFEMOptions opt;
    opt.dirichlet_all_boundary = dirichlet_everywhere;
    TransportSystem sys = assemble_sdfem(mesh, vel, divq, p.coeffs, bclass, opt);
    out.row.t_assemble = t_asm.seconds();
    out.row.dofs = sys.layout.n_dofs();
    DiscreteField f;
    const SolveReport rep = solve_transport(sys, scfg, f);
    out.row.t_solve = rep.seconds;
    out.row.iterations = rep.iterations;
    out.row.converged = rep.converged;
    out.layout = DofLayout::dg(mesh, 1);
    out.degree = 1;
    out.u = scatter_cg_to_dg(mesh, sys.layout, f.coeffs);
    return out;
  }
  DGOptions opt;
  opt.dirichlet = dirichlet_everywhere ? DirichletMode::all_faces : DirichletMode::inflow_only;
  TransportSystem sys = assemble_dg(mesh, degree, vel, p.coeffs, bclass, opt);
  out.row.t_assemble = t_asm.seconds();
  out.row.dofs = sys.layout.n_dofs();
  DiscreteField f;
  const SolveReport rep = solve_transport(sys, scfg, f);
  out.row.t_solve = rep.seconds;
  out.row.iterations = rep.iterations;
  out.row.converged = rep.converged;
  if (method == Method::dg_l2) {
    const std::vector<double> proj =
        diffusive_l2_projection(mesh, sys.layout, degree, f.coeffs);
    out.layout = DofLayout::dg(mesh, 1);
    out.degree = 1;
    out.u = scatter_cg_to_dg(mesh, DofLayout::cg_q1(mesh), proj);
  } else {
    out.layout = sys.layout;
    out.degree = degree;
    out.u = std::move(f.coeffs);
  }
  return out;
}

/// Global-refinement convergence study: n0 cells per axis at level 0, doubled
/// per level, recording DOF, L2 error, timings, and iteration counts.
inline std::vector<StudyRow> convergence_study(const AnalyticProblem& p, Method method,
                                               int degree, int n0, int levels,
                                               const SolverConfig& scfg) {
  std::vector<StudyRow> rows;
  for (int level = 0; level < levels; ++level) {
    const int n = n0 << level;
    Mesh mesh(GridSpec{{1.0, 1.0}, {n, n}});
    BenchSolution sol = solve_benchmark(mesh, p, method, degree, scfg);
    sol.row.level = level;
    sol.row.error = l2_error(mesh, sol.layout, sol.degree, sol.u, p);
    rows.push_back(sol.row);
  }
  return rows;
}

// --- forward transport scenario --------------------------------------------

/// Parameter set of the heterogeneous forward-transport scenario: a
/// log-Gaussian conductivity field on a square aquifer, a head gradient from
/// left to right, and one injection well. The transported quantity is the
/// time-integrated concentration, with range [0, u_hat].
struct ScenarioSpec {
  GridSpec grid{{100.0, 100.0}, {100, 100}};
  GeoStatParams geo{-6.0, 1.0, {10.0, 10.0}, 0};
  double phi_left = 100.0;
  double phi_right = 99.5;
  std::vector<WellSpec> wells;
  double theta = 0.3;
  double alpha_l = 1e-3;
  double alpha_t = 1e-4;
  double dm = 2e-9;
  double u_hat = 100.0;  // = c_inj * T_inj
};

inline ScenarioSpec forward2d_scenario(bool desk_scale = false, std::uint64_t seed = 0) {
  ScenarioSpec s;
  if (desk_scale) s.grid.cells_per_axis = {50, 50};
  s.geo.seed = seed;
  WellSpec w;
  w.kind = WellKind::injection;
  w.box_lo = {24.0, 48.0};
  w.box_hi = {26.0, 50.0};
  w.rate = 5e-4;
  w.conc = 1.0;
  w.t_inj = 100.0;
  s.wells.push_back(w);
  return s;
}

/// Everything the transport stage needs from the flow stage.
struct FlowStage {
  Mesh mesh;
  ConductivityField kf;
  std::vector<double> head;  // per cell, row-major
  RT0Velocity velocity;
  SolveReport report;
};

inline FlowBC scenario_flow_bc(const ScenarioSpec& s) {
  FlowBC bc;
  bc.left = FlowBCSide::dirichlet(s.phi_left);
  bc.right = FlowBCSide::dirichlet(s.phi_right);
  bc.bottom = FlowBCSide::neumann(0.0);
  bc.top = FlowBCSide::neumann(0.0);
  return bc;
}

/// Runs the flow stage of the scenario: sample the conductivity field, solve
/// the cell-centered flow system, reconstruct the velocity.
inline FlowStage solve_scenario_flow(const ScenarioSpec& s, bool with_wells = true,
                                     double reduction = 1e-12) {
  FlowStage stage{Mesh(s.grid), ConductivityField{}, {}, RT0Velocity{}, SolveReport{}};
  const std::vector<double> y = sample_gaussian_field(s.geo, s.grid);
  stage.kf = build_conductivity(y, s.grid, s.wells);
  const FlowBC bc = scenario_flow_bc(s);
  BlockSparseMatrix a;
  std::vector<double> rhs;
  assemble_ccfv(stage.mesh, stage.kf, with_wells ? s.wells : std::vector<WellSpec>{}, bc, a,
                rhs);
  BlockSSOR ssor(a);
  stage.report = cg(a, rhs, stage.head, ssor, reduction, 100000);
  // iterative refinement drives the cell balances to rounding level, which the
  // reconstructed velocity inherits as its divergence defect
  for (int sweep = 0; sweep < 3; ++sweep) {
    std::vector<double> r;
    a.residual(rhs, stage.head, r);
    std::vector<double> e;
    cg(a, r, e, ssor, reduction, 100000);
    for (size_t i = 0; i < r.size(); ++i) stage.head[i] += e[i];
  }
  const std::vector<double> fluxes = ccfv_face_fluxes(stage.mesh, stage.kf, bc, stage.head);
  stage.velocity = rt0_reconstruct(stage.mesh, fluxes);
  return stage;
}

/// Transport coefficients of the scenario: Scheidegger dispersion, the
/// injected pulse as a time-integrated source in the well cells, sinks from
/// extraction wells via the reaction term.
inline TransportCoeffs scenario_transport_coeffs(const ScenarioSpec& s) {
  TransportCoeffs c;
  c.model = DispersionModel::scheidegger;
  c.theta = s.theta;
  c.alpha_l = s.alpha_l;
  c.alpha_t = s.alpha_t;
  c.dm = s.dm;
  const std::vector<WellSpec> wells = s.wells;
  c.source = [wells](Vec2 x) {
    double v = 0.0;
    for (const WellSpec& w : wells)
      if (w.kind == WellKind::injection && x.x >= w.box_lo[0] && x.x <= w.box_hi[0] &&
          x.y >= w.box_lo[1] && x.y <= w.box_hi[1])
        v += w.rate_density() * w.conc * w.t_inj;
    return v;
  };
  c.mu = [wells](Vec2 x) {
    double v = 0.0;
    for (const WellSpec& w : wells)
      if (w.kind == WellKind::extraction && x.x >= w.box_lo[0] && x.x <= w.box_hi[0] &&
          x.y >= w.box_lo[1] && x.y <= w.box_hi[1])
        v += w.rate_density();
    return v;
  };
  c.dirichlet = [](Vec2) { return 0.0; };
  return c;
}

// --- cut lines --------------------------------------------------------------

struct LineSample {
  std::vector<double> arc;
  std::vector<double> value;
};

/// Samples a scalar evaluator along the segment p0 -> p1 at n equispaced
/// points (cell-interior evaluation via locate()).
inline LineSample sample_line(const Mesh& mesh, const DofLayout& layout, int k,
                              const std::vector<double>& u, Vec2 p0, Vec2 p1, int n) {
  QkBasis basis(k);
  LineSample out;
  const double len = norm(p1 - p0);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    Vec2 x = p0 + t * (p1 - p0);
    // nudge endpoints inside the domain
    x.x = std::clamp(x.x, 1e-12, mesh.spec().extents[0] * (1.0 - 1e-12));
    x.y = std::clamp(x.y, 1e-12, mesh.spec().extents[1] * (1.0 - 1e-12));
    const int cell = mesh.locate(x);
    out.arc.push_back(t * len);
    out.value.push_back(dg_value(layout, basis, u, cell, mesh.to_reference(cell, x)));
  }
  return out;
}

inline void write_line_csv(const std::string& path, const LineSample& s) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_line_csv: cannot open " + path);
  std::fprintf(f, "arc_length,value\n");
  for (size_t i = 0; i < s.arc.size(); ++i)
    std::fprintf(f, "%.10g,%.10g\n", s.arc[i], s.value[i]);
  std::fclose(f);
}

/// Arc position where a sampled line first crosses a level value, by linear
/// interpolation; negative when it never crosses.
inline double first_crossing(const LineSample& s, double level) {
  for (size_t i = 1; i < s.arc.size(); ++i) {
    const double a = s.value[i - 1] - level;
    const double b = s.value[i] - level;
    if ((a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0)) {
      const double t = a / (a - b);
      return s.arc[i - 1] + t * (s.arc[i] - s.arc[i - 1]);
    }
  }
  return -1.0;
}

inline void write_study_csv(const std::string& path, const std::vector<StudyRow>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_study_csv: cannot open " + path);
  std::fprintf(f, "L,DOF,L2_error,rate,IT,T_assemble,T_solve\n");
  for (size_t i = 0; i < rows.size(); ++i) {
    const double rate =
        i == 0 ? 0.0 : std::log2(rows[i - 1].error / std::max(rows[i].error, 1e-300));
    std::fprintf(f, "%d,%d,%.8g,%.3f,%d,%.4g,%.4g\n", rows[i].level, rows[i].dofs,
                 rows[i].error, rate, rows[i].iterations, rows[i].t_assemble,
                 rows[i].t_solve);
  }
  std::fclose(f);
}

}  // namespace gw
