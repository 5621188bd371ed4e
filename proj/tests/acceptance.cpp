// Acceptance gate: one pass/fail line per criterion, exit code = #failures.
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <set>
#include <vector>

#include "gw/adaptive.hpp"
#include "gw/bench.hpp"
#include "gw/estimator.hpp"
#include "gw/flow.hpp"
#include "gw/mesh.hpp"
#include "gw/postprocess.hpp"
#include "gw/problems.hpp"
#include "gw/random_field.hpp"
#include "gw/transport.hpp"

using namespace gw;

namespace {

int failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %d (%s): %s  [%s]\n", criterion, name, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<int> lexicographic_order(const Mesh& mesh) {
  std::vector<int> order = mesh.leaf_ids();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const Vec2 ca = mesh.cell_center(a), cb = mesh.cell_center(b);
    if (ca.y != cb.y) return ca.y < cb.y;
    return ca.x < cb.x;
  });
  return order;
}

double residual_reduction(const BlockSparseMatrix& a, const std::vector<double>& b,
                          const std::vector<double>& x) {
  std::vector<double> r;
  a.residual(b, x, r);
  double rn = 0.0, bn = 0.0;
  for (double v : r) rn += v * v;
  for (double v : b) bn += v * v;
  return std::sqrt(rn / bn);
}

// --- criterion 1: downwind ordering speedup ---------------------------------

void criterion1() {
  const AnalyticProblem p = john_problem(1e-5);
  const VelocityFn vel = constant_velocity(p.q);
  const DivergenceFn divq = [](int) { return 0.0; };
  SolverConfig scfg;
  scfg.method = KrylovMethod::bicgstab;
  scfg.precond = PrecondKind::ssor;
  scfg.reduction = 1e-8;
  scfg.max_iter = 20000;

  Mesh mesh({{1.0, 1.0}, {32, 32}});
  bool pass = true;
  std::string detail;
  std::mt19937 rng(12345);
  for (int level = 0; level <= 4; ++level) {
    const auto bclass = classify_boundary(mesh, vel);
    DGOptions base;
    base.dirichlet = DirichletMode::all_faces;

    if (level >= 2) {
      // downwind order from the pseudo-head decreasing along q
      std::vector<double> head(mesh.n_leaves());
      for (int id : mesh.leaf_ids()) {
        const Vec2 c = mesh.cell_center(id);
        head[mesh.leaf_index(id)] = -(p.q.x * c.x + p.q.y * c.y);
      }
      std::vector<int> rand_order = mesh.leaf_ids();
      std::shuffle(rand_order.begin(), rand_order.end(), rng);
      const std::vector<std::vector<int>> orders = {downwind_order(mesh, head),
                                                    lexicographic_order(mesh), rand_order};
      int its[3] = {};
      int dofs = 0;
      for (int o = 0; o < 3; ++o) {
        DGOptions opt = base;
        opt.cell_order = orders[o];
        const TransportSystem sys = assemble_dg(mesh, 1, vel, p.coeffs, bclass, opt);
        dofs = sys.layout.n_dofs();
        DiscreteField u;
        const SolveReport rep = solve_transport(sys, scfg, u);
        its[o] = rep.converged ? rep.iterations : scfg.max_iter;
      }
      detail += fmt("L%d dof=%d it(down/lex/rand)=%d/%d/%d ", level, dofs, its[0], its[1],
                    its[2]);
      if (!(its[0] <= its[1] && its[1] <= its[2])) pass = false;
      if (dofs <= 300000 && its[0] > 8) pass = false;
    }

    // advance the adaptive hierarchy with the plain assembly
    const TransportSystem sys = assemble_dg(mesh, 1, vel, p.coeffs, bclass, base);
    DiscreteField u;
    if (!solve_transport(sys, scfg, u).converged) {
      pass = false;
      detail += "hierarchy solve failed ";
      break;
    }
    const auto ind = cell_indicators(mesh, sys.layout, 1, u.coeffs, vel, divq, p.coeffs,
                                     bclass, base.c_gamma);
    std::vector<double> eta(ind.size());
    for (size_t i = 0; i < ind.size(); ++i) eta[i] = ind[i].eta();
    RefinementMarks marks;
    marks.refine = mark_refine(mesh, eta, 20.0);
    mesh = mesh.adapt(marks);
  }
  report(1, "downwind ordering speedup", pass, detail);
}

// --- criterion 2: hyperbolic-limit block triangularity ----------------------

void criterion2() {
  ScenarioSpec s = forward2d_scenario(true, 1);
  const FlowStage stage = solve_scenario_flow(s, /*with_wells=*/false);
  const Mesh& mesh = stage.mesh;
  const TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(0.0);
  const VelocityFn vel = velocity_from_rt0(mesh, stage.velocity);
  DGOptions opt;
  opt.cell_order = downwind_order(mesh, stage.head);
  const TransportSystem sys = assemble_dg(mesh, 1, vel, coeffs, classify_boundary(mesh, vel),
                                          opt);
  std::vector<int> identity(sys.a.n_block_rows());
  for (size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  const bool tri = is_block_lower_triangular(sys.a, identity);
  std::vector<double> b(sys.a.n_rows(), 1.0), z;
  BlockSSOR ssor(sys.a);
  ssor.apply(z, b);
  const double red = residual_reduction(sys.a, b, z);
  const bool pass = tri && red <= 1e-8;
  report(2, "hyperbolic-limit block triangularity", pass,
         fmt("triangular=%s one-sweep reduction=%.3e", tri ? "yes" : "no", red));
}

// --- criterion 3: divergence-free RT0 reconstruction ------------------------

void criterion3() {
  ScenarioSpec s = forward2d_scenario(true, 1);
  const FlowStage stage = solve_scenario_flow(s, /*with_wells=*/false);
  const std::vector<double> flux =
      ccfv_face_fluxes(stage.mesh, stage.kf, scenario_flow_bc(s), stage.head);
  double max_flux = 0.0;
  for (double v : flux) max_flux = std::max(max_flux, std::abs(v));
  const double h = s.grid.extents[0] / s.grid.cells_per_axis[0];
  double max_div = 0.0;
  for (int i = 0; i < stage.velocity.nx() * stage.velocity.ny(); ++i)
    max_div = std::max(max_div, std::abs(stage.velocity.divergence(i)));
  const double bound = 1e-10 * max_flux / h;
  report(3, "pointwise divergence-free velocity", max_div <= bound,
         fmt("max|div q|=%.3e bound=%.3e", max_div, bound));
}

// --- criterion 4: smooth-problem convergence rates --------------------------

void criterion4() {
  const AnalyticProblem p = john_problem(1.0);
  SolverConfig scfg;
  scfg.reduction = 1e-8;
  scfg.max_iter = 50000;
  bool pass = true;
  std::string detail;
  struct Case {
    Method method;
    int degree;
    double min_rate;
    const char* name;
  };
  for (const Case& c : {Case{Method::sdfem, 1, 1.8, "sdfem"}, Case{Method::dg, 1, 1.8, "dg1"},
                        Case{Method::dg, 2, 2.7, "dg2"}}) {
    const std::vector<StudyRow> rows = convergence_study(p, c.method, c.degree, 16, 4, scfg);
    const double rate = std::log2(rows[rows.size() - 2].error / rows.back().error);
    detail += fmt("%s rate=%.2f ", c.name, rate);
    if (!(rate >= c.min_rate) || !rows.back().converged) pass = false;
  }
  report(4, "smooth convergence rates", pass, detail);
}

// --- criterion 5: overshoot reduction by projection -------------------------

void criterion5() {
  const AnalyticProblem p = lopez_problem(1e-5, 5e-5);
  Mesh mesh({{1.0, 1.0}, {32, 32}});
  SolverConfig scfg;
  scfg.reduction = 1e-10;
  scfg.max_iter = 50000;
  const BenchSolution dg = solve_benchmark(mesh, p, Method::dg, 1, scfg,
                                           /*dirichlet_everywhere=*/false);
  const RangeSample rdg = dg_range(mesh, dg.layout, 1, dg.u);
  const double os_dg = overshoot_metric(rdg.u_min, rdg.u_max, 1.0);

  const std::vector<double> proj = diffusive_l2_projection(mesh, dg.layout, 1, dg.u);
  const RangeSample rp = cg_range(proj);
  const double os_proj = overshoot_metric(rp.u_min, rp.u_max, 1.0);

  const std::vector<double> proj_dg = scatter_cg_to_dg(mesh, DofLayout::cg_q1(mesh), proj);
  const DofLayout dg1 = DofLayout::dg(mesh, 1);
  const LineSample line_dg = sample_line(mesh, dg.layout, 1, dg.u, {0.0, 1.0}, {1.0, 0.0}, 801);
  const LineSample line_pr = sample_line(mesh, dg1, 1, proj_dg, {0.0, 1.0}, {1.0, 0.0}, 801);
  const double c_dg = first_crossing(line_dg, 0.5);
  const double c_pr = first_crossing(line_pr, 0.5);
  const double shift = (c_dg < 0.0 || c_pr < 0.0) ? 1e300 : std::abs(c_dg - c_pr);
  const double hdiag = std::sqrt(2.0) / 32.0;

  const bool pass = os_dg >= 0.15 && os_dg <= 0.35 && os_proj <= 0.06 && shift <= hdiag;
  report(5, "projection overshoot reduction", pass,
         fmt("dg=%.3f proj=%.3f front-shift=%.4f (max %.4f)", os_dg, os_proj, shift, hdiag));
}

// --- criteria 6/7 share the scenario transport pipeline ---------------------

struct ScenarioRun {
  ScenarioSpec spec;
  FlowStage stage;
  TransportCoeffs coeffs;
};

ScenarioRun make_scenario(std::uint64_t seed) {
  ScenarioSpec spec = forward2d_scenario(true, seed);
  FlowStage stage = solve_scenario_flow(spec);
  TransportCoeffs coeffs = scenario_transport_coeffs(spec);
  return {std::move(spec), std::move(stage), std::move(coeffs)};
}

double scenario_dg_overshoot(const ScenarioRun& run, int degree, bool project,
                             const SolverConfig& scfg) {
  const Mesh& mesh = run.stage.mesh;
  const VelocityFn vel = velocity_from_rt0(mesh, run.stage.velocity);
  DGOptions opt;
  opt.cell_order = downwind_order(mesh, run.stage.head);
  const TransportSystem sys =
      assemble_dg(mesh, degree, vel, run.coeffs, classify_boundary(mesh, vel), opt);
  DiscreteField u;
  if (!solve_transport(sys, scfg, u).converged) return 1e300;
  if (project) {
    const std::vector<double> p = diffusive_l2_projection(mesh, sys.layout, degree, u.coeffs);
    const RangeSample r = cg_range(p);
    return overshoot_metric(r.u_min, r.u_max, run.spec.u_hat);
  }
  const RangeSample r = dg_range(mesh, sys.layout, degree, u.coeffs);
  return overshoot_metric(r.u_min, r.u_max, run.spec.u_hat);
}

void criterion6() {
  const ScenarioRun run = make_scenario(1);
  const Mesh& mesh = run.stage.mesh;
  SolverConfig scfg;
  scfg.reduction = 1e-8;
  scfg.max_iter = 50000;

  const VelocityFn vel = velocity_from_rt0(mesh, run.stage.velocity);
  const DivergenceFn divq = divergence_from_rt0(mesh, run.stage.velocity);
  const TransportSystem ssys =
      assemble_sdfem(mesh, vel, divq, run.coeffs, classify_boundary(mesh, vel));
  DiscreteField usd;
  const bool sd_ok = solve_transport(ssys, scfg, usd).converged;
  const RangeSample rs = cg_range(usd.coeffs);
  const double os_sdfem = overshoot_metric(rs.u_min, rs.u_max, run.spec.u_hat);

  const double os_dg1 = scenario_dg_overshoot(run, 1, false, scfg);
  const double os_dg1p = scenario_dg_overshoot(run, 1, true, scfg);
  const double os_dg3 = scenario_dg_overshoot(run, 3, false, scfg);
  const double os_dg3p = scenario_dg_overshoot(run, 3, true, scfg);

  const bool pass = sd_ok && os_dg1p < os_sdfem && os_sdfem < os_dg1 && os_dg3p < os_sdfem &&
                    os_sdfem < os_dg3 && os_dg3p < os_dg1p;
  report(6, "forward-2D method comparison", pass,
         fmt("dg1=%.4f dg1+l2=%.4f sdfem=%.4f dg3=%.4f dg3+l2=%.4f", os_dg1, os_dg1p, os_sdfem,
             os_dg3, os_dg3p));
}

void criterion7() {
  const ScenarioRun run = make_scenario(8);
  const FlowStage& stage = run.stage;
  TransportProblem problem = problem_from_rt0(stage.velocity, run.coeffs);
  const OrderingFn ordering = [&stage](const Mesh& tm) {
    const std::vector<double> h =
        leaf_head_values(tm, stage.mesh, stage.head, stage.velocity, stage.kf);
    return downwind_order(tm, h);
  };
  AdaptConfig acfg;
  acfg.p_r = 20.0;
  acfg.p_c = 10.0;
  acfg.u_hat = run.spec.u_hat;
  acfg.l_max = 10;
  SolverConfig scfg;
  scfg.reduction = 1e-8;
  scfg.max_iter = 50000;
  const AdaptiveResult res = adaptive_solve(stage.mesh, 1, problem, acfg, scfg, {}, ordering);

  int best_run = 1, cur = 1;
  std::vector<double> osc;
  for (const TraceRow& r : res.trace) osc.push_back(overshoot_metric(r.u_min, r.u_max, acfg.u_hat));
  for (size_t i = 1; i < osc.size(); ++i) {
    cur = osc[i] < osc[i - 1] ? cur + 1 : 1;
    best_run = std::max(best_run, cur);
  }
  const double p0 = res.trace.front().marked_max_peclet;
  const double pl = res.trace.back().marked_max_peclet;
  const bool peclet_drop = pl > 0.0 && p0 / pl >= 4.0;
  const bool pass = !res.solver_failed && best_run >= 4 && peclet_drop;
  report(7, "adaptive monotonicity", pass,
         fmt("overshoot-decrease run=%d levels=%zu markedPeclet %.1f -> %.1f (need 4x drop)",
             best_run, osc.size(), p0, pl));
}

// --- criterion 8: marking oracle equivalence --------------------------------

std::set<int> oracle_refine(const Mesh& mesh, const std::vector<double>& eta, double p_r) {
  double total = 0.0;
  for (double e : eta) total += e * e;
  std::set<int> marks;
  if (total == 0.0) return marks;
  const double target = p_r / 100.0 * total - 1e-12 * total;
  std::vector<double> distinct = eta;
  std::sort(distinct.begin(), distinct.end(), std::greater<double>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  double thr = distinct.back(), mass = 0.0;
  for (double v : distinct) {
    for (double e : eta)
      if (e == v) mass += e * e;
    if (mass >= target) {
      thr = v;
      break;
    }
  }
  for (int id : mesh.leaf_ids()) {
    const double e = eta[mesh.leaf_index(id)];
    if (e >= thr && e > 0.0) marks.insert(id);
  }
  return marks;
}

std::set<int> oracle_coarsen(const Mesh& mesh, const std::vector<double>& eta, double p_c) {
  std::set<int> marks;
  if (p_c <= 0.0) return marks;
  double total = 0.0;
  for (double e : eta) total += e * e;
  if (total == 0.0) return marks;
  const double target = p_c / 100.0 * total + 1e-12 * total;
  std::vector<double> distinct = eta;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  double thr = -1.0, mass = 0.0;
  for (double v : distinct) {
    for (double e : eta)
      if (e == v) mass += e * e;
    if (mass > target) break;
    thr = v;
  }
  if (thr < 0.0) return marks;
  for (int id : mesh.leaf_ids())
    if (eta[mesh.leaf_index(id)] <= thr) marks.insert(id);
  return marks;
}

void criterion8() {
  Mesh mesh({{1.0, 1.0}, {4, 3}});
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> uni(0.01, 1.0);
  std::uniform_int_distribution<int> size_dist(1, 12);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> eta(12, 0.0);
    const int n = size_dist(rng);
    for (int i = 0; i < n; ++i) eta[i] = uni(rng);
    std::shuffle(eta.begin(), eta.end(), rng);
    for (double p_r : {5.0, 20.0, 50.0, 95.0})
      if (mark_refine(mesh, eta, p_r) != oracle_refine(mesh, eta, p_r)) ++mismatches;
    for (double p_c : {0.5, 5.0, 10.0})
      if (mark_coarsen(mesh, eta, p_c) != oracle_coarsen(mesh, eta, p_c)) ++mismatches;
  }
  report(8, "marking oracle equivalence", mismatches == 0, fmt("mismatches=%d/7000", mismatches));
}

// --- criterion 9: standalone property suite ---------------------------------

void criterion9() {
  bool pass = true;
  std::string detail;
  auto check = [&](bool ok, const char* what) {
    if (!ok) {
      pass = false;
      detail += fmt("%s ", what);
    }
  };

  // quadrature exactness
  for (int order = 1; order <= 5; ++order) {
    const QuadratureRule q = gauss_rule(order);
    for (int px = 0; px <= 2 * order - 1; ++px)
      for (int py = 0; py <= 2 * order - 1; ++py) {
        double v = 0.0;
        for (size_t i = 0; i < q.points.size(); ++i)
          v += q.weights[i] * std::pow(q.points[i].x, px) * std::pow(q.points[i].y, py);
        check(std::abs(v - 1.0 / ((px + 1.0) * (py + 1.0))) <= 1e-13, "quadrature");
      }
  }
  // weight partition
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    const FaceWeights w = omega_weights(uni(rng), uni(rng));
    check(std::abs(w.omega_minus + w.omega_plus - 1.0) <= 1e-14, "omega-sum");
  }
  // penalty arithmetic
  check(penalty_gamma(10.0, 2.0, 1, 2, 0.5) == 80.0, "penalty");
  check(penalty_gamma(10.0, 2.0, 3, 2, 0.5) == 480.0, "penalty");
  // upwind selection
  check(upwind_value(1.0, 2.0, 0.3) == 1.0 && upwind_value(1.0, 2.0, -0.3) == 2.0 &&
            upwind_value(1.0, 2.0, 0.0) == 1.0,
        "upwind");
  // dispersion eigenvalues
  {
    const Vec2 v{3.0, 4.0};
    const Mat2 d = dispersion_tensor(v, 0.3, 1.0, 0.1, 1e-9);
    const Vec2 dv = d.apply(v), dw = d.apply({-4.0, 3.0});
    check(std::abs(dv.x - 0.3 * (5.0 + 1e-9) * v.x) <= 1e-12, "dispersion-l");
    check(std::abs(dw.y - 0.3 * (0.5 + 1e-9) * 3.0) <= 1e-12, "dispersion-t");
  }
  // constant-solution consistency of both assemblies
  {
    Mesh mesh({{1.0, 1.0}, {4, 4}});
    const double c0 = 2.5;
    const VelocityFn vel = constant_velocity({1.0, 0.5});
    TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(0.3);
    coeffs.dirichlet = [c0](Vec2) { return c0; };
    const auto bclass = classify_boundary(mesh, vel);
    DGOptions opt;
    opt.dirichlet = DirichletMode::all_faces;
    const TransportSystem dg = assemble_dg(mesh, 2, vel, coeffs, bclass, opt);
    std::vector<double> u(dg.layout.n_dofs(), c0), res;
    dg.a.residual(dg.rhs, u, res);
    for (double v : res) check(std::abs(v) <= 1e-11, "dg-constant");
    const TransportSystem sd = assemble_sdfem(mesh, vel, [](int) { return 0.0; }, coeffs,
                                              bclass);
    std::vector<double> uc(sd.layout.n_dofs(), c0);
    sd.a.residual(sd.rhs, uc, res);
    for (double v : res) check(std::abs(v) <= 1e-11, "sdfem-constant");

    // estimator on exact constant data
    const DofLayout dgl = DofLayout::dg(mesh, 1);
    std::vector<double> ucst(dgl.n_dofs(), c0);
    const auto ind = cell_indicators(mesh, dgl, 1, ucst, vel, [](int) { return 0.0; }, coeffs,
                                     bclass);
    for (const CellIndicator& ci : ind) check(ci.total_sq() <= 1e-13, "estimator-constant");
  }
  // field sampler determinism
  {
    GeoStatParams gp;
    gp.seed = 42;
    const GridSpec grid{{100.0, 100.0}, {32, 32}};
    const std::vector<double> y1 = sample_gaussian_field(gp, grid);
    const std::vector<double> y2 = sample_gaussian_field(gp, grid);
    check(y1 == y2, "field-determinism");
  }
  report(9, "property suite", pass, pass ? "all properties hold" : detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%s (%d failing)\n", failures == 0 ? "ALL CRITERIA PASS" : "CRITERIA FAILING",
              failures);
  return failures == 0 ? 0 : 1;
}
