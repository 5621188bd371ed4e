#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gw/bench.hpp"

using namespace gw;

TEST_CASE("the interior-layer problem matches its closed form at the center") {
  const AnalyticProblem p = john_problem(1.0);
  // u(0.5,0.5) = 16/pi * 1/16 * (pi/2 + atan(0.125)) = 1/2 + atan(0.125)/pi
  CHECK(p.exact({0.5, 0.5}) == Catch::Approx(0.5 + std::atan(0.125) / M_PI));
  // homogeneous Dirichlet boundary
  CHECK(p.exact({0.0, 0.3}) == Catch::Approx(0.0).margin(1e-14));
  CHECK(p.exact({0.7, 1.0}) == Catch::Approx(0.0).margin(1e-14));
  CHECK(p.exact({1.0, 0.2}) == Catch::Approx(0.0).margin(1e-14));
  CHECK_THROWS_AS(john_problem(0.0), std::invalid_argument);
}

TEST_CASE("the interior-layer gradient and source agree with finite differences") {
  const double eps = 0.5;
  const AnalyticProblem p = john_problem(eps);
  const double mu = 2.0;
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uni(0.1, 0.9);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const Vec2 x{uni(rng), uni(rng)};
    const Vec2 g = p.exact_grad(x);
    const double fdx = (p.exact({x.x + h, x.y}) - p.exact({x.x - h, x.y})) / (2.0 * h);
    const double fdy = (p.exact({x.x, x.y + h}) - p.exact({x.x, x.y - h})) / (2.0 * h);
    CHECK(g.x == Catch::Approx(fdx).margin(1e-5 * (1.0 + std::abs(fdx))));
    CHECK(g.y == Catch::Approx(fdy).margin(1e-5 * (1.0 + std::abs(fdy))));
    // source = -eps lap u + q . grad u + mu u with the Laplacian from the
    // gradient finite differences
    const double lap = (p.exact_grad({x.x + h, x.y}).x - p.exact_grad({x.x - h, x.y}).x +
                        p.exact_grad({x.x, x.y + h}).y - p.exact_grad({x.x, x.y - h}).y) /
                       (2.0 * h);
    const double s = -eps * lap + 2.0 * g.x + 3.0 * g.y + mu * p.exact(x);
    CHECK(p.coeffs.source(x) == Catch::Approx(s).margin(1e-4 * (1.0 + std::abs(s))));
  }
}

TEST_CASE("the characteristic-layer reference holds its branch structure") {
  const AnalyticProblem p = lopez_problem(1e-4, 0.05);
  // on the diagonal the two branches meet at exactly one half
  CHECK(p.exact({0.5, 0.5}) == Catch::Approx(0.5));
  CHECK(p.exact({0.25, 0.25}) == Catch::Approx(0.5));
  // below the diagonal (x > y) the value tends to the inflow data 1
  CHECK(p.exact({0.6, 0.2}) > 0.9);
  // above the diagonal it tends to 0
  CHECK(p.exact({0.2, 0.6}) < 0.1);
  // the reference is continuous across the diagonal
  const double below = p.exact({0.5 + 1e-7, 0.5 - 1e-7});
  const double above = p.exact({0.5 - 1e-7, 0.5 + 1e-7});
  CHECK(below == Catch::Approx(above).margin(1e-4));
  // the excluded region rejects evaluation
  CHECK(p.in_excluded({0.01, 0.01}));
  CHECK_FALSE(p.in_excluded({0.2, 0.2}));
  CHECK_THROWS_AS(p.exact({0.01, 0.01}), std::domain_error);
  CHECK_THROWS_AS(lopez_problem(0.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(lopez_problem(1e-4, 0.0), std::invalid_argument);
}

TEST_CASE("the L2 error functional has the expected values") {
  Mesh m({{1.0, 1.0}, {4, 4}});
  const DofLayout layout = DofLayout::dg(m, 1);
  std::vector<double> u(layout.n_dofs(), 1.0);
  CHECK(l2_error(m, layout, 1, u, [](Vec2) { return 1.0; }) == Catch::Approx(0.0).margin(1e-14));
  CHECK(l2_error(m, layout, 1, u, [](Vec2) { return 0.0; }) == Catch::Approx(1.0));
  // u = x against reference 0: error^2 = int x^2 = 1/3
  for (int id : m.leaf_ids()) {
    const Cell& c = m.cell(id);
    for (int i = 0; i < 4; ++i)
      u[layout.cell_dof(id, i)] = (c.ix + (i % 2)) * 0.25;
  }
  CHECK(l2_error(m, layout, 1, u, [](Vec2) { return 0.0; }) ==
        Catch::Approx(std::sqrt(1.0 / 3.0)));
  // excluding a ball removes the touched cells from the integral
  std::fill(u.begin(), u.end(), 1.0);
  const double partial =
      l2_error(m, layout, 1, u, [](Vec2) { return 0.0; }, true, {0.5, 0.5}, 0.2);
  // the four center cells intersect the ball: area drops by 4/16
  CHECK(partial == Catch::Approx(std::sqrt(12.0 / 16.0)));
}

TEST_CASE("global refinement converges at second order in the smooth regime") {
  const AnalyticProblem p = john_problem(1.0);
  SolverConfig scfg;
  scfg.reduction = 1e-11;
  const std::vector<StudyRow> rows = convergence_study(p, Method::dg, 1, 4, 3, scfg);
  REQUIRE(rows.size() == 3);
  for (const StudyRow& r : rows) CHECK(r.converged);
  CHECK(rows[0].dofs == 64);
  CHECK(rows[2].dofs == 1024);
  const double rate = std::log2(rows[1].error / rows[2].error);
  CHECK(rate > 1.6);
}

TEST_CASE("line sampling and crossing detection work on a ramp") {
  Mesh m({{1.0, 1.0}, {8, 8}});
  const DofLayout layout = DofLayout::dg(m, 1);
  std::vector<double> u(layout.n_dofs());
  for (int id : m.leaf_ids()) {
    const Cell& c = m.cell(id);
    for (int i = 0; i < 4; ++i) u[layout.cell_dof(id, i)] = (c.ix + (i % 2)) / 8.0;
  }
  const LineSample s = sample_line(m, layout, 1, u, {0.0, 0.5}, {1.0, 0.5}, 101);
  REQUIRE(s.arc.size() == 101);
  CHECK(s.arc.back() == Catch::Approx(1.0));
  for (size_t i = 0; i < s.arc.size(); ++i)
    CHECK(s.value[i] == Catch::Approx(s.arc[i]).margin(1e-9));
  CHECK(first_crossing(s, 0.3) == Catch::Approx(0.3).margin(1e-9));
  CHECK(first_crossing(s, 2.0) == -1.0);
}

TEST_CASE("the forward scenario wires wells, ranges, and coefficients") {
  const ScenarioSpec s = forward2d_scenario(true, 7);
  CHECK(s.grid.cells_per_axis[0] == 50);
  CHECK(s.geo.seed == 7);
  REQUIRE(s.wells.size() == 1);
  CHECK(s.wells[0].volume() == Catch::Approx(4.0));
  CHECK(s.u_hat == 100.0);

  const TransportCoeffs c = scenario_transport_coeffs(s);
  // time-integrated source in the well: rate density * conc * T_inj
  CHECK(c.source({25.0, 49.0}) == Catch::Approx(1.25e-4 * 1.0 * 100.0));
  CHECK(c.source({10.0, 10.0}) == 0.0);
  CHECK(c.mu({25.0, 49.0}) == 0.0);  // no extraction wells
  CHECK(c.dirichlet({0.0, 50.0}) == 0.0);
}

TEST_CASE("the scenario flow stage produces a conservative velocity field") {
  ScenarioSpec s = forward2d_scenario(true, 1);
  const FlowStage stage = solve_scenario_flow(s);
  CHECK(stage.report.converged);
  // heads stay near the driving boundary values
  double hmin = 1e300, hmax = -1e300;
  for (double h : stage.head) {
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
  }
  CHECK(hmin > 99.0);
  CHECK(hmax < 101.0);
  // the reconstructed velocity is divergence-free away from the well
  const WellSpec& w = s.wells[0];
  double max_div = 0.0;
  for (int id : stage.mesh.leaf_ids()) {
    const Vec2 c = stage.mesh.cell_center(id);
    if (c.x >= w.box_lo[0] - 2.0 && c.x <= w.box_hi[0] + 2.0 && c.y >= w.box_lo[1] - 2.0)
      continue;
    max_div = std::max(max_div, std::abs(stage.velocity.divergence(
                                    stage.velocity.coarse_index(stage.mesh, id))));
  }
  CHECK(max_div < 1e-12);
}
