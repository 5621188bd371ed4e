#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gw/transport.hpp"

using namespace gw;

namespace {

double entry(const BlockSparseMatrix& a, int bi, int bj, int r, int c) {
  const int e = a.find(bi, bj);
  REQUIRE(e >= 0);
  return a.block(e)[r * a.block_size() + c];
}

}  // namespace

TEST_CASE("the dispersion tensor has the longitudinal and transversal eigenpairs") {
  const double theta = 0.3, al = 1.0, at = 0.1, dm = 1e-9;
  const Vec2 v{3.0, 4.0};  // |v| = 5
  const Mat2 d = dispersion_tensor(v, theta, al, at, dm);
  // v itself is the longitudinal eigenvector: D v = theta (a_l |v| + dm) v
  const Vec2 dv = d.apply(v);
  const double lam_l = theta * (al * 5.0 + dm);
  CHECK(dv.x == Catch::Approx(lam_l * v.x));
  CHECK(dv.y == Catch::Approx(lam_l * v.y));
  // the perpendicular is transversal
  const Vec2 w{-4.0, 3.0};
  const Vec2 dw = d.apply(w);
  const double lam_t = theta * (at * 5.0 + dm);
  CHECK(dw.x == Catch::Approx(lam_t * w.x));
  CHECK(dw.y == Catch::Approx(lam_t * w.y));
  // zero velocity: theta dm I
  const Mat2 d0 = dispersion_tensor({0.0, 0.0}, theta, al, at, dm);
  CHECK(normal_component(d0, {1.0, 0.0}) == Catch::Approx(theta * dm));
  CHECK(normal_component(d0, {0.0, 1.0}) == Catch::Approx(theta * dm));

  TransportCoeffs c;
  c.theta = theta;
  c.alpha_l = al;
  c.alpha_t = at;
  c.dm = dm;
  // coeffs take the Darcy flux q = theta v
  const Mat2 dc = c.dispersion(v * theta);
  CHECK(dc.apply(v).x == Catch::Approx(dv.x));

  const Mat2 iso = TransportCoeffs::isotropic_eps(0.25).dispersion({7.0, -1.0});
  CHECK(normal_component(iso, {0.0, 1.0}) == Catch::Approx(0.25));
}

TEST_CASE("diffusivity weights favor the better-conducting side") {
  const FaceWeights w = omega_weights(1.0, 3.0);
  CHECK(w.omega_minus == Catch::Approx(0.75));
  CHECK(w.omega_plus == Catch::Approx(0.25));
  CHECK(w.d_eff == Catch::Approx(1.5));  // harmonic-type mean

  const FaceWeights sym = omega_weights(2.0, 2.0);
  CHECK(sym.omega_minus == Catch::Approx(0.5));
  CHECK(sym.d_eff == Catch::Approx(2.0));

  const FaceWeights deg = omega_weights(0.0, 0.0);
  CHECK(deg.omega_minus == 0.5);
  CHECK(deg.d_eff == 0.0);
}

TEST_CASE("penalty scales with degree, diffusivity, and inverse face size") {
  CHECK(penalty_gamma(10.0, 2.0, 1, 2, 0.5) == Catch::Approx(80.0));
  CHECK(penalty_gamma(10.0, 2.0, 3, 2, 0.5) == Catch::Approx(480.0));  // k(k+1) = 12
  CHECK(penalty_gamma(1.0, 0.0, 2, 2, 0.1) == 0.0);
}

TEST_CASE("the upwind trace takes the minus side at zero crossing flux") {
  CHECK(upwind_value(1.0, 2.0, 0.5) == 1.0);
  CHECK(upwind_value(1.0, 2.0, -0.5) == 2.0);
  CHECK(upwind_value(1.0, 2.0, 0.0) == 1.0);
}

TEST_CASE("boundary classification splits inflow, outflow, characteristic") {
  Mesh m({{1.0, 1.0}, {4, 4}});
  const auto cls = classify_boundary(m, constant_velocity({1.0, 0.0}));
  int inflow = 0, outflow = 0, charac = 0;
  for (const Face& f : m.faces()) {
    if (f.kind != FaceKind::boundary) {
      CHECK(cls[f.id] == BoundaryType::none);
      continue;
    }
    if (cls[f.id] == BoundaryType::inflow) {
      ++inflow;
      CHECK(f.normal.x == Catch::Approx(-1.0));
    } else if (cls[f.id] == BoundaryType::outflow) {
      ++outflow;
      CHECK(f.normal.x == Catch::Approx(1.0));
    } else {
      ++charac;
    }
  }
  CHECK(inflow == 4);
  CHECK(outflow == 4);
  CHECK(charac == 8);
}

TEST_CASE("the DG matrix is symmetric without convection") {
  Mesh m({{1.0, 1.0}, {3, 3}});
  RefinementMarks marks;
  marks.refine.insert(m.leaf_ids()[4]);
  Mesh r = m.adapt(marks);  // include a hanging face
  const VelocityFn q = constant_velocity({0.0, 0.0});
  const TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(1.0);
  DGOptions opt;
  opt.dirichlet = DirichletMode::all_faces;
  const TransportSystem sys = assemble_dg(r, 2, q, coeffs, classify_boundary(r, q), opt);
  const BlockSparseMatrix& a = sys.a;
  const int nb = a.block_size();
  for (int i = 0; i < a.n_block_rows(); ++i)
    for (int e = a.row_begin(i); e < a.row_end(i); ++e) {
      const int j = a.col(e);
      const int et = a.find(j, i);
      REQUIRE(et >= 0);
      for (int rr = 0; rr < nb; ++rr)
        for (int cc = 0; cc < nb; ++cc)
          CHECK(a.block(e)[rr * nb + cc] ==
                Catch::Approx(a.block(et)[cc * nb + rr]).margin(1e-12));
    }
}

TEST_CASE("pure convection in a channel gives a block lower-triangular system") {
  Mesh m({{4.0, 1.0}, {4, 1}});
  const VelocityFn q = constant_velocity({1.0, 0.0});
  const TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(0.0);
  const TransportSystem sys = assemble_dg(m, 1, q, coeffs, classify_boundary(m, q));
  CHECK(is_block_lower_triangular(sys.a, {0, 1, 2, 3}));
  CHECK_FALSE(is_block_lower_triangular(sys.a, {3, 2, 1, 0}));
  // a block-triangular system is solved exactly by one SSOR application
  BlockSSOR ssor(sys.a);
  std::vector<double> z, r;
  ssor.apply(z, sys.rhs);
  sys.a.residual(sys.rhs, z, r);
  for (double v : r) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("constants are consistent for the DG operator") {
  Mesh m({{1.0, 1.0}, {3, 3}});
  RefinementMarks marks;
  marks.refine.insert(m.leaf_ids()[0]);
  Mesh r = m.adapt(marks);
  const VelocityFn q = constant_velocity({1.0, 0.5});
  TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(0.7);
  const double c0 = 3.25;
  coeffs.dirichlet = [c0](Vec2) { return c0; };
  DGOptions opt;
  opt.dirichlet = DirichletMode::all_faces;
  for (int k = 1; k <= 2; ++k) {
    const TransportSystem sys = assemble_dg(r, k, q, coeffs, classify_boundary(r, q), opt);
    std::vector<double> u(sys.layout.n_dofs(), c0), res;
    sys.a.residual(sys.rhs, u, res);
    for (double v : res) CHECK(std::abs(v) < 1e-11);
  }
}

TEST_CASE("the DG solution is invariant under the assembly cell order") {
  Mesh m({{1.0, 1.0}, {4, 4}});
  const VelocityFn q = constant_velocity({1.0, 0.3});
  TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(0.05);
  coeffs.dirichlet = [](Vec2 x) { return x.x < 1e-12 ? 1.0 : 0.0; };
  const auto cls = classify_boundary(m, q);

  DGOptions natural;
  const TransportSystem s1 = assemble_dg(m, 1, q, coeffs, cls, natural);
  DGOptions reversed;
  reversed.cell_order = m.leaf_ids();
  std::reverse(reversed.cell_order.begin(), reversed.cell_order.end());
  const TransportSystem s2 = assemble_dg(m, 1, q, coeffs, cls, reversed);

  SolverConfig cfg;
  cfg.reduction = 1e-12;
  DiscreteField u1, u2;
  REQUIRE(solve_transport(s1, cfg, u1).converged);
  REQUIRE(solve_transport(s2, cfg, u2).converged);
  QkBasis basis(1);
  for (int id : m.leaf_ids()) {
    const double v1 = dg_value(s1.layout, basis, u1.coeffs, id, {0.3, 0.8});
    const double v2 = dg_value(s2.layout, basis, u2.coeffs, id, {0.3, 0.8});
    CHECK(v1 == Catch::Approx(v2).margin(1e-9));
  }
}

TEST_CASE("mesh Peclet numbers for the isotropic and Scheidegger models") {
  Mesh m({{1.0, 1.0}, {1, 1}});
  const int cell = m.leaf_ids()[0];
  const TransportCoeffs iso = TransportCoeffs::isotropic_eps(1.0);
  // P = q h / (2 eps), h = sqrt(2)
  CHECK(mesh_peclet(m, cell, 1.0, iso) == Catch::Approx(0.5 * std::sqrt(2.0)));
  CHECK(mesh_peclet(m, cell, 0.0, iso) == 0.0);

  TransportCoeffs sch;
  sch.theta = 0.3;
  sch.alpha_l = 0.5;
  sch.dm = 1e-9;
  CHECK(mesh_peclet(m, cell, 2.0, sch) ==
        Catch::Approx(0.5 * 2.0 * std::sqrt(2.0) / (0.5 * 2.0 + 0.3 * 1e-9)));

  TransportCoeffs degenerate;
  degenerate.alpha_l = 0.0;
  degenerate.dm = 0.0;
  CHECK(std::isinf(mesh_peclet(m, cell, 1.0, degenerate)));
}

TEST_CASE("the streamline stabilization parameter follows zeta") {
  CHECK(sdfem_delta(1.0, 0.0, 5.0, SDFEMZeta::clipped) == 0.0);
  CHECK(sdfem_delta(1.0, 1.0, 0.5, SDFEMZeta::clipped) == 0.0);  // P <= 1: no stabilization
  CHECK(sdfem_delta(1.0, 1.0, 2.0, SDFEMZeta::clipped) == Catch::Approx(0.25));
  // coth(2) - 1/2
  const double zeta2 = 1.0 / std::tanh(2.0) - 0.5;
  CHECK(zeta2 == Catch::Approx(0.5373147207275482));
  CHECK(sdfem_delta(1.0, 1.0, 2.0, SDFEMZeta::coth) == Catch::Approx(0.5 * zeta2));
  CHECK(sdfem_delta(2.0, 4.0, 100.0, SDFEMZeta::clipped) == Catch::Approx(0.25 * 0.99));
}

TEST_CASE("stabilization vanishes identically in the diffusion-dominated regime") {
  Mesh m({{1.0, 1.0}, {4, 4}});
  const VelocityFn q = constant_velocity({0.1, 0.0});
  const TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(1.0);  // P << 1
  const auto cls = classify_boundary(m, q);
  SDFEMOptions with;
  SDFEMOptions without;
  without.no_stabilization = true;
  const TransportSystem s1 = assemble_sdfem(m, q, [](int) { return 0.0; }, coeffs, cls, with);
  const TransportSystem s2 = assemble_sdfem(m, q, [](int) { return 0.0; }, coeffs, cls, without);
  REQUIRE(s1.a.n_blocks() == s2.a.n_blocks());
  for (int i = 0; i < s1.a.n_block_rows(); ++i)
    for (int e = s1.a.row_begin(i); e < s1.a.row_end(i); ++e)
      CHECK(s1.a.block(e)[0] == Catch::Approx(s2.a.block(e)[0]).margin(1e-14));
}

TEST_CASE("the stabilized scheme reproduces a linear solution exactly") {
  Mesh m({{1.0, 1.0}, {8, 8}});
  const VelocityFn q = constant_velocity({1.0, 0.0});
  TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(0.01);  // P > 1: delta active
  coeffs.dirichlet = [](Vec2 x) { return x.x; };
  coeffs.source = [](Vec2) { return 1.0; };  // q . grad(x) = 1
  const auto cls = classify_boundary(m, q);
  SDFEMOptions opt;
  opt.dirichlet_all_boundary = true;
  const TransportSystem sys = assemble_sdfem(m, q, [](int) { return 0.0; }, coeffs, cls, opt);
  SolverConfig cfg;
  cfg.method = KrylovMethod::gmres;
  cfg.reduction = 1e-13;
  DiscreteField u;
  REQUIRE(solve_transport(sys, cfg, u).converged);
  for (int vy = 0; vy <= 8; ++vy)
    for (int vx = 0; vx <= 8; ++vx)
      CHECK(u.coeffs[sys.layout.vertex_dof(vx, vy)] == Catch::Approx(vx / 8.0).margin(1e-10));
}

TEST_CASE("the divergence term enters the reaction coefficient") {
  // on one cell with q = 0 at the center but div q = const, the operator adds
  // (div q) u against the mass matrix
  Mesh m({{1.0, 1.0}, {1, 1}});
  const TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(1.0);
  const VelocityFn q = [](int, const Vec2& x) { return Vec2{x.x - 0.5, 0.0}; };  // div q = 1
  const auto cls = classify_boundary(m, q);
  const TransportSystem with = assemble_sdfem(m, q, [](int) { return 1.0; }, coeffs, cls);
  const TransportSystem without = assemble_sdfem(m, q, [](int) { return 0.0; }, coeffs, cls);
  // difference of the two matrices is the Q1 mass matrix: diagonal entry 1/9
  bool checked = false;
  for (int i = 0; i < with.a.n_block_rows(); ++i) {
    const int e1 = with.a.find(i, i);
    const int e2 = without.a.find(i, i);
    if (e1 < 0 || e2 < 0) continue;
    if (with.a.block(e1)[0] == 1.0) continue;  // fixed inflow node
    CHECK(with.a.block(e1)[0] - without.a.block(e2)[0] == Catch::Approx(1.0 / 9.0));
    checked = true;
  }
  CHECK(checked);
}

TEST_CASE("upwind DG transports the inflow value through a channel") {
  Mesh m({{4.0, 1.0}, {4, 1}});
  const VelocityFn q = constant_velocity({2.0, 0.0});
  TransportCoeffs coeffs = TransportCoeffs::isotropic_eps(0.0);
  coeffs.dirichlet = [](Vec2) { return 1.5; };
  const TransportSystem sys = assemble_dg(m, 1, q, coeffs, classify_boundary(m, q));
  SolverConfig cfg;
  cfg.reduction = 1e-13;
  DiscreteField u;
  REQUIRE(solve_transport(sys, cfg, u).converged);
  // pure convection with constant inflow: u = 1.5 everywhere
  for (double v : u.coeffs) CHECK(v == Catch::Approx(1.5).margin(1e-10));
  (void)entry;
}
