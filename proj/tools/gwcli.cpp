#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gw/adaptive.hpp"
#include "gw/bench.hpp"
#include "gw/postprocess.hpp"
#include "gw/vtk.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitSolver = 2;
constexpr int kExitConfig = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- resolved run configuration ---------------------------------------------

struct Cfg {
  std::string method = "dg";        // sdfem | dg | dg+l2
  int degree = 1;                   // DG polynomial degree
  std::string refinement = "global";  // global | adaptive
  double p_r = 20.0;
  double p_c = 10.0;
  std::string ordering = "geometric";  // geometric | random | downwind
  std::uint64_t ordering_seed = 0;
  std::string solver = "bicgstab";  // bicgstab | gmres | cg
  std::string precond = "ssor";     // ssor | ilu0
  double reduction = 1e-8;
  std::uint64_t seed = 0;           // conductivity field seed
  int levels = 4;                   // study levels / adaptive budget
  int n0 = 16;                      // coarsest cells per axis (benchmarks)
  double epsilon = 1e-5;            // benchmark diffusivity
  double r0 = 5e-5;                 // excluded-ball radius (characteristic layer)
  double u_hat = 0.0;               // overshoot ceiling; 0 = per-problem default
  std::string grid = "desk";        // desk | full (forward scenario size)
  double cut_x0 = -1.0, cut_y0 = -1.0, cut_x1 = -1.0, cut_y1 = -1.0;
  int cut_points = 201;
  std::string output;               // empty: named after the subcommand
};

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "method",   "degree",  "refinement", "p_r",       "p_c",     "ordering",
      "ordering_seed", "solver", "precond", "reduction", "seed",   "levels",
      "n0",       "epsilon", "r0",         "u_hat",     "grid",    "cut_x0",
      "cut_y0",   "cut_x1",  "cut_y1",     "cut_points", "output", "command"};
  return keys;
}

size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<size_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1] ? 1 : 0)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string nearest_key(const std::string& key) {
  std::string best;
  size_t best_d = std::numeric_limits<size_t>::max();
  for (const std::string& k : config_keys()) {
    const size_t d = edit_distance(key, k);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value '" + v + "' for key '" + key + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value '" + v + "' for key '" + key + "'");
  }
}

void apply_key(Cfg& cfg, const std::string& key, const std::string& value) {
  if (key == "method") cfg.method = value;
  else if (key == "degree") cfg.degree = static_cast<int>(parse_int(key, value));
  else if (key == "refinement") cfg.refinement = value;
  else if (key == "p_r") cfg.p_r = parse_double(key, value);
  else if (key == "p_c") cfg.p_c = parse_double(key, value);
  else if (key == "ordering") cfg.ordering = value;
  else if (key == "ordering_seed")
    cfg.ordering_seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "solver") cfg.solver = value;
  else if (key == "precond") cfg.precond = value;
  else if (key == "reduction") cfg.reduction = parse_double(key, value);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "levels") cfg.levels = static_cast<int>(parse_int(key, value));
  else if (key == "n0") cfg.n0 = static_cast<int>(parse_int(key, value));
  else if (key == "epsilon") cfg.epsilon = parse_double(key, value);
  else if (key == "r0") cfg.r0 = parse_double(key, value);
  else if (key == "u_hat") cfg.u_hat = parse_double(key, value);
  else if (key == "grid") cfg.grid = value;
  else if (key == "cut_x0") cfg.cut_x0 = parse_double(key, value);
  else if (key == "cut_y0") cfg.cut_y0 = parse_double(key, value);
  else if (key == "cut_x1") cfg.cut_x1 = parse_double(key, value);
  else if (key == "cut_y1") cfg.cut_y1 = parse_double(key, value);
  else if (key == "cut_points") cfg.cut_points = static_cast<int>(parse_int(key, value));
  else if (key == "output") cfg.output = value;
  else if (key == "command") {
    // informational in manifests; the subcommand is still given on the command line
  } else {
    throw ConfigError("unknown config key '" + key + "' (nearest valid key: '" +
                      nearest_key(key) + "')");
  }
}

/// Flat INI: optional [sections] are ignored, lines are `key = value`,
/// comments start with '#' or ';'.
void load_config_file(Cfg& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    apply_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void validate(const Cfg& cfg) {
  auto one_of = [](const std::string& key, const std::string& v,
                   std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
      if (v == a) return;
    std::string msg = "invalid value '" + v + "' for key '" + key + "' (allowed:";
    for (const char* a : allowed) msg += std::string(" ") + a;
    throw ConfigError(msg + ")");
  };
  one_of("method", cfg.method, {"sdfem", "dg", "dg+l2"});
  one_of("refinement", cfg.refinement, {"global", "adaptive"});
  one_of("ordering", cfg.ordering, {"geometric", "random", "downwind"});
  one_of("solver", cfg.solver, {"bicgstab", "gmres", "cg"});
  one_of("precond", cfg.precond, {"ssor", "ilu0"});
  one_of("grid", cfg.grid, {"desk", "full"});
  if (cfg.degree < 1) throw ConfigError("invalid degree " + std::to_string(cfg.degree) +
                                        ": the DG discretization needs degree >= 1");
  if (cfg.method == "sdfem" && cfg.degree != 1)
    throw ConfigError("sdfem is a bilinear method; degree must be 1");
  if (!(cfg.reduction > 0.0 && cfg.reduction < 1.0))
    throw ConfigError("reduction must lie in (0, 1)");
  if (cfg.levels < 1) throw ConfigError("levels must be >= 1");
  if (cfg.n0 < 2) throw ConfigError("n0 must be >= 2");
  if (cfg.epsilon <= 0.0) throw ConfigError("epsilon must be positive");
  if (cfg.r0 <= 0.0) throw ConfigError("r0 must be positive");
  if (cfg.p_r < 0.0 || cfg.p_r > 100.0) throw ConfigError("p_r must lie in [0, 100]");
  if (cfg.p_c < 0.0 || cfg.p_c > 100.0) throw ConfigError("p_c must lie in [0, 100]");
  if (cfg.cut_points < 2) throw ConfigError("cut_points must be >= 2");
}

// --- output plumbing --------------------------------------------------------

fs::path resolve_output(const Cfg& cfg, const std::string& command) {
  fs::path p = cfg.output.empty() ? fs::path(command) : fs::path(cfg.output);
  if (p.is_relative())
    if (const char* root = std::getenv("GW_OUTPUT_ROOT")) p = fs::path(root) / p;
  fs::create_directories(p);
  return p;
}

void write_manifest(const fs::path& dir, const Cfg& cfg, const std::string& command) {
  std::ofstream f(dir / "manifest.ini");
  f << "# gwcli " << kVersion << "\n";
  f << "# compiler " << __VERSION__ << "\n";
  f << "command = " << command << "\n";
  f << "[run]\n";
  f << "method = " << cfg.method << "\n";
  f << "degree = " << cfg.degree << "\n";
  f << "refinement = " << cfg.refinement << "\n";
  f << "p_r = " << cfg.p_r << "\n";
  f << "p_c = " << cfg.p_c << "\n";
  f << "ordering = " << cfg.ordering << "\n";
  f << "ordering_seed = " << cfg.ordering_seed << "\n";
  f << "solver = " << cfg.solver << "\n";
  f << "precond = " << cfg.precond << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", cfg.reduction);
  f << "reduction = " << buf << "\n";
  f << "seed = " << cfg.seed << "\n";
  f << "levels = " << cfg.levels << "\n";
  f << "n0 = " << cfg.n0 << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", cfg.epsilon);
  f << "epsilon = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", cfg.r0);
  f << "r0 = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", cfg.u_hat);
  f << "u_hat = " << buf << "\n";
  f << "grid = " << cfg.grid << "\n";
  for (auto [name, v] : {std::pair<const char*, double>{"cut_x0", cfg.cut_x0},
                         {"cut_y0", cfg.cut_y0},
                         {"cut_x1", cfg.cut_x1},
                         {"cut_y1", cfg.cut_y1}}) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    f << name << " = " << buf << "\n";
  }
  f << "cut_points = " << cfg.cut_points << "\n";
  f << "output = " << cfg.output << "\n";
}

gw::SolverConfig solver_config(const Cfg& cfg) {
  gw::SolverConfig s;
  s.method = cfg.solver == "gmres"  ? gw::KrylovMethod::gmres
             : cfg.solver == "cg"   ? gw::KrylovMethod::cg
                                    : gw::KrylovMethod::bicgstab;
  s.precond = cfg.precond == "ilu0" ? gw::PrecondKind::ilu0 : gw::PrecondKind::ssor;
  s.reduction = cfg.reduction;
  return s;
}

void write_range_csv(const fs::path& path, double u_min, double u_max, double u_hat) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::fprintf(f, "u_min,u_max,u_hat,overshoot\n");
  std::fprintf(f, "%.10g,%.10g,%.10g,%.10g\n", u_min, u_max, u_hat,
               gw::overshoot_metric(u_min, u_max, u_hat));
  std::fclose(f);
}

/// Deterministic study columns; timings go into a separate file so re-runs
/// from a manifest reproduce this one byte-identically.
void write_study_split(const fs::path& dir, const std::vector<gw::StudyRow>& rows) {
  std::FILE* f = std::fopen((dir / "study.csv").string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot open study.csv");
  std::fprintf(f, "L,DOF,L2_error,rate,IT\n");
  for (size_t i = 0; i < rows.size(); ++i) {
    const double rate =
        i == 0 ? 0.0 : std::log2(rows[i - 1].error / std::max(rows[i].error, 1e-300));
    std::fprintf(f, "%d,%d,%.8g,%.3f,%d\n", rows[i].level, rows[i].dofs, rows[i].error, rate,
                 rows[i].iterations);
  }
  std::fclose(f);
  f = std::fopen((dir / "study_timing.csv").string().c_str(), "w");
  std::fprintf(f, "L,M,T\n");
  for (const gw::StudyRow& r : rows)
    std::fprintf(f, "%d,%.4g,%.4g\n", r.level, r.t_assemble, r.t_solve);
  std::fclose(f);
}

void write_trace_split(const fs::path& dir, const std::vector<gw::TraceRow>& trace) {
  std::FILE* f = std::fopen((dir / "trace.csv").string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot open trace.csv");
  std::fprintf(f, "L,DOF,maxPeclet,IT,u_min,u_max,eta\n");
  for (const gw::TraceRow& r : trace)
    std::fprintf(f, "%d,%d,%.6g,%d,%.10g,%.10g,%.10g\n", r.level, r.dofs, r.max_peclet,
                 r.iterations, r.u_min, r.u_max, r.eta);
  std::fclose(f);
  f = std::fopen((dir / "trace_timing.csv").string().c_str(), "w");
  std::fprintf(f, "L,M,T\n");
  for (const gw::TraceRow& r : trace)
    std::fprintf(f, "%d,%.4g,%.4g\n", r.level, r.t_assemble, r.t_solve);
  std::fclose(f);
}

std::vector<int> random_order(const gw::Mesh& mesh, std::uint64_t seed) {
  std::vector<int> order = mesh.leaf_ids();
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// --- subcommands ------------------------------------------------------------

int run_flow(const Cfg& cfg) {
  const fs::path dir = resolve_output(cfg, "flow");
  write_manifest(dir, cfg, "flow");
  const gw::ScenarioSpec spec = gw::forward2d_scenario(cfg.grid == "desk", cfg.seed);
  const gw::FlowStage stage = gw::solve_scenario_flow(spec);
  gw::write_vtk_cells((dir / "k_field.vtk").string(), stage.mesh, stage.kf.k, "K");
  gw::write_vtk_cells((dir / "head.vtk").string(), stage.mesh, stage.head, "head");
  double max_div = 0.0;
  for (int id : stage.mesh.leaf_ids())
    max_div = std::max(max_div, std::abs(stage.velocity.divergence(
                                    stage.velocity.coarse_index(stage.mesh, id))));
  std::FILE* f = std::fopen((dir / "flow.csv").string().c_str(), "w");
  std::fprintf(f, "IT,converged,max_divergence\n%d,%d,%.6g\n", stage.report.iterations,
               stage.report.converged ? 1 : 0, max_div);
  std::fclose(f);
  if (!stage.report.converged) {
    std::fprintf(stderr, "flow solver did not converge\n");
    return kExitSolver;
  }
  std::printf("flow: %d cells, %d iterations, artifacts in %s\n",
              static_cast<int>(stage.mesh.n_leaves()), stage.report.iterations,
              dir.string().c_str());
  return kExitOk;
}

int run_forward_transport(const Cfg& cfg, const std::string& command, bool adaptive) {
  const fs::path dir = resolve_output(cfg, command);
  write_manifest(dir, cfg, command);
  const double u_hat = cfg.u_hat > 0.0 ? cfg.u_hat : 100.0;
  const gw::ScenarioSpec spec = gw::forward2d_scenario(cfg.grid == "desk", cfg.seed);
  const gw::FlowStage stage = gw::solve_scenario_flow(spec);
  if (!stage.report.converged) {
    std::fprintf(stderr, "flow solver did not converge\n");
    return kExitSolver;
  }
  const gw::TransportCoeffs coeffs = gw::scenario_transport_coeffs(spec);
  const gw::SolverConfig scfg = solver_config(cfg);
  const double lx = spec.grid.extents[0];
  const double ly = spec.grid.extents[1];
  const gw::Vec2 cut0{cfg.cut_x0 >= 0.0 ? cfg.cut_x0 : 0.0,
                      cfg.cut_y0 >= 0.0 ? cfg.cut_y0 : ly};
  const gw::Vec2 cut1{cfg.cut_x1 >= 0.0 ? cfg.cut_x1 : lx,
                      cfg.cut_y1 >= 0.0 ? cfg.cut_y1 : 0.0};

  if (adaptive) {
    gw::TransportProblem problem = gw::problem_from_rt0(stage.velocity, coeffs);
    gw::AdaptConfig acfg;
    acfg.p_r = cfg.p_r;
    acfg.p_c = cfg.p_c;
    acfg.l_max = cfg.levels;
    acfg.u_hat = u_hat;
    gw::OrderingFn ordering = nullptr;
    if (cfg.ordering == "downwind")
      ordering = [&stage](const gw::Mesh& m) {
        return gw::downwind_order(
            m, gw::leaf_head_values(m, stage.mesh, stage.head, stage.velocity, stage.kf));
      };
    else if (cfg.ordering == "random")
      ordering = [&cfg](const gw::Mesh& m) { return random_order(m, cfg.ordering_seed); };
    const gw::AdaptiveResult res =
        gw::adaptive_solve(stage.mesh, cfg.degree, problem, acfg, scfg, {}, ordering);
    write_trace_split(dir, res.trace);
    gw::write_vtk_dg((dir / "u_dg.vtk").string(), res.mesh, res.layout, cfg.degree,
                     res.u.coeffs);
    const gw::RangeSample r = gw::dg_range(res.mesh, res.layout, cfg.degree, res.u.coeffs);
    write_range_csv(dir / "range.csv", r.u_min, r.u_max, u_hat);
    if (res.solver_failed) {
      std::fprintf(stderr, "transport solver did not converge\n");
      return kExitSolver;
    }
    std::printf("adapt: %d levels, final DOF %d, artifacts in %s\n",
                static_cast<int>(res.trace.size()), res.trace.back().dofs,
                dir.string().c_str());
    return kExitOk;
  }

  const gw::Mesh& mesh = stage.mesh;
  const gw::VelocityFn vel = gw::velocity_from_rt0(mesh, stage.velocity);
  const gw::DivergenceFn divq = gw::divergence_from_rt0(mesh, stage.velocity);
  const std::vector<gw::BoundaryType> bclass = gw::classify_boundary(mesh, vel);
  gw::TransportSystem sys;
  if (cfg.method == "sdfem") {
    sys = gw::assemble_sdfem(mesh, vel, divq, coeffs, bclass, {});
  } else {
    gw::DGOptions opt;
    if (cfg.ordering == "downwind")
      opt.cell_order = gw::downwind_order(mesh, stage.head);
    else if (cfg.ordering == "random")
      opt.cell_order = random_order(mesh, cfg.ordering_seed);
    sys = gw::assemble_dg(mesh, cfg.degree, vel, coeffs, bclass, opt);
  }
  gw::DiscreteField u;
  const gw::SolveReport rep = gw::solve_transport(sys, scfg, u);

  double u_min = 0.0, u_max = 0.0;
  if (cfg.method == "sdfem") {
    gw::write_vtk_cg((dir / "u_cg.vtk").string(), mesh, u.coeffs);
    const std::vector<double> dg1 = gw::scatter_cg_to_dg(mesh, sys.layout, u.coeffs);
    gw::write_vtk_dg((dir / "u_dg.vtk").string(), mesh, gw::DofLayout::dg(mesh, 1), 1, dg1);
    const gw::RangeSample r = gw::cg_range(u.coeffs);
    u_min = r.u_min;
    u_max = r.u_max;
    gw::write_line_csv((dir / "cutline.csv").string(),
                       gw::sample_line(mesh, gw::DofLayout::dg(mesh, 1), 1, dg1, cut0, cut1,
                                       cfg.cut_points));
  } else {
    gw::write_vtk_dg((dir / "u_dg.vtk").string(), mesh, sys.layout, cfg.degree, u.coeffs);
    if (cfg.method == "dg+l2") {
      const std::vector<double> proj =
          gw::diffusive_l2_projection(mesh, sys.layout, cfg.degree, u.coeffs);
      gw::write_vtk_cg((dir / "u_cg.vtk").string(), mesh, proj);
      const gw::RangeSample r = gw::cg_range(proj);
      u_min = r.u_min;
      u_max = r.u_max;
      const std::vector<double> dg1 =
          gw::scatter_cg_to_dg(mesh, gw::DofLayout::cg_q1(mesh), proj);
      gw::write_line_csv((dir / "cutline.csv").string(),
                         gw::sample_line(mesh, gw::DofLayout::dg(mesh, 1), 1, dg1, cut0, cut1,
                                         cfg.cut_points));
    } else {
      const gw::RangeSample r = gw::dg_range(mesh, sys.layout, cfg.degree, u.coeffs);
      u_min = r.u_min;
      u_max = r.u_max;
      gw::write_line_csv((dir / "cutline.csv").string(),
                         gw::sample_line(mesh, sys.layout, cfg.degree, u.coeffs, cut0, cut1,
                                         cfg.cut_points));
    }
  }
  write_range_csv(dir / "range.csv", u_min, u_max, u_hat);
  if (!rep.converged) {
    std::fprintf(stderr, "transport solver did not converge (reduction %.3g in %d iterations)\n",
                 rep.reduction, rep.iterations);
    return kExitSolver;
  }
  std::printf("%s: %d DOF, %d iterations, range [%.4g, %.4g], artifacts in %s\n",
              command.c_str(), sys.layout.n_dofs(), rep.iterations, u_min, u_max,
              dir.string().c_str());
  return kExitOk;
}

int run_bench_analytic(const Cfg& cfg, const std::string& which) {
  const fs::path dir = resolve_output(cfg, "bench_" + which);
  write_manifest(dir, cfg, "bench " + which);
  const gw::AnalyticProblem problem = which == "john"
                                          ? gw::john_problem(cfg.epsilon)
                                          : gw::lopez_problem(cfg.epsilon, cfg.r0);
  const double u_hat = cfg.u_hat > 0.0 ? cfg.u_hat : 1.0;
  const gw::SolverConfig scfg = solver_config(cfg);
  const gw::Method method = cfg.method == "sdfem" ? gw::Method::sdfem
                            : cfg.method == "dg"  ? gw::Method::dg
                                                  : gw::Method::dg_l2;
  const bool dirichlet_everywhere = which == "john";
  const gw::Vec2 cut0{cfg.cut_x0 >= 0.0 ? cfg.cut_x0 : 0.0,
                      cfg.cut_y0 >= 0.0 ? cfg.cut_y0 : 1.0};
  const gw::Vec2 cut1{cfg.cut_x1 >= 0.0 ? cfg.cut_x1 : 1.0,
                      cfg.cut_y1 >= 0.0 ? cfg.cut_y1 : 0.0};

  if (cfg.refinement == "adaptive") {
    gw::TransportProblem tp;
    tp.coeffs = problem.coeffs;
    const gw::Vec2 q = problem.q;
    tp.velocity = [q](const gw::Mesh&, int, const gw::Vec2&) { return q; };
    gw::AdaptConfig acfg;
    acfg.p_r = cfg.p_r;
    acfg.p_c = cfg.p_c;
    acfg.l_max = cfg.levels;
    acfg.u_hat = u_hat;
    gw::OrderingFn ordering = nullptr;
    if (cfg.ordering == "downwind")
      ordering = [q](const gw::Mesh& m) {
        // a constant convection field descends the pseudo-head -q.x
        std::vector<double> head(m.n_leaves());
        for (int id : m.leaf_ids()) {
          const gw::Vec2 c = m.cell_center(id);
          head[m.leaf_index(id)] = -(q.x * c.x + q.y * c.y);
        }
        return gw::downwind_order(m, head);
      };
    else if (cfg.ordering == "random")
      ordering = [&cfg](const gw::Mesh& m) { return random_order(m, cfg.ordering_seed); };
    gw::DGOptions base;
    base.dirichlet = dirichlet_everywhere ? gw::DirichletMode::all_faces
                                          : gw::DirichletMode::inflow_only;
    const gw::Mesh mesh0(gw::GridSpec{{1.0, 1.0}, {cfg.n0, cfg.n0}});
    const gw::AdaptiveResult res =
        gw::adaptive_solve(mesh0, cfg.degree, tp, acfg, scfg, base, ordering);
    write_trace_split(dir, res.trace);
    gw::write_vtk_dg((dir / "u_dg.vtk").string(), res.mesh, res.layout, cfg.degree,
                     res.u.coeffs);
    const gw::RangeSample r = gw::dg_range(res.mesh, res.layout, cfg.degree, res.u.coeffs);
    write_range_csv(dir / "range.csv", r.u_min, r.u_max, u_hat);
    gw::write_line_csv((dir / "cutline.csv").string(),
                       gw::sample_line(res.mesh, res.layout, cfg.degree, res.u.coeffs, cut0,
                                       cut1, cfg.cut_points));
    if (res.solver_failed) {
      std::fprintf(stderr, "transport solver did not converge\n");
      return kExitSolver;
    }
    std::printf("bench %s (adaptive): %d levels, final DOF %d, artifacts in %s\n",
                which.c_str(), static_cast<int>(res.trace.size()), res.trace.back().dofs,
                dir.string().c_str());
    return kExitOk;
  }

  const std::vector<gw::StudyRow> rows =
      gw::convergence_study(problem, method, cfg.degree, cfg.n0, cfg.levels, scfg);
  write_study_split(dir, rows);

  // field artifacts from the finest study level
  const int n = cfg.n0 << (cfg.levels - 1);
  const gw::Mesh mesh(gw::GridSpec{{1.0, 1.0}, {n, n}});
  const gw::BenchSolution sol =
      gw::solve_benchmark(mesh, problem, method, cfg.degree, scfg, dirichlet_everywhere);
  gw::write_vtk_dg((dir / "u_dg.vtk").string(), mesh, sol.layout, sol.degree, sol.u);
  const gw::RangeSample r = gw::dg_range(mesh, sol.layout, sol.degree, sol.u);
  write_range_csv(dir / "range.csv", r.u_min, r.u_max, u_hat);
  gw::write_line_csv(
      (dir / "cutline.csv").string(),
      gw::sample_line(mesh, sol.layout, sol.degree, sol.u, cut0, cut1, cfg.cut_points));

  bool all_converged = sol.row.converged;
  for (const gw::StudyRow& row : rows) all_converged = all_converged && row.converged;
  if (!all_converged) {
    std::fprintf(stderr, "transport solver did not converge on every level\n");
    return kExitSolver;
  }
  std::printf("bench %s: %d levels, finest L2 error %.4g, artifacts in %s\n", which.c_str(),
              cfg.levels, rows.back().error, dir.string().c_str());
  return kExitOk;
}

struct CutTable {
  std::vector<std::string> arc;    // verbatim arc-length fields
  std::vector<std::string> value;  // verbatim value fields
};

CutTable read_cutline(const fs::path& dir) {
  const fs::path path = dir / "cutline.csv";
  std::ifstream in(path);
  if (!in) throw ConfigError("missing cut-line table " + path.string());
  std::string line;
  std::getline(in, line);  // header
  CutTable t;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("malformed cut-line row in " + path.string());
    t.arc.push_back(line.substr(0, comma));
    t.value.push_back(line.substr(comma + 1));
  }
  return t;
}

int run_compare(const Cfg& cfg, const std::vector<std::string>& run_dirs) {
  if (run_dirs.size() < 2) throw ConfigError("compare needs at least two run directories");
  const fs::path dir = resolve_output(cfg, "compare");
  std::vector<std::string> names;
  std::vector<CutTable> tables;
  for (const std::string& rd : run_dirs) {
    if (!fs::is_directory(rd)) throw ConfigError("missing run directory " + rd);
    names.push_back(fs::path(rd).filename().string());
    tables.push_back(read_cutline(rd));
    if (tables.back().arc != tables.front().arc)
      throw ConfigError("cut lines of " + rd + " and " + run_dirs.front() + " do not match");
  }
  std::ofstream out(dir / "comparison.csv");
  out << "arc_length";
  for (const std::string& n : names) out << "," << n;
  out << "\n";
  for (size_t i = 0; i < tables.front().arc.size(); ++i) {
    out << tables.front().arc[i];
    for (const CutTable& t : tables) out << "," << t.value[i];
    out << "\n";
  }
  std::ofstream ov(dir / "overshoot.csv");
  ov << "run,u_min,u_max,u_hat,overshoot\n";
  for (size_t i = 0; i < run_dirs.size(); ++i) {
    std::ifstream rf(fs::path(run_dirs[i]) / "range.csv");
    if (!rf) throw ConfigError("missing range table in " + run_dirs[i]);
    std::string header, row;
    std::getline(rf, header);
    std::getline(rf, row);
    ov << names[i] << "," << row << "\n";
  }
  std::printf("compare: %zu runs merged into %s\n", run_dirs.size(), dir.string().c_str());
  return kExitOk;
}

void add_run_options(CLI::App* sub, Cfg& flags, std::string& config_path) {
  sub->add_option("--config", config_path, "INI config file; flags override its values");
  sub->add_option("--method", flags.method, "sdfem | dg | dg+l2");
  sub->add_option("--degree", flags.degree, "DG polynomial degree");
  sub->add_option("--refinement", flags.refinement, "global | adaptive");
  sub->add_option("--p-r", flags.p_r, "refine fraction [%]");
  sub->add_option("--p-c", flags.p_c, "coarsen fraction [%]");
  sub->add_option("--ordering", flags.ordering, "geometric | random | downwind");
  sub->add_option("--ordering-seed", flags.ordering_seed, "seed for the random ordering");
  sub->add_option("--solver", flags.solver, "bicgstab | gmres | cg");
  sub->add_option("--precond", flags.precond, "ssor | ilu0");
  sub->add_option("--reduction", flags.reduction, "relative residual reduction");
  sub->add_option("--seed", flags.seed, "conductivity field seed");
  sub->add_option("--levels", flags.levels, "study levels / adaptive budget");
  sub->add_option("--n0", flags.n0, "coarsest cells per axis (benchmarks)");
  sub->add_option("--epsilon", flags.epsilon, "benchmark diffusivity");
  sub->add_option("--r0", flags.r0, "excluded-ball radius");
  sub->add_option("--u-hat", flags.u_hat, "overshoot ceiling (0: per-problem default)");
  sub->add_option("--grid", flags.grid, "desk | full scenario size");
  sub->add_option("--cut-x0", flags.cut_x0, "cut line start x");
  sub->add_option("--cut-y0", flags.cut_y0, "cut line start y");
  sub->add_option("--cut-x1", flags.cut_x1, "cut line end x");
  sub->add_option("--cut-y1", flags.cut_y1, "cut line end y");
  sub->add_option("--cut-points", flags.cut_points, "cut line sample count");
  sub->add_option("--output", flags.output, "output directory (under $GW_OUTPUT_ROOT)");
}

/// Merge precedence: built-in defaults, then the config file, then any flag
/// the user actually passed.
Cfg merge(const CLI::App* sub, const Cfg& flags, const std::string& config_path) {
  Cfg cfg;
  if (!config_path.empty()) load_config_file(cfg, config_path);
  const std::map<std::string, std::function<void(Cfg&)>> setters = {
      {"--method", [&](Cfg& c) { c.method = flags.method; }},
      {"--degree", [&](Cfg& c) { c.degree = flags.degree; }},
      {"--refinement", [&](Cfg& c) { c.refinement = flags.refinement; }},
      {"--p-r", [&](Cfg& c) { c.p_r = flags.p_r; }},
      {"--p-c", [&](Cfg& c) { c.p_c = flags.p_c; }},
      {"--ordering", [&](Cfg& c) { c.ordering = flags.ordering; }},
      {"--ordering-seed", [&](Cfg& c) { c.ordering_seed = flags.ordering_seed; }},
      {"--solver", [&](Cfg& c) { c.solver = flags.solver; }},
      {"--precond", [&](Cfg& c) { c.precond = flags.precond; }},
      {"--reduction", [&](Cfg& c) { c.reduction = flags.reduction; }},
      {"--seed", [&](Cfg& c) { c.seed = flags.seed; }},
      {"--levels", [&](Cfg& c) { c.levels = flags.levels; }},
      {"--n0", [&](Cfg& c) { c.n0 = flags.n0; }},
      {"--epsilon", [&](Cfg& c) { c.epsilon = flags.epsilon; }},
      {"--r0", [&](Cfg& c) { c.r0 = flags.r0; }},
      {"--u-hat", [&](Cfg& c) { c.u_hat = flags.u_hat; }},
      {"--grid", [&](Cfg& c) { c.grid = flags.grid; }},
      {"--cut-x0", [&](Cfg& c) { c.cut_x0 = flags.cut_x0; }},
      {"--cut-y0", [&](Cfg& c) { c.cut_y0 = flags.cut_y0; }},
      {"--cut-x1", [&](Cfg& c) { c.cut_x1 = flags.cut_x1; }},
      {"--cut-y1", [&](Cfg& c) { c.cut_y1 = flags.cut_y1; }},
      {"--cut-points", [&](Cfg& c) { c.cut_points = flags.cut_points; }},
      {"--output", [&](Cfg& c) { c.output = flags.output; }},
  };
  for (const auto& [name, apply] : setters)
    if (sub->count(name) > 0) apply(cfg);
  validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Groundwater flow and solute transport benchmark driver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Cfg flags;
  std::string config_path;
  std::string bench_which;
  std::vector<std::string> compare_dirs;

  CLI::App* flow = app.add_subcommand("flow", "forward scenario: flow stage only");
  CLI::App* transport =
      app.add_subcommand("transport", "forward scenario: flow + transport on the flow mesh");
  CLI::App* adapt =
      app.add_subcommand("adapt", "forward scenario: adaptive transport solve");
  CLI::App* bench = app.add_subcommand("bench", "analytic benchmarks and scenario studies");
  bench->add_option("problem", bench_which, "john | lopez | forward2d")->required();
  CLI::App* compare = app.add_subcommand("compare", "merge cut-line tables of several runs");
  compare->add_option("runs", compare_dirs, "run output directories")->expected(-2);
  compare->add_option("--output", flags.output, "output directory (under $GW_OUTPUT_ROOT)");

  for (CLI::App* sub : {flow, transport, adapt, bench}) add_run_options(sub, flags, config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (flow->parsed()) return run_flow(merge(flow, flags, config_path));
    if (transport->parsed())
      return run_forward_transport(merge(transport, flags, config_path), "transport", false);
    if (adapt->parsed()) {
      Cfg cfg = merge(adapt, flags, config_path);
      if (adapt->count("--levels") == 0 && config_path.empty()) cfg.levels = 6;
      return run_forward_transport(cfg, "adapt", true);
    }
    if (bench->parsed()) {
      const Cfg cfg = merge(bench, flags, config_path);
      if (bench_which == "forward2d")
        return run_forward_transport(cfg, "bench_forward2d", cfg.refinement == "adaptive");
      if (bench_which == "john" || bench_which == "lopez")
        return run_bench_analytic(cfg, bench_which);
      throw ConfigError("unknown benchmark '" + bench_which +
                        "' (expected john, lopez, or forward2d)");
    }
    if (compare->parsed()) {
      Cfg cfg;
      if (compare->count("--output") > 0) cfg.output = flags.output;
      return run_compare(cfg, compare_dirs);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
