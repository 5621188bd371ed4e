#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "gw/basis.hpp"
#include "gw/dof.hpp"
#include "gw/mesh.hpp"
#include "gw/transport.hpp"

namespace gw {

namespace detail {

inline std::FILE* vtk_open(const std::string& path, const std::string& title, size_t n_points) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("vtk writer: cannot open " + path);
  std::fprintf(f, "# vtk DataFile Version 3.0\n%s\nASCII\nDATASET UNSTRUCTURED_GRID\n",
               title.c_str());
  std::fprintf(f, "POINTS %zu double\n", n_points);
  return f;
}

}  // namespace detail

/// Legacy-ASCII VTK output of a DG field: every leaf cell contributes four
/// duplicated corner points carrying the one-sided corner values, so jumps
/// stay visible.
inline void write_vtk_dg(const std::string& path, const Mesh& mesh, const DofLayout& layout,
                         int k, const std::vector<double>& u,
                         const std::string& name = "u") {
  QkBasis basis(k);
  const size_t nc = mesh.leaf_ids().size();
  std::FILE* f = detail::vtk_open(path, "dg field", 4 * nc);
  const Vec2 corners[4] = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  for (int id : mesh.leaf_ids())
    for (const Vec2& c : corners) {
      const Vec2 x = mesh.from_reference(id, c);
      std::fprintf(f, "%.10g %.10g 0\n", x.x, x.y);
    }
  std::fprintf(f, "CELLS %zu %zu\n", nc, 5 * nc);
  for (size_t i = 0; i < nc; ++i)
    std::fprintf(f, "4 %zu %zu %zu %zu\n", 4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3);
  std::fprintf(f, "CELL_TYPES %zu\n", nc);
  for (size_t i = 0; i < nc; ++i) std::fprintf(f, "9\n");
  std::fprintf(f, "POINT_DATA %zu\nSCALARS %s double 1\nLOOKUP_TABLE default\n", 4 * nc,
               name.c_str());
  for (int id : mesh.leaf_ids())
    for (const Vec2& c : corners)
      std::fprintf(f, "%.10g\n", dg_value(layout, basis, u, id, c));
  std::fclose(f);
}

/// Legacy-ASCII VTK output of a Q1 nodal field on the structured mesh.
inline void write_vtk_cg(const std::string& path, const Mesh& mesh,
                         const std::vector<double>& u, const std::string& name = "u") {
  const DofLayout layout = DofLayout::cg_q1(mesh);
  const int nx = layout.nx();
  const int ny = layout.ny();
  const auto h = mesh.cell_size(0);
  const size_t np = static_cast<size_t>(nx + 1) * (ny + 1);
  std::FILE* f = detail::vtk_open(path, "nodal field", np);
  for (int vy = 0; vy <= ny; ++vy)
    for (int vx = 0; vx <= nx; ++vx)
      std::fprintf(f, "%.10g %.10g 0\n", vx * h[0], vy * h[1]);
  const size_t nc = static_cast<size_t>(nx) * ny;
  std::fprintf(f, "CELLS %zu %zu\n", nc, 5 * nc);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      std::fprintf(f, "4 %d %d %d %d\n", layout.vertex_dof(ix, iy),
                   layout.vertex_dof(ix + 1, iy), layout.vertex_dof(ix + 1, iy + 1),
                   layout.vertex_dof(ix, iy + 1));
  std::fprintf(f, "CELL_TYPES %zu\n", nc);
  for (size_t i = 0; i < nc; ++i) std::fprintf(f, "9\n");
  std::fprintf(f, "POINT_DATA %zu\nSCALARS %s double 1\nLOOKUP_TABLE default\n", np,
               name.c_str());
  for (size_t i = 0; i < np; ++i) std::fprintf(f, "%.10g\n", u[i]);
  std::fclose(f);
}

/// Cell-data VTK output (per-leaf scalars, e.g. conductivity or head).
inline void write_vtk_cells(const std::string& path, const Mesh& mesh,
                            const std::vector<double>& per_cell,
                            const std::string& name = "value") {
  const size_t nc = mesh.leaf_ids().size();
  std::FILE* f = detail::vtk_open(path, "cell field", 4 * nc);
  const Vec2 corners[4] = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  for (int id : mesh.leaf_ids())
    for (const Vec2& c : corners) {
      const Vec2 x = mesh.from_reference(id, c);
      std::fprintf(f, "%.10g %.10g 0\n", x.x, x.y);
    }
  std::fprintf(f, "CELLS %zu %zu\n", nc, 5 * nc);
  for (size_t i = 0; i < nc; ++i)
    std::fprintf(f, "4 %zu %zu %zu %zu\n", 4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3);
  std::fprintf(f, "CELL_TYPES %zu\n", nc);
  for (size_t i = 0; i < nc; ++i) std::fprintf(f, "9\n");
  std::fprintf(f, "CELL_DATA %zu\nSCALARS %s double 1\nLOOKUP_TABLE default\n", nc,
               name.c_str());
  for (double v : per_cell) std::fprintf(f, "%.10g\n", v);
  std::fclose(f);
}

}  // namespace gw
