#pragma once

#include <stdexcept>
#include <vector>

#include "gw/mesh.hpp"

namespace gw {

enum class SpaceTag { dg, cg_q1, fv };

/// Degree-of-freedom layout over a mesh.
///  - DG(k): one contiguous block of (k+1)^2 indices per leaf cell, in a
///    caller-supplied cell order (the ordering experiments depend on this).
///  - CG(Q1): one index per vertex of a structured (level-0) mesh.
///  - FV: one index per leaf cell.
class DofLayout {
 public:
  static DofLayout dg(const Mesh& mesh, int k, const std::vector<int>& cell_order) {
    DofLayout l;
    l.tag_ = SpaceTag::dg;
    l.block_size_ = (k + 1) * (k + 1);
    l.cell_order_ = cell_order;
    l.cell_block_.assign(max_id(mesh) + 1, -1);
    for (size_t i = 0; i < cell_order.size(); ++i) l.cell_block_[cell_order[i]] = static_cast<int>(i);
    l.n_dofs_ = static_cast<int>(cell_order.size()) * l.block_size_;
    return l;
  }

  static DofLayout dg(const Mesh& mesh, int k) { return dg(mesh, k, mesh.leaf_ids()); }

  static DofLayout fv(const Mesh& mesh) {
    DofLayout l = dg(mesh, 0);
    l.tag_ = SpaceTag::fv;
    return l;
  }

  static DofLayout cg_q1(const Mesh& mesh) {
    if (!mesh.is_structured())
      throw std::runtime_error("DofLayout: CG(Q1) requires a structured mesh");
    DofLayout l;
    l.tag_ = SpaceTag::cg_q1;
    l.block_size_ = 1;
    l.nx_ = mesh.spec().cells_per_axis[0];
    l.ny_ = mesh.spec().cells_per_axis[1];
    l.n_dofs_ = (l.nx_ + 1) * (l.ny_ + 1);
    return l;
  }

  SpaceTag tag() const { return tag_; }
  int block_size() const { return block_size_; }
  int n_dofs() const { return n_dofs_; }
  int n_blocks() const { return n_dofs_ / block_size_; }

  /// DG/FV: block index of a cell in the layout's cell order.
  int cell_block(int cell_id) const { return cell_block_[cell_id]; }
  const std::vector<int>& cell_order() const { return cell_order_; }
  int cell_dof(int cell_id, int local) const { return cell_block_[cell_id] * block_size_ + local; }

  /// CG: global vertex index from structured vertex coordinates.
  int vertex_dof(int vx, int vy) const { return vy * (nx_ + 1) + vx; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

  /// CG: the four vertex dofs of cell (ix, iy), in Q1 tensor (node) order.
  std::array<int, 4> cell_vertices(int ix, int iy) const {
    return {vertex_dof(ix, iy), vertex_dof(ix + 1, iy), vertex_dof(ix, iy + 1),
            vertex_dof(ix + 1, iy + 1)};
  }

 private:
  static int max_id(const Mesh& mesh) {
    int m = 0;
    for (int id : mesh.leaf_ids()) m = std::max(m, id);
    return m;
  }

  SpaceTag tag_ = SpaceTag::fv;
  int block_size_ = 1;
  int n_dofs_ = 0;
  std::vector<int> cell_order_;
  std::vector<int> cell_block_;
  int nx_ = 0, ny_ = 0;
};

/// Discrete field: coefficients tagged with their space.
struct DiscreteField {
  SpaceTag tag = SpaceTag::fv;
  int degree = 0;  // DG only
  std::vector<double> coeffs;
};

}  // namespace gw
