#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gw/vec.hpp"

namespace gw {

/// Axis-aligned rectangular domain partitioned into nx x ny cells.
struct GridSpec {
  std::array<double, 2> extents{1.0, 1.0};
  std::array<int, 2> cells_per_axis{1, 1};
};

/// One cell of the refinement tree. Geometry is implied by the integer
/// coordinates (ix, iy) on the cell's level: a level-l cell covers
/// [ix*h, (ix+1)*h] with h = extent / (n0 * 2^l).
struct Cell {
  int id = -1;
  int level = 0;
  int ix = 0;
  int iy = 0;
  int parent = -1;
  std::array<int, 4> children{-1, -1, -1, -1};
  bool alive = true;

  bool is_leaf() const { return children[0] < 0; }
};

enum class FaceKind { interior, boundary };

/// Oriented mesh face. Interior normals point along the positive axis
/// (from the lower-coordinate cell t- to t+), boundary normals point outward.
/// Hanging faces are stored as the fine-side sub-faces, so every face has
/// single-valued geometry.
struct Face {
  int id = -1;
  FaceKind kind = FaceKind::interior;
  int axis = 0;  // normal direction
  int minus_cell = -1;
  int plus_cell = -1;  // interior only
  Vec2 normal;
  Vec2 center;
  double measure = 0.0;  // 1-D face length
  double h_minus = 0.0;  // side length of t- along the face tangent
  double h_plus = 0.0;   // side length of t+ (boundary: equals h_minus)
};

struct RefinementMarks {
  std::set<int> refine;
  std::set<int> coarsen;
};

/// What the closure step changed relative to the requested marks.
struct AdaptLog {
  std::vector<int> promoted;          // cells added to the refine set
  std::vector<int> coarsen_dropped;   // coarsen marks that could not be honored
};

/// Quadrilateral mesh with 1-irregular hanging-node refinement.
/// Immutable after construction; adapt() returns a new mesh value.
class Mesh {
 public:
  explicit Mesh(const GridSpec& spec) : spec_(spec) {
    if (spec.cells_per_axis[0] < 1 || spec.cells_per_axis[1] < 1)
      throw std::invalid_argument("Mesh: cell counts must be positive");
    if (!(spec.extents[0] > 0.0) || !(spec.extents[1] > 0.0))
      throw std::invalid_argument("Mesh: extents must be positive");
    const int nx = spec.cells_per_axis[0];
    const int ny = spec.cells_per_axis[1];
    cells_.reserve(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        Cell c;
        c.id = next_id_++;
        c.ix = i;
        c.iy = j;
        cells_.push_back(c);
      }
    rebuild();
  }

  const GridSpec& spec() const { return spec_; }
  const Cell& cell(int id) const { return cells_[id]; }
  const std::vector<int>& leaf_ids() const { return leaves_; }
  int n_leaves() const { return static_cast<int>(leaves_.size()); }
  const std::vector<Face>& faces() const { return faces_; }

  /// Position of a leaf cell in leaf_ids() order, -1 for non-leaves.
  int leaf_index(int cell_id) const { return leaf_pos_[cell_id]; }

  bool is_structured() const {
    return static_cast<int>(leaves_.size()) ==
           spec_.cells_per_axis[0] * spec_.cells_per_axis[1];
  }

  // --- geometry -------------------------------------------------------------

  std::array<double, 2> cell_size(int level) const {
    const double f = 1.0 / static_cast<double>(int64_t(1) << level);
    return {spec_.extents[0] / spec_.cells_per_axis[0] * f,
            spec_.extents[1] / spec_.cells_per_axis[1] * f};
  }

  Vec2 cell_center(int id) const {
    const Cell& c = cells_[id];
    auto h = cell_size(c.level);
    return {(c.ix + 0.5) * h[0], (c.iy + 0.5) * h[1]};
  }

  Vec2 cell_lower(int id) const {
    const Cell& c = cells_[id];
    auto h = cell_size(c.level);
    return {c.ix * h[0], c.iy * h[1]};
  }

  double cell_volume(int id) const {
    auto h = cell_size(cells_[id].level);
    return h[0] * h[1];
  }

  double cell_diameter(int id) const {
    auto h = cell_size(cells_[id].level);
    return std::hypot(h[0], h[1]);
  }

  /// Level-0 ancestor of any cell.
  int coarse_ancestor(int id) const {
    int c = id;
    while (cells_[c].level > 0) c = cells_[c].parent;
    return c;
  }

  /// Maps a physical point to reference coordinates [0,1]^2 of a cell.
  Vec2 to_reference(int id, const Vec2& x) const {
    const Vec2 lo = cell_lower(id);
    auto h = cell_size(cells_[id].level);
    return {(x.x - lo.x) / h[0], (x.y - lo.y) / h[1]};
  }

  Vec2 from_reference(int id, const Vec2& xhat) const {
    const Vec2 lo = cell_lower(id);
    auto h = cell_size(cells_[id].level);
    return {lo.x + xhat.x * h[0], lo.y + xhat.y * h[1]};
  }

  /// Leaf cell containing a point (ties resolved toward the lower cell).
  int locate(const Vec2& x) const {
    const int nx = spec_.cells_per_axis[0];
    const int ny = spec_.cells_per_axis[1];
    auto h0 = cell_size(0);
    int i = std::clamp(static_cast<int>(x.x / h0[0]), 0, nx - 1);
    int j = std::clamp(static_cast<int>(x.y / h0[1]), 0, ny - 1);
    int c = index_.at(key(0, i, j));
    while (!cells_[c].is_leaf()) {
      const Cell& cc = cells_[c];
      auto hc = cell_size(cc.level + 1);
      int ci = std::min(static_cast<int>(x.x / hc[0]) - 2 * cc.ix, 1);
      int cj = std::min(static_cast<int>(x.y / hc[1]) - 2 * cc.iy, 1);
      ci = std::max(ci, 0);
      cj = std::max(cj, 0);
      c = cc.children[cj * 2 + ci];
    }
    return c;
  }

  /// Max leaf-cell diameter.
  double mesh_size() const {
    double h = 0.0;
    for (int id : leaves_) h = std::max(h, cell_diameter(id));
    return h;
  }

  // --- adaptation -----------------------------------------------------------

  Mesh adapt(const RefinementMarks& marks, AdaptLog* log = nullptr) const {
    Mesh m = *this;
    AdaptLog local_log;
    AdaptLog& lg = log ? *log : local_log;

    // Closure: only leaves are refinable, and marking a cell may force
    // coarser neighbors into the refine set to keep the mesh 1-irregular.
    std::set<int> refine;
    for (int id : marks.refine)
      if (cells_[id].alive && cells_[id].is_leaf()) refine.insert(id);

    bool changed = true;
    while (changed) {
      changed = false;
      for (int id : std::vector<int>(refine.begin(), refine.end())) {
        for (int nb : leaf_neighbors(id)) {
          if (cells_[nb].level < cells_[id].level && !refine.count(nb)) {
            refine.insert(nb);
            lg.promoted.push_back(nb);
            changed = true;
          }
        }
      }
    }

    // Coarsening: full sibling groups only, never below level 0, never a
    // cell that closure wants refined, and never when a neighbor (after
    // refinement) would end up two levels finer than the merged parent.
    std::set<int> coarsen_parents;
    for (int id : marks.coarsen) {
      const Cell& c = cells_[id];
      if (!c.alive || !c.is_leaf() || c.parent < 0 || refine.count(id)) {
        lg.coarsen_dropped.push_back(id);
        continue;
      }
      const Cell& p = cells_[c.parent];
      bool ok = true;
      for (int s : p.children)
        if (!cells_[s].is_leaf() || !marks.coarsen.count(s) || refine.count(s)) ok = false;
      if (ok) {
        for (int s : p.children)
          for (int nb : leaf_neighbors(s)) {
            const int nb_level = cells_[nb].level + (refine.count(nb) ? 1 : 0);
            if (nb_level > p.level + 1) ok = false;
          }
      }
      if (ok)
        coarsen_parents.insert(c.parent);
      else
        lg.coarsen_dropped.push_back(id);
    }

    for (int id : refine) m.split(id);
    for (int p : coarsen_parents) m.merge(p);
    m.rebuild();
    return m;
  }

  Mesh refine_all() const {
    RefinementMarks marks;
    for (int id : leaves_) marks.refine.insert(id);
    return adapt(marks);
  }

  /// Leaf cells sharing a face with the given leaf cell.
  std::vector<int> leaf_neighbors(int id) const {
    std::vector<int> out;
    for (int dir = 0; dir < 4; ++dir) neighbor_leaves(id, dir, out);
    return out;
  }

 private:
  static uint64_t key(int level, int ix, int iy) {
    return (uint64_t(level) << 56) | (uint64_t(uint32_t(ix)) << 28) | uint64_t(uint32_t(iy));
  }

  int cells_at_level(int axis, int level) const {
    return spec_.cells_per_axis[axis] * (1 << level);
  }

  // dir: 0:+x 1:-x 2:+y 3:-y
  static std::array<int, 2> dir_offset(int dir) {
    switch (dir) {
      case 0: return {1, 0};
      case 1: return {-1, 0};
      case 2: return {0, 1};
      default: return {0, -1};
    }
  }

  /// Appends the leaf cells adjacent to cell `id` across side `dir`.
  void neighbor_leaves(int id, int dir, std::vector<int>& out) const {
    const Cell& c = cells_[id];
    auto off = dir_offset(dir);
    const int nx = c.ix + off[0];
    const int ny = c.iy + off[1];
    if (nx < 0 || ny < 0 || nx >= cells_at_level(0, c.level) || ny >= cells_at_level(1, c.level))
      return;
    auto it = index_.find(key(c.level, nx, ny));
    if (it == index_.end()) {
      // coarser neighbor
      int lvl = c.level - 1, cx = nx >> 1, cy = ny >> 1;
      while (lvl >= 0) {
        auto jt = index_.find(key(lvl, cx, cy));
        if (jt != index_.end()) {
          out.push_back(jt->second);
          return;
        }
        --lvl;
        cx >>= 1;
        cy >>= 1;
      }
      return;
    }
    int nb = it->second;
    if (cells_[nb].is_leaf()) {
      out.push_back(nb);
      return;
    }
    // finer: collect the children touching the shared edge (recursively)
    collect_edge_leaves(nb, dir ^ 1, out);
  }

  /// Leaves of the subtree of `id` touching its side `dir`.
  void collect_edge_leaves(int id, int dir, std::vector<int>& out) const {
    const Cell& c = cells_[id];
    if (c.is_leaf()) {
      out.push_back(id);
      return;
    }
    for (int cj = 0; cj < 2; ++cj)
      for (int ci = 0; ci < 2; ++ci) {
        if (dir == 0 && ci != 1) continue;
        if (dir == 1 && ci != 0) continue;
        if (dir == 2 && cj != 1) continue;
        if (dir == 3 && cj != 0) continue;
        collect_edge_leaves(c.children[cj * 2 + ci], dir, out);
      }
  }

  void split(int id) {
    const Cell c = cells_[id];  // copy: push_back below may reallocate
    for (int cj = 0; cj < 2; ++cj)
      for (int ci = 0; ci < 2; ++ci) {
        Cell ch;
        ch.id = next_id_++;
        ch.level = c.level + 1;
        ch.ix = 2 * c.ix + ci;
        ch.iy = 2 * c.iy + cj;
        ch.parent = id;
        cells_.push_back(ch);
        cells_[id].children[cj * 2 + ci] = ch.id;
      }
  }

  void merge(int parent) {
    Cell& p = cells_[parent];
    for (int s : p.children) cells_[s].alive = false;
    p.children = {-1, -1, -1, -1};
  }

  void rebuild() {
    index_.clear();
    leaves_.clear();
    leaf_pos_.assign(cells_.size(), -1);
    for (const Cell& c : cells_) {
      if (!c.alive) continue;
      index_[key(c.level, c.ix, c.iy)] = c.id;
      if (c.is_leaf()) leaves_.push_back(c.id);
    }
    std::sort(leaves_.begin(), leaves_.end());
    for (size_t i = 0; i < leaves_.size(); ++i) leaf_pos_[leaves_[i]] = static_cast<int>(i);
    build_faces();
  }

  void build_faces() {
    faces_.clear();
    for (int id : leaves_) {
      const Cell& c = cells_[id];
      auto h = cell_size(c.level);
      for (int dir = 0; dir < 4; ++dir) {
        const int axis = dir / 2 == 0 ? 0 : 1;
        const int sign = (dir % 2 == 0) ? +1 : -1;
        auto off = dir_offset(dir);
        const int nx = c.ix + off[0];
        const int ny = c.iy + off[1];
        const Vec2 center = face_center(id, axis, sign);
        const double measure = h[1 - axis];

        if (nx < 0 || ny < 0 || nx >= cells_at_level(0, c.level) ||
            ny >= cells_at_level(1, c.level)) {
          Face f;
          f.id = static_cast<int>(faces_.size());
          f.kind = FaceKind::boundary;
          f.axis = axis;
          f.minus_cell = id;
          f.normal = axis == 0 ? Vec2{double(sign), 0.0} : Vec2{0.0, double(sign)};
          f.center = center;
          f.measure = measure;
          f.h_minus = f.h_plus = measure;
          faces_.push_back(f);
          continue;
        }

        auto it = index_.find(key(c.level, nx, ny));
        if (it != index_.end()) {
          int nb = it->second;
          if (!cells_[nb].is_leaf()) continue;  // fine side creates the sub-faces
          if (sign < 0) continue;               // matching face created once, from the low side
          push_interior(axis, id, nb, center, measure, measure, measure);
          continue;
        }
        // Coarser neighbor: the fine side (this cell) always creates the face.
        int lvl = c.level - 1, cx = nx >> 1, cy = ny >> 1;
        int nb = -1;
        while (lvl >= 0) {
          auto jt = index_.find(key(lvl, cx, cy));
          if (jt != index_.end() && cells_[jt->second].is_leaf()) {
            nb = jt->second;
            break;
          }
          --lvl;
          cx >>= 1;
          cy >>= 1;
        }
        if (nb < 0) throw std::logic_error("Mesh: missing neighbor (broken tree)");
        const double h_coarse = cell_size(cells_[nb].level)[1 - axis];
        if (sign > 0)
          push_interior(axis, id, nb, center, measure, measure, h_coarse);
        else
          push_interior(axis, nb, id, center, measure, h_coarse, measure);
      }
    }
  }

  Vec2 face_center(int id, int axis, int sign) const {
    Vec2 x = cell_center(id);
    auto h = cell_size(cells_[id].level);
    x[axis] += sign * 0.5 * h[axis];
    return x;
  }

  void push_interior(int axis, int minus, int plus, const Vec2& center, double measure,
                     double h_minus, double h_plus) {
    Face f;
    f.id = static_cast<int>(faces_.size());
    f.kind = FaceKind::interior;
    f.axis = axis;
    f.minus_cell = minus;
    f.plus_cell = plus;
    f.normal = axis == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    f.center = center;
    f.measure = measure;
    f.h_minus = h_minus;
    f.h_plus = h_plus;
    faces_.push_back(f);
  }

  GridSpec spec_;
  std::vector<Cell> cells_;
  std::unordered_map<uint64_t, int> index_;
  std::vector<int> leaves_;
  std::vector<int> leaf_pos_;
  std::vector<Face> faces_;
  int next_id_ = 0;
};

inline double mesh_size(const Mesh& m) { return m.mesh_size(); }

inline double face_diameter(const Face& f) { return std::min(f.h_minus, f.h_plus); }

}  // namespace gw
