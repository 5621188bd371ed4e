#pragma once

#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gw/dense.hpp"

namespace gw {

/// Square sparse matrix stored as CSR of dense b x b blocks.
/// Column indices are sorted within each row; no duplicates.
class BlockSparseMatrix {
 public:
  BlockSparseMatrix() = default;

  int block_size() const { return b_; }
  int n_block_rows() const { return n_; }
  int n_rows() const { return n_ * b_; }
  int n_blocks() const { return static_cast<int>(col_.size()); }

  int row_begin(int i) const { return row_ptr_[i]; }
  int row_end(int i) const { return row_ptr_[i + 1]; }
  int col(int e) const { return col_[e]; }
  const double* block(int e) const { return vals_.data() + static_cast<size_t>(e) * b_ * b_; }
  double* block(int e) { return vals_.data() + static_cast<size_t>(e) * b_ * b_; }

  /// Entry index of block (i,j), or -1 if not in the pattern.
  int find(int i, int j) const {
    int lo = row_ptr_[i], hi = row_ptr_[i + 1];
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (col_[mid] < j)
        lo = mid + 1;
      else
        hi = mid;
    }
    return (lo < row_ptr_[i + 1] && col_[lo] == j) ? lo : -1;
  }

  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n_rows(), 0.0);
    for (int i = 0; i < n_; ++i)
      for (int e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
        const double* blk = block(e);
        const double* xj = x.data() + static_cast<size_t>(col_[e]) * b_;
        double* yi = y.data() + static_cast<size_t>(i) * b_;
        for (int r = 0; r < b_; ++r) {
          double s = 0.0;
          for (int c = 0; c < b_; ++c) s += blk[r * b_ + c] * xj[c];
          yi[r] += s;
        }
      }
  }

  /// y = b - A x
  void residual(const std::vector<double>& rhs, const std::vector<double>& x,
                std::vector<double>& y) const {
    matvec(x, y);
    for (size_t i = 0; i < y.size(); ++i) y[i] = rhs[i] - y[i];
  }

  /// Scalar-expanded Matrix Market coordinate output.
  void write_matrix_market(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_matrix_market: cannot open " + path);
    size_t nnz = 0;
    for (int e = 0; e < n_blocks(); ++e) {
      const double* blk = block(e);
      for (int r = 0; r < b_ * b_; ++r)
        if (blk[r] != 0.0) ++nnz;
    }
    std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
    std::fprintf(f, "%d %d %zu\n", n_rows(), n_rows(), nnz);
    for (int i = 0; i < n_; ++i)
      for (int e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
        const double* blk = block(e);
        for (int r = 0; r < b_; ++r)
          for (int c = 0; c < b_; ++c)
            if (blk[r * b_ + c] != 0.0)
              std::fprintf(f, "%d %d %.17g\n", i * b_ + r + 1, col_[e] * b_ + c + 1,
                           blk[r * b_ + c]);
      }
    std::fclose(f);
  }

  friend class BlockMatrixBuilder;

 private:
  int b_ = 1;
  int n_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_;
  std::vector<double> vals_;  // n_blocks * b * b, row-major per block
};

/// Accumulating builder; duplicate insertions add.
class BlockMatrixBuilder {
 public:
  BlockMatrixBuilder(int n_block_rows, int block_size)
      : b_(block_size), rows_(n_block_rows) {}

  int block_size() const { return b_; }

  /// Adds v to entry (r,c) of block (i,j).
  void add(int i, int j, int r, int c, double v) {
    auto& blk = rows_[i][j];
    if (blk.empty()) blk.assign(static_cast<size_t>(b_) * b_, 0.0);
    blk[static_cast<size_t>(r) * b_ + c] += v;
  }

  /// Adds a full dense block.
  void add_block(int i, int j, const double* v) {
    auto& blk = rows_[i][j];
    if (blk.empty()) blk.assign(static_cast<size_t>(b_) * b_, 0.0);
    for (int r = 0; r < b_ * b_; ++r) blk[r] += v[r];
  }

  BlockSparseMatrix build() const {
    BlockSparseMatrix a;
    a.b_ = b_;
    a.n_ = static_cast<int>(rows_.size());
    a.row_ptr_.resize(a.n_ + 1, 0);
    for (int i = 0; i < a.n_; ++i) a.row_ptr_[i + 1] = a.row_ptr_[i] + static_cast<int>(rows_[i].size());
    a.col_.reserve(a.row_ptr_[a.n_]);
    a.vals_.reserve(static_cast<size_t>(a.row_ptr_[a.n_]) * b_ * b_);
    for (const auto& row : rows_)
      for (const auto& [j, blk] : row) {
        a.col_.push_back(j);
        a.vals_.insert(a.vals_.end(), blk.begin(), blk.end());
      }
    return a;
  }

 private:
  int b_;
  std::vector<std::map<int, std::vector<double>>> rows_;
};

/// True iff the permuted matrix has all blocks on or below the diagonal.
/// perm[i] is the block row placed at position i; it must be a bijection.
inline bool is_block_lower_triangular(const BlockSparseMatrix& a, const std::vector<int>& perm) {
  std::vector<int> inv(a.n_block_rows(), -1);
  for (size_t i = 0; i < perm.size(); ++i) {
    if (inv[perm[i]] != -1) throw std::invalid_argument("is_block_lower_triangular: not a bijection");
    inv[perm[i]] = static_cast<int>(i);
  }
  for (int i = 0; i < a.n_block_rows(); ++i)
    for (int e = a.row_begin(i); e < a.row_end(i); ++e) {
      const double* blk = a.block(e);
      bool nonzero = false;
      for (int r = 0; r < a.block_size() * a.block_size(); ++r)
        if (blk[r] != 0.0) nonzero = true;
      if (nonzero && inv[a.col(e)] > inv[i]) return false;
    }
  return true;
}

}  // namespace gw
