#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gw/blockmatrix.hpp"
#include "gw/dense.hpp"

namespace gw {

/// Left preconditioner interface: z = M^{-1} r.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::vector<double>& z, const std::vector<double>& r) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::vector<double>& z, const std::vector<double>& r) const override { z = r; }
};

/// One symmetric block-SOR sweep (forward then backward, starting from zero)
/// as M^{-1}. For a block lower-triangular matrix and omega = 1 the forward
/// half-sweep is already an exact solve.
class BlockSSOR final : public Preconditioner {
 public:
  explicit BlockSSOR(const BlockSparseMatrix& a, double omega = 1.0) : a_(&a), omega_(omega) {
    const int b = a.block_size();
    diag_.reserve(a.n_block_rows());
    for (int i = 0; i < a.n_block_rows(); ++i) {
      int e = a.find(i, i);
      if (e < 0) throw std::runtime_error("BlockSSOR: missing diagonal block in row " + std::to_string(i));
      try {
        diag_.emplace_back(DenseMatrix(b, a.block(e)));
      } catch (const std::runtime_error&) {
        throw std::runtime_error("BlockSSOR: singular diagonal block in row " + std::to_string(i));
      }
    }
  }

  void apply(std::vector<double>& z, const std::vector<double>& r) const override {
    z.assign(r.size(), 0.0);
    sweep(z, r, /*forward=*/true);
    sweep(z, r, /*forward=*/false);
  }

 private:
  void sweep(std::vector<double>& z, const std::vector<double>& r, bool forward) const {
    const int n = a_->n_block_rows();
    const int b = a_->block_size();
    std::vector<double> rhs(b), zi(b);
    for (int k = 0; k < n; ++k) {
      const int i = forward ? k : n - 1 - k;
      for (int c = 0; c < b; ++c) rhs[c] = r[static_cast<size_t>(i) * b + c];
      for (int e = a_->row_begin(i); e < a_->row_end(i); ++e) {
        const int j = a_->col(e);
        if (j == i) continue;
        const double* blk = a_->block(e);
        const double* zj = z.data() + static_cast<size_t>(j) * b;
        for (int rr = 0; rr < b; ++rr) {
          double s = 0.0;
          for (int cc = 0; cc < b; ++cc) s += blk[rr * b + cc] * zj[cc];
          rhs[rr] -= s;
        }
      }
      diag_[i].solve(rhs.data(), zi.data());
      double* zrow = z.data() + static_cast<size_t>(i) * b;
      for (int c = 0; c < b; ++c) zrow[c] = (1.0 - omega_) * zrow[c] + omega_ * zi[c];
    }
  }

  const BlockSparseMatrix* a_;
  double omega_;
  std::vector<DenseLU> diag_;
};

/// Block ILU(0): incomplete block LU with zero fill-in on A's pattern.
class BlockILU0 final : public Preconditioner {
 public:
  explicit BlockILU0(const BlockSparseMatrix& a) : lu_(a) {
    const int n = lu_.n_block_rows();
    const int b = lu_.block_size();
    diag_.resize(n);
    std::vector<double> tmp(static_cast<size_t>(b) * b);
    for (int i = 0; i < n; ++i) {
      for (int e = lu_.row_begin(i); e < lu_.row_end(i); ++e) {
        const int k = lu_.col(e);
        if (k >= i) break;
        // L_ik = A_ik * U_kk^{-1}
        double* aik = lu_.block(e);
        invert_right(aik, diag_[k], b, tmp);
        // A_ij -= L_ik * A_kj for j > k in the pattern of row i
        for (int f = lu_.row_begin(k); f < lu_.row_end(k); ++f) {
          const int j = lu_.col(f);
          if (j <= k) continue;
          const int g = lu_.find(i, j);
          if (g < 0) continue;  // zero fill-in
          multiply_subtract(lu_.block(g), aik, lu_.block(f), b);
        }
      }
      const int e = lu_.find(i, i);
      if (e < 0) throw std::runtime_error("BlockILU0: missing diagonal block in row " + std::to_string(i));
      try {
        diag_[i] = DenseLU(DenseMatrix(b, lu_.block(e)));
      } catch (const std::runtime_error&) {
        throw std::runtime_error("BlockILU0: singular pivot block in row " + std::to_string(i));
      }
    }
  }

  void apply(std::vector<double>& z, const std::vector<double>& r) const override {
    const int n = lu_.n_block_rows();
    const int b = lu_.block_size();
    z = r;
    std::vector<double> zi(b);
    // forward: (I + L) y = r
    for (int i = 0; i < n; ++i) {
      double* zrow = z.data() + static_cast<size_t>(i) * b;
      for (int e = lu_.row_begin(i); e < lu_.row_end(i); ++e) {
        const int j = lu_.col(e);
        if (j >= i) break;
        mv_subtract(zrow, lu_.block(e), z.data() + static_cast<size_t>(j) * b, b);
      }
    }
    // backward: U z = y
    for (int i = n - 1; i >= 0; --i) {
      double* zrow = z.data() + static_cast<size_t>(i) * b;
      for (int e = lu_.row_begin(i); e < lu_.row_end(i); ++e) {
        const int j = lu_.col(e);
        if (j <= i) continue;
        mv_subtract(zrow, lu_.block(e), z.data() + static_cast<size_t>(j) * b, b);
      }
      diag_[i].solve(zrow, zi.data());
      for (int c = 0; c < b; ++c) zrow[c] = zi[c];
    }
  }

 private:
  static void mv_subtract(double* y, const double* blk, const double* x, int b) {
    for (int r = 0; r < b; ++r) {
      double s = 0.0;
      for (int c = 0; c < b; ++c) s += blk[r * b + c] * x[c];
      y[r] -= s;
    }
  }

  // blk <- blk * U^{-1}, built column-wise from U z = e_c solves.
  static void invert_right(double* blk, const DenseLU& lu, int b, std::vector<double>& tmp) {
    for (int c = 0; c < b; ++c) {
      std::vector<double> e(b, 0.0), z(b);
      e[c] = 1.0;
      lu.solve(e.data(), z.data());
      for (int r = 0; r < b; ++r) {
        double s = 0.0;
        for (int m = 0; m < b; ++m) s += blk[r * b + m] * z[m];
        tmp[r * b + c] = s;
      }
    }
    for (int r = 0; r < b * b; ++r) blk[r] = tmp[r];
  }

  // g -= l * u
  static void multiply_subtract(double* g, const double* l, const double* u, int b) {
    for (int r = 0; r < b; ++r)
      for (int c = 0; c < b; ++c) {
        double s = 0.0;
        for (int m = 0; m < b; ++m) s += l[r * b + m] * u[m * b + c];
        g[r * b + c] -= s;
      }
  }

  BlockSparseMatrix lu_;
  std::vector<DenseLU> diag_;
};

}  // namespace gw
