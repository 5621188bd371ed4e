#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gw {

/// Small dense matrix with an LU factorization. Used for the diagonal blocks
/// of the block preconditioners and as a reference solver in tests.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}
  DenseMatrix(int n, const double* data) : n_(n), a_(data, data + static_cast<size_t>(n) * n) {}

  int size() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

/// LU factorization with partial pivoting of a small dense matrix.
class DenseLU {
 public:
  DenseLU() = default;

  /// Factorizes a. Throws std::runtime_error on a (numerically) singular pivot.
  explicit DenseLU(const DenseMatrix& a) : n_(a.size()), lu_(a), piv_(a.size()) {
    for (int i = 0; i < n_; ++i) piv_[i] = i;
    for (int k = 0; k < n_; ++k) {
      int p = k;
      double best = std::abs(lu_(k, k));
      for (int i = k + 1; i < n_; ++i) {
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          p = i;
        }
      }
      if (best == 0.0) throw std::runtime_error("DenseLU: singular matrix");
      if (p != k) {
        for (int j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(piv_[k], piv_[p]);
      }
      for (int i = k + 1; i < n_; ++i) {
        lu_(i, k) /= lu_(k, k);
        const double lik = lu_(i, k);
        for (int j = k + 1; j < n_; ++j) lu_(i, j) -= lik * lu_(k, j);
      }
    }
  }

  /// Solves A x = b in place: x may alias b.
  void solve(const double* b, double* x) const {
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i) y[i] = b[piv_[i]];
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < i; ++j) y[i] -= lu_(i, j) * y[j];
    for (int i = n_ - 1; i >= 0; --i) {
      for (int j = i + 1; j < n_; ++j) y[i] -= lu_(i, j) * y[j];
      y[i] /= lu_(i, i);
    }
    for (int i = 0; i < n_; ++i) x[i] = y[i];
  }

  void solve(const std::vector<double>& b, std::vector<double>& x) const {
    x.resize(n_);
    solve(b.data(), x.data());
  }

  int size() const { return n_; }

 private:
  int n_ = 0;
  DenseMatrix lu_;
  std::vector<int> piv_;
};

}  // namespace gw
