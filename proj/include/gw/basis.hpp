#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gw/vec.hpp"

namespace gw {

/// Gauss-Lobatto points on [0,1] (k+1 of them); the Lagrange nodes of Q_k.
/// k = 0 places the single node at the cell center.
inline std::vector<double> lobatto_nodes(int k) {
  if (k == 0) return {0.5};
  if (k == 1) return {0.0, 1.0};
  std::vector<double> nodes(k + 1);
  nodes.front() = 0.0;
  nodes.back() = 1.0;
  // Interior nodes are the roots of P_k' on [-1,1].
  for (int i = 1; i < k; ++i) {
    double x = std::cos(M_PI * i / k);  // good initial guess, descending
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= k; ++m) {
        double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      // dP_k and d2P_k from the standard identities
      double dp = k * (x * p1 - p0) / (x * x - 1.0);
      double d2p = (2.0 * x * dp - k * (k + 1.0) * p1) / (1.0 - x * x);
      double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[k - i] = 0.5 * (x + 1.0);
  }
  return nodes;
}

/// Tensor Lagrange basis Q_k on the reference square [0,1]^2.
class QkBasis {
 public:
  explicit QkBasis(int k) : k_(k), nodes_(lobatto_nodes(k)) {
    if (k < 0) throw std::invalid_argument("QkBasis: degree must be >= 0");
  }

  int degree() const { return k_; }
  int size() const { return (k_ + 1) * (k_ + 1); }
  const std::vector<double>& nodes_1d() const { return nodes_; }

  Vec2 node(int i) const { return {nodes_[i % (k_ + 1)], nodes_[i / (k_ + 1)]}; }

  /// Values and reference gradients of all shape functions at xhat.
  void eval(const Vec2& xhat, std::vector<double>& values, std::vector<Vec2>& grads) const {
    const int n1 = k_ + 1;
    std::vector<double> lx(n1), ly(n1), dlx(n1), dly(n1);
    eval_1d(xhat.x, lx, dlx);
    eval_1d(xhat.y, ly, dly);
    values.resize(size());
    grads.resize(size());
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n1; ++i) {
        values[j * n1 + i] = lx[i] * ly[j];
        grads[j * n1 + i] = {dlx[i] * ly[j], lx[i] * dly[j]};
      }
  }

  /// Reference Laplacian terms: d2/dx2 and d2/dy2 of each shape function.
  void eval_second(const Vec2& xhat, std::vector<Vec2>& second) const {
    const int n1 = k_ + 1;
    std::vector<double> lx(n1), ly(n1), dlx(n1), dly(n1), d2lx(n1), d2ly(n1);
    eval_1d(xhat.x, lx, dlx, &d2lx);
    eval_1d(xhat.y, ly, dly, &d2ly);
    second.resize(size());
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n1; ++i) second[j * n1 + i] = {d2lx[i] * ly[j], lx[i] * d2ly[j]};
  }

 private:
  /// 1-D Lagrange values/derivatives at x for all nodes.
  void eval_1d(double x, std::vector<double>& val, std::vector<double>& der,
               std::vector<double>* der2 = nullptr) const {
    const int n = k_ + 1;
    for (int i = 0; i < n; ++i) {
      double v = 1.0, d = 0.0, d2 = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m == i) continue;
        const double w = 1.0 / (nodes_[i] - nodes_[m]);
        const double t = (x - nodes_[m]) * w;
        d2 = d2 * t + 2.0 * d * w;
        d = d * t + v * w;
        v *= t;
      }
      val[i] = v;
      der[i] = d;
      if (der2) (*der2)[i] = d2;
    }
  }

  int k_;
  std::vector<double> nodes_;
};

}  // namespace gw
