#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gw/blockmatrix.hpp"
#include "gw/precond.hpp"

namespace gw {

struct SolveReport {
  int iterations = 0;
  double reduction = 1.0;  // achieved ||r||/||r0||
  bool converged = false;
  bool breakdown = false;
  double seconds = 0.0;
};

namespace detail {

inline double dot_v(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_v(const std::vector<double>& a) { return std::sqrt(dot_v(a, a)); }

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

/// Preconditioned BiCGSTAB, x0 = 0. Converges when ||b - Ax|| <= reduction * ||b||.
inline SolveReport bicgstab(const BlockSparseMatrix& a, const std::vector<double>& b,
                            std::vector<double>& x, const Preconditioner& m,
                            double reduction, int max_iter = 10000) {
  if (!(reduction > 0.0 && reduction < 1.0))
    throw std::invalid_argument("bicgstab: reduction must be in (0,1)");
  detail::Stopwatch clock;
  const size_t n = b.size();
  x.assign(n, 0.0);
  std::vector<double> r = b, r0 = b, p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
  SolveReport rep;
  const double bnorm = detail::norm_v(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.reduction = 0.0;
    rep.seconds = clock.seconds();
    return rep;
  }
  const double target = reduction * bnorm;
  double rho_old = 1.0, alpha = 1.0, omega = 1.0;
  double rnorm = bnorm;
  for (int it = 1; it <= max_iter; ++it) {
    const double rho = detail::dot_v(r0, r);
    if (std::abs(rho) < 1e-300) {
      rep.breakdown = true;
      break;
    }
    if (it == 1) {
      p = r;
    } else {
      const double beta = (rho / rho_old) * (alpha / omega);
      for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    m.apply(phat, p);
    a.matvec(phat, v);
    alpha = rho / detail::dot_v(r0, v);
    s = r;
    detail::axpy(-alpha, v, s);
    if (detail::norm_v(s) <= target) {
      detail::axpy(alpha, phat, x);
      rep.iterations = it;
      rnorm = detail::norm_v(s);
      break;
    }
    m.apply(shat, s);
    a.matvec(shat, t);
    const double tt = detail::dot_v(t, t);
    if (tt == 0.0) {
      rep.breakdown = true;
      detail::axpy(alpha, phat, x);
      break;
    }
    omega = detail::dot_v(t, s) / tt;
    detail::axpy(alpha, phat, x);
    detail::axpy(omega, shat, x);
    r = s;
    detail::axpy(-omega, t, r);
    rho_old = rho;
    rep.iterations = it;
    rnorm = detail::norm_v(r);
    if (rnorm <= target) break;
    if (std::abs(omega) < 1e-300) {
      rep.breakdown = true;
      break;
    }
  }
  // Report the true residual.
  std::vector<double> res;
  a.residual(b, x, res);
  rep.reduction = detail::norm_v(res) / bnorm;
  rep.converged = rep.reduction <= reduction;
  rep.seconds = clock.seconds();
  return rep;
}

/// Preconditioned CG for SPD systems, x0 = 0.
/// Throws if an indefinite direction (p'Ap <= 0) is detected.
inline SolveReport cg(const BlockSparseMatrix& a, const std::vector<double>& b,
                      std::vector<double>& x, const Preconditioner& m, double reduction,
                      int max_iter = 10000) {
  if (!(reduction > 0.0 && reduction < 1.0))
    throw std::invalid_argument("cg: reduction must be in (0,1)");
  detail::Stopwatch clock;
  const size_t n = b.size();
  x.assign(n, 0.0);
  std::vector<double> r = b, z(n), p(n), ap(n);
  SolveReport rep;
  const double bnorm = detail::norm_v(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.reduction = 0.0;
    rep.seconds = clock.seconds();
    return rep;
  }
  const double target = reduction * bnorm;
  m.apply(z, r);
  p = z;
  double rz = detail::dot_v(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    a.matvec(p, ap);
    const double pap = detail::dot_v(p, ap);
    if (pap <= 0.0) throw std::runtime_error("cg: matrix is not positive definite");
    const double alpha = rz / pap;
    detail::axpy(alpha, p, x);
    detail::axpy(-alpha, ap, r);
    rep.iterations = it;
    const double rnorm = detail::norm_v(r);
    if (rnorm <= target) break;
    m.apply(z, r);
    const double rz_new = detail::dot_v(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  std::vector<double> res;
  a.residual(b, x, res);
  rep.reduction = detail::norm_v(res) / bnorm;
  rep.converged = rep.reduction <= reduction;
  rep.seconds = clock.seconds();
  return rep;
}

/// Restarted GMRES(restart) with left preconditioning, x0 = 0.
inline SolveReport gmres(const BlockSparseMatrix& a, const std::vector<double>& b,
                         std::vector<double>& x, const Preconditioner& m, double reduction,
                         int restart = 50, int max_iter = 10000) {
  if (!(reduction > 0.0 && reduction < 1.0))
    throw std::invalid_argument("gmres: reduction must be in (0,1)");
  detail::Stopwatch clock;
  const size_t n = b.size();
  x.assign(n, 0.0);
  SolveReport rep;
  std::vector<double> mb(n);
  m.apply(mb, b);
  const double b0 = detail::norm_v(mb);
  const double bnorm = detail::norm_v(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.reduction = 0.0;
    rep.seconds = clock.seconds();
    return rep;
  }
  const double target = reduction * b0;
  int total_it = 0;
  bool done = false;
  while (!done && total_it < max_iter) {
    std::vector<double> r(n), tmp(n);
    a.residual(b, x, tmp);
    m.apply(r, tmp);
    double beta = detail::norm_v(r);
    if (beta <= target) break;
    const int mdim = restart;
    std::vector<std::vector<double>> v;
    v.push_back(r);
    for (double& e : v[0]) e /= beta;
    std::vector<double> h(static_cast<size_t>(mdim + 1) * mdim, 0.0);
    std::vector<double> cs(mdim), sn(mdim), g(mdim + 1, 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < mdim && total_it < max_iter; ++k) {
      ++total_it;
      a.matvec(v[k], tmp);
      std::vector<double> w(n);
      m.apply(w, tmp);
      for (int i = 0; i <= k; ++i) {
        const double hik = detail::dot_v(w, v[i]);
        h[static_cast<size_t>(i) * mdim + k] = hik;
        detail::axpy(-hik, v[i], w);
      }
      const double hk1 = detail::norm_v(w);
      // Givens rotations to maintain the QR of H
      for (int i = 0; i < k; ++i) {
        const double t0 = cs[i] * h[static_cast<size_t>(i) * mdim + k] +
                          sn[i] * h[static_cast<size_t>(i + 1) * mdim + k];
        h[static_cast<size_t>(i + 1) * mdim + k] =
            -sn[i] * h[static_cast<size_t>(i) * mdim + k] +
            cs[i] * h[static_cast<size_t>(i + 1) * mdim + k];
        h[static_cast<size_t>(i) * mdim + k] = t0;
      }
      const double denom = std::hypot(h[static_cast<size_t>(k) * mdim + k], hk1);
      if (denom == 0.0) {
        rep.breakdown = true;
        break;
      }
      cs[k] = h[static_cast<size_t>(k) * mdim + k] / denom;
      sn[k] = hk1 / denom;
      h[static_cast<size_t>(k) * mdim + k] = denom;
      g[k + 1] = -sn[k] * g[k];
      g[k] *= cs[k];
      if (hk1 != 0.0) {
        for (double& e : w) e /= hk1;
        v.push_back(w);
      }
      if (std::abs(g[k + 1]) <= target || hk1 == 0.0) {
        ++k;
        done = std::abs(g[k]) <= target;
        break;
      }
    }
    // back-substitute y and update x
    std::vector<double> y(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h[static_cast<size_t>(i) * mdim + j] * y[j];
      y[i] = s / h[static_cast<size_t>(i) * mdim + i];
    }
    for (int i = 0; i < k; ++i) detail::axpy(y[i], v[i], x);
    if (rep.breakdown) break;
  }
  rep.iterations = total_it;
  std::vector<double> res;
  a.residual(b, x, res);
  rep.reduction = detail::norm_v(res) / bnorm;
  rep.converged = rep.reduction <= reduction;
  rep.seconds = clock.seconds();
  return rep;
}

}  // namespace gw
