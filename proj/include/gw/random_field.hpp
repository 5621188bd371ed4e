#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "gw/mesh.hpp"

namespace gw {

/// Log-conductivity geostatistics: Y ~ N(beta, sigma2) with Gaussian covariance
/// C(r) = sigma2 * exp(-sum_i (r_i/ell_i)^2).
struct GeoStatParams {
  double beta = -6.0;
  double sigma2 = 1.0;
  std::array<double, 2> ell = {10.0, 10.0};
  std::uint64_t seed = 0;
};

enum class WellKind { injection, extraction };

/// Axis-aligned well region with a total volumetric rate; the per-unit-volume
/// rate is total rate / region volume.
struct WellSpec {
  WellKind kind = WellKind::injection;
  std::array<double, 2> box_lo = {0.0, 0.0};
  std::array<double, 2> box_hi = {0.0, 0.0};
  double rate = 0.0;    // m^3/s, total over the region
  double conc = 0.0;    // g/m^3, injection only
  double t_inj = 0.0;   // s, injection only

  double volume() const { return (box_hi[0] - box_lo[0]) * (box_hi[1] - box_lo[1]); }
  /// Volumetric flux per unit volume (1/s).
  double rate_density() const { return rate / volume(); }
};

/// Cell-wise constant conductivity on the level-0 grid, row-major.
struct ConductivityField {
  std::vector<double> y;
  std::vector<double> k;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based uniform in (0,1]; pure function of (seed, counter).
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t h = splitmix64(splitmix64(seed) ^ counter);
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

/// Box-Muller pair from two counter draws.
inline void counter_normal_pair(std::uint64_t seed, std::uint64_t counter, double& a, double& b) {
  const double u1 = counter_uniform(seed, 2 * counter);
  const double u2 = counter_uniform(seed, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  a = r * std::cos(2.0 * M_PI * u2);
  b = r * std::sin(2.0 * M_PI * u2);
}

/// In-place iterative radix-2 FFT; n must be a power of two.
/// sign = -1 forward, +1 inverse (unnormalized).
inline void fft_pow2(std::complex<double>* a, int n, int sign) {
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / len;
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

/// 2-D FFT on a row-major mx x my array (x fastest).
inline void fft2_pow2(std::vector<std::complex<double>>& a, int mx, int my, int sign) {
  for (int iy = 0; iy < my; ++iy) fft_pow2(a.data() + static_cast<size_t>(iy) * mx, mx, sign);
  std::vector<std::complex<double>> col(my);
  for (int ix = 0; ix < mx; ++ix) {
    for (int iy = 0; iy < my; ++iy) col[iy] = a[static_cast<size_t>(iy) * mx + ix];
    fft_pow2(col.data(), my, sign);
    for (int iy = 0; iy < my; ++iy) a[static_cast<size_t>(iy) * mx + ix] = col[iy];
  }
}

inline int next_pow2(int n) {
  int m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace detail

/// Samples Y at cell centers of the structured grid via circulant embedding:
/// the covariance is wrapped onto a periodic torus padded to powers of two
/// (at least twice the grid size per axis), tiny negative embedding
/// eigenvalues are clamped to zero, and one FFT of spectrally scaled
/// counter-based Gaussian noise yields the field. Row-major, bit-identical
/// for identical (params, grid).
inline std::vector<double> sample_gaussian_field(const GeoStatParams& params,
                                                 const GridSpec& grid) {
  if (params.sigma2 < 0.0) throw std::invalid_argument("sample_gaussian_field: sigma2 < 0");
  if (params.ell[0] <= 0.0 || params.ell[1] <= 0.0)
    throw std::invalid_argument("sample_gaussian_field: correlation length <= 0");
  const int nx = grid.cells_per_axis[0];
  const int ny = grid.cells_per_axis[1];
  const size_t n = static_cast<size_t>(nx) * ny;
  std::vector<double> y(n, params.beta);
  if (params.sigma2 == 0.0) return y;

  const double dx = grid.extents[0] / nx;
  const double dy = grid.extents[1] / ny;
  const int mx = detail::next_pow2(2 * nx);
  const int my = detail::next_pow2(2 * ny);
  const size_t m = static_cast<size_t>(mx) * my;

  // First row of the block circulant: covariance at torus lags.
  std::vector<std::complex<double>> lam(m);
  for (int iy = 0; iy < my; ++iy) {
    const int ly = std::min(iy, my - iy);
    const double ry = ly * dy / params.ell[1];
    for (int ix = 0; ix < mx; ++ix) {
      const int lx = std::min(ix, mx - ix);
      const double rx = lx * dx / params.ell[0];
      lam[static_cast<size_t>(iy) * mx + ix] = params.sigma2 * std::exp(-rx * rx - ry * ry);
    }
  }
  detail::fft2_pow2(lam, mx, my, -1);

  // Spectrally scaled proper complex Gaussian noise; the real part of its
  // inverse transform carries covariance C.
  std::vector<std::complex<double>> w(m);
  for (size_t i = 0; i < m; ++i) {
    const double ev = std::max(0.0, lam[i].real());
    double a, b;
    detail::counter_normal_pair(params.seed, i, a, b);
    w[i] = std::sqrt(ev) * std::complex<double>(a, b);
  }
  detail::fft2_pow2(w, mx, my, +1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      y[static_cast<size_t>(iy) * nx + ix] =
          params.beta + scale * w[static_cast<size_t>(iy) * mx + ix].real();
  return y;
}

/// True iff the cell overlaps the well box with positive area.
inline bool cell_in_well(const WellSpec& well, const std::array<double, 2>& lo,
                         const std::array<double, 2>& hi) {
  return lo[0] < well.box_hi[0] && hi[0] > well.box_lo[0] && lo[1] < well.box_hi[1] &&
         hi[1] > well.box_lo[1];
}

/// K = exp(Y); cells intersecting a well region get K = 1.
inline ConductivityField build_conductivity(const std::vector<double>& y, const GridSpec& grid,
                                            const std::vector<WellSpec>& wells) {
  const int nx = grid.cells_per_axis[0];
  const int ny = grid.cells_per_axis[1];
  ConductivityField f;
  f.y = y;
  f.k.resize(y.size());
  const double dx = grid.extents[0] / nx;
  const double dy = grid.extents[1] / ny;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const size_t i = static_cast<size_t>(iy) * nx + ix;
      const std::array<double, 2> lo = {ix * dx, iy * dy};
      const std::array<double, 2> hi = {(ix + 1) * dx, (iy + 1) * dy};
      bool in_well = false;
      for (const auto& well : wells)
        if (cell_in_well(well, lo, hi)) in_well = true;
      f.k[i] = in_well ? 1.0 : std::exp(y[i]);
    }
  return f;
}

/// CSV field format: header line "nx,ny,extent_x,extent_y", then ny lines of
/// nx comma-separated values, row-major from the bottom row.
inline void write_field_csv(const std::string& path, const GridSpec& grid,
                            const std::vector<double>& values) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_field_csv: cannot open " + path);
  const int nx = grid.cells_per_axis[0];
  const int ny = grid.cells_per_axis[1];
  std::fprintf(f, "%d,%d,%.17g,%.17g\n", nx, ny, grid.extents[0], grid.extents[1]);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix)
      std::fprintf(f, "%.17g%s", values[static_cast<size_t>(iy) * nx + ix],
                   ix + 1 < nx ? "," : "\n");
  }
  std::fclose(f);
}

inline std::vector<double> read_field_csv(const std::string& path, GridSpec& grid) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw std::runtime_error("read_field_csv: cannot open " + path);
  int nx = 0, ny = 0;
  double ex = 0.0, ey = 0.0;
  if (std::fscanf(f, "%d,%d,%lf,%lf", &nx, &ny, &ex, &ey) != 4 || nx <= 0 || ny <= 0) {
    std::fclose(f);
    throw std::runtime_error("read_field_csv: bad header in " + path);
  }
  grid.cells_per_axis = {nx, ny};
  grid.extents = {ex, ey};
  std::vector<double> values(static_cast<size_t>(nx) * ny);
  for (size_t i = 0; i < values.size(); ++i) {
    if (std::fscanf(f, i % nx == 0 ? " %lf" : ",%lf", &values[i]) != 1) {
      std::fclose(f);
      throw std::runtime_error("read_field_csv: truncated data in " + path);
    }
  }
  std::fclose(f);
  return values;
}

/// Flat binary field format: "GWF1", int32 nx, ny, double extents, doubles row-major.
inline void write_field_binary(const std::string& path, const GridSpec& grid,
                               const std::vector<double>& values) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_field_binary: cannot open " + path);
  std::fwrite("GWF1", 1, 4, f);
  const std::int32_t dims[2] = {grid.cells_per_axis[0], grid.cells_per_axis[1]};
  std::fwrite(dims, sizeof(std::int32_t), 2, f);
  std::fwrite(grid.extents.data(), sizeof(double), 2, f);
  std::fwrite(values.data(), sizeof(double), values.size(), f);
  std::fclose(f);
}

inline std::vector<double> read_field_binary(const std::string& path, GridSpec& grid) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("read_field_binary: cannot open " + path);
  char magic[4];
  std::int32_t dims[2];
  double extents[2];
  if (std::fread(magic, 1, 4, f) != 4 || std::string(magic, 4) != "GWF1" ||
      std::fread(dims, sizeof(std::int32_t), 2, f) != 2 ||
      std::fread(extents, sizeof(double), 2, f) != 2 || dims[0] <= 0 || dims[1] <= 0) {
    std::fclose(f);
    throw std::runtime_error("read_field_binary: bad header in " + path);
  }
  grid.cells_per_axis = {dims[0], dims[1]};
  grid.extents = {extents[0], extents[1]};
  std::vector<double> values(static_cast<size_t>(dims[0]) * dims[1]);
  if (std::fread(values.data(), sizeof(double), values.size(), f) != values.size()) {
    std::fclose(f);
    throw std::runtime_error("read_field_binary: truncated data in " + path);
  }
  std::fclose(f);
  return values;
}

}  // namespace gw
