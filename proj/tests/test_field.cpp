#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>

#include "gw/random_field.hpp"

using namespace gw;

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("counter-based noise is a pure function of seed and counter") {
  const double a = detail::counter_uniform(42, 7);
  const double b = detail::counter_uniform(42, 7);
  CHECK(a == b);
  CHECK(a > 0.0);
  CHECK(a <= 1.0);
  CHECK(detail::counter_uniform(42, 8) != a);
  CHECK(detail::counter_uniform(43, 7) != a);

  double g1a, g1b, g2a, g2b;
  detail::counter_normal_pair(5, 11, g1a, g1b);
  detail::counter_normal_pair(5, 11, g2a, g2b);
  CHECK(g1a == g2a);
  CHECK(g1b == g2b);
}

TEST_CASE("the radix-2 FFT round-trips and matches a DFT by hand") {
  std::vector<std::complex<double>> a = {{1.0, 0.0}, {2.0, 0.0}, {0.0, 0.0}, {-1.0, 0.0}};
  std::vector<std::complex<double>> orig = a;
  detail::fft_pow2(a.data(), 4, -1);
  // pinned DFT of (1, 2, 0, -1): X0 = 2, X1 = 1-3i, X2 = 0, X3 = 1+3i
  CHECK(a[0].real() == Catch::Approx(2.0));
  CHECK(a[1].real() == Catch::Approx(1.0));
  CHECK(a[1].imag() == Catch::Approx(-3.0));
  CHECK(a[2].real() == Catch::Approx(0.0).margin(1e-14));
  CHECK(a[3].imag() == Catch::Approx(3.0));
  detail::fft_pow2(a.data(), 4, +1);
  for (int i = 0; i < 4; ++i) CHECK(a[i].real() / 4.0 == Catch::Approx(orig[i].real()).margin(1e-14));

  CHECK(detail::next_pow2(1) == 1);
  CHECK(detail::next_pow2(100) == 128);
  CHECK(detail::next_pow2(128) == 128);
}

TEST_CASE("zero variance returns the constant mean field") {
  GeoStatParams p;
  p.beta = -6.0;
  p.sigma2 = 0.0;
  const GridSpec grid{{100.0, 100.0}, {20, 20}};
  const std::vector<double> y = sample_gaussian_field(p, grid);
  REQUIRE(y.size() == 400);
  for (double v : y) CHECK(v == -6.0);
}

TEST_CASE("sampling is deterministic in the seed") {
  GeoStatParams p;
  p.seed = 1234;
  const GridSpec grid{{100.0, 100.0}, {32, 32}};
  const std::vector<double> y1 = sample_gaussian_field(p, grid);
  const std::vector<double> y2 = sample_gaussian_field(p, grid);
  REQUIRE(y1.size() == y2.size());
  for (size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == y2[i]);
  p.seed = 1235;
  const std::vector<double> y3 = sample_gaussian_field(p, grid);
  int differing = 0;
  for (size_t i = 0; i < y1.size(); ++i)
    if (y1[i] != y3[i]) ++differing;
  CHECK(differing > 900);
}

TEST_CASE("invalid geostatistics are rejected") {
  const GridSpec grid{{10.0, 10.0}, {4, 4}};
  GeoStatParams p;
  p.sigma2 = -1.0;
  CHECK_THROWS_AS(sample_gaussian_field(p, grid), std::invalid_argument);
  p.sigma2 = 1.0;
  p.ell = {0.0, 10.0};
  CHECK_THROWS_AS(sample_gaussian_field(p, grid), std::invalid_argument);
}

TEST_CASE("ensemble mean and variance match the prescribed statistics") {
  GeoStatParams p;
  p.beta = -6.0;
  p.sigma2 = 1.0;
  p.ell = {10.0, 10.0};
  const GridSpec grid{{100.0, 100.0}, {50, 50}};
  double msum = 0.0, vsum = 0.0;
  const int n_real = 20;
  for (int s = 0; s < n_real; ++s) {
    p.seed = 1000 + s;
    const std::vector<double> y = sample_gaussian_field(p, grid);
    msum += mean(y);
    vsum += variance(y);
  }
  CHECK(msum / n_real == Catch::Approx(-6.0).margin(0.1));
  CHECK(vsum / n_real == Catch::Approx(1.0).margin(0.15));
}

TEST_CASE("the empirical correlation decays with the Gaussian covariance") {
  GeoStatParams p;
  p.beta = 0.0;
  p.sigma2 = 1.0;
  p.ell = {10.0, 10.0};
  const GridSpec grid{{100.0, 100.0}, {50, 50}};
  // lag of one correlation length along x: rho = exp(-1) ~ 0.368
  const int lag = 5;  // 5 cells * 2 m = 10 m = ell
  double num = 0.0, den = 0.0;
  for (int s = 0; s < 20; ++s) {
    p.seed = 7000 + s;
    const std::vector<double> y = sample_gaussian_field(p, grid);
    for (int iy = 0; iy < 50; ++iy)
      for (int ix = 0; ix + lag < 50; ++ix) {
        num += y[static_cast<size_t>(iy) * 50 + ix] * y[static_cast<size_t>(iy) * 50 + ix + lag];
        den += y[static_cast<size_t>(iy) * 50 + ix] * y[static_cast<size_t>(iy) * 50 + ix];
      }
  }
  const double rho = num / den;
  CHECK(rho > 0.2);
  CHECK(rho < 0.55);
}

TEST_CASE("conductivity is exp of the log field with wells forced to one") {
  const GridSpec grid{{100.0, 100.0}, {50, 50}};
  std::vector<double> y(2500, -6.0);
  WellSpec well;
  well.box_lo = {24.0, 48.0};
  well.box_hi = {26.0, 50.0};
  well.rate = 5e-4;
  const ConductivityField f = build_conductivity(y, grid, {well});
  // exp(-6) in plain cells
  CHECK(f.k[0] == Catch::Approx(2.478752176666358e-3));
  // the well box covers cells ix = 12, iy = 24 (cell size 2 m)
  CHECK(f.k[24 * 50 + 12] == 1.0);
  CHECK(f.k[24 * 50 + 11] == Catch::Approx(2.478752176666358e-3));
  int forced = 0;
  for (double k : f.k)
    if (k == 1.0) ++forced;
  CHECK(forced == 1);

  CHECK(well.volume() == Catch::Approx(4.0));
  CHECK(well.rate_density() == Catch::Approx(1.25e-4));
}

TEST_CASE("cell and well overlap uses open intervals") {
  WellSpec w;
  w.box_lo = {1.0, 1.0};
  w.box_hi = {2.0, 2.0};
  CHECK(cell_in_well(w, {0.5, 0.5}, {1.5, 1.5}));
  CHECK_FALSE(cell_in_well(w, {0.0, 0.0}, {1.0, 1.0}));  // touching edge only
  CHECK_FALSE(cell_in_well(w, {2.0, 1.0}, {3.0, 2.0}));
  CHECK(cell_in_well(w, {0.0, 0.0}, {5.0, 5.0}));  // containment
}

TEST_CASE("CSV and binary field files round-trip") {
  const GridSpec grid{{3.0, 2.0}, {3, 2}};
  const std::vector<double> v = {1.5, -2.25, 0.0, 1e-17, 42.0, -6.0};

  const std::string csv = "/tmp/gw_field_test.csv";
  write_field_csv(csv, grid, v);
  GridSpec g2;
  const std::vector<double> r = read_field_csv(csv, g2);
  CHECK(g2.cells_per_axis[0] == 3);
  CHECK(g2.cells_per_axis[1] == 2);
  CHECK(g2.extents[0] == 3.0);
  REQUIRE(r.size() == 6);
  for (size_t i = 0; i < 6; ++i) CHECK(r[i] == v[i]);

  const std::string bin = "/tmp/gw_field_test.bin";
  write_field_binary(bin, grid, v);
  GridSpec g3;
  const std::vector<double> rb = read_field_binary(bin, g3);
  CHECK(g3.cells_per_axis[1] == 2);
  for (size_t i = 0; i < 6; ++i) CHECK(rb[i] == v[i]);

  std::remove(csv.c_str());
  std::remove(bin.c_str());
  CHECK_THROWS_AS(read_field_csv("/tmp/gw_no_such_file.csv", g2), std::runtime_error);
  CHECK_THROWS_AS(read_field_binary(csv, g3), std::runtime_error);
}
