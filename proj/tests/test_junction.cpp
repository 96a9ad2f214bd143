#include <doctest.h>

#include <cmath>

#include "weaknoise/error.hpp"
#include "weaknoise/junction.hpp"

using namespace weaknoise::junction;

namespace {

double bessel(int n, double z) {
  const double v = std::cyl_bessel_j(static_cast<double>(std::abs(n)), z);
  return (n < 0 && (std::abs(n) % 2) == 1) ? -v : v;
}

// emission - re_sq at T = 0, omega = Omega = 1, from the standard library Bessel functions.
double violation_margin(double z) {
  double emission = 0.0, re_sq = 0.0;
  for (int n = -40; n <= 40; ++n) {
    emission += bessel(n, z) * bessel(n, z) * (std::abs(1.0 - n) - 1.0);
    re_sq += bessel(n, z) * bessel(n - 2, z) * std::abs(1.0 - n);
  }
  return emission - re_sq;
}

JunctionConfig with(double z, double t = 0.0, double td = 0.0) {
  JunctionConfig c;
  c.z = z;
  c.temperature = t;
  c.detector_temperature = td;
  return c;
}

}  // namespace

TEST_SUITE("junction") {

TEST_CASE("equilibrium noise function") {
  CHECK(w(-2.5, 0.0) == 2.5);
  CHECK(w(0.0, 0.7) == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(w(1.0, 0.5) == doctest::Approx(1.0 / std::tanh(1.0)).epsilon(1e-15));
  CHECK(w(-1.0, 0.5) == w(1.0, 0.5));
  CHECK(w(1e-10, 0.3) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("DC noise formulas") {
  JunctionConfig c;
  c.temperature = c.detector_temperature = 0.6;
  for (double omega : {0.0, 0.3, 2.0}) CHECK(std::abs(dc_noise(c, omega, NoiseOrdering::Weak)) < 1e-15);
  c = JunctionConfig{};
  c.v_dc = 1.7;
  CHECK(dc_noise(c, 0.0, NoiseOrdering::Symmetrized) == doctest::Approx(1.7));
  c.v_dc = 2.0;
  CHECK(dc_noise(c, 1.0, NoiseOrdering::Weak) == doctest::Approx(1.0));
  CHECK_THROWS_AS(dc_noise(with(0.5), 1.0, NoiseOrdering::Weak), weaknoise::Error);
}

TEST_CASE("ordering difference does not depend on bias or system temperature") {
  for (double td : {0.0, 0.4, 2.0}) {
    for (double omega : {0.1, 1.0, 3.0}) {
      for (double t : {0.0, 0.5, 3.0}) {
        for (double v : {-2.0, 0.0, 0.7, 5.0}) {
          JunctionConfig c;
          c.temperature = t;
          c.detector_temperature = td;
          c.v_dc = v;
          c.conductance = 1.3;
          const double diff = dc_noise(c, omega, NoiseOrdering::Weak) - dc_noise(c, omega, NoiseOrdering::Symmetrized);
          CHECK(std::abs(diff + 1.3 * w(omega, td)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("Bessel table matches the standard library") {
  for (double z : {1e-3, 0.1, 1.0, 2.5, 7.0, 15.0, 20.0}) {
    const auto table = bessel_j_table(z, 40);
    for (int n = 0; n <= 40; ++n) CHECK(std::abs(table[static_cast<std::size_t>(n)] - bessel(n, z)) < 1e-13);
  }
  const auto zero = bessel_j_table(0.0, 3);
  CHECK(zero[0] == 1.0);
  CHECK(zero[1] == 0.0);
  CHECK_THROWS_AS(bessel_j_table(-1.0, 3), weaknoise::Error);
}

TEST_CASE("Bessel cutoff and closure") {
  for (double z : {0.0, 0.5, 3.0, 12.0}) {
    const int n = bessel_cutoff(z);
    CHECK(n > z);
    CHECK(std::abs(bessel(n, z)) < 1e-14);
    const auto table = bessel_j_table(z, n);
    double sum = table[0] * table[0];
    for (int k = 1; k <= n; ++k) sum += 2.0 * table[static_cast<std::size_t>(k)] * table[static_cast<std::size_t>(k)];
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("sideband weights") {
  for (double t : {0.0, 0.4}) {
    CHECK(pat_weight(with(0.0, t), 0, 0.7) == doctest::Approx(w(0.7, t)).epsilon(1e-15));
    CHECK(pat_weight(with(0.0, t), 1, 0.7) == 0.0);
    CHECK(std::abs(pat_weight(with(1e-9, t), 0, 0.7) - w(0.7, t)) < 1e-12);
  }
  double expect = 0.0;
  for (int n = -30; n <= 30; ++n) expect += bessel(n, 2.0) * bessel(n, 2.0) * std::abs(1.0 - n);
  CHECK(pat_weight(with(2.0), 0, 1.0) == doctest::Approx(expect).epsilon(1e-13));
  CHECK_THROWS_AS(pat_weight([] { auto c = with(1.0); c.v_dc = 0.5; return c; }(), 0, 1.0), weaknoise::Error);
}

TEST_CASE("sideband relabeling symmetry") {
  for (double z : {0.3, 1.8, 4.0}) {
    for (int m : {-2, -1, 1, 3}) {
      for (double omega : {-1.5, 0.2, 2.7}) {
        for (double t : {0.0, 0.6}) {
          CHECK(std::abs(pat_weight(with(z, t), m, omega) - pat_weight(with(z, t), -m, omega - 2.0 * m)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("symmetrized photon-assisted noise is non-negative") {
  for (double z : {0.0, 0.5, 2.0, 6.0}) {
    for (double omega : {-3.0, -0.5, 0.0, 1.0, 4.0}) CHECK(pat_weight(with(z, 0.3), 0, omega) >= 0.0);
  }
}

TEST_CASE("squeezing reports") {
  const SqueezingReport eq = squeezing_report(with(0.0));
  CHECK(eq.sym_abs == 1.0);
  CHECK(eq.emission == 0.0);
  CHECK(eq.re_sq == 0.0);
  CHECK_FALSE(eq.violated);

  const SqueezingReport small = squeezing_report(with(0.2));
  CHECK(small.violated);
  CHECK(small.re_sq == doctest::Approx(0.01).epsilon(0.01));
  CHECK(small.emission < 1e-3);
  CHECK(small.emission > 0.0);

  CHECK_FALSE(squeezing_report(with(3.0)).violated);
  CHECK_THROWS_AS(squeezing_report(with(1.0, 0.0, 0.2)), weaknoise::Error);
}

TEST_CASE("the two violation criteria agree") {
  for (int i = 0; i <= 80; ++i) {
    const SqueezingReport r = squeezing_report(with(0.05 * i));
    CHECK(r.violated == (r.quad_var < r.bound));
    CHECK(r.sym_abs >= r.re_sq);
    CHECK(std::abs(r.emission - (r.sym_abs - 1.0)) < 1e-12);
    CHECK(r.quad_var == doctest::Approx(0.5 * (r.sym_abs - r.re_sq)));
  }
}

TEST_CASE("doubling the Bessel cutoff changes nothing") {
  for (double z : {0.0, 0.7, 2.5, 5.0, 9.0}) {
    const int n = bessel_cutoff(z);
    const SqueezingReport a = squeezing_report(with(z), n);
    const SqueezingReport b = squeezing_report(with(z), 2 * n);
    CHECK(std::abs(a.emission - b.emission) < 1e-12);
    CHECK(std::abs(a.sym_abs - b.sym_abs) < 1e-12);
    CHECK(std::abs(a.re_sq - b.re_sq) < 1e-12);
  }
}

TEST_CASE("violation interval") {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.1 * i);
  const Fig1Scan scan = fig1_scan(JunctionConfig{}, grid);
  REQUIRE(scan.interval_found);
  CHECK(scan.z_lo == 0.0);
  CHECK(scan.rows.size() == grid.size());
  CHECK(scan.rows.front().emission == 0.0);
  CHECK(scan.rows.front().sym_abs == 1.0);

  double lo = 2.4, hi = 2.6;
  REQUIRE(violation_margin(lo) < 0.0);
  REQUIRE(violation_margin(hi) > 0.0);
  while (hi - lo > 1e-11) (violation_margin(0.5 * (lo + hi)) < 0.0 ? lo : hi) = 0.5 * (lo + hi);
  CHECK(std::abs(scan.z_hi - lo) < 2e-8);
  CHECK(scan.z_hi == doctest::Approx(2.501086088).epsilon(1e-8));
  CHECK_FALSE(squeezing_report(with(scan.z_hi)).violated);

  CHECK_THROWS_AS(fig1_scan(JunctionConfig{}, {}), weaknoise::Error);
  CHECK_THROWS_AS(fig1_scan(with(0.0, 0.1), grid), weaknoise::Error);
}

}  // TEST_SUITE
