#include <doctest.h>

#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "support.hpp"
#include "weaknoise/correlator.hpp"
#include "weaknoise/error.hpp"
#include "weaknoise/oscillator.hpp"

using namespace weaknoise;
using namespace weaknoise::correlator;
using hilbert::Matrix;
using kernel::MemoryKernel;

namespace {

Operator tls_h() { return Operator(Matrix(0.5 * testing::sz())); }

Operator three_level_h() {
  Matrix h = Matrix::Zero(3, 3);
  h(1, 1) = 1.0;
  h(2, 2) = 2.3;
  return Operator::hermitian(h);
}

Operator three_level_a() {
  Matrix a(3, 3);
  a << 0, 1, 0.5, 1, 0, 0.8, 0.5, 0.8, 0;
  return Operator::hermitian(a);
}

// Direct enumeration of every choice of c-event or q-sample per measurement,
// each string time-ordered and applied in the lab frame.
Complex brute_force_grid(const Operator& h, const DensityMatrix& rho, const std::vector<Measurement>& ms,
                         const MemoryKernel& k, const TimeGrid& grid) {
  double reach = grid.t_max - grid.t_min;
  for (const auto& m : ms) reach = std::min({reach, m.time - grid.t_min, grid.t_max - m.time});
  struct Choice {
    double time;
    bool c;
    double weight;
  };
  std::vector<std::vector<Choice>> per;
  for (const auto& m : ms) {
    std::vector<Choice> list{{m.time, true, 1.0}};
    for (const auto& s : kernel::memory_samples(k, m.time, grid.dt, reach)) list.push_back({s.time, false, 0.5 * s.weight});
    per.push_back(list);
  }
  Complex total = 0.0;
  std::vector<std::size_t> idx(ms.size(), 0);
  std::function<void(std::size_t)> recurse = [&](std::size_t level) {
    if (level == ms.size()) {
      std::vector<std::size_t> order(ms.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return per[a][idx[a]].time < per[b][idx[b]].time;
      });
      Operator x = rho.as_operator();
      double w = 1.0;
      for (std::size_t i : order) {
        const Choice& ch = per[i][idx[i]];
        const Operator at = hilbert::evolve_heisenberg(ms[i].observable, h, ch.time);
        x = ch.c ? hilbert::apply_c(at, x) : hilbert::apply_q(at, x);
        w *= ch.weight;
      }
      total += w * x.trace();
      return;
    }
    for (idx[level] = 0; idx[level] < per[level].size(); ++idx[level]) recurse(level + 1);
  };
  recurse(0);
  return total;
}

double ci_variance(double x) {
  // 2 + (2/pi) int_0^x (cos t - 1)/t dt = 2 + (2/pi)(Ci(x) - gamma - ln x)
  return 2.0 + (2.0 / std::numbers::pi) * (gsl_sf_Ci(x) - std::numbers::egamma - std::log(x));
}

}  // namespace

TEST_SUITE("correlator") {

TEST_CASE("two-level sigma_x correlation has the thermal form") {
  const double t_sys = 0.8;
  const DensityMatrix rho = hilbert::thermal_state(tls_h(), t_sys);
  const LineSpectrum s = lehmann_spectrum(tls_h(), rho, hilbert::pauli_x(), hilbert::pauli_x());
  CHECK(s.has_line(1.0));
  CHECK(s.has_line(-1.0));
  const double th = std::tanh(1.0 / (2.0 * t_sys));
  for (double t : {0.0, 0.4, 2.2}) {
    // <sigma_x(0) sigma_x(t)> = C(-t)
    const Complex c = s.correlation(-t);
    CHECK(std::abs(c - Complex(std::cos(t), th * std::sin(t))) < 1e-14);
  }
}

TEST_CASE("Hamiltonian autocorrelation is a single zero-frequency line") {
  std::mt19937_64 rng(2);
  const Operator h = Operator::hermitian(testing::random_hermitian(4, rng));
  const DensityMatrix rho = hilbert::thermal_state(h, 0.9);
  const LineSpectrum s = lehmann_spectrum(h, rho, h, h);
  const double mean = rho.expectation(h).real();
  const double var = rho.expectation(h * h).real() - mean * mean;
  CHECK(s.weight_at(0.0).real() == doctest::Approx(var).epsilon(1e-12));
  for (const Line& l : s.lines()) {
    if (l.omega != 0.0) CHECK(std::abs(l.weight) < 1e-14);
  }
}

TEST_CASE("oscillator position spectrum has Bose-weighted lines") {
  const oscillator::FockSpace space(32);
  const Operator h = space.hamiltonian(1.0);
  const DensityMatrix rho = hilbert::thermal_state(h, 1.0);
  const LineSpectrum s = lehmann_spectrum(h, rho, space.x(), space.x());
  const double nbar = 1.0 / (std::exp(1.0) - 1.0);
  CHECK(std::abs(s.weight_at(1.0) - (nbar + 1.0) / 2.0) < 1e-10);
  CHECK(std::abs(s.weight_at(-1.0) - nbar / 2.0) < 1e-10);
  double rest = 0.0;
  for (const Line& l : s.lines()) {
    if (std::abs(std::abs(l.omega) - 1.0) > 1e-9) rest += std::abs(l.weight);
  }
  CHECK(rest < 1e-10);
}

TEST_CASE("lines are ascending and merged") {
  const LineSpectrum s({{1.0, 1.0}, {-1.0, 2.0}, {1.0 + 1e-12, 0.5}});
  REQUIRE(s.size() == 2);
  CHECK(s.lines()[0].omega < s.lines()[1].omega);
  CHECK(s.weight_at(1.0) == Complex(1.5, 0.0));
  CHECK(s.weight_at(3.0) == Complex(0.0, 0.0));
}

TEST_CASE("non-stationary states are refused by the line route") {
  Matrix plus = Matrix::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(lehmann_spectrum(tls_h(), DensityMatrix(plus), hilbert::pauli_x(), hilbert::pauli_x()), Error);
}

TEST_CASE("spectra are Hermitian under exchange of the observables") {
  std::mt19937_64 rng(8);
  const Operator h = Operator::hermitian(testing::random_hermitian(4, rng));
  const Operator a = Operator::hermitian(testing::random_hermitian(4, rng));
  const Operator b = Operator::hermitian(testing::random_hermitian(4, rng));
  const DensityMatrix rho = hilbert::thermal_state(h, 0.6);
  const LineSpectrum ab = lehmann_spectrum(h, rho, a, b);
  const LineSpectrum ba = lehmann_spectrum(h, rho, b, a);
  for (const Line& l : ab.lines()) CHECK(std::abs(l.weight - std::conj(ba.weight_at(l.omega))) < 1e-13);
  const LineSpectrum aa = lehmann_spectrum(h, rho, a, a);
  for (const Line& l : weak_spectrum(aa, aa, MemoryKernel::markovian()).lines()) CHECK(std::abs(l.weight.imag()) < 1e-14);
}

TEST_CASE("equilibrium order is silent at order two") {
  const oscillator::FockSpace space(32);
  const std::vector<std::pair<Operator, std::vector<Operator>>> systems = {
      {tls_h(), {hilbert::pauli_x(), hilbert::pauli_y()}},
      {space.hamiltonian(1.0), {space.x(), space.p()}},
  };
  for (const auto& [h, ops] : systems) {
    for (double t : {0.2, 1.0, 5.0}) {
      const DensityMatrix rho = hilbert::thermal_state(h, t);
      for (const auto& a : ops) {
        for (const auto& b : ops) {
          const LineSpectrum w = weak_spectrum(lehmann_spectrum(h, rho, a, b), lehmann_spectrum(h, rho, b, a),
                                               MemoryKernel::equilibrium(t));
          CHECK(w.max_abs_weight() < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("a detector colder than the system records a signal") {
  const DensityMatrix rho = hilbert::thermal_state(tls_h(), 1.0);
  const LineSpectrum s = lehmann_spectrum(tls_h(), rho, hilbert::pauli_x(), hilbert::pauli_x());
  CHECK(weak_spectrum(s, s, MemoryKernel::equilibrium(0.5)).max_abs_weight() > 0.1);
}

TEST_CASE("ground-state emission line is negative for a warm detector") {
  const DensityMatrix rho = hilbert::thermal_state(tls_h(), 0.0);
  const LineSpectrum s = lehmann_spectrum(tls_h(), rho, hilbert::pauli_x(), hilbert::pauli_x());
  const LineSpectrum w = weak_spectrum(s, s, MemoryKernel::equilibrium(1.0));
  const double expect = -std::exp(-0.5) / (2.0 * std::sinh(0.5));
  CHECK(w.weight_at(1.0).real() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(-0.581977).epsilon(1e-6));
}

TEST_CASE("weak spectrum orderings") {
  std::mt19937_64 rng(12);
  const Operator h = Operator::hermitian(testing::random_hermitian(3, rng));
  const Operator a = Operator::hermitian(testing::random_hermitian(3, rng));
  const Operator b = Operator::hermitian(testing::random_hermitian(3, rng));
  const DensityMatrix rho = hilbert::thermal_state(h, 0.7);
  const LineSpectrum ab = lehmann_spectrum(h, rho, a, b);
  const LineSpectrum ba = lehmann_spectrum(h, rho, b, a);

  SUBCASE("Markovian is the symmetrized order") {
    const LineSpectrum w = weak_spectrum(ab, ba, MemoryKernel::markovian());
    for (const Line& l : w.lines()) {
      CHECK(std::abs(l.weight - 0.5 * (ab.weight_at(l.omega) + ba.weight_at(-l.omega))) < 1e-15);
    }
  }
  SUBCASE("zero-temperature detectors select emission or absorption") {
    const LineSpectrum emit = weak_spectrum(ab, ba, MemoryKernel::equilibrium(0.0, +1));
    const LineSpectrum absorb = weak_spectrum(ab, ba, MemoryKernel::equilibrium(0.0, -1));
    for (const Line& l : emit.lines()) {
      if (l.omega > 0.0) {
        CHECK(std::abs(l.weight - ba.weight_at(-l.omega)) < 1e-15);
        CHECK(std::abs(absorb.weight_at(l.omega) - ab.weight_at(l.omega)) < 1e-15);
      } else if (l.omega < 0.0) {
        CHECK(std::abs(l.weight - ab.weight_at(l.omega)) < 1e-15);
      }
    }
  }
  SUBCASE("finite detector temperature matches the exponential form") {
    const double td = 0.45;
    const LineSpectrum w = weak_spectrum(ab, ba, MemoryKernel::equilibrium(td));
    for (const Line& l : w.lines()) {
      const Complex s = ab.weight_at(l.omega);
      const Complex st = ba.weight_at(-l.omega);
      if (l.omega == 0.0) {
        CHECK(std::abs(l.weight - 0.5 * (s + st)) < 1e-15);
        continue;
      }
      const double x = l.omega / (2.0 * td);
      const Complex expect = (std::exp(x) * st - std::exp(-x) * s) / (2.0 * std::sinh(x));
      CHECK(std::abs(l.weight - expect) < 1e-13);
    }
  }
  SUBCASE("misaligned inputs are rejected") {
    const LineSpectrum other({{0.0, 1.0}});
    CHECK_THROWS_AS(weak_spectrum(ab, other, MemoryKernel::markovian()), Error);
  }
}

TEST_CASE("fluctuation-dissipation residuals vanish") {
  for (double t : {0.3, 1.0, 4.0}) {
    for (const auto& a : {hilbert::pauli_x(), hilbert::pauli_y()}) {
      for (const auto& b : {hilbert::pauli_x(), hilbert::pauli_y()}) {
        for (const FdtLine& l : fdt_residuals(tls_h(), t, a, b)) CHECK(std::abs(l.residual) < 1e-12);
      }
    }
  }
  const oscillator::FockSpace space(32);
  for (const FdtLine& l : fdt_residuals(space.hamiltonian(1.0), 1.0, space.x(), space.p())) {
    CHECK(std::abs(l.residual) < 1e-10);
  }
  CHECK(fdt_residual(tls_h(), 1.0, hilbert::pauli_x(), hilbert::pauli_x(), 0.37) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(fdt_residuals(tls_h(), 0.0, hilbert::pauli_x(), hilbert::pauli_x()), Error);
}

TEST_CASE("hot systems have exchange-symmetric spectra") {
  std::mt19937_64 rng(19);
  const Operator h = Operator::hermitian(testing::random_hermitian(3, rng));
  const Operator a = Operator::hermitian(testing::random_hermitian(3, rng));
  const Operator b = Operator::hermitian(testing::random_hermitian(3, rng));
  const DensityMatrix rho = hilbert::thermal_state(h, 1e9);
  const LineSpectrum ab = lehmann_spectrum(h, rho, a, b);
  const LineSpectrum ba = lehmann_spectrum(h, rho, b, a);
  for (const Line& l : ab.lines()) CHECK(std::abs(l.weight - ba.weight_at(-l.omega)) < 1e-8);
}

TEST_CASE("grid correlator matches brute-force enumeration") {
  const DensityMatrix rho = hilbert::thermal_state(three_level_h(), 1.0);
  const std::vector<Measurement> ms = {{three_level_a(), 3.0}, {three_level_a(), 3.55}, {three_level_a(), 4.27}};
  const TimeGrid grid{0.08, 0.0, 6.0};
  const MemoryKernel k = MemoryKernel::equilibrium(1.0);
  const Complex dp = weak_correlator_grid({three_level_h(), rho, ms, k, grid});
  const Complex brute = brute_force_grid(three_level_h(), rho, ms, k, grid);
  CHECK(std::abs(dp - brute) < 1e-12);
  // Independent NumPy enumeration of the same discretization.
  CHECK(dp.real() == doctest::Approx(0.0223814592711175).epsilon(1e-9));

  std::mt19937_64 rng(4);
  const Operator b = Operator::hermitian(testing::random_hermitian(3, rng));
  const std::vector<Measurement> mixed = {{b, 2.0}, {three_level_a(), 2.61}};
  const DensityMatrix r2(testing::random_density(3, rng));
  const MemoryKernel k0 = MemoryKernel::equilibrium(0.0);
  CHECK(std::abs(weak_correlator_grid({three_level_h(), r2, mixed, k0, {0.05, 0.0, 4.0}}) -
                 brute_force_grid(three_level_h(), r2, mixed, k0, {0.05, 0.0, 4.0})) < 1e-12);
}

TEST_CASE("Markovian two-point correlators are symmetrized products") {
  std::mt19937_64 rng(6);
  const Operator h = Operator::hermitian(testing::random_hermitian(3, rng));
  const Operator a = Operator::hermitian(testing::random_hermitian(3, rng));
  const Operator b = Operator::hermitian(testing::random_hermitian(3, rng));
  const DensityMatrix rho(testing::random_density(3, rng));
  const double width = hilbert::diagonalize(h).energies.maxCoeff() - hilbert::diagonalize(h).energies.minCoeff();
  const double dt = 0.1 / width;
  for (auto [t, s] : {std::pair{1.0, 1.0}, std::pair{0.4, 1.7}, std::pair{2.5, 0.2}}) {
    const Complex got = weak_correlator_grid({h, rho, {{a, t}, {b, s}}, MemoryKernel::markovian(), {dt, 0.0, 3.0}});
    const Operator at = hilbert::evolve_heisenberg(a, h, t);
    const Operator bs = hilbert::evolve_heisenberg(b, h, s);
    const Complex expect = rho.expectation(hilbert::apply_c(at, bs));
    CHECK(std::abs(got - expect) < 1e-12);
  }
  const Complex coarse = weak_correlator_grid({h, rho, {{a, 1.0}, {b, 1.0}}, MemoryKernel::markovian(), {dt, 0.0, 3.0}});
  const Complex fine = weak_correlator_grid({h, rho, {{a, 1.0}, {b, 1.0}}, MemoryKernel::markovian(), {dt / 7, 0.0, 3.0}});
  CHECK(coarse == fine);
}

TEST_CASE("two-point grid correlator converges to the line spectrum") {
  const Operator h = tls_h();
  for (double td : {0.0, 0.5}) {
    const DensityMatrix rho = hilbert::thermal_state(h, 0.0);
    const LineSpectrum s = lehmann_spectrum(h, rho, hilbert::pauli_x(), hilbert::pauli_x(), {false});
    const LineSpectrum w = weak_spectrum(s, s, MemoryKernel::equilibrium(td));
    const double t1 = 100.6, t2 = 99.3;
    const Complex grid = weak_correlator_grid(
        {h, rho, {{hilbert::pauli_x(), t1}, {hilbert::pauli_x(), t2}}, MemoryKernel::equilibrium(td), {0.01, 0.0, 200.0}});
    const Complex lines = w.correlation(t1 - t2);
    CHECK(std::abs(grid - lines) < 0.01 * std::max(1.0, std::abs(lines)));
  }
}

TEST_CASE("equilibrium two-point correlator vanishes under refinement") {
  const Operator h = tls_h();
  const DensityMatrix rho = hilbert::thermal_state(h, 1.0);
  for (double dt : {0.02, 0.01}) {
    const Complex v = weak_correlator_grid(
        {h, rho, {{hilbert::pauli_x(), 200.0}, {hilbert::pauli_x(), 201.3}}, MemoryKernel::equilibrium(1.0), {dt, 0.0, 400.0}});
    CHECK(std::abs(v) < 3.0 * dt);
    CHECK(std::abs(v) < 1e-4);
  }
}

TEST_CASE("three-point equilibrium correlator of a three-level system has no time dependence") {
  // The finite-frequency content cancels; a static offset from the zero-frequency
  // pole of f remains and is the same for every configuration of times.
  const DensityMatrix rho = hilbert::thermal_state(three_level_h(), 1.0);
  const MemoryKernel k = MemoryKernel::equilibrium(1.0);
  std::vector<double> values;
  for (auto times : {std::array{198.7, 200.0, 201.1}, std::array{199.5, 200.2, 200.9}, std::array{200.0, 202.4, 203.0}}) {
    std::vector<Measurement> ms;
    for (double t : times) ms.push_back({three_level_a(), t});
    const Complex v = weak_correlator_grid({three_level_h(), rho, ms, k, {0.02, 0.0, 400.0}});
    CHECK(std::abs(v.imag()) < 1e-3);
    values.push_back(v.real());
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  CHECK(*hi - *lo < 1e-3);
  CHECK(values[0] == doctest::Approx(0.1515).epsilon(0.01));
}

TEST_CASE("grid guards") {
  const DensityMatrix rho = hilbert::thermal_state(tls_h(), 1.0);
  const Operator x = hilbert::pauli_x();
  const MemoryKernel k = MemoryKernel::equilibrium(1.0);
  CHECK_THROWS_AS(weak_correlator_grid({tls_h(), rho, {{x, 1}, {x, 1}, {x, 1}, {x, 1}, {x, 1}}, k, {0.01, 0.0, 2.0}}), Error);
  CHECK_THROWS_AS(weak_correlator_grid({tls_h(), rho, {{x, 1}}, k, {0.3, 0.0, 2.0}}), Error);
  CHECK_THROWS_AS(weak_correlator_grid({tls_h(), rho, {{x, 3}}, k, {0.01, 0.0, 2.0}}), Error);
  CHECK_THROWS_AS(weak_correlator_grid({tls_h(), rho, {}, k, {0.01, 0.0, 2.0}}), Error);
}

TEST_CASE("grid correlator is bitwise reproducible") {
  const DensityMatrix rho = hilbert::thermal_state(three_level_h(), 0.5);
  const std::vector<Measurement> ms = {{three_level_a(), 1.0}, {three_level_a(), 1.4}};
  const WeakCorrelatorRequest req{three_level_h(), rho, ms, MemoryKernel::equilibrium(0.3), {0.01, 0.0, 2.5}};
  CHECK(weak_correlator_grid(req) == weak_correlator_grid(req));
}

TEST_CASE("two-level equal-time variance with a memory cutoff") {
  for (double x : {0.5, 3.0, 13.0, 50.0, 100.0, 2000.0}) {
    CHECK(tls_equal_time_variance(1.0, x) == doctest::Approx(ci_variance(x)).epsilon(1e-9));
  }
  CHECK(tls_equal_time_variance(2.0, 50.0) == doctest::Approx(ci_variance(100.0)).epsilon(1e-9));
  CHECK(std::abs(tls_equal_time_variance(1.0, 1e-6) - 2.0) < 1e-9);
  CHECK(tls_equal_time_variance(1.0, 100.0) == doctest::Approx(-1.30249).epsilon(1e-5));
  for (double x : {1e3, 1e4, 1e5}) {
    CHECK(std::abs(tls_equal_time_variance(1.0, x) - tls_equal_time_variance_asymptote(1.0, x)) < 1e-3);
  }
  CHECK(tls_equal_time_variance(1.0, 13.90) > 0.0);
  CHECK(tls_equal_time_variance(1.0, 13.92) < 0.0);
  CHECK_THROWS_AS(tls_equal_time_variance(0.0, 1.0), Error);
}

TEST_CASE("weak positivity check") {
  std::mt19937_64 rng(14);
  const DensityMatrix rho(testing::random_density(3, rng));
  const std::vector<Operator> ops = {Operator::hermitian(testing::random_hermitian(3, rng)),
                                     Operator::hermitian(testing::random_hermitian(3, rng))};
  CHECK(weak_positivity_check(symmetrized_correlation_matrix(rho, ops)).positive);
  Eigen::MatrixXd neg(1, 1);
  neg << -0.5;
  const PositivityCheck c = weak_positivity_check(neg);
  CHECK_FALSE(c.positive);
  CHECK(c.min_eigenvalue == -0.5);
  Eigen::MatrixXd weak(2, 2);
  weak << tls_equal_time_variance(1.0, 100.0), 0.1, 0.1, 1.0;
  CHECK_FALSE(weak_positivity_check(weak).positive);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(weak_positivity_check(asym), Error);
}

}  // TEST_SUITE
