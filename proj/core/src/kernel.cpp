#include "weaknoise/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weaknoise/error.hpp"

namespace weaknoise::kernel {

namespace {

constexpr const char* kModule = "kernel";

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double tabulated_im_f(const Tabulated& table, double omega) {
  const auto& w = table.omega;
  if (omega < w.front() || omega > w.back()) fail(kModule, "omega", "frequency outside tabulated range (no extrapolation)");
  auto hi = std::upper_bound(w.begin(), w.end(), omega);
  if (hi == w.end()) return table.im_f.back();
  const auto k = static_cast<std::size_t>(hi - w.begin());
  const double s = (omega - w[k - 1]) / (w[k] - w[k - 1]);
  return (1.0 - s) * table.im_f[k - 1] + s * table.im_f[k];
}

// (1/pi) int_0^{w_max} g(w) sin(w t) dw for piecewise-linear g, exact per segment.
double tabulated_sine_transform(const Tabulated& table, double t) {
  const auto& w = table.omega;
  double total = 0.0;
  for (std::size_t k = 1; k < w.size(); ++k) {
    double w0 = w[k - 1];
    double w1 = w[k];
    if (w1 <= 0.0) continue;
    double g0 = table.im_f[k - 1];
    const double g1 = table.im_f[k];
    const double slope = (g1 - g0) / (w1 - w0);
    if (w0 < 0.0) {
      g0 += slope * (0.0 - w0);
      w0 = 0.0;
    }
    const double a = g0 - slope * w0;
    auto primitive = [&](double x) {
      return -(a + slope * x) * std::cos(x * t) / t + slope * std::sin(x * t) / (t * t);
    };
    total += primitive(w1) - primitive(w0);
  }
  return total / std::numbers::pi;
}

}  // namespace

MemoryKernel MemoryKernel::markovian() { return MemoryKernel(Markovian{}); }

MemoryKernel MemoryKernel::equilibrium(double detector_temperature, int sign) {
  if (!(detector_temperature >= 0.0) || !std::isfinite(detector_temperature)) {
    fail(kModule, "Td", "detector temperature must be finite and non-negative; use sign = -1 for absorption");
  }
  if (sign != 1 && sign != -1) fail(kModule, "sign", "sign must be +1 or -1");
  return MemoryKernel(Equilibrium{detector_temperature, sign});
}

MemoryKernel MemoryKernel::tabulated(std::vector<double> omega, std::vector<double> im_f) {
  if (omega.size() < 2 || omega.size() != im_f.size()) fail(kModule, "table", "need at least two (omega, im_f) pairs of equal length");
  for (std::size_t k = 1; k < omega.size(); ++k) {
    if (!(omega[k] > omega[k - 1])) fail(kModule, "omega", "table frequencies must be strictly ascending");
  }
  Tabulated table{std::move(omega), std::move(im_f)};
  for (std::size_t k = 0; k < table.omega.size(); ++k) {
    const double mirrored = -table.omega[k];
    if (mirrored < table.omega.front() || mirrored > table.omega.back()) {
      fail(kModule, "omega", "table must cover a range symmetric about zero");
    }
    if (std::abs(tabulated_im_f(table, mirrored) + table.im_f[k]) > 1e-10) {
      fail(kModule, "im_f", "tabulated kernel is not odd in omega");
    }
  }
  return MemoryKernel(std::move(table));
}

Complex f_omega(const MemoryKernel& kernel, double omega) {
  const double im = std::visit(
      Overloaded{
          [](const Markovian&) { return 0.0; },
          [omega](const Equilibrium& eq) {
            if (omega == 0.0) fail(kModule, "omega", "f(omega) has a pole at omega = 0");
            if (eq.detector_temperature == 0.0) return eq.sign * (omega > 0.0 ? 1.0 : -1.0);
            return eq.sign / std::tanh(omega / (2.0 * eq.detector_temperature));
          },
          [omega](const Tabulated& table) { return tabulated_im_f(table, omega); },
      },
      kernel.variant());
  return {0.0, im};
}

double f_time(const MemoryKernel& kernel, double t) {
  if (t == 0.0) fail(kModule, "t", "f(t) is singular at t = 0; sample it by principal value");
  return std::visit(
      Overloaded{
          [](const Markovian&) { return 0.0; },
          [t](const Equilibrium& eq) {
            const double td = eq.detector_temperature;
            if (td == 0.0) return eq.sign / (std::numbers::pi * t);
            return eq.sign * td / std::tanh(std::numbers::pi * t * td);
          },
          [t](const Tabulated& table) { return tabulated_sine_transform(table, t); },
      },
      kernel.variant());
}

double CalibrationReport::max_abs() const {
  return std::max({std::abs(residual_real), std::abs(residual_plus), std::abs(residual_minus)});
}

CalibrationReport calibration_residual(Complex f_plus, Complex f_minus, double omega, double temperature) {
  if (!(omega > 0.0)) fail(kModule, "omega", "probe frequency must be positive");
  if (!(temperature >= 0.0)) fail(kModule, "T", "temperature must be non-negative");
  const double th = temperature == 0.0 ? 1.0 : std::tanh(omega / (2.0 * temperature));
  CalibrationReport report;
  report.omega = omega;
  report.temperature = temperature;
  report.residual_real = std::max(std::abs(f_plus.real()), std::abs(f_minus.real()));
  report.residual_plus = 1.0 - f_plus.imag() * th;
  report.residual_minus = 1.0 + f_minus.imag() * th;
  return report;
}

CalibrationReport calibration_residual(Complex f_probe, double omega, double temperature) {
  return calibration_residual(f_probe, -f_probe, omega, temperature);
}

double solve_im_f(double omega, double temperature) {
  if (!(omega > 0.0)) fail(kModule, "omega", "probe frequency must be positive");
  if (!(temperature >= 0.0)) fail(kModule, "T", "temperature must be non-negative");
  auto residual = [&](double im_f) { return calibration_residual(Complex(0.0, im_f), omega, temperature).residual_plus; };
  double lo = 1.0;
  double hi = 1e6;
  const double r_lo = residual(lo);
  if (r_lo <= 0.0) return lo;
  if (residual(hi) > 0.0) fail(kModule, "T", "no calibration root in Im f in [1, 1e6]");
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * lo; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MemoryKernel solve_kernel(double omega, double temperature) {
  const double root = solve_im_f(omega, temperature);
  // tanh(omega / 2 T_d) = 1 / root
  const double inv = 1.0 / root;
  if (inv >= 1.0) return MemoryKernel::equilibrium(0.0, +1);
  return MemoryKernel::equilibrium(omega / (2.0 * std::atanh(inv)), +1);
}

double window_taper(double s) {
  s = std::abs(s);
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double u = 2.0 * (s - 0.5);
  auto bump = [](double v) { return v > 0.0 ? std::exp(-1.0 / v) : 0.0; };
  const double a = bump(1.0 - u);
  return a / (a + bump(u));
}

std::vector<MemorySample> memory_samples(const MemoryKernel& kernel, double center, double dt, double reach) {
  if (!(dt > 0.0)) fail(kModule, "dt", "time step must be positive");
  std::vector<MemorySample> samples;
  if (kernel.is_markovian()) return samples;
  for (long k = 0;; ++k) {
    const double tau = (static_cast<double>(k) + 0.5) * dt;
    if (tau >= reach) break;
    const double w = window_taper(tau / reach) * dt;
    if (w == 0.0) break;
    // f(center - t') at t' = center - tau and t' = center + tau.
    const double f = f_time(kernel, tau);
    samples.push_back({center - tau, f * w});
    samples.push_back({center + tau, -f * w});
  }
  return samples;
}

}  // namespace weaknoise::kernel
