#pragma once

// Detector memory function f. In frequency space f is purely imaginary and
// odd; in time it is real and odd. The Markovian detector has f = 0; the
// equilibrium-order detector at temperature T_d has
//   f(omega) = i coth(omega / 2 T_d),   f(t) = T_d coth(pi t T_d),
// with the zero-temperature limits i sign(omega) and 1/(pi t). A sign of -1
// flips f, which turns emission-type detection into absorption-type.

#include <complex>
#include <variant>
#include <vector>

namespace weaknoise::kernel {

using Complex = std::complex<double>;

struct Markovian {};

struct Equilibrium {
  double detector_temperature = 0.0;  // >= 0
  int sign = +1;                      // +1 emission type, -1 absorption type
};

/// Im f on an ascending frequency grid, linearly interpolated. Must be odd
/// under omega -> -omega on its own grid.
struct Tabulated {
  std::vector<double> omega;
  std::vector<double> im_f;
};

class MemoryKernel {
 public:
  using Variant = std::variant<Markovian, Equilibrium, Tabulated>;

  MemoryKernel() = default;
  static MemoryKernel markovian();
  static MemoryKernel equilibrium(double detector_temperature, int sign = +1);
  static MemoryKernel tabulated(std::vector<double> omega, std::vector<double> im_f);

  const Variant& variant() const { return variant_; }
  bool is_markovian() const { return std::holds_alternative<Markovian>(variant_); }

 private:
  explicit MemoryKernel(Variant v) : variant_(std::move(v)) {}
  Variant variant_{Markovian{}};
};

/// f(omega), purely imaginary. Throws at omega = 0 for the equilibrium
/// variant (pole of coth) and outside the table for the tabulated one.
Complex f_omega(const MemoryKernel& kernel, double omega);

/// f(t), real. Throws at t = 0. The tabulated variant uses the band-limited
/// sine transform (1/pi) int_0^{omega_max} Im f(w) sin(w t) dw of its table.
double f_time(const MemoryKernel& kernel, double t);

struct CalibrationReport {
  double omega = 0.0;
  double temperature = 0.0;
  double residual_real = 0.0;   // |Re f|, must vanish off resonance
  double residual_plus = 0.0;   // 1 - Im f(+Omega) tanh(Omega/2T)
  double residual_minus = 0.0;  // 1 + Im f(-Omega) tanh(Omega/2T)

  double max_abs() const;
};

/// Delta-line conditions for S(omega) = 0 of a two-level system with
/// splitting Omega in equilibrium at temperature T, evaluated for a probe
/// value f(+Omega); f(-Omega) follows from oddness.
CalibrationReport calibration_residual(Complex f_probe, double omega, double temperature);
/// Same with independent probe values at +Omega and -Omega.
CalibrationReport calibration_residual(Complex f_plus, Complex f_minus, double omega, double temperature);

/// Bisects Im f on [1, 1e6] until the calibration residual vanishes and
/// returns the equilibrium kernel whose detector temperature reproduces the
/// root at the probe frequency.
MemoryKernel solve_kernel(double omega, double temperature);

/// The root found by solve_kernel, exposed for reporting.
double solve_im_f(double omega, double temperature);

/// Smooth cutoff on [0, 1]: 1 up to s = 1/2, C-infinity decay to 0 at s = 1.
double window_taper(double s);

struct MemorySample {
  double time;
  double weight;  // f(center - time) * dt * taper(|center - time| / reach)
};

/// Principal-value midpoint sampling of int dt' f(center - t') (...): points
/// center +- (k + 1/2) dt for (k + 1/2) dt < reach, in pairs symmetric about
/// the singularity. Empty for the Markovian kernel.
std::vector<MemorySample> memory_samples(const MemoryKernel& kernel, double center, double dt, double reach);

}  // namespace weaknoise::kernel
