#pragma once

// Weak-measurement correlators of small closed systems.
//
// Two routes are provided. For stationary states the two-time correlators are
// exact Dirac-line (Lehmann) spectra, and the weak-measurement spectrum for a
// given memory kernel is a per-line recombination of the two operator
// orderings. For arbitrary states and up to four measurements the correlator
// is evaluated on a time grid: every measurement contributes either its
// anticommutator superoperator at t_j or the kernel-weighted commutator
// superoperators sampled around t_j, all factors are time-ordered and applied
// to rho, and the result is traced.

#include <Eigen/Dense>
#include <vector>

#include "weaknoise/hilbert.hpp"
#include "weaknoise/kernel.hpp"

namespace weaknoise::correlator {

using hilbert::Complex;
using hilbert::DensityMatrix;
using hilbert::Operator;
using kernel::MemoryKernel;

inline constexpr double kLineMergeTolerance = 1e-9;

struct Line {
  double omega;
  Complex weight;
};

/// S(omega) = sum_k 2 pi w_k delta(omega - omega_k), lines ascending and
/// merged when closer than kLineMergeTolerance.
class LineSpectrum {
 public:
  LineSpectrum() = default;
  explicit LineSpectrum(std::vector<Line> lines);

  const std::vector<Line>& lines() const { return lines_; }
  std::size_t size() const { return lines_.size(); }

  /// Weight of the line at omega, zero when there is none.
  Complex weight_at(double omega) const;
  bool has_line(double omega) const;

  /// Inverse transform: sum_k w_k e^{-i omega_k t}.
  Complex correlation(double t) const;
  double max_abs_weight() const;

 private:
  std::vector<Line> lines_;
};

struct SpectrumOptions {
  bool subtract_means = true;
};

/// S_AB(omega) = int dt e^{i omega t} <dA(t) dB(0)> for a state commuting
/// with H. Emits one line per eigenpair gap E_n - E_m, zero weights included,
/// so spectra of the same (H, rho) share their frequency set.
LineSpectrum lehmann_spectrum(const Operator& hamiltonian, const DensityMatrix& rho, const Operator& a,
                              const Operator& b, SpectrumOptions options = {});

/// Weak-measurement spectrum from the two orderings. `s_ab` is S_AB(omega);
/// `s_ba` is S_BA(omega), whose value at -omega is the B(0)A(t) ordering.
/// Per line: (S + S~)/2 - Im f(omega) (S - S~)/2 with S~ = S_BA(-omega),
/// which for the equilibrium kernel equals
///   [e^{x} S~ - e^{-x} S] / (2 sinh x),  x = omega / 2 T_d.
/// The omega = 0 line takes the symmetrized value.
LineSpectrum weak_spectrum(const LineSpectrum& s_ab, const LineSpectrum& s_ba, const MemoryKernel& kernel);

struct FdtLine {
  double omega;
  Complex residual;
};

/// S_AB(omega) - e^{omega/T} S_BA(-omega) on every line of a thermal state.
std::vector<FdtLine> fdt_residuals(const Operator& hamiltonian, double temperature, const Operator& a,
                                   const Operator& b);
/// The residual at one frequency; zero when no line sits there.
Complex fdt_residual(const Operator& hamiltonian, double temperature, const Operator& a, const Operator& b,
                     double omega);

struct Measurement {
  Operator observable;
  double time;
};

struct TimeGrid {
  double dt;
  double t_min;
  double t_max;
};

struct WeakCorrelatorRequest {
  Operator hamiltonian;
  DensityMatrix state;
  std::vector<Measurement> measurements;
  MemoryKernel kernel;
  TimeGrid grid;
};

inline constexpr std::size_t kMaxGridMeasurements = 4;

/// <a_1(t_1) ... a_n(t_n)>_w on the grid. Kernel samples reach
/// min_j dist(t_j, window edge) on either side of each t_j, tapered by
/// kernel::window_taper. Events at equal times are applied in symmetrized
/// order. Rejects n > 4 and dt > 0.2 / (E_max - E_min).
Complex weak_correlator_grid(const WeakCorrelatorRequest& request);

/// Symmetrized second-moment matrix C_ab = Re <{A_a, A_b}>/2.
Eigen::MatrixXd symmetrized_correlation_matrix(const DensityMatrix& rho, const std::vector<Operator>& observables);

/// Equal-time weak variance of A = sigma_x + sigma_z for H = Omega sigma_z/2,
/// rho = (1 + sigma_y)/2 and the zero-temperature equilibrium kernel, with
/// the memory integral cut off at t_inf:
///   2 + (2/pi) int_0^{t_inf} (cos Omega t - 1)/t dt.
double tls_equal_time_variance(double omega, double t_inf);
/// Large-cutoff form 2 - (2/pi)(ln(Omega t_inf) + gamma_E).
double tls_equal_time_variance_asymptote(double omega, double t_inf);

struct PositivityCheck {
  bool positive;
  double min_eigenvalue;
};

/// Weak positivity of a real symmetric correlation matrix: min eigenvalue >= -1e-10.
PositivityCheck weak_positivity_check(const Eigen::MatrixXd& correlation_matrix);

}  // namespace weaknoise::correlator
