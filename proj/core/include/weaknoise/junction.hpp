#pragma once

// Current noise of a tunnel junction. DC bias gives the textbook
// shot/thermal formulas; an AC bias V_ac cos(Omega t) spreads the
// equilibrium noise function w over photon-assisted sidebands weighted by
// Bessel functions J_n(z), z = e V_ac / hbar Omega.
//
// Noise values are in units of G hbar unless stated otherwise; reports are in
// units of 2 pi G hbar Omega t0 with t0 = 2 pi delta(0).

#include <vector>

namespace weaknoise::junction {

struct JunctionConfig {
  double conductance = 1.0;
  double temperature = 0.0;           // system, units of Omega
  double detector_temperature = 0.0;  // T_d
  double omega = 1.0;                 // drive angular frequency
  double z = 0.0;                     // e V_ac / hbar Omega
  double v_dc = 0.0;                  // units of hbar Omega / e
};

/// Validates z >= 0, Omega > 0, T, T_d >= 0, G > 0.
void validate(const JunctionConfig& cfg);

/// alpha coth(alpha / 2T); |alpha| at T = 0 and 2T at alpha = 0.
double w(double alpha, double temperature);

enum class NoiseOrdering { Symmetrized, Weak };

/// DC noise at frequency omega. Symmetrized: G sum_+- w(omega +- V, T)/2.
/// Weak: the symmetrized value minus G w(omega, T_d). Requires z = 0.
double dc_noise(const JunctionConfig& cfg, double omega, NoiseOrdering ordering);

/// J_0(z) ... J_{n_max}(z) by downward recurrence, normalized so that
/// sum_{n in Z} J_n^2 = 1.
std::vector<double> bessel_j_table(double z, int n_max);

/// Smallest N > z with |J_N(z)| < 1e-14.
int bessel_cutoff(double z);

/// Coefficient of 2 pi delta(omega + omega' - 2 m Omega) in the AC-driven
/// noise, G sum_{|n| <= N} J_n J_{n-2m} w(omega - n Omega, T). Requires V_dc = 0.
/// A cutoff of 0 selects bessel_cutoff(z).
double pat_weight(const JunctionConfig& cfg, int m, double omega, int cutoff = 0);

struct SqueezingReport {
  double z = 0.0;
  double sym_abs = 0.0;   // <|dI(Omega)|^2>_sym
  double re_sq = 0.0;     // Re <dI^2(Omega)>_sym
  double emission = 0.0;  // <dI(-Omega) dI(Omega)>, zero-temperature detector
  double quad_var = 0.0;  // <A^2> for A = i[dI(Omega) - dI(-Omega)]/2
  double bound = 0.5;     // |<[A, B]>|/2
  bool violated = false;  // emission < re_sq; ties count as not violated
};

/// Requires T_d = 0 and V_dc = 0.
SqueezingReport squeezing_report(const JunctionConfig& cfg, int cutoff = 0);

struct Fig1Row {
  double z;
  double emission;
  double sym_abs;
  double re_sq;
  bool violated;
};

struct Fig1Scan {
  std::vector<Fig1Row> rows;
  double z_lo = 0.0;  // last non-violating point before the violation interval
  double z_hi = 0.0;  // first non-violating point after it
  bool interval_found = false;
};

struct Fig1Options {
  double scan_step = 0.01;
  double scan_max = 10.0;
  double tolerance = 1e-8;
  int cutoff = 0;
};

/// Rows for every z in the grid plus the first violation interval located by
/// a scan then bisection. Requires T = T_d = 0; drive amplitude comes from
/// the grid, cfg.z is ignored.
Fig1Scan fig1_scan(const JunctionConfig& cfg, const std::vector<double>& z_grid, const Fig1Options& options = {});

}  // namespace weaknoise::junction
