#include "weaknoise/junction.hpp"

#include <algorithm>
#include <cmath>

#include "weaknoise/error.hpp"

namespace weaknoise::junction {

namespace {

constexpr const char* kModule = "junction";
constexpr double kBesselFloor = 1e-14;

// J_n for any integer n from a table of non-negative orders.
double bessel_at(const std::vector<double>& table, int n) {
  const int m = std::abs(n);
  if (m >= static_cast<int>(table.size())) return 0.0;
  return (n < 0 && (m % 2) == 1) ? -table[static_cast<std::size_t>(m)] : table[static_cast<std::size_t>(m)];
}

bool violation(double emission, double re_sq) { return emission < re_sq; }

}  // namespace

void validate(const JunctionConfig& cfg) {
  if (!(cfg.conductance > 0.0)) fail(kModule, "G", "conductance must be positive");
  if (!(cfg.omega > 0.0)) fail(kModule, "Omega", "drive frequency must be positive");
  if (!(cfg.z >= 0.0) || !std::isfinite(cfg.z)) fail(kModule, "z", "drive amplitude must be finite and >= 0");
  if (!(cfg.temperature >= 0.0)) fail(kModule, "T", "temperature must be >= 0");
  if (!(cfg.detector_temperature >= 0.0)) fail(kModule, "Td", "detector temperature must be >= 0");
  if (!std::isfinite(cfg.v_dc)) fail(kModule, "V_dc", "bias must be finite");
}

double w(double alpha, double temperature) {
  if (temperature == 0.0) return std::abs(alpha);
  const double x = alpha / (2.0 * temperature);
  if (std::abs(x) < 1e-8) return 2.0 * temperature * (1.0 + x * x / 3.0);
  return alpha / std::tanh(x);
}

double dc_noise(const JunctionConfig& cfg, double omega, NoiseOrdering ordering) {
  validate(cfg);
  if (cfg.z != 0.0) fail(kModule, "z", "dc_noise requires a pure DC bias (z = 0)");
  const double sym =
      cfg.conductance * 0.5 * (w(omega + cfg.v_dc, cfg.temperature) + w(omega - cfg.v_dc, cfg.temperature));
  if (ordering == NoiseOrdering::Symmetrized) return sym;
  return sym - cfg.conductance * w(omega, cfg.detector_temperature);
}

std::vector<double> bessel_j_table(double z, int n_max) {
  if (!(z >= 0.0) || !std::isfinite(z)) fail(kModule, "z", "Bessel argument must be finite and >= 0");
  if (n_max < 0) fail(kModule, "cutoff", "Bessel order must be >= 0");
  std::vector<double> j(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (z < 1e-20) {
    // (z/2)^n / n! is exact to double precision here.
    double term = 1.0;
    for (int n = 0; n <= n_max; ++n) {
      j[static_cast<std::size_t>(n)] = term;
      term *= 0.5 * z / (n + 1);
    }
    return j;
  }
  const int start = std::max(n_max, static_cast<int>(std::ceil(z))) + 40 + static_cast<int>(std::ceil(std::sqrt(40.0 * (n_max + z))));
  std::vector<double> full(static_cast<std::size_t>(start) + 2, 0.0);
  full[static_cast<std::size_t>(start)] = 1e-300;
  for (int n = start; n >= 1; --n) {
    const auto k = static_cast<std::size_t>(n);
    full[k - 1] = (2.0 * n / z) * full[k] - full[k + 1];
    if (std::abs(full[k - 1]) > 1e200) {
      for (std::size_t i = k - 1; i < full.size(); ++i) full[i] *= 1e-200;
    }
  }
  double peak = 0.0;
  for (double v : full) peak = std::max(peak, std::abs(v));
  for (double& v : full) v /= peak;
  // sum_{n in Z} J_n^2 = J_0^2 + 2 sum_{n>0} J_n^2 = 1; the sign follows J_0 + 2 sum J_2k = 1.
  double sq = full[0] * full[0];
  double even = full[0];
  for (std::size_t n = 1; n < full.size(); ++n) {
    sq += 2.0 * full[n] * full[n];
    if (n % 2 == 0) even += 2.0 * full[n];
  }
  const double scale = (even < 0.0 ? -1.0 : 1.0) / std::sqrt(sq);
  for (int n = 0; n <= n_max; ++n) j[static_cast<std::size_t>(n)] = full[static_cast<std::size_t>(n)] * scale;
  return j;
}

int bessel_cutoff(double z) {
  const int guess = static_cast<int>(std::ceil(z)) + 60;
  const std::vector<double> table = bessel_j_table(z, guess);
  for (int n = static_cast<int>(std::floor(z)) + 1; n <= guess; ++n) {
    if (std::abs(table[static_cast<std::size_t>(n)]) < kBesselFloor) return n;
  }
  return guess;
}

namespace {

// G sum_n J_n J_{n-2m} (w(omega - n Omega, T) - offset).
double sideband_sum(const JunctionConfig& cfg, int m, double omega, int cutoff, double offset) {
  validate(cfg);
  if (cfg.v_dc != 0.0) fail(kModule, "V_dc", "photon-assisted sums are defined at pure AC bias");
  if (cutoff < 0) fail(kModule, "cutoff", "Bessel cutoff must be >= 0");
  const int n_cut = cutoff == 0 ? bessel_cutoff(cfg.z) : cutoff;
  const std::vector<double> table = bessel_j_table(cfg.z, n_cut + 2 * std::abs(m));
  double sum = 0.0;
  for (int n = -n_cut; n <= n_cut; ++n) {
    const int other = n - 2 * m;
    if (std::abs(other) > n_cut) continue;
    sum += bessel_at(table, n) * bessel_at(table, other) * (w(omega - n * cfg.omega, cfg.temperature) - offset);
  }
  return cfg.conductance * sum;
}

}  // namespace

double pat_weight(const JunctionConfig& cfg, int m, double omega, int cutoff) {
  return sideband_sum(cfg, m, omega, cutoff, 0.0);
}

SqueezingReport squeezing_report(const JunctionConfig& cfg, int cutoff) {
  validate(cfg);
  if (cfg.detector_temperature != 0.0) fail(kModule, "Td", "emission noise is defined for a zero-temperature detector");
  if (cfg.v_dc != 0.0) fail(kModule, "V_dc", "squeezing report is defined at pure AC bias");
  const double unit = cfg.conductance * cfg.omega;
  SqueezingReport r;
  r.z = cfg.z;
  r.sym_abs = pat_weight(cfg, 0, cfg.omega, cutoff) / unit;
  r.re_sq = pat_weight(cfg, 1, cfg.omega, cutoff) / unit;
  // sym_abs - 1 with the unit subtracted inside the sum (sum J_n^2 = 1), free of cancellation.
  r.emission = sideband_sum(cfg, 0, cfg.omega, cutoff, cfg.omega) / unit;
  r.quad_var = 0.5 * (r.sym_abs - r.re_sq);
  r.bound = 0.5;
  r.violated = violation(r.emission, r.re_sq);
  return r;
}

Fig1Scan fig1_scan(const JunctionConfig& cfg, const std::vector<double>& z_grid, const Fig1Options& options) {
  if (z_grid.empty()) fail(kModule, "z_grid", "empty drive grid");
  if (cfg.temperature != 0.0 || cfg.detector_temperature != 0.0) fail(kModule, "T", "Fig. 1 scan is defined at T = T_d = 0");
  if (!(options.scan_step > 0.0) || !(options.scan_max > 0.0) || !(options.tolerance > 0.0)) {
    fail(kModule, "scan", "scan step, range and tolerance must be positive");
  }
  auto report_at = [&](double z) {
    JunctionConfig c = cfg;
    c.z = z;
    return squeezing_report(c, options.cutoff);
  };

  Fig1Scan scan;
  for (double z : z_grid) {
    const SqueezingReport r = report_at(z);
    scan.rows.push_back({z, r.emission, r.sym_abs, r.re_sq, r.violated});
  }

  auto violated = [&](double z) { return report_at(z).violated; };
  // Bisect between a point with state `lo_state` and one with the opposite state.
  auto bisect = [&](double lo, double hi) {
    const bool lo_state = violated(lo);
    while (hi - lo > options.tolerance) {
      const double mid = 0.5 * (lo + hi);
      (violated(mid) == lo_state ? lo : hi) = mid;
    }
    return std::pair{lo, hi};
  };

  const auto steps = static_cast<long>(std::floor(options.scan_max / options.scan_step));
  bool prev = violated(0.0);
  double prev_z = 0.0;
  bool inside = false;
  for (long k = 1; k <= steps; ++k) {
    const double z = static_cast<double>(k) * options.scan_step;
    const bool now = violated(z);
    if (!inside && !prev && now) {
      scan.z_lo = bisect(prev_z, z).first;
      inside = true;
    } else if (inside && prev && !now) {
      scan.z_hi = bisect(prev_z, z).second;
      scan.interval_found = true;
      break;
    } else if (k == 1 && prev && now) {
      scan.z_lo = 0.0;
      inside = true;
    }
    prev = now;
    prev_z = z;
  }
  return scan;
}

}  // namespace weaknoise::junction
