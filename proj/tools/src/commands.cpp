#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "weaknoise/correlator.hpp"
#include "weaknoise/junction.hpp"
#include "weaknoise/kernel.hpp"
#include "weaknoise/oscillator.hpp"
#include "weaknoise/povm.hpp"

namespace weaknoise::cli {

namespace {

using hilbert::Complex;
using hilbert::DensityMatrix;
using hilbert::Matrix;
using hilbert::Operator;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Column real_col(std::string name) { return {std::move(name), ColumnKind::Real}; }

struct System {
  Operator hamiltonian;
  Operator a, b;
};

Operator tls_letter(char c) {
  switch (c) {
    case 'x': return hilbert::pauli_x();
    case 'y': return hilbert::pauli_y();
    case 'z': return hilbert::pauli_z();
  }
  throw UsageError("tls observables are x, y or z, not '" + std::string(1, c) + "'");
}

System make_system(const RunConfig& c) {
  const std::string name = c.text("system");
  const std::string pair = c.text("pair");
  if (pair.size() != 2) throw UsageError("pair must name two observables, e.g. xx");
  if (name == "tls") {
    return {Operator(Matrix(0.5 * hilbert::pauli_z().matrix())), tls_letter(pair[0]), tls_letter(pair[1])};
  }
  if (name == "osc") {
    const oscillator::FockSpace space(static_cast<int>(c.integer("dim")));
    auto pick = [&](char l) {
      if (l == 'x') return space.x();
      if (l == 'p') return space.p();
      throw UsageError("osc observables are x or p, not '" + std::string(1, l) + "'");
    };
    return {space.hamiltonian(1.0), pick(pair[0]), pick(pair[1])};
  }
  if (name == "three-level") {
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = 1.0;
    h(2, 2) = 2.3;
    Matrix a(3, 3);
    a << 0, 1, 0.5, 1, 0, 0.8, 0.5, 0.8, 0;
    Matrix b(3, 3);
    b << 0.3, Complex(0.4, -0.2), 0, Complex(0.4, 0.2), -0.1, Complex(0, 0.7), 0, Complex(0, -0.7), 0.2;
    auto pick = [&](char l) {
      if (l == 'a') return Operator::hermitian(a);
      if (l == 'b') return Operator::hermitian(b);
      throw UsageError("three-level observables are a or b, not '" + std::string(1, l) + "'");
    };
    return {Operator::hermitian(h), pick(pair[0]), pick(pair[1])};
  }
  throw UsageError("unknown system '" + name + "' (expected tls, osc or three-level)");
}

kernel::MemoryKernel make_kernel(const std::string& name, double td) {
  if (name == "equilibrium") return kernel::MemoryKernel::equilibrium(td, +1);
  if (name == "absorption") return kernel::MemoryKernel::equilibrium(td, -1);
  if (name == "markovian") return kernel::MemoryKernel::markovian();
  throw UsageError("unknown kernel '" + name + "' (expected equilibrium, absorption or markovian)");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot read '" + item + "' as a number");
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::string word_text(const std::vector<oscillator::Letter>& word) {
  std::string s;
  for (auto l : word) s += (s.empty() ? "" : " ") + std::string(l == oscillator::Letter::A ? "a" : "a+");
  return s;
}

}  // namespace

CommandResult run_fig1(const RunConfig& c) {
  const long steps = c.integer("steps");
  const double z_max = c.real("z-max");
  if (steps < 1) throw UsageError("fig1: steps must be >= 1");
  if (!(z_max > 0.0)) throw UsageError("fig1: z-max must be positive");
  std::vector<double> grid;
  for (long i = 0; i <= steps; ++i) grid.push_back(z_max * static_cast<double>(i) / static_cast<double>(steps));

  junction::Fig1Options opt;
  opt.cutoff = static_cast<int>(c.integer("cutoff"));
  opt.tolerance = c.real("tolerance");
  opt.scan_step = c.real("scan-step");
  opt.scan_max = c.real("scan-max");
  const junction::JunctionConfig cfg;
  const junction::Fig1Scan scan = junction::fig1_scan(cfg, grid, opt);

  CommandResult r;
  r.table.notes = {"units: noise in 2 pi G hbar Omega t0, z = e V_ac / hbar Omega, omega = Omega, T = T_d = 0"};
  r.table.columns = {real_col("z"), real_col("emission"), real_col("sym_abs"), real_col("re_sq"),
                     {"violated", ColumnKind::Boolean}};
  double cutoff_drift = 0.0;
  for (const auto& row : scan.rows) {
    r.table.add({row.z, row.emission, row.sym_abs, row.re_sq, row.violated});
    junction::JunctionConfig wide = cfg;
    wide.z = row.z;
    const int base = opt.cutoff == 0 ? junction::bessel_cutoff(row.z) : opt.cutoff;
    const auto more = junction::squeezing_report(wide, base + 20);
    cutoff_drift = std::max({cutoff_drift, std::abs(more.emission - row.emission), std::abs(more.sym_abs - row.sym_abs),
                             std::abs(more.re_sq - row.re_sq)});
  }
  const auto& first = scan.rows.front();
  r.checks.push_back({"emission_at_zero", first.emission == 0.0, first.emission, 0.0});
  r.checks.push_back({"sym_at_zero", first.sym_abs == 1.0, first.sym_abs, 0.0});
  r.checks.push_back({"interval_found", scan.interval_found && scan.z_lo == 0.0, scan.z_lo, 0.0});
  r.checks.push_back({"cutoff_independence", cutoff_drift < 1e-12, cutoff_drift, 1e-12});
  r.summary = {{"z_lo", scan.z_lo}, {"z_hi", scan.z_hi}, {"interval_found", scan.interval_found}};
  return r;
}

CommandResult run_spectrum(const RunConfig& c) {
  const System s = make_system(c);
  const double t = c.real("T");
  const double td = c.real("Td");
  const std::string kname = c.text("kernel");
  const DensityMatrix rho = hilbert::thermal_state(s.hamiltonian, t);
  const auto s_ab = correlator::lehmann_spectrum(s.hamiltonian, rho, s.a, s.b);
  const auto s_ba = correlator::lehmann_spectrum(s.hamiltonian, rho, s.b, s.a);
  const auto weak = correlator::weak_spectrum(s_ab, s_ba, make_kernel(kname, td));

  CommandResult r;
  r.table.notes = {"units: omega in units of the level spacing; weights of 2 pi delta(omega - omega_k)"};
  r.table.columns = {real_col("omega"),  real_col("s_ab_re"), real_col("s_ab_im"), real_col("s_ba_mirror_re"),
                     real_col("s_ba_mirror_im"), real_col("weak_re"), real_col("weak_im")};
  for (const auto& line : weak.lines()) {
    const Complex ab = s_ab.weight_at(line.omega);
    const Complex ba = s_ba.weight_at(-line.omega);
    r.table.add({line.omega, ab.real(), ab.imag(), ba.real(), ba.imag(), line.weight.real(), line.weight.imag()});
  }
  const double max_weak = weak.max_abs_weight();
  r.summary = {{"lines", weak.size()}, {"max_abs_weak", max_weak}};
  if (kname == "equilibrium" && t == td) r.checks.push_back({"equilibrium_silence", max_weak < 1e-12, max_weak, 1e-12});
  return r;
}

CommandResult run_fdt_check(const RunConfig& c) {
  const System s = make_system(c);
  const auto lines = correlator::fdt_residuals(s.hamiltonian, c.real("T"), s.a, s.b);
  CommandResult r;
  r.table.columns = {real_col("omega"), real_col("residual_re"), real_col("residual_im")};
  double worst = 0.0;
  for (const auto& l : lines) {
    r.table.add({l.omega, l.residual.real(), l.residual.imag()});
    worst = std::max(worst, std::abs(l.residual));
  }
  r.checks.push_back({"fdt_residual", worst < 1e-12, worst, 1e-12});
  return r;
}

CommandResult run_pfunction(const RunConfig& c) {
  const std::string state = c.text("state");
  const int dim = static_cast<int>(c.integer("dim"));
  DensityMatrix rho = DensityMatrix::maximally_mixed(1);
  if (state == "coherent") rho = oscillator::coherent_state(Complex(c.real("beta"), c.real("beta-im")), dim);
  else if (state == "thermal") rho = oscillator::thermal_osc(c.real("nbar"), dim);
  else if (state == "squeezed") rho = oscillator::squeezed_vacuum(c.real("r"), dim);
  else throw UsageError("unknown state '" + state + "' (expected coherent, thermal or squeezed)");

  const long max_order = c.integer("max-order");
  if (max_order < 1) throw UsageError("pfunction: max-order must be >= 1");

  CommandResult r;
  r.table.columns = {{"word", ColumnKind::Text},   {"n", ColumnKind::Integer}, {"k", ColumnKind::Integer},
                     real_col("weak_plus_re"),     real_col("weak_plus_im"),   real_col("p_moment_re"),
                     real_col("p_moment_im"),      real_col("weak_minus_re"),  real_col("weak_minus_im"),
                     real_col("q_moment_re"),      real_col("q_moment_im"),    real_col("max_error")};
  double worst = 0.0;
  for (long len = 1; len <= max_order; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      std::vector<oscillator::Letter> word;
      for (long i = 0; i < len; ++i) word.push_back((mask >> i) & 1u ? oscillator::Letter::ADag : oscillator::Letter::A);
      const int n = static_cast<int>(std::count(word.begin(), word.end(), oscillator::Letter::A));
      const int k = static_cast<int>(len) - n;
      const Complex wp = oscillator::weak_moment(rho, word, +1);
      const Complex wm = oscillator::weak_moment(rho, word, -1);
      const Complex pm = oscillator::quasi_moment(rho, n, k, oscillator::Ordering::P);
      const Complex qm = oscillator::quasi_moment(rho, n, k, oscillator::Ordering::Q);
      const double err = std::max(std::abs(wp - pm), std::abs(wm - qm));
      worst = std::max(worst, err);
      r.table.add({word_text(word), static_cast<std::int64_t>(n), static_cast<std::int64_t>(k), wp.real(), wp.imag(),
                   pm.real(), pm.imag(), wm.real(), wm.imag(), qm.real(), qm.imag(), err});
    }
  }
  // Normal-ordered x^2 = (a^2 + a^dag^2 + 2 a^dag a)/2 from sign +1 weak moments.
  using L = oscillator::Letter;
  const Complex aa = oscillator::weak_moment(rho, {L::A, L::A}, +1);
  const Complex dd = oscillator::weak_moment(rho, {L::ADag, L::ADag}, +1);
  const Complex da = oscillator::weak_moment(rho, {L::ADag, L::A}, +1);
  const Complex m1 = oscillator::weak_moment(rho, {L::A}, +1) + oscillator::weak_moment(rho, {L::ADag}, +1);
  const double mean_x = m1.real() / std::sqrt(2.0);
  const double p_var = 0.5 * (aa + dd + 2.0 * da).real() - mean_x * mean_x;
  const oscillator::FockSpace space(dim);
  const double x2 = rho.expectation(space.x() * space.x()).real();
  const double x_var = x2 - std::pow(rho.expectation(space.x()).real(), 2);
  constexpr double kBand = 1e-9;
  const bool squeezed = x_var < 0.5 - kBand;
  r.summary = {{"x2", x2}, {"x_variance", x_var}, {"p_variance_x", p_var}, {"squeezed", squeezed}};
  r.checks.push_back({"weak_equals_quasi", worst < 1e-9, worst, 1e-9});
  r.checks.push_back({"squeezing_iff_negative_p_variance", squeezed == (p_var < -kBand), p_var, kBand});
  return r;
}

CommandResult run_tls_variance(const RunConfig& c) {
  const double top = c.real("omega-tinf");
  const long points = c.integer("points");
  if (points < 1) throw UsageError("tls-variance: points must be >= 1");
  if (!(top > 0.0)) throw UsageError("tls-variance: omega-tinf must be positive");
  CommandResult r;
  r.table.notes = {"units: variance in units of the squared sigma eigenvalue, Omega = 1"};
  r.table.columns = {real_col("omega_tinf"), real_col("variance"), real_col("asymptote"), {"negative", ColumnKind::Boolean}};
  double value = 0.0;
  for (long i = 0; i < points; ++i) {
    const double x = points == 1 ? top : std::pow(top, static_cast<double>(i) / static_cast<double>(points - 1));
    value = correlator::tls_equal_time_variance(1.0, x);
    r.table.add({x, value, correlator::tls_equal_time_variance_asymptote(1.0, x), value < 0.0});
  }
  r.summary = {{"omega_tinf", top}, {"variance", value}, {"negative", value < 0.0}};
  return r;
}

CommandResult run_povm_converge(const RunConfig& c) {
  const std::string name = c.text("case");
  const Operator h(Matrix(0.5 * hilbert::pauli_z().matrix()));
  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  const Matrix plus = Matrix::Constant(2, 2, 0.5);
  povm::MeasurementPlan plan{h, DensityMatrix(ground), {}, kernel::MemoryKernel::markovian(), c.real("dt"), 0.0, 3.5, 0.1, {}};
  if (name == "xx-ground") {
    plan.detectors = {{hilbert::pauli_x(), 1.0}, {hilbert::pauli_x(), 2.31}};
    plan.kernel = kernel::MemoryKernel::equilibrium(0.0);
  } else if (name == "xz-plus") {
    plan.state = DensityMatrix(plus);
    plan.detectors = {{hilbert::pauli_x(), 1.0}, {hilbert::pauli_z(), 2.31}};
    plan.kernel = kernel::MemoryKernel::equilibrium(1.0);
  } else if (name == "yx-thermal") {
    plan.state = hilbert::thermal_state(h, 0.5);
    plan.detectors = {{hilbert::pauli_y(), 1.0}, {hilbert::pauli_x(), 2.31}};
    plan.kernel = kernel::MemoryKernel::equilibrium(0.5);
  } else {
    throw UsageError("unknown case '" + name + "' (expected xx-ground, xz-plus or yx-thermal)");
  }
  plan.grid.points = static_cast<int>(c.integer("grid-points"));
  const std::vector<double> etas = parse_list(c.text("etas"));
  const long samples = c.integer("samples");
  if (samples < 1) throw UsageError("povm-converge: samples must be positive");

  CommandResult r;
  r.table.notes = {"units: correlator of the outcomes a = x/eta; exact is the grid-integrated moment"};
  r.table.columns = {real_col("eta"),  real_col("estimate"), real_col("stderr"), real_col("exact"),
                     real_col("weak_reference"), real_col("bias"), real_col("bias_ratio")};
  double prev_bias = kNan;
  double worst_ratio = 4.0;
  bool ratios_ok = true;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    plan.eta = etas[i];
    povm::SamplingOptions opt;
    opt.samples = static_cast<std::size_t>(samples);
    opt.seed = c.seed + i;
    opt.threads = c.threads;
    opt.upsample = static_cast<int>(c.integer("upsample"));
    const auto est = povm::finite_eta_correlator(plan, 0, 1, opt);
    const double ref = povm::weak_reference(plan, 0, 1);
    const double bias = est.exact - ref;
    double ratio = kNan;
    if (i > 0) {
      if (std::abs(etas[i] - 0.5 * etas[i - 1]) > 1e-12 * etas[i - 1]) {
        throw UsageError("povm-converge: each eta must be half the previous one");
      }
      ratio = prev_bias / bias;
      const bool ok = std::abs(ratio - 4.0) <= 0.8;
      ratios_ok = ratios_ok && ok;
      if (std::abs(ratio - 4.0) >= std::abs(worst_ratio - 4.0)) worst_ratio = ratio;
    }
    worst_z = std::max(worst_z, std::abs(est.estimate - est.exact) / est.standard_error);
    r.table.add({etas[i], est.estimate, est.standard_error, est.exact, ref, bias, ratio});
    prev_bias = bias;
  }
  if (etas.size() > 1) r.checks.push_back({"bias_ratio_4_pm_20pct", ratios_ok, worst_ratio, 0.8});
  r.checks.push_back({"sample_mean_within_5_stderr", worst_z <= 5.0, worst_z, 5.0});
  r.summary = {{"case", name}, {"samples", samples}};
  return r;
}

CommandResult run_calibrate_kernel(const RunConfig& c) {
  std::vector<std::pair<double, double>> pairs;
  const long n = c.integer("pairs");
  if (n < 0) throw UsageError("calibrate-kernel: pairs must be >= 0");
  if (n == 0) {
    pairs.emplace_back(c.real("omega"), c.real("T"));
  } else {
    for (long i = 0; i < n; ++i) {
      const double u = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      // Omega from 0.1 to 10, T from 20 down to 0.05, so Omega/2T spans 2.5e-3 .. 100.
      pairs.emplace_back(std::pow(10.0, -1.0 + 2.0 * u), 20.0 * std::pow(400.0, -u));
    }
  }
  CommandResult r;
  r.table.columns = {real_col("omega"), real_col("T"), real_col("im_f"), real_col("coth"), real_col("relative_error"),
                     real_col("detector_temperature")};
  double worst = 0.0;
  for (const auto& [omega, t] : pairs) {
    const double im_f = kernel::solve_im_f(omega, t);
    const auto k = kernel::solve_kernel(omega, t);
    const double td = std::get<kernel::Equilibrium>(k.variant()).detector_temperature;
    const double expect = 1.0 / std::tanh(omega / (2.0 * t));
    const double rel = std::abs(im_f - expect) / expect;
    worst = std::max(worst, rel);
    r.table.add({omega, t, im_f, expect, rel, td});
  }
  r.checks.push_back({"recovers_coth", worst < 1e-10, worst, 1e-10});
  return r;
}

}  // namespace weaknoise::cli
