#include "weaknoise/correlator.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "weaknoise/error.hpp"

namespace weaknoise::correlator {

namespace {

constexpr const char* kModule = "correlator";

using hilbert::EigenSystem;
using hilbert::Matrix;

bool same_frequency(double a, double b) { return std::abs(a - b) < kLineMergeTolerance; }

// Eigenbasis of H that also diagonalizes a commuting rho inside degenerate blocks.
EigenSystem joint_eigenbasis(const Operator& hamiltonian, const DensityMatrix& rho) {
  EigenSystem spectrum = hilbert::diagonalize(hamiltonian);
  const Matrix rho_eig = spectrum.to_eigenbasis(rho.matrix());
  const int n = spectrum.dim();
  const double scale = std::max(1.0, spectrum.energies.cwiseAbs().maxCoeff());
  int begin = 0;
  while (begin < n) {
    int end = begin + 1;
    while (end < n && spectrum.energies(end) - spectrum.energies(begin) <= 1e-10 * scale) ++end;
    if (end - begin > 1) {
      Eigen::SelfAdjointEigenSolver<Matrix> block(rho_eig.block(begin, begin, end - begin, end - begin));
      spectrum.vectors.middleCols(begin, end - begin) = spectrum.vectors.middleCols(begin, end - begin) * block.eigenvectors();
    }
    begin = end;
  }
  return spectrum;
}

struct Event {
  double time;
  int measurement;
  bool anticommutator;  // c-term at t_j, otherwise a q-sample
  double weight;
};

// Apply one measurement factor in the H eigenbasis.
Matrix apply_factor(const Matrix& a, const Matrix& x, bool anticommutator) {
  if (anticommutator) return hilbert::anticommutator_half(a, x);
  return hilbert::commutator_over_i(a, x);
}

}  // namespace

LineSpectrum::LineSpectrum(std::vector<Line> lines) {
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.omega < b.omega; });
  std::size_t k = 0;
  while (k < lines.size()) {
    std::size_t end = k + 1;
    Complex weight = lines[k].weight;
    double omega_sum = lines[k].omega;
    while (end < lines.size() && lines[end].omega - lines[end - 1].omega < kLineMergeTolerance) {
      weight += lines[end].weight;
      omega_sum += lines[end].omega;
      ++end;
    }
    lines_.push_back({omega_sum / static_cast<double>(end - k), weight});
    k = end;
  }
}

Complex LineSpectrum::weight_at(double omega) const {
  auto it = std::lower_bound(lines_.begin(), lines_.end(), omega - kLineMergeTolerance,
                             [](const Line& l, double w) { return l.omega < w; });
  if (it != lines_.end() && same_frequency(it->omega, omega)) return it->weight;
  return 0.0;
}

bool LineSpectrum::has_line(double omega) const {
  auto it = std::lower_bound(lines_.begin(), lines_.end(), omega - kLineMergeTolerance,
                             [](const Line& l, double w) { return l.omega < w; });
  return it != lines_.end() && same_frequency(it->omega, omega);
}

Complex LineSpectrum::correlation(double t) const {
  Complex sum = 0.0;
  for (const Line& l : lines_) sum += l.weight * std::polar(1.0, -l.omega * t);
  return sum;
}

double LineSpectrum::max_abs_weight() const {
  double m = 0.0;
  for (const Line& l : lines_) m = std::max(m, std::abs(l.weight));
  return m;
}

LineSpectrum lehmann_spectrum(const Operator& hamiltonian, const DensityMatrix& rho, const Operator& a,
                              const Operator& b, SpectrumOptions options) {
  if (a.dim() != hamiltonian.dim() || b.dim() != hamiltonian.dim() || rho.dim() != hamiltonian.dim()) {
    fail(kModule, "dim", "H, rho, A and B must share one dimension");
  }
  if (hilbert::commutator_norm(rho.as_operator(), hamiltonian) > 1e-10) {
    fail(kModule, "rho", "state does not commute with H; use weak_correlator_grid for non-stationary states");
  }
  const EigenSystem basis = joint_eigenbasis(hamiltonian, rho);
  const int n = basis.dim();
  Matrix da = a.matrix();
  Matrix db = b.matrix();
  if (options.subtract_means) {
    da -= rho.expectation(a) * Matrix::Identity(n, n);
    db -= rho.expectation(b) * Matrix::Identity(n, n);
  }
  da = basis.to_eigenbasis(da);
  db = basis.to_eigenbasis(db);
  const Matrix rho_eig = basis.to_eigenbasis(rho.matrix());

  std::vector<Line> lines;
  lines.reserve(static_cast<std::size_t>(n) * n);
  for (int m = 0; m < n; ++m) {
    const double p = rho_eig(m, m).real();
    for (int k = 0; k < n; ++k) {
      lines.push_back({basis.energies(k) - basis.energies(m), p * da(m, k) * db(k, m)});
    }
  }
  return LineSpectrum(std::move(lines));
}

LineSpectrum weak_spectrum(const LineSpectrum& s_ab, const LineSpectrum& s_ba, const MemoryKernel& kernel) {
  if (s_ab.size() != s_ba.size()) fail(kModule, "spectra", "S_AB and S_BA have different line sets");
  for (std::size_t k = 0; k < s_ab.size(); ++k) {
    if (!same_frequency(s_ab.lines()[k].omega, s_ba.lines()[k].omega)) {
      fail(kModule, "spectra", "S_AB and S_BA lines are not aligned");
    }
  }
  std::vector<Line> out;
  out.reserve(s_ab.size());
  for (const Line& line : s_ab.lines()) {
    if (!s_ba.has_line(-line.omega)) fail(kModule, "spectra", "line set is not closed under omega -> -omega");
    const Complex direct = line.weight;
    const Complex reversed = s_ba.weight_at(-line.omega);
    const Complex sym = 0.5 * (direct + reversed);
    if (std::abs(line.omega) < kLineMergeTolerance) {
      out.push_back({line.omega, sym});
      continue;
    }
    const double g = kernel::f_omega(kernel, line.omega).imag();
    out.push_back({line.omega, sym - 0.5 * g * (direct - reversed)});
  }
  return LineSpectrum(std::move(out));
}

std::vector<FdtLine> fdt_residuals(const Operator& hamiltonian, double temperature, const Operator& a,
                                   const Operator& b) {
  if (!(temperature > 0.0)) fail(kModule, "T", "fluctuation-dissipation check needs T > 0");
  const DensityMatrix rho = hilbert::thermal_state(hamiltonian, temperature);
  const LineSpectrum s_ab = lehmann_spectrum(hamiltonian, rho, a, b);
  const LineSpectrum s_ba = lehmann_spectrum(hamiltonian, rho, b, a);
  std::vector<FdtLine> out;
  out.reserve(s_ab.size());
  for (const Line& line : s_ab.lines()) {
    const Complex reversed = s_ba.weight_at(-line.omega);
    out.push_back({line.omega, line.weight - std::exp(line.omega / temperature) * reversed});
  }
  return out;
}

Complex fdt_residual(const Operator& hamiltonian, double temperature, const Operator& a, const Operator& b,
                     double omega) {
  for (const FdtLine& line : fdt_residuals(hamiltonian, temperature, a, b)) {
    if (same_frequency(line.omega, omega)) return line.residual;
  }
  return 0.0;
}

Complex weak_correlator_grid(const WeakCorrelatorRequest& request) {
  const auto& measurements = request.measurements;
  const std::size_t count = measurements.size();
  if (count == 0) fail(kModule, "observables", "need at least one measurement");
  if (count > kMaxGridMeasurements) fail(kModule, "observables", "grid correlator supports at most 4 measurements");
  const int dim = request.hamiltonian.dim();
  if (request.state.dim() != dim) fail(kModule, "rho", "state and Hamiltonian dimensions differ");
  for (const Measurement& m : measurements) {
    if (m.observable.dim() != dim) fail(kModule, "observables", "observable dimension differs from H");
    if (!m.observable.is_hermitian()) fail(kModule, "observables", "observables must be Hermitian");
  }
  const TimeGrid& grid = request.grid;
  if (!(grid.dt > 0.0)) fail(kModule, "dt", "time step must be positive");
  if (!(grid.t_max > grid.t_min)) fail(kModule, "t_window", "empty time window");
  for (const Measurement& m : measurements) {
    if (m.time < grid.t_min || m.time > grid.t_max) fail(kModule, "t_window", "measurement time outside the window");
  }

  const EigenSystem spectrum = hilbert::diagonalize(request.hamiltonian);
  const double width = spectrum.energies(dim - 1) - spectrum.energies(0);
  if (width > 0.0 && grid.dt > 0.2 / width) fail(kModule, "dt", "grid too coarse: dt must not exceed 0.2 / (E_max - E_min)");

  double reach = grid.t_max - grid.t_min;
  for (const Measurement& m : measurements) reach = std::min({reach, m.time - grid.t_min, grid.t_max - m.time});

  std::vector<Event> events;
  for (std::size_t j = 0; j < count; ++j) {
    const int idx = static_cast<int>(j);
    events.push_back({measurements[j].time, idx, true, 1.0});
    for (const kernel::MemorySample& s : kernel::memory_samples(request.kernel, measurements[j].time, grid.dt, reach)) {
      events.push_back({s.time, idx, false, 0.5 * s.weight});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });

  std::vector<Matrix> ops;
  for (const Measurement& m : measurements) ops.push_back(spectrum.to_eigenbasis(m.observable.matrix()));

  const std::size_t n_states = std::size_t{1} << count;
  std::vector<Matrix> states(n_states, Matrix::Zero(dim, dim));
  std::vector<bool> active(n_states, false);
  states[0] = spectrum.to_eigenbasis(request.state.matrix());
  active[0] = true;
  double now = 0.0;

  auto evolve_to = [&](double t) {
    if (t == now) return;
    Eigen::VectorXcd u(dim);
    for (int k = 0; k < dim; ++k) u(k) = std::polar(1.0, -spectrum.energies(k) * (t - now));
    const Matrix phase = u * u.adjoint();
    for (std::size_t s = 0; s < n_states; ++s) {
      if (active[s]) states[s] = states[s].cwiseProduct(phase);
    }
    now = t;
  };

  std::size_t begin = 0;
  while (begin < events.size()) {
    const double t = events[begin].time;
    std::size_t end = begin + 1;
    const double tol = 1e-12 * std::max(1.0, std::abs(t));
    while (end < events.size() && events[end].time - t <= tol) ++end;
    evolve_to(t);

    const std::size_t group = end - begin;
    std::vector<Matrix> next = states;
    std::vector<bool> next_active = active;
    for (std::size_t s = 0; s < n_states; ++s) {
      if (!active[s]) continue;
      for (std::size_t pick = 1; pick < (std::size_t{1} << group); ++pick) {
        std::vector<std::size_t> chosen;
        std::size_t target = s;
        bool ok = true;
        for (std::size_t g = 0; g < group && ok; ++g) {
          if (!(pick & (std::size_t{1} << g))) continue;
          const std::size_t bit = std::size_t{1} << events[begin + g].measurement;
          if (target & bit) ok = false;
          target |= bit;
          chosen.push_back(begin + g);
        }
        if (!ok) continue;
        double weight = 1.0;
        for (std::size_t e : chosen) weight *= events[e].weight;
        // Average the ordered products over all orderings of coincident events.
        Matrix sum = Matrix::Zero(dim, dim);
        std::size_t orderings = 0;
        std::sort(chosen.begin(), chosen.end());
        do {
          Matrix x = states[s];
          for (std::size_t e : chosen) x = apply_factor(ops[static_cast<std::size_t>(events[e].measurement)], x, events[e].anticommutator);
          sum += x;
          ++orderings;
        } while (std::next_permutation(chosen.begin(), chosen.end()));
        next[target] += (weight / static_cast<double>(orderings)) * sum;
        next_active[target] = true;
      }
    }
    states = std::move(next);
    active = std::move(next_active);
    begin = end;
  }
  return states[n_states - 1].trace();
}

Eigen::MatrixXd symmetrized_correlation_matrix(const DensityMatrix& rho, const std::vector<Operator>& observables) {
  const auto n = static_cast<Eigen::Index>(observables.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& a = observables[static_cast<std::size_t>(i)];
      const auto& b = observables[static_cast<std::size_t>(j)];
      c(i, j) = rho.expectation(hilbert::apply_c(a, b)).real();
    }
  }
  return c;
}

double tls_equal_time_variance(double omega, double t_inf) {
  if (!(omega > 0.0)) fail(kModule, "omega", "frequency must be positive");
  if (!(t_inf > 0.0)) fail(kModule, "t_inf", "cutoff time must be positive");
  // u = Omega t; (cos u - 1)/u = -2 sin^2(u/2)/u, regular at u = 0.
  auto integrand = [](double u) {
    if (u == 0.0) return 0.0;
    const double s = std::sin(0.5 * u);
    return -2.0 * s * s / u;
  };
  using boost::math::quadrature::gauss_kronrod;
  const double upper = omega * t_inf;
  const double chunk = std::numbers::pi;
  double sum = 0.0;
  double compensation = 0.0;
  for (double a = 0.0; a < upper; a += chunk) {
    const double b = std::min(upper, a + chunk);
    const double piece = gauss_kronrod<double, 31>::integrate(integrand, a, b, 10, 1e-14);
    // Neumaier summation over many half-periods.
    const double t = sum + piece;
    compensation += std::abs(sum) >= std::abs(piece) ? (sum - t) + piece : (piece - t) + sum;
    sum = t;
  }
  return 2.0 + (2.0 / std::numbers::pi) * (sum + compensation);
}

double tls_equal_time_variance_asymptote(double omega, double t_inf) {
  if (!(omega > 0.0) || !(t_inf > 0.0)) fail(kModule, "t_inf", "inputs must be positive");
  return 2.0 - (2.0 / std::numbers::pi) * (std::log(omega * t_inf) + std::numbers::egamma);
}

PositivityCheck weak_positivity_check(const Eigen::MatrixXd& correlation_matrix) {
  if (correlation_matrix.rows() != correlation_matrix.cols() || correlation_matrix.rows() == 0) {
    fail(kModule, "correlation_matrix", "matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, correlation_matrix.cwiseAbs().maxCoeff());
  if ((correlation_matrix - correlation_matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    fail(kModule, "correlation_matrix", "matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(correlation_matrix, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  return {min_eig >= -1e-10, min_eig};
}

}  // namespace weaknoise::correlator
