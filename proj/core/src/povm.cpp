#include "weaknoise/povm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "weaknoise/correlator.hpp"
#include "weaknoise/error.hpp"

namespace weaknoise::povm {

namespace {

constexpr const char* kModule = "povm";
constexpr double kBoundaryMass = 1e-14;

struct Event {
  double time;
  int detector;
  bool shift;     // position shift at t_j, otherwise a memory kick
  double weight;  // f(t_j - t') dt taper for kicks
};

std::vector<Event> build_events(const MeasurementPlan& plan) {
  double reach = plan.t_max - plan.t_min;
  for (const DetectorSpec& d : plan.detectors) reach = std::min({reach, d.time - plan.t_min, plan.t_max - d.time});
  std::vector<Event> events;
  for (std::size_t j = 0; j < plan.detectors.size(); ++j) {
    const int idx = static_cast<int>(j);
    const double tj = plan.detectors[j].time;
    events.push_back({tj, idx, true, 0.0});
    for (const kernel::MemorySample& s : kernel::memory_samples(plan.kernel, tj, plan.dt, reach)) {
      events.push_back({s.time, idx, false, s.weight});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  return events;
}

struct Eigen1 {
  Eigen::VectorXd values;
  Matrix vectors;
};

Eigen1 eigen_of(const Operator& op) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (op.matrix() + op.matrix().adjoint()));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

class Propagator {
 public:
  explicit Propagator(const Operator& h) : spectrum_(hilbert::diagonalize(h)) {}
  Matrix operator()(double dt) const {
    Eigen::VectorXcd phases(spectrum_.dim());
    for (int k = 0; k < spectrum_.dim(); ++k) phases(k) = std::polar(1.0, -spectrum_.energies(k) * dt);
    return spectrum_.vectors * phases.asDiagonal() * spectrum_.vectors.adjoint();
  }

 private:
  hilbert::EigenSystem spectrum_;
};

// e^{-i theta A} from the eigen decomposition of A.
Matrix phase_operator(const Eigen1& a, double theta) {
  Eigen::VectorXcd phases(a.values.size());
  for (Eigen::Index l = 0; l < a.values.size(); ++l) phases(l) = std::polar(1.0, -theta * a.values(l));
  return a.vectors * phases.asDiagonal() * a.vectors.adjoint();
}

// Periodic band-limited interpolation kernel on N points of spacing dx.
double dirichlet(double u, int n, double dx) {
  const double period = n * dx;
  double sum = 1.0 + std::cos(std::numbers::pi * u / dx);
  for (int q = 1; q < n / 2; ++q) sum += 2.0 * std::cos(2.0 * std::numbers::pi * q * u / period);
  return sum / n;
}

// Rows: target points y_m = -L + m * (dx / upsample) + offset; columns: grid points.
Eigen::MatrixXd interpolation_matrix(const DetectorGrid& grid, int upsample, double offset) {
  const int n = grid.points;
  const int rows = n * upsample;
  const double fine = grid.dx() / upsample;
  Eigen::MatrixXd m(rows, n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = dirichlet(-grid.half_range + r * fine - offset - grid.position(c), n, grid.dx());
  }
  return m;
}

// (T f)(x) = f(x - s).
Eigen::MatrixXd translation_matrix(const DetectorGrid& grid, double s) { return interpolation_matrix(grid, 1, s); }

std::uint64_t fnv1a(const Matrix& m) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](long long v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      mix(std::llround(m(r, c).real() * 1e10));
      mix(std::llround(m(r, c).imag() * 1e10));
    }
  }
  return h;
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  for (double& v : cdf) v /= acc;
  return cdf;
}

// Draws a cell from the cdf and jitters each axis uniformly inside it; returns positions x.
void draw(const OutcomeDistribution& dist, const std::vector<double>& cdf, std::mt19937_64& engine,
          std::uniform_real_distribution<double>& uniform, std::vector<double>& x) {
  const double u = uniform(engine);
  auto cell = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  cell = std::min(cell, cdf.size() - 1);
  for (int j = dist.detectors - 1; j >= 0; --j) {
    const int i = static_cast<int>(cell % static_cast<std::size_t>(dist.points));
    cell /= static_cast<std::size_t>(dist.points);
    x[static_cast<std::size_t>(j)] = dist.position(i) + (uniform(engine) - 0.5) * dist.cell;
  }
}

}  // namespace

double detector_wavefunction(double x) { return std::pow(2.0 / std::numbers::pi, 0.25) * std::exp(-x * x); }

void validate(const DetectorGrid& grid) {
  if (grid.points < 16 || grid.points % 2 != 0) fail(kModule, "points", "detector grid needs an even number of points >= 16");
  if (!(grid.half_range > 0.0)) fail(kModule, "range", "detector range must be positive");
  double norm = 0.0;
  for (int i = 0; i < grid.points; ++i) norm += std::pow(detector_wavefunction(grid.position(i)), 2) * grid.dx();
  if (std::abs(norm - 1.0) > 1e-10) fail(kModule, "points", "detector wavefunction is not normalized on the grid");
  if (detector_wavefunction(grid.half_range) >= 1e-7) fail(kModule, "range", "detector wavefunction does not vanish at the grid edge");
}

void validate(const MeasurementPlan& plan) {
  if (!(plan.eta > 0.0) || plan.eta > 1.0) fail(kModule, "eta", "coupling must lie in (0, 1]");
  if (plan.detectors.empty()) fail(kModule, "detectors", "need at least one detector");
  if (plan.detectors.size() > correlator::kMaxGridMeasurements) fail(kModule, "detectors", "at most 4 detectors");
  const int dim = plan.hamiltonian.dim();
  if (plan.state.dim() != dim) fail(kModule, "rho", "state and Hamiltonian dimensions differ");
  if (!(plan.dt > 0.0)) fail(kModule, "dt", "time step must be positive");
  if (!(plan.t_max > plan.t_min)) fail(kModule, "t_window", "empty time window");
  for (const DetectorSpec& d : plan.detectors) {
    if (d.observable.dim() != dim) fail(kModule, "observables", "observable dimension differs from H");
    if (!d.observable.is_hermitian()) fail(kModule, "observables", "observables must be Hermitian");
    if (d.time < plan.t_min || d.time > plan.t_max) fail(kModule, "t_window", "measurement time outside the window");
  }
  validate(plan.grid);
}

KrausResult kraus_apply(const MeasurementPlan& plan, const std::vector<double>& outcomes) {
  validate(plan);
  const std::size_t n = plan.detectors.size();
  if (outcomes.size() != n) fail(kModule, "outcomes", "need one outcome per detector");
  const int dim = plan.hamiltonian.dim();
  const std::vector<Event> events = build_events(plan);
  const Propagator propagate(plan.hamiltonian);
  std::vector<Eigen1> eig;
  for (const DetectorSpec& d : plan.detectors) eig.push_back(eigen_of(d.observable));
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = plan.eta * outcomes[j];

  Matrix k = Matrix::Zero(dim, dim);
  std::vector<int> branch(n, 0);
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= static_cast<std::size_t>(dim);
  for (std::size_t b = 0; b < total; ++b) {
    std::size_t rest = b;
    double amplitude = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      branch[j] = static_cast<int>(rest % static_cast<std::size_t>(dim));
      rest /= static_cast<std::size_t>(dim);
      amplitude *= detector_wavefunction(x[j] - plan.eta * eig[j].values(branch[j]));
    }
    if (amplitude == 0.0) continue;
    Matrix m = Matrix::Identity(dim, dim);
    double now = 0.0;
    for (const Event& e : events) {
      if (e.time != now) m = propagate(e.time - now) * m;
      now = e.time;
      const auto j = static_cast<std::size_t>(e.detector);
      const double lambda = eig[j].values(branch[j]);
      if (e.shift) {
        const Eigen::VectorXcd v = eig[j].vectors.col(branch[j]);
        m = v * (v.adjoint() * m);
      } else {
        const double position = e.time < plan.detectors[j].time ? x[j] - plan.eta * lambda : x[j];
        m = phase_operator(eig[j], 2.0 * plan.eta * e.weight * position) * m;
      }
    }
    k += amplitude * m;
  }
  KrausResult result;
  result.post_state = k * plan.state.matrix() * k.adjoint();
  result.density = std::pow(plan.eta, static_cast<double>(n)) * result.post_state.trace().real();
  return result;
}

OutcomeDistribution outcome_distribution(const MeasurementPlan& plan, int upsample) {
  validate(plan);
  const int n_det = static_cast<int>(plan.detectors.size());
  if (n_det > 2) fail(kModule, "detectors", "grid distributions support one or two detectors");
  if (upsample < 1) fail(kModule, "upsample", "upsampling factor must be >= 1");
  const DetectorGrid& grid = plan.grid;
  const int n = grid.points;
  const int dim = plan.hamiltonian.dim();
  const Eigen::Index cols = n_det == 1 ? n : static_cast<Eigen::Index>(n) * n;
  const double dx = grid.dx();

  Eigen::VectorXd phi(n);
  for (int i = 0; i < n; ++i) phi(i) = detector_wavefunction(grid.position(i)) * std::sqrt(dx);
  phi /= phi.norm();

  const std::vector<Event> events = build_events(plan);
  const Propagator propagate(plan.hamiltonian);
  std::vector<Eigen1> eig;
  for (const DetectorSpec& d : plan.detectors) eig.push_back(eigen_of(d.observable));

  // Position of detector j for every flattened grid configuration.
  std::vector<Eigen::VectorXd> coord(static_cast<std::size_t>(n_det), Eigen::VectorXd(cols));
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (n_det == 1) {
      coord[0](c) = grid.position(static_cast<int>(c));
    } else {
      coord[0](c) = grid.position(static_cast<int>(c / n));
      coord[1](c) = grid.position(static_cast<int>(c % n));
    }
  }

  // Applies an N x N operator along detector axis j to one flattened column.
  auto along_axis = [&](Eigen::Ref<Eigen::VectorXcd> col, const Eigen::MatrixXd& t, int j) {
    if (n_det == 1) {
      col = (t.cast<Complex>() * col).eval();
      return;
    }
    // Column-major map: element (i2, i1) holds configuration i1 * N + i2.
    Eigen::Map<Matrix> m(col.data(), n, n);
    if (j == 0) {
      m = (m * t.transpose().cast<Complex>()).eval();
    } else {
      m = (t.cast<Complex>() * m).eval();
    }
  };

  const int nf = n * upsample;
  const Eigen::MatrixXd up = interpolation_matrix(grid, upsample, 0.0);
  const double cell_factor = std::pow(1.0 / upsample, n_det);
  OutcomeDistribution dist;
  dist.detectors = n_det;
  dist.points = nf;
  dist.cell = dx / upsample;
  dist.half_range = grid.half_range;
  dist.eta = plan.eta;
  dist.probability.assign(n_det == 1 ? static_cast<std::size_t>(nf) : static_cast<std::size_t>(nf) * nf, 0.0);

  Eigen::SelfAdjointEigenSolver<Matrix> rho_eig(plan.state.matrix());
  for (int r = 0; r < dim; ++r) {
    const double weight = rho_eig.eigenvalues()(r);
    if (weight < 1e-14) continue;
    // psi(c, s): grid configuration c, system index s.
    Matrix psi(cols, dim);
    for (int s = 0; s < dim; ++s) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        const double amp = n_det == 1 ? phi(c) : phi(c / n) * phi(c % n);
        psi(c, s) = rho_eig.eigenvectors()(s, r) * amp;
      }
    }
    double now = 0.0;
    for (const Event& e : events) {
      if (e.time != now) psi = psi * propagate(e.time - now).transpose();
      now = e.time;
      const auto j = static_cast<std::size_t>(e.detector);
      Matrix rotated = psi * eig[j].vectors.conjugate();
      for (Eigen::Index l = 0; l < rotated.cols(); ++l) {
        const double lambda = eig[j].values(l);
        if (e.shift) {
          const Eigen::MatrixXd t = translation_matrix(grid, plan.eta * lambda);
          along_axis(rotated.col(l), t, static_cast<int>(j));
        } else {
          const double theta = 2.0 * plan.eta * e.weight * lambda;
          for (Eigen::Index c = 0; c < cols; ++c) rotated(c, l) *= std::polar(1.0, -theta * coord[j](c));
        }
      }
      psi = rotated * eig[j].vectors.transpose();
    }

    // Wavepacket must stay clear of the periodic boundary.
    double edge = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      bool on_edge = false;
      for (int j = 0; j < n_det; ++j) {
        const int i = n_det == 1 ? static_cast<int>(c) : (j == 0 ? static_cast<int>(c / n) : static_cast<int>(c % n));
        on_edge = on_edge || i < 2 || i >= n - 2;
      }
      if (on_edge) edge += psi.row(c).squaredNorm();
    }
    if (edge > kBoundaryMass) fail(kModule, "grid", "detector wavepacket reaches the grid boundary; enlarge the range or lower eta");

    for (int s = 0; s < dim; ++s) {
      Eigen::VectorXcd col = psi.col(s);
      if (n_det == 1) {
        const Eigen::VectorXcd fine = up.cast<Complex>() * col;
        for (int i = 0; i < nf; ++i) dist.probability[static_cast<std::size_t>(i)] += weight * std::norm(fine(i)) * cell_factor;
      } else {
        Eigen::Map<Matrix> m(col.data(), n, n);
        const Matrix fine = up.cast<Complex>() * m * up.transpose().cast<Complex>();  // (i2f, i1f)
        for (int i1 = 0; i1 < nf; ++i1) {
          for (int i2 = 0; i2 < nf; ++i2) {
            dist.probability[static_cast<std::size_t>(i1) * nf + static_cast<std::size_t>(i2)] +=
                weight * std::norm(fine(i2, i1)) * cell_factor;
          }
        }
      }
    }
  }
  return dist;
}

double grid_moment(const OutcomeDistribution& dist, int j, int k) {
  if (j < 0 || k < 0 || j >= dist.detectors || k >= dist.detectors) fail(kModule, "pair", "detector index out of range");
  double sum = 0.0;
  for (std::size_t c = 0; c < dist.probability.size(); ++c) {
    std::size_t rest = c;
    double x[2] = {0.0, 0.0};
    for (int d = dist.detectors - 1; d >= 0; --d) {
      x[d] = dist.position(static_cast<int>(rest % static_cast<std::size_t>(dist.points)));
      rest /= static_cast<std::size_t>(dist.points);
    }
    sum += dist.probability[c] * x[j] * x[k];
  }
  return sum / (dist.eta * dist.eta);
}

OutcomeDistribution detection_noise_distribution(const DetectorGrid& grid, double eta, int upsample) {
  MeasurementPlan plan{Operator::zero(2), DensityMatrix::maximally_mixed(2), {{Operator::zero(2), 0.5}},
                       kernel::MemoryKernel::markovian(), 0.01, 0.0, 1.0, eta, grid};
  return outcome_distribution(plan, upsample);
}

double jittered_second_moment(const OutcomeDistribution& noise) {
  return grid_moment(noise, 0, 0) + noise.cell * noise.cell / (12.0 * noise.eta * noise.eta);
}

double exact_correlator(const MeasurementPlan& plan, int j, int k) {
  const OutcomeDistribution dist = outcome_distribution(plan, 1);
  double m = grid_moment(dist, j, k);
  if (j == k) m -= grid_moment(detection_noise_distribution(plan.grid, plan.eta, 1), 0, 0);
  return m;
}

double weak_reference(const MeasurementPlan& plan, int j, int k) {
  validate(plan);
  const auto n = static_cast<int>(plan.detectors.size());
  if (j < 0 || k < 0 || j >= n || k >= n) fail(kModule, "pair", "detector index out of range");
  const DetectorSpec& a = plan.detectors[static_cast<std::size_t>(j)];
  const DetectorSpec& b = plan.detectors[static_cast<std::size_t>(k)];
  correlator::WeakCorrelatorRequest request{plan.hamiltonian,
                                            plan.state,
                                            {{a.observable, a.time}, {b.observable, b.time}},
                                            plan.kernel,
                                            {plan.dt, plan.t_min, plan.t_max}};
  // The window reach must match the full plan, not just the selected pair.
  double reach = plan.t_max - plan.t_min;
  for (const DetectorSpec& d : plan.detectors) reach = std::min({reach, d.time - plan.t_min, plan.t_max - d.time});
  const double lo = std::min(a.time, b.time) - reach;
  const double hi = std::max(a.time, b.time) + reach;
  request.grid.t_min = std::max(plan.t_min, lo);
  request.grid.t_max = std::min(plan.t_max, hi);
  return correlator::weak_correlator_grid(request).real();
}

FiniteEtaEstimate finite_eta_correlator(const MeasurementPlan& plan, int j, int k, const SamplingOptions& options) {
  if (options.samples < 10000) fail(kModule, "samples", "need at least 1e4 samples");
  if (options.threads < 1) fail(kModule, "threads", "thread count must be >= 1");
  const OutcomeDistribution dist = outcome_distribution(plan, options.upsample);
  if (j < 0 || k < 0 || j >= dist.detectors || k >= dist.detectors) fail(kModule, "pair", "detector index out of range");
  const std::vector<double> cdf = cumulative(dist.probability);

  const auto workers = static_cast<std::size_t>(options.threads);
  std::vector<double> sums(workers, 0.0);
  std::vector<double> squares(workers, 0.0);
  auto work = [&](std::size_t w) {
    const std::size_t begin = options.samples * w / workers;
    const std::size_t end = options.samples * (w + 1) / workers;
    std::mt19937_64 engine = make_engine(options.seed, w);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(dist.detectors));
    double s = 0.0;
    double q = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      draw(dist, cdf, engine, uniform, x);
      const double v = x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(k)] / (plan.eta * plan.eta);
      s += v;
      q += v * v;
    }
    sums[w] = s;
    squares[w] = q;
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }
  double s = 0.0;
  double q = 0.0;
  for (std::size_t w = 0; w < workers; ++w) {
    s += sums[w];
    q += squares[w];
  }
  const auto n = static_cast<double>(options.samples);
  const double mean = s / n;
  const double var = std::max(0.0, q / n - mean * mean) * n / (n - 1.0);

  FiniteEtaEstimate out;
  out.estimate = mean;
  if (j == k) out.estimate -= jittered_second_moment(detection_noise_distribution(plan.grid, plan.eta, options.upsample));
  out.standard_error = std::sqrt(var / n);
  out.exact = exact_correlator(plan, j, k);
  out.undersampled = out.standard_error > options.stderr_tolerance;
  return out;
}

std::vector<TrajectoryRecord> sample_trajectories(const MeasurementPlan& plan, std::size_t count, std::uint64_t seed) {
  if (count == 0) return {};
  const OutcomeDistribution dist = outcome_distribution(plan, 4);
  const std::vector<double> cdf = cumulative(dist.probability);
  double total = 0.0;
  for (double p : dist.probability) total += p;
  std::vector<TrajectoryRecord> records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    TrajectoryRecord rec;
    rec.seed = seed ^ (0x9E3779B97F4A7C15ull * (i + 1));
    std::mt19937_64 engine = make_engine(rec.seed, 0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(dist.detectors));
    const double u = uniform(engine);
    const auto cell = std::min(static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), cdf.size() - 1);
    rec.probability = dist.probability[cell] / total;
    std::size_t rest = cell;
    for (int j = dist.detectors - 1; j >= 0; --j) {
      x[static_cast<std::size_t>(j)] = dist.position(static_cast<int>(rest % static_cast<std::size_t>(dist.points))) +
                                       (uniform(engine) - 0.5) * dist.cell;
      rest /= static_cast<std::size_t>(dist.points);
    }
    for (double v : x) rec.outcomes.push_back(v / plan.eta);
    KrausResult k = kraus_apply(plan, rec.outcomes);
    const double tr = k.post_state.trace().real();
    if (tr > 0.0) k.post_state /= tr;
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a(k.post_state);
    rec.state_hash = hash.str();
    rec.ensemble_weight = 1.0 / static_cast<double>(count);
    records.push_back(std::move(rec));
  }
  return records;
}

std::string to_ndjson(const std::vector<TrajectoryRecord>& records) {
  std::string out;
  for (const TrajectoryRecord& r : records) {
    nlohmann::json j;
    j["seed"] = r.seed;
    j["outcomes"] = r.outcomes;
    j["probability"] = r.probability;
    j["ensemble_weight"] = r.ensemble_weight;
    j["state_hash"] = r.state_hash;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<double> sample_detection_noise(const DetectorGrid& grid, double eta, std::size_t count, std::uint64_t seed,
                                           int upsample) {
  const OutcomeDistribution dist = detection_noise_distribution(grid, eta, upsample);
  const std::vector<double> cdf = cumulative(dist.probability);
  std::mt19937_64 engine = make_engine(seed, 0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> x(1);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    draw(dist, cdf, engine, uniform, x);
    out.push_back(x[0] / eta);
  }
  return out;
}

KsResult ks_test_detection_noise(std::vector<double> samples, double eta) {
  if (samples.empty()) fail(kModule, "samples", "no samples");
  std::sort(samples.begin(), samples.end());
  const double sigma = 1.0 / (2.0 * eta);
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = 0.5 * std::erfc(-samples[i] / (sigma * std::numbers::sqrt2));
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  // Asymptotic Kolmogorov distribution with Stephens' finite-n correction.
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 1.0;
  if (lambda > 0.2) {
    p = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      p += (k % 2 == 1 ? 2.0 : -2.0) * term;
      if (term < 1e-16) break;
    }
    p = std::clamp(p, 0.0, 1.0);
  }
  return {d, p};
}

double expansion_check(const MeasurementPlan& plan, const std::vector<double>& positions) {
  validate(plan);
  if (plan.detectors.size() != 1) fail(kModule, "detectors", "expansion check uses a single detector");
  const std::vector<Event> events = build_events(plan);
  const double t_end = events.back().time;
  const hilbert::EigenSystem spectrum = hilbert::diagonalize(plan.hamiltonian);
  const Operator& a = plan.detectors[0].observable;
  const Matrix& rho = plan.state.matrix();

  Matrix c_term = Matrix::Zero(rho.rows(), rho.cols());
  Matrix q_term = Matrix::Zero(rho.rows(), rho.cols());
  for (const Event& e : events) {
    const Matrix at = hilbert::evolve_heisenberg(a, spectrum, e.time).matrix();
    if (e.shift) {
      c_term += hilbert::anticommutator_half(at, rho);
    } else {
      q_term += e.weight * hilbert::commutator_over_i(at, rho);
    }
  }
  const Matrix u = Propagator(plan.hamiltonian)(t_end);

  double residual = 0.0;
  for (double x : positions) {
    const double k2 = std::pow(detector_wavefunction(x), 2);
    if (k2 == 0.0) fail(kModule, "positions", "detector position outside the Gaussian support");
    const KrausResult exact = kraus_apply(plan, {x / plan.eta});
    const Matrix first = rho + 4.0 * plan.eta * x * c_term + 2.0 * plan.eta * x * q_term;
    const Matrix expected = u * first * u.adjoint();
    residual = std::max(residual, (exact.post_state / k2 - expected).cwiseAbs().maxCoeff());
  }
  return residual;
}

DetectorMoments detector_moments(const DetectorGrid& grid) {
  DetectorMoments m{0.0, 0.0, 0.0};
  for (int i = 0; i < grid.points; ++i) {
    const double x = grid.position(i);
    const double w = std::pow(detector_wavefunction(x), 2) * grid.dx();
    m.norm += w;
    m.mean += x * w;
    m.second_scaled += 4.0 * x * x * w;
  }
  return m;
}

}  // namespace weaknoise::povm
