#pragma once

// Finite-coupling measurement model. Each measured observable A_j couples to
// its own Gaussian detector (position x, momentum p, phi(x) ~ exp(-x^2))
// through
//   H_I(t') = eta (delta(t_j - t') p + 2 f(t_j - t') x) A(t'),
// discretized as a position shift e^{-i eta A p} at t_j and phase kicks
// e^{-2i eta w x A} at the kernel sample times, w = f(t_j - t') dt taper.
// Detector positions are read projectively at the end and reported as
// a_j = x_j / eta, so pure detection noise has density ~ exp(-2 eta^2 a^2).
//
// Two routes compute the same statistics: kraus_apply evaluates the Kraus
// operator for given outcomes directly as a sum over the eigenvalue branches
// of each A_j; outcome_distribution propagates the joint system-detector
// wavefunction on the detector grid (one or two detectors).

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "weaknoise/hilbert.hpp"
#include "weaknoise/kernel.hpp"

namespace weaknoise::povm {

using hilbert::Complex;
using hilbert::DensityMatrix;
using hilbert::Matrix;
using hilbert::Operator;

struct DetectorGrid {
  int points = 128;
  double half_range = 6.0;  // x in [-L, L), periodic

  double dx() const { return 2.0 * half_range / points; }
  double position(int i) const { return -half_range + i * dx(); }
};

/// Throws unless the sampled phi is normalized to 1e-10 and |phi(+-L)| < 1e-7.
void validate(const DetectorGrid& grid);

/// phi(x) = (2/pi)^{1/4} exp(-x^2).
double detector_wavefunction(double x);

struct DetectorSpec {
  Operator observable;
  double time;
};

struct MeasurementPlan {
  Operator hamiltonian;
  DensityMatrix state;
  std::vector<DetectorSpec> detectors;
  kernel::MemoryKernel kernel;
  double dt = 0.01;
  double t_min = 0.0;
  double t_max = 1.0;
  double eta = 0.1;
  DetectorGrid grid;
};

void validate(const MeasurementPlan& plan);

struct KrausResult {
  Matrix post_state;  // K rho K^dagger at the last event time, unnormalized
  double density;     // probability density in outcome units a
};

/// Direct Kraus evaluation for outcomes a_j (one per detector).
KrausResult kraus_apply(const MeasurementPlan& plan, const std::vector<double>& outcomes);

/// Joint outcome probabilities on the detector grid, upsampled by band-limited
/// interpolation. Cell index is row-major over detectors (detector 0 slowest).
struct OutcomeDistribution {
  int detectors = 0;
  int points = 0;     // cells per detector axis
  double cell = 0.0;  // cell width in x units
  double half_range = 0.0;
  double eta = 0.0;
  std::vector<double> probability;

  double position(int i) const { return -half_range + i * cell; }
};

OutcomeDistribution outcome_distribution(const MeasurementPlan& plan, int upsample = 1);

/// E[a_j a_k] over the grid distribution, cells taken at their centres.
double grid_moment(const OutcomeDistribution& dist, int j, int k);

/// Pure detection-noise distribution (A = 0) for one detector.
OutcomeDistribution detection_noise_distribution(const DetectorGrid& grid, double eta, int upsample = 1);

/// Second moment of a jittered readout a = (x_cell + u)/eta, u uniform in the
/// cell; tends to 1/(4 eta^2).
double jittered_second_moment(const OutcomeDistribution& noise);

/// Grid-integrated E[a_j a_k] with the detection-noise second moment removed
/// when j = k. Exact for the discretized model; no sampling.
double exact_correlator(const MeasurementPlan& plan, int j, int k);

/// Weak-limit oracle: weak_correlator_grid for A_j(t_j) A_k(t_k) with the
/// plan's kernel, dt and window.
double weak_reference(const MeasurementPlan& plan, int j, int k);

struct SamplingOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  int upsample = 4;
  double stderr_tolerance = std::numeric_limits<double>::infinity();
};

struct FiniteEtaEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  double exact = 0.0;  // exact_correlator for the same plan
  bool undersampled = false;
};

/// Monte Carlo <a_j a_k>_eta from Born-rule sampling of jittered grid
/// readouts. Requires N >= 1e4. Reproducible for fixed seed and threads.
FiniteEtaEstimate finite_eta_correlator(const MeasurementPlan& plan, int j, int k, const SamplingOptions& options);

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<double> outcomes;
  double probability = 0.0;      // Born probability of the sampled cell
  double ensemble_weight = 0.0;  // 1 / batch size
  std::string state_hash;        // hash of the normalized post-measurement state
};

std::vector<TrajectoryRecord> sample_trajectories(const MeasurementPlan& plan, std::size_t count, std::uint64_t seed);
std::string to_ndjson(const std::vector<TrajectoryRecord>& records);

/// Jittered pure detection-noise readouts a.
std::vector<double> sample_detection_noise(const DetectorGrid& grid, double eta, std::size_t count, std::uint64_t seed,
                                           int upsample = 4);

struct KsResult {
  double statistic;
  double p_value;
};

/// One-sample Kolmogorov-Smirnov test of readouts against the Gaussian of
/// variance 1/(4 eta^2).
KsResult ks_test_detection_noise(std::vector<double> samples, double eta);

/// Max deviation of K rho K^dagger / |phi(x)|^2 from its first-order form
///   rho + 4 eta x A^c(t_j) rho + 2 eta x sum_k w_k A^q(t_k) rho
/// (Heisenberg-picture superoperators, final free evolution applied), over
/// the detector positions in `positions`. One detector.
double expansion_check(const MeasurementPlan& plan, const std::vector<double>& positions);

struct DetectorMoments {
  double norm;          // sum |phi|^2 dx
  double mean;          // sum x |phi|^2 dx
  double second_scaled; // 4 sum x^2 |phi|^2 dx, the unit response of the c-channel
};

DetectorMoments detector_moments(const DetectorGrid& grid);

}  // namespace weaknoise::povm
