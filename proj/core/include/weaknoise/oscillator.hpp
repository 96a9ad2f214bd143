#pragma once

// Truncated-Fock-space harmonic oscillator with a = (x + ip)/sqrt(2),
// [x, p] = i. Provides state factories, quasiprobability moments in normal
// (P), antinormal (Q) and symmetric (Wigner) order, equal-time weak moments
// for a perfect photodetector, and two-time weak correlators of quadratures.

#include <string>
#include <vector>

#include "weaknoise/hilbert.hpp"
#include "weaknoise/kernel.hpp"

namespace weaknoise::oscillator {

using hilbert::Complex;
using hilbert::DensityMatrix;
using hilbert::Operator;

inline constexpr int kMinDim = 8;
/// Largest probability mass a state factory may drop at the truncation edge.
inline constexpr double kTailTolerance = 1e-8;

class FockSpace {
 public:
  explicit FockSpace(int dim);

  int dim() const { return dim_; }
  const Operator& a() const { return a_; }
  const Operator& a_dag() const { return a_dag_; }
  const Operator& x() const { return x_; }
  const Operator& p() const { return p_; }
  const Operator& number() const { return number_; }
  /// Omega (a^dagger a + 1/2); equals Omega (p^2 + x^2)/2 below the top level.
  Operator hamiltonian(double omega) const;

 private:
  int dim_;
  Operator a_, a_dag_, x_, p_, number_;
};

/// Each factory throws when the mass lost to truncation exceeds kTailTolerance.
DensityMatrix coherent_state(Complex beta, int dim);
/// exp[r (a^2 - a^dagger^2)/2] |0>, squeezed in x: <x^2> = e^{-2r}/2.
DensityMatrix squeezed_vacuum(double r, int dim);
DensityMatrix thermal_osc(double mean_occupation, int dim);

/// Probability beyond the truncation for each family, before renormalization.
double coherent_tail(Complex beta, int dim);
double squeezed_tail(double r, int dim);
double thermal_tail(double mean_occupation, int dim);

enum class Ordering { P, Q, Wigner };

Ordering ordering_from_string(const std::string& name);
std::string to_string(Ordering ordering);

/// P: Tr[a^n rho a^dag^k]; Q: Tr[rho a^n a^dag^k]; Wigner: Tr[rho W] averaged
/// over the distinct interleavings W of n lowering and k raising operators.
/// Requires n + k <= dim/4.
Complex quasi_moment(const DensityMatrix& rho, int n, int k, Ordering ordering);

enum class Letter { A, ADag };

/// Parses "a a+ a" style words; "a+", "a^", "ad" and "adag" denote a^dagger.
std::vector<Letter> parse_word(const std::string& text);

/// Equal-time weak moment for the zero-temperature detector kernel
/// f(Omega) = i * kernel_sign:
///   a-letter:   a^c + f a^q / 2
///   a^+-letter: a^dag^c - f a^dag^q / 2
/// composed left to right as an operator product (rightmost acts first on
/// rho), then traced. kernel_sign = 0 is the Markovian detector.
Complex weak_moment(const DensityMatrix& rho, const std::vector<Letter>& word, int kernel_sign);

/// Quadrature alpha x + beta p.
struct LinearQuadrature {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Decomposes an operator as alpha x + beta p; throws if it is not of that form.
LinearQuadrature linear_quadrature(const FockSpace& space, const Operator& op);

/// Heisenberg superoperator of a weakly measured quadrature at time t,
///   A-check(t) X = {A(t), X}/2 + [M_A(t), X]/(2i),
/// where M_A(t) = int dt' f(t - t') A(t') = g (-alpha p(t) + beta x(t)) and
/// g = Im f(Omega). Returns the image of X.
hilbert::Matrix apply_weak_quadrature(const FockSpace& space, double omega, const LinearQuadrature& q, double t,
                                      const kernel::MemoryKernel& kernel, const hilbert::Matrix& x);

/// Tr[A-check(t) B-check(s) rho].
Complex weak_two_time(const FockSpace& space, double omega, const LinearQuadrature& a, double t,
                      const LinearQuadrature& b, double s, const kernel::MemoryKernel& kernel,
                      const DensityMatrix& rho);

/// |Tr[A(t) B(s) rho] - Tr[B(s) A(t) rho]| for the weak superoperators.
double time_order_invariance(const FockSpace& space, double omega, const LinearQuadrature& a, double t,
                             const LinearQuadrature& b, double s, const kernel::MemoryKernel& kernel,
                             const DensityMatrix& rho);

}  // namespace weaknoise::oscillator
