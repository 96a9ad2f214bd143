#pragma once

// Dense finite-dimensional operator algebra: observables, density matrices,
// Heisenberg evolution and the four superoperator actions (anticommutator,
// commutator, left and right multiplication) used by every other module.
//
// Units: hbar = k_B = 1, so thermal states use exp(-H/T) and the commutator
// superoperator is [A, X]/i.

#include <Eigen/Dense>
#include <complex>

namespace weaknoise::hilbert {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-10;

/// Square complex matrix. Not necessarily Hermitian; Hermitian operators are
/// built through Operator::hermitian which validates and symmetrizes.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix entries);

  /// Rejects input whose anti-Hermitian part exceeds kHermitianTolerance,
  /// otherwise stores (M + M^dagger)/2.
  static Operator hermitian(const Matrix& entries);
  static Operator identity(int dim);
  static Operator zero(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  bool is_hermitian(double tolerance = kHermitianTolerance) const;
  Operator adjoint() const { return Operator(entries_.adjoint()); }
  Complex trace() const { return entries_.trace(); }
  double max_abs() const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(Complex scale);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Complex scale, Operator op) { return op *= scale; }
  friend Operator operator*(Operator op, Complex scale) { return op *= scale; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  Matrix entries_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
 public:
  /// Validates the state invariants; throws weaknoise::Error otherwise.
  explicit DensityMatrix(const Matrix& entries);

  static DensityMatrix pure(const Eigen::VectorXcd& amplitudes);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  Operator as_operator() const { return Operator(entries_); }

  /// Tr(rho A).
  Complex expectation(const Operator& observable) const;

 private:
  Matrix entries_;
};

/// Eigenpairs of a Hermitian operator, energies ascending.
struct EigenSystem {
  RealVector energies;
  Matrix vectors;  // columns are eigenvectors

  int dim() const { return static_cast<int>(energies.size()); }
  /// Express an operator in the eigenbasis: V^dagger M V.
  Matrix to_eigenbasis(const Matrix& m) const { return vectors.adjoint() * m * vectors; }
  Matrix from_eigenbasis(const Matrix& m) const { return vectors * m * vectors.adjoint(); }
};

EigenSystem diagonalize(const Operator& hamiltonian);

/// e^{iHt} A e^{-iHt}.
Operator evolve_heisenberg(const Operator& observable, const Operator& hamiltonian, double t);
Operator evolve_heisenberg(const Operator& observable, const EigenSystem& spectrum, double t);

/// Gibbs state exp(-H/T)/Z. T = 0 gives the uniform mixture over the
/// (possibly degenerate) ground space.
DensityMatrix thermal_state(const Operator& hamiltonian, double temperature);

// Superoperator actions on an arbitrary operator X.
Operator apply_c(const Operator& a, const Operator& x);      // {A, X}/2
Operator apply_q(const Operator& a, const Operator& x);      // [A, X]/i
Operator apply_plus(const Operator& a, const Operator& x);   // A X
Operator apply_minus(const Operator& a, const Operator& x);  // X A

// Matrix-level versions for inner loops (no dimension checks).
inline Matrix anticommutator_half(const Matrix& a, const Matrix& x) { return 0.5 * (a * x + x * a); }
inline Matrix commutator_over_i(const Matrix& a, const Matrix& x) {
  return Complex(0.0, -1.0) * (a * x - x * a);
}

/// ||[A, B]||_max.
double commutator_norm(const Operator& a, const Operator& b);

// Pauli matrices, sigma_z = diag(1, -1).
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

}  // namespace weaknoise::hilbert
