#include "weaknoise/hilbert.hpp"

#include <cmath>
#include <limits>

#include "weaknoise/error.hpp"

namespace weaknoise::hilbert {

namespace {

constexpr const char* kModule = "hilbert";

void require_square(const Matrix& m, const char* parameter) {
  if (m.rows() != m.cols() || m.rows() == 0) fail(kModule, parameter, "operator must be a non-empty square matrix");
}

void require_same_dim(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) {
    fail(kModule, "dim", "dimension mismatch (" + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

double anti_hermitian_part(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() * 0.5;
}

}  // namespace

Operator::Operator(Matrix entries) : entries_(std::move(entries)) { require_square(entries_, "entries"); }

Operator Operator::hermitian(const Matrix& entries) {
  require_square(entries, "entries");
  if (anti_hermitian_part(entries) > kHermitianTolerance) fail(kModule, "entries", "operator is not Hermitian");
  return Operator(Matrix(0.5 * (entries + entries.adjoint())));
}

Operator Operator::identity(int dim) { return Operator(Matrix::Identity(dim, dim)); }
Operator Operator::zero(int dim) { return Operator(Matrix::Zero(dim, dim)); }

bool Operator::is_hermitian(double tolerance) const { return anti_hermitian_part(entries_) <= tolerance; }

double Operator::max_abs() const { return entries_.cwiseAbs().maxCoeff(); }

Operator& Operator::operator+=(const Operator& other) {
  require_same_dim(*this, other);
  entries_ += other.entries_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_dim(*this, other);
  entries_ -= other.entries_;
  return *this;
}

Operator& Operator::operator*=(Complex scale) {
  entries_ *= scale;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_dim(lhs, rhs);
  return Operator(Matrix(lhs.matrix() * rhs.matrix()));
}

DensityMatrix::DensityMatrix(const Matrix& entries) {
  require_square(entries, "rho");
  if (anti_hermitian_part(entries) > kHermitianTolerance) fail(kModule, "rho", "density matrix is not Hermitian");
  Matrix sym = 0.5 * (entries + entries.adjoint());
  const Complex tr = sym.trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) fail(kModule, "rho", "density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPositivityTolerance) fail(kModule, "rho", "density matrix has a negative eigenvalue");
  entries_ = std::move(sym);
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& amplitudes) {
  const double norm = amplitudes.norm();
  if (norm == 0.0) fail(kModule, "amplitudes", "zero state vector");
  const Eigen::VectorXcd psi = amplitudes / norm;
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(Matrix(Matrix::Identity(dim, dim) / static_cast<double>(dim)));
}

Complex DensityMatrix::expectation(const Operator& observable) const {
  if (observable.dim() != dim()) fail(kModule, "dim", "observable and state dimensions differ");
  return (entries_ * observable.matrix()).trace();
}

EigenSystem diagonalize(const Operator& hamiltonian) {
  if (hamiltonian.dim() < 2) fail(kModule, "H", "physics operations need dim >= 2");
  if (!hamiltonian.is_hermitian()) fail(kModule, "H", "Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (hamiltonian.matrix() + hamiltonian.matrix().adjoint()));
  if (solver.info() != Eigen::Success) fail(kModule, "H", "eigendecomposition failed");
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

Operator evolve_heisenberg(const Operator& observable, const EigenSystem& spectrum, double t) {
  if (observable.dim() != spectrum.dim()) fail(kModule, "dim", "observable and Hamiltonian dimensions differ");
  if (t == 0.0) return observable;
  Matrix a = spectrum.to_eigenbasis(observable.matrix());
  const int n = spectrum.dim();
  // (e^{iEt} A e^{-iEt})_{mn} = A_{mn} e^{i(E_m - E_n)t}
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      a(m, k) *= std::polar(1.0, (spectrum.energies(m) - spectrum.energies(k)) * t);
    }
  }
  return Operator(spectrum.from_eigenbasis(a));
}

Operator evolve_heisenberg(const Operator& observable, const Operator& hamiltonian, double t) {
  if (observable.dim() != hamiltonian.dim()) fail(kModule, "dim", "observable and Hamiltonian dimensions differ");
  return evolve_heisenberg(observable, diagonalize(hamiltonian), t);
}

DensityMatrix thermal_state(const Operator& hamiltonian, double temperature) {
  if (!(temperature >= 0.0)) fail(kModule, "T", "temperature must be non-negative");
  const EigenSystem spectrum = diagonalize(hamiltonian);
  const int n = spectrum.dim();
  const double e0 = spectrum.energies(0);
  RealVector populations(n);
  if (temperature == 0.0) {
    const double scale = std::max(1.0, spectrum.energies.cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) populations(k) = (spectrum.energies(k) - e0 <= 1e-10 * scale) ? 1.0 : 0.0;
  } else {
    for (int k = 0; k < n; ++k) populations(k) = std::exp(-(spectrum.energies(k) - e0) / temperature);
  }
  populations /= populations.sum();
  const Matrix rho = spectrum.vectors * populations.cast<Complex>().asDiagonal() * spectrum.vectors.adjoint();
  return DensityMatrix(Matrix(0.5 * (rho + rho.adjoint())));
}

Operator apply_c(const Operator& a, const Operator& x) {
  require_same_dim(a, x);
  return Operator(anticommutator_half(a.matrix(), x.matrix()));
}

Operator apply_q(const Operator& a, const Operator& x) {
  require_same_dim(a, x);
  return Operator(commutator_over_i(a.matrix(), x.matrix()));
}

Operator apply_plus(const Operator& a, const Operator& x) {
  require_same_dim(a, x);
  return Operator(Matrix(a.matrix() * x.matrix()));
}

Operator apply_minus(const Operator& a, const Operator& x) {
  require_same_dim(a, x);
  return Operator(Matrix(x.matrix() * a.matrix()));
}

double commutator_norm(const Operator& a, const Operator& b) {
  require_same_dim(a, b);
  return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).cwiseAbs().maxCoeff();
}

Operator pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return Operator(m);
}

Operator pauli_y() {
  Matrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return Operator(m);
}

Operator pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return Operator(m);
}

}  // namespace weaknoise::hilbert
