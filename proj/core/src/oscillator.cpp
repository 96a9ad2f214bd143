#include "weaknoise/oscillator.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "weaknoise/error.hpp"

namespace weaknoise::oscillator {

namespace {

constexpr const char* kModule = "oscillator";

using hilbert::Matrix;

void require_dim(int dim) {
  if (dim < kMinDim) fail(kModule, "dim", "Fock truncation must be at least " + std::to_string(kMinDim));
}

void require_tail(double tail, const char* parameter) {
  if (tail > kTailTolerance) {
    std::ostringstream msg;
    msg << "truncation drops probability " << tail << " > " << kTailTolerance << "; increase dim";
    fail(kModule, parameter, msg.str());
  }
}

Matrix power(const Matrix& m, int n) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) out = out * m;
  return out;
}

void require_moment_guard(int dim, int n, int k) {
  if (n < 0 || k < 0) fail(kModule, "n", "moment orders must be non-negative");
  if (4 * (n + k) > dim) fail(kModule, "n", "moment order n + k exceeds dim/4");
}

Matrix superop_c(const Matrix& a, const Matrix& x) { return hilbert::anticommutator_half(a, x); }
Matrix superop_q(const Matrix& a, const Matrix& x) { return hilbert::commutator_over_i(a, x); }

}  // namespace

FockSpace::FockSpace(int dim) : dim_(dim) {
  require_dim(dim);
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Matrix ad = a.adjoint();
  const double r2 = std::numbers::sqrt2;
  a_ = Operator(a);
  a_dag_ = Operator(ad);
  x_ = Operator(Matrix((a + ad) / r2));
  p_ = Operator(Matrix((a - ad) / Complex(0.0, r2)));
  number_ = Operator(Matrix(ad * a));
}

Operator FockSpace::hamiltonian(double omega) const {
  return Operator(Matrix(omega * (number_.matrix() + 0.5 * Matrix::Identity(dim_, dim_))));
}

double coherent_tail(Complex beta, int dim) {
  const double mean = std::norm(beta);
  double p = std::exp(-mean);
  double kept = 0.0;
  for (int n = 0; n < dim; ++n) {
    kept += p;
    p *= mean / (n + 1);
  }
  return std::max(0.0, 1.0 - kept);
}

double squeezed_tail(double r, int dim) {
  const double th2 = std::tanh(r) * std::tanh(r);
  double p = 1.0 / std::cosh(r);
  double kept = 0.0;
  for (int m = 0; 2 * m < dim; ++m) {
    kept += p;
    p *= th2 * (2.0 * m + 1.0) / (2.0 * m + 2.0);
  }
  return std::max(0.0, 1.0 - kept);
}

double thermal_tail(double mean_occupation, int dim) {
  return std::pow(mean_occupation / (mean_occupation + 1.0), dim);
}

DensityMatrix coherent_state(Complex beta, int dim) {
  require_dim(dim);
  require_tail(coherent_tail(beta, dim), "beta");
  Eigen::VectorXcd psi(dim);
  psi(0) = 1.0;
  for (int n = 1; n < dim; ++n) psi(n) = psi(n - 1) * beta / std::sqrt(static_cast<double>(n));
  return DensityMatrix::pure(psi);
}

DensityMatrix squeezed_vacuum(double r, int dim) {
  require_dim(dim);
  if (!std::isfinite(r)) fail(kModule, "r", "squeezing parameter must be finite");
  require_tail(squeezed_tail(r, dim), "r");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  const double t = -std::tanh(r);
  psi(0) = 1.0 / std::sqrt(std::cosh(r));
  for (int m = 1; 2 * m < dim; ++m) {
    // c_{2m} = c_{2m-2} (-tanh r) sqrt((2m)(2m-1)) / (2m)
    psi(2 * m) = psi(2 * m - 2) * t * std::sqrt((2.0 * m) * (2.0 * m - 1.0)) / (2.0 * m);
  }
  return DensityMatrix::pure(psi);
}

DensityMatrix thermal_osc(double mean_occupation, int dim) {
  require_dim(dim);
  if (!(mean_occupation >= 0.0) || !std::isfinite(mean_occupation)) fail(kModule, "nbar", "mean occupation must be finite and >= 0");
  require_tail(thermal_tail(mean_occupation, dim), "nbar");
  const double q = mean_occupation / (mean_occupation + 1.0);
  Eigen::VectorXd pops(dim);
  double w = 1.0;
  for (int n = 0; n < dim; ++n) {
    pops(n) = w;
    w *= q;
  }
  pops /= pops.sum();
  return DensityMatrix(Matrix(pops.cast<Complex>().asDiagonal()));
}

Ordering ordering_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "p") return Ordering::P;
  if (s == "q") return Ordering::Q;
  if (s == "wigner" || s == "w") return Ordering::Wigner;
  fail(kModule, "ordering", "unknown ordering '" + name + "' (expected P, Q or Wigner)");
}

std::string to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::P: return "P";
    case Ordering::Q: return "Q";
    case Ordering::Wigner: return "Wigner";
  }
  return "?";
}

Complex quasi_moment(const DensityMatrix& rho, int n, int k, Ordering ordering) {
  const int dim = rho.dim();
  require_dim(dim);
  require_moment_guard(dim, n, k);
  const FockSpace space(dim);
  const Matrix& a = space.a().matrix();
  const Matrix& ad = space.a_dag().matrix();
  switch (ordering) {
    case Ordering::P:
      return (power(a, n) * rho.matrix() * power(ad, k)).trace();
    case Ordering::Q:
      return (rho.matrix() * power(a, n) * power(ad, k)).trace();
    case Ordering::Wigner: {
      const int len = n + k;
      Matrix sum = Matrix::Zero(dim, dim);
      long count = 0;
      for (unsigned mask = 0; mask < (1u << len); ++mask) {
        if (std::popcount(mask) != n) continue;
        Matrix w = Matrix::Identity(dim, dim);
        for (int i = 0; i < len; ++i) w = w * ((mask >> i) & 1u ? a : ad);
        sum += w;
        ++count;
      }
      return (rho.matrix() * sum).trace() / static_cast<double>(count);
    }
  }
  return 0.0;
}

std::vector<Letter> parse_word(const std::string& text) {
  std::vector<Letter> word;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    if (token == "a") {
      word.push_back(Letter::A);
    } else if (token == "a+" || token == "a^" || token == "ad" || token == "adag" || token == "a†") {
      word.push_back(Letter::ADag);
    } else {
      fail(kModule, "word", "unknown letter '" + token + "'");
    }
  }
  return word;
}

Complex weak_moment(const DensityMatrix& rho, const std::vector<Letter>& word, int kernel_sign) {
  if (kernel_sign < -1 || kernel_sign > 1) fail(kModule, "kernel_sign", "kernel sign must be -1, 0 or +1");
  const int dim = rho.dim();
  require_dim(dim);
  const int n = static_cast<int>(std::count(word.begin(), word.end(), Letter::A));
  require_moment_guard(dim, n, static_cast<int>(word.size()) - n);
  const FockSpace space(dim);
  const Complex f(0.0, static_cast<double>(kernel_sign));
  Matrix x = rho.matrix();
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it == Letter::A) {
      const Matrix& a = space.a().matrix();
      x = superop_c(a, x) + 0.5 * f * superop_q(a, x);
    } else {
      const Matrix& ad = space.a_dag().matrix();
      x = superop_c(ad, x) - 0.5 * f * superop_q(ad, x);
    }
  }
  return x.trace();
}

LinearQuadrature linear_quadrature(const FockSpace& space, const Operator& op) {
  if (op.dim() != space.dim()) fail(kModule, "operator", "operator dimension differs from the Fock space");
  const Complex c = op(0, 1);
  LinearQuadrature q{std::numbers::sqrt2 * c.real(), -std::numbers::sqrt2 * c.imag()};
  const Matrix rest = op.matrix() - q.alpha * space.x().matrix() - q.beta * space.p().matrix();
  if (rest.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, op.max_abs())) {
    fail(kModule, "operator", "operator is not a real linear combination of x and p");
  }
  return q;
}

Matrix apply_weak_quadrature(const FockSpace& space, double omega, const LinearQuadrature& q, double t,
                             const kernel::MemoryKernel& kernel, const Matrix& x) {
  if (!(omega > 0.0)) fail(kModule, "omega", "oscillator frequency must be positive");
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  // x(t) = x cos + p sin, p(t) = p cos - x sin
  const double ax = q.alpha * c - q.beta * s;
  const double ap = q.alpha * s + q.beta * c;
  const Matrix a_t = ax * space.x().matrix() + ap * space.p().matrix();
  const double g = kernel.is_markovian() ? 0.0 : kernel::f_omega(kernel, omega).imag();
  // M = g (-alpha p(t) + beta x(t))
  const double mx = g * (q.alpha * s + q.beta * c);
  const double mp = g * (-q.alpha * c + q.beta * s);
  const Matrix m_t = mx * space.x().matrix() + mp * space.p().matrix();
  return superop_c(a_t, x) + 0.5 * superop_q(m_t, x);
}

Complex weak_two_time(const FockSpace& space, double omega, const LinearQuadrature& a, double t,
                      const LinearQuadrature& b, double s, const kernel::MemoryKernel& kernel,
                      const DensityMatrix& rho) {
  if (rho.dim() != space.dim()) fail(kModule, "rho", "state dimension differs from the Fock space");
  const Matrix inner = apply_weak_quadrature(space, omega, b, s, kernel, rho.matrix());
  return apply_weak_quadrature(space, omega, a, t, kernel, inner).trace();
}

double time_order_invariance(const FockSpace& space, double omega, const LinearQuadrature& a, double t,
                             const LinearQuadrature& b, double s, const kernel::MemoryKernel& kernel,
                             const DensityMatrix& rho) {
  const Complex ab = weak_two_time(space, omega, a, t, b, s, kernel, rho);
  const Complex ba = weak_two_time(space, omega, b, s, a, t, kernel, rho);
  return std::abs(ab - ba);
}

}  // namespace weaknoise::oscillator
