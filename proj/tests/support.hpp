#pragma once

#include <random>

#include "weaknoise/hilbert.hpp"

namespace testing {

using weaknoise::hilbert::Complex;
using weaknoise::hilbert::Matrix;

inline Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (m + m.adjoint());
}

inline Matrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  Matrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline Matrix sx() { return weaknoise::hilbert::pauli_x().matrix(); }
inline Matrix sy() { return weaknoise::hilbert::pauli_y().matrix(); }
inline Matrix sz() { return weaknoise::hilbert::pauli_z().matrix(); }

}  // namespace testing
