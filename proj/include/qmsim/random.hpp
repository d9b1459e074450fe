#pragma once

// Seeded generators for fuzz inputs. Floating-point draws are built from raw
// 64-bit outputs so identical seeds give identical values on every platform.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "qmsim/errors.hpp"

namespace qmsim {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  cplx unit_phase() { return std::polar(1.0, uniform(0.0, 2.0 * std::numbers::pi)); }

  /// Random (a1, a2) with |a1|^2 + |a2|^2 = 1 and independent phases.
  std::pair<cplx, cplx> amplitude_pair() {
    const double w = uniform();
    return {std::sqrt(w) * unit_phase(), std::sqrt(1.0 - w) * unit_phase()};
  }

  Eigen::VectorXcd normalized_vector(Eigen::Index n) {
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx{normal(), normal()};
    return v / v.norm();
  }

  Eigen::MatrixXcd hermitian(Eigen::Index n) {
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cplx{normal(), normal()};
    }
    return 0.5 * (g + g.adjoint());
  }

  /// A random density matrix of rank up to n (Wishart-style G G^dagger / tr).
  Eigen::MatrixXcd density(Eigen::Index n) {
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cplx{normal(), normal()};
    }
    Eigen::MatrixXcd rho = g * g.adjoint();
    return rho / rho.trace().real();
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qmsim
