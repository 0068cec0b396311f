#pragma once

// Reference channels and seeded generators for property-test corpora.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "qest/channel.hpp"
#include "qest/core.hpp"
#include "qest/unitary.hpp"

namespace qest::catalog {

/// Isotropic depolarizing channel
///   Gamma_eps[rho] = (1 - 3 eps/4) rho + (eps/4) sum_a sigma_a rho sigma_a,
/// valid for eps in [0, 4/3).
inline LowNoiseChannel depolarizing() {
  LowNoiseChannel ln;
  ln.dim = 2;
  ln.kappas = {1.0};
  ln.n1 = {0.375 * identity(2)};
  ln.ms = {0.5 * pauli(1), 0.5 * pauli(2), 0.5 * pauli(3)};
  ln.validity = Interval{0.0, 4.0 / 3.0, false, true};
  ln.generator = [](double eps) {
    const double w = std::sqrt(eps);
    return KrausChannel({std::sqrt(1.0 - 0.75 * eps) * identity(2), 0.5 * w * pauli(1), 0.5 * w * pauli(2),
                         0.5 * w * pauli(3)});
  };
  return ln;
}

/// Generalized amplitude damping towards a thermal state at inverse
/// temperature times level splitting betaE.  eps = 1 - s, with s the
/// survival probability of the excited state; valid for eps in [0, 1].
inline LowNoiseChannel gad(double beta_e) {
  if (!(beta_e >= 0.0) || !std::isfinite(beta_e)) throw ValidationError("gad: betaE must be finite and >= 0");
  const double boltz = std::exp(-beta_e);
  const double k1 = std::sqrt(1.0 / (1.0 + boltz));
  const double k2 = std::sqrt(boltz / (1.0 + boltz));

  ComplexMatrix lower = ComplexMatrix::Zero(2, 2); // |0><1|
  lower(0, 1) = 1.0;
  ComplexMatrix raise = ComplexMatrix::Zero(2, 2); // |1><0|
  raise(1, 0) = 1.0;
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  ComplexMatrix p1 = ComplexMatrix::Zero(2, 2);
  p1(1, 1) = 1.0;

  LowNoiseChannel ln;
  ln.dim = 2;
  ln.kappas = {k1, k2};
  ln.n1 = {k1 * 0.5 * p1, k2 * 0.5 * p0};
  ln.ms = {k1 * lower, k2 * raise};
  ln.validity = Interval{0.0, 1.0};
  ln.generator = [=](double eps) {
    const double damp = std::sqrt(1.0 - eps);
    const double w = std::sqrt(eps);
    return KrausChannel({k1 * (p0 + damp * p1), k2 * (damp * p0 + p1), w * k1 * lower, w * k2 * raise});
  };
  return ln;
}

/// U(theta) = exp(-i theta (n.sigma) / 2).
inline UnitaryFamily rotation_unitary(const Vec3& axis) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9) throw ValidationError("rotation axis must be a unit vector");
  ComplexMatrix ns = ComplexMatrix::Zero(2, 2);
  for (int a = 0; a < 3; ++a) ns += axis(a) * pauli(a + 1);
  return UnitaryFamily(Interval{}, [ns](double theta) {
    return ComplexMatrix(std::cos(theta / 2.0) * identity(2) - kI * std::sin(theta / 2.0) * ns);
  });
}

// ---------------------------------------------------------------------------
// Seeded corpora

/// Independent seed for trial `index` of a sweep started from `base`
/// (splitmix64 finalizer).
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Complex Gaussian entries with E|z|^2 = scale^2.
inline ComplexMatrix complex_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale / std::sqrt(2.0));
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

/// Qubit low-noise channel with num_m complex Gaussian noise operators and
/// the canonical exact generator.
inline LowNoiseChannel random_low_noise(std::uint64_t seed, int num_m, double scale = 1.0) {
  if (num_m < 1 || num_m > 6) throw ValidationError("random_low_noise: num_M must be in [1, 6]");
  if (!(scale > 0.0)) throw ValidationError("random_low_noise: scale must be > 0");
  std::mt19937_64 rng(seed);
  std::vector<ComplexMatrix> ms;
  for (int i = 0; i < num_m; ++i) ms.push_back(complex_gaussian(rng, 2, 2, scale));
  return LowNoiseChannel::from_noise_operators(std::move(ms));
}

inline PureState random_pure(std::mt19937_64& rng, Eigen::Index dim) {
  return PureState::normalized(complex_gaussian(rng, dim, 1).col(0));
}

/// Full-rank mixed state G G^dagger / Tr(G G^dagger).
inline DensityOperator random_density(std::mt19937_64& rng, Eigen::Index dim) {
  const ComplexMatrix g = complex_gaussian(rng, dim, dim);
  const ComplexMatrix r = g * g.adjoint();
  return DensityOperator(r / r.trace().real());
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index dim) {
  return hermitian_part(complex_gaussian(rng, dim, dim));
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, Eigen::Index dim) {
  Eigen::HouseholderQR<ComplexMatrix> qr(complex_gaussian(rng, dim, dim));
  return qr.householderQ() * identity(dim);
}

/// theta -> W exp(-i theta G) with random Hermitian G and random unitary W.
inline UnitaryFamily random_unitary_family(std::uint64_t seed, Eigen::Index dim = 2) {
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = random_hermitian(rng, dim);
  const ComplexMatrix w = random_unitary(rng, dim);
  const auto base = generated_by(g);
  return UnitaryFamily(Interval{}, [base, w](double t) { return ComplexMatrix(w * base(t)); });
}

} // namespace qest::catalog
