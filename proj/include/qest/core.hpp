#pragma once

// Small dense complex linear algebra and state types for systems of
// dimension <= 8 (a qubit, or a qubit together with an ancilla).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qest/errors.hpp"

namespace qest {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr Complex kI{0.0, 1.0};

/// Acceptance thresholds used when validating operators and states.
struct Tolerances {
  double hermitian = 1e-9; ///< max-abs of M - M^dagger
  double trace = 1e-9;     ///< |Tr rho - 1|
  double psd = 1e-9;       ///< smallest accepted eigenvalue is -psd
  double norm = 1e-9;      ///< | |psi| - 1 | and |x| - 1 for Bloch vectors
};

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = Tolerances{}.hermitian) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol * std::max(1.0, max_abs(m));
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

inline ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

// ---------------------------------------------------------------------------
// Pauli matrices

/// sigma_0 = I, sigma_1 = X, sigma_2 = Y, sigma_3 = Z.
inline const ComplexMatrix& pauli(int a) {
  static const std::array<ComplexMatrix, 4> table = [] {
    std::array<ComplexMatrix, 4> s;
    for (auto& m : s) m = ComplexMatrix::Zero(2, 2);
    s[0](0, 0) = 1.0;
    s[0](1, 1) = 1.0;
    s[1](0, 1) = 1.0;
    s[1](1, 0) = 1.0;
    s[2](0, 1) = -kI;
    s[2](1, 0) = kI;
    s[3](0, 0) = 1.0;
    s[3](1, 1) = -1.0;
    return s;
  }();
  if (a < 0 || a > 3) throw ValidationError("pauli index must be in 0..3");
  return table[static_cast<std::size_t>(a)];
}

/// Coefficients (m0, m1, m2, m3) with M = m0 I + sum_a m_a sigma_a.
using PauliCoefficients = std::array<Complex, 4>;

inline PauliCoefficients pauli_decompose(const ComplexMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2)
    throw ValidationError("pauli_decompose expects a 2x2 matrix");
  PauliCoefficients c;
  for (int a = 0; a < 4; ++a) c[static_cast<std::size_t>(a)] = (pauli(a) * m).trace() / 2.0;
  return c;
}

inline ComplexMatrix pauli_compose(const PauliCoefficients& c) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  for (int a = 0; a < 4; ++a) m += c[static_cast<std::size_t>(a)] * pauli(a);
  return m;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)

struct HermitianEigen {
  RealVector values;     ///< ascending
  ComplexMatrix vectors; ///< orthonormal columns, vectors.col(i) pairs with values(i)
};

namespace detail {

// One two-sided rotation zeroing a(p, q).  The rotation is
//   J = [[c, s e^{i phi}], [-s e^{-i phi}, c]]   on rows/cols (p, q)
// with a(p, q) = |a(p, q)| e^{i phi}, and A <- J^dagger A J, V <- V J.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;
  const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Complex sp = s * phase;            // s e^{i phi}
  const Complex sm = s * std::conj(phase); // s e^{-i phi}

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = c * akp - sm * akq;
    a(k, q) = sp * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk - sp * aqk;
    a(q, k) = sm * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp - sm * vkq;
    v(k, q) = sp * vkp + c * vkq;
  }
}

inline double off_diagonal_norm2(const ComplexMatrix& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

// Largest-magnitude component real and positive.  Near-ties go to the
// lowest index so that the choice is stable under rounding.
inline void fix_phase(Eigen::Ref<ComplexVector> col) {
  const double top = col.cwiseAbs().maxCoeff();
  if (top == 0.0) return;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (std::abs(col(i)) >= top * (1.0 - 1e-10)) {
      col *= std::conj(col(i)) / std::abs(col(i));
      col(i) = std::abs(col(i));
      return;
    }
  }
}

} // namespace detail

/// Eigendecomposition M = V diag(values) V^dagger of a Hermitian matrix.
inline HermitianEigen hermitian_eig(const ComplexMatrix& m, double herm_tol = Tolerances{}.hermitian) {
  if (m.rows() != m.cols()) throw ValidationError("hermitian_eig: matrix is not square");
  if (!is_hermitian(m, herm_tol)) throw ValidationError("hermitian_eig: matrix is not Hermitian");

  const Eigen::Index n = m.rows();
  ComplexMatrix a = hermitian_part(m);
  ComplexMatrix v = identity(n);
  const double scale2 = a.squaredNorm();
  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (detail::off_diagonal_norm2(a) <= 1e-34 * scale2) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() < a(j, j).real();
  });

  HermitianEigen out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src).real();
    out.vectors.col(k) = v.col(src);
    detail::fix_phase(out.vectors.col(k));
  }
  return out;
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues in [-tol, 0) are clamped to zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol = Tolerances{}.psd) {
  const auto eig = hermitian_eig(m);
  RealVector root(eig.values.size());
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    if (eig.values(i) < -tol) throw ValidationError("psd_sqrt: matrix has a negative eigenvalue");
    root(i) = std::sqrt(std::max(0.0, eig.values(i)));
  }
  return eig.vectors * root.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

// ---------------------------------------------------------------------------
// Composite systems

/// (A (x) B)[i*rB + k, j*cB + l] = A[i, j] * B[k, l].
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

enum class Subsystem { System, Ancilla };

/// Trace out one factor of a (dimS*dimA)-dimensional operator, keeping the other.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, Eigen::Index dim_s, Eigen::Index dim_a,
                                   Subsystem keep) {
  if (dim_s < 1 || dim_a < 1 || m.rows() != dim_s * dim_a || m.cols() != dim_s * dim_a)
    throw ValidationError("partial_trace: operator is not (dimS*dimA) square");
  if (keep == Subsystem::System) {
    ComplexMatrix r = ComplexMatrix::Zero(dim_s, dim_s);
    for (Eigen::Index i = 0; i < dim_s; ++i)
      for (Eigen::Index j = 0; j < dim_s; ++j)
        for (Eigen::Index k = 0; k < dim_a; ++k) r(i, j) += m(i * dim_a + k, j * dim_a + k);
    return r;
  }
  ComplexMatrix r = ComplexMatrix::Zero(dim_a, dim_a);
  for (Eigen::Index k = 0; k < dim_a; ++k)
    for (Eigen::Index l = 0; l < dim_a; ++l)
      for (Eigen::Index i = 0; i < dim_s; ++i) r(k, l) += m(i * dim_a + k, i * dim_a + l);
  return r;
}

// ---------------------------------------------------------------------------
// States

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityOperator {
public:
  explicit DensityOperator(ComplexMatrix m, const Tolerances& tol = {}) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw ValidationError("density operator must be a non-empty square matrix");
    if (!m_.allFinite()) throw ValidationError("density operator has non-finite entries");
    if (!is_hermitian(m_, tol.hermitian)) throw ValidationError("density operator is not Hermitian");
    if (std::abs(m_.trace() - Complex{1.0}) > tol.trace)
      throw ValidationError("density operator trace differs from 1");
    m_ = hermitian_part(m_);
    if (hermitian_eig(m_).values(0) < -tol.psd)
      throw ValidationError("density operator has a negative eigenvalue");
  }

  /// Wraps a matrix whose invariants the caller already guarantees
  /// (e.g. the output of a trace-preserving Kraus map).
  static DensityOperator trusted(ComplexMatrix m) {
    DensityOperator d;
    d.m_ = std::move(m);
    return d;
  }

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

private:
  DensityOperator() = default;
  ComplexMatrix m_;
};

/// Unit-norm state vector.
class PureState {
public:
  explicit PureState(ComplexVector amplitudes, const Tolerances& tol = {}) : psi_(std::move(amplitudes)) {
    if (psi_.size() == 0) throw ValidationError("pure state must have at least one amplitude");
    if (std::abs(psi_.norm() - 1.0) > tol.norm) throw ValidationError("pure state is not normalized");
  }

  static PureState normalized(const ComplexVector& v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw ValidationError("cannot normalize a zero vector");
    return PureState(v / n);
  }

  const ComplexVector& amplitudes() const { return psi_; }
  Eigen::Index dim() const { return psi_.size(); }

  DensityOperator density() const { return DensityOperator::trusted(psi_ * psi_.adjoint()); }

private:
  ComplexVector psi_;
};

/// Real 3-vector x with |x| <= 1, rho = (I + x.sigma) / 2.
class BlochVector {
public:
  BlochVector() : x_(Vec3::Zero()) {}
  explicit BlochVector(const Vec3& x, double tol = Tolerances{}.norm) : x_(x) {
    if (!x_.allFinite() || x_.norm() > 1.0 + tol) throw ValidationError("Bloch vector has length > 1");
  }
  BlochVector(double x, double y, double z) : BlochVector(Vec3(x, y, z)) {}

  const Vec3& vec() const { return x_; }
  double operator[](int i) const { return x_(i); }
  double norm() const { return x_.norm(); }

private:
  Vec3 x_;
};

inline ComplexMatrix bloch_matrix(const Vec3& x) {
  ComplexMatrix m = 0.5 * pauli(0);
  for (int a = 0; a < 3; ++a) m += 0.5 * x(a) * pauli(a + 1);
  return m;
}

inline DensityOperator bloch_to_density(const BlochVector& x) {
  return DensityOperator::trusted(bloch_matrix(x.vec()));
}

inline BlochVector density_to_bloch(const DensityOperator& rho) {
  if (rho.dim() != 2) throw ValidationError("density_to_bloch expects a qubit state");
  Vec3 x;
  for (int a = 0; a < 3; ++a) x(a) = (rho.matrix() * pauli(a + 1)).trace().real();
  return BlochVector(x);
}

/// A pure qubit state whose Bloch vector is the unit vector n.
inline PureState bloch_pure_state(const Vec3& n) {
  if (std::abs(n.norm() - 1.0) > 1e-9) throw ValidationError("pure-state Bloch vector must be a unit vector");
  const auto eig = hermitian_eig(bloch_matrix(n));
  return PureState::normalized(eig.vectors.col(1));
}

/// Purification sum_i sqrt(p_i) |e_i> (x) |i> on system (x) ancilla of equal
/// dimension, eigenvalues in descending order.
inline PureState purify(const DensityOperator& rho) {
  const auto eig = hermitian_eig(rho.matrix());
  const Eigen::Index d = rho.dim();
  ComplexVector psi = ComplexVector::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = d - 1 - k;
    ComplexVector anc = ComplexVector::Zero(d);
    anc(k) = 1.0;
    psi += std::sqrt(std::max(0.0, eig.values(src))) * tensor_product(ComplexVector(eig.vectors.col(src)), anc);
  }
  return PureState::normalized(psi);
}

} // namespace qest
