#pragma once

// Leading-order (1/eps) Fisher information of low-noise channels and the
// qubit noise geometry that determines the ancilla-assisted enhancement
// factor eta = max_{rho} F / max_{pure} F.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qest/core.hpp"
#include "qest/detail/search.hpp"

namespace qest {

/// sum_alpha [Tr(rho M^dagger M) - |Tr(rho M)|^2].
inline double leading_qfi_coefficient(const std::vector<ComplexMatrix>& ms, const DensityOperator& rho) {
  double total = 0.0;
  for (const auto& m : ms) {
    if (m.rows() != rho.dim() || m.cols() != rho.dim())
      throw ValidationError("leading_qfi_coefficient: noise operator and state dimensions differ");
    const Complex mean = (rho.matrix() * m).trace();
    total += (rho.matrix() * m.adjoint() * m).trace().real() - std::norm(mean);
  }
  return total;
}

/// Pauli-coefficient vectors mu_a (a = x, y, z) of the noise operators,
/// their Gram matrix g_ab = (mu_a, mu_b), H = Re g and
/// J = (Im g_23, Im g_31, Im g_12).
struct NoiseGeometry {
  std::array<ComplexVector, 3> mu;
  Eigen::Matrix3cd g;
  Mat3 h;
  Vec3 j;
};

inline NoiseGeometry noise_geometry(const std::vector<ComplexMatrix>& ms) {
  if (ms.empty()) throw ValidationError("noise_geometry: no noise operators");
  NoiseGeometry geo;
  const auto n = static_cast<Eigen::Index>(ms.size());
  for (auto& v : geo.mu) v = ComplexVector::Zero(n);
  for (Eigen::Index alpha = 0; alpha < n; ++alpha) {
    const auto& m = ms[static_cast<std::size_t>(alpha)];
    if (m.rows() != 2 || m.cols() != 2) throw ValidationError("noise_geometry: noise operators must be 2x2");
    const auto c = pauli_decompose(m);
    for (std::size_t a = 0; a < 3; ++a) geo.mu[a](alpha) = c[a + 1];
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) geo.g(a, b) = geo.mu[static_cast<std::size_t>(a)].dot(geo.mu[static_cast<std::size_t>(b)]);
  geo.h = geo.g.real();
  geo.j = Vec3(geo.g(1, 2).imag(), geo.g(2, 0).imag(), geo.g(0, 1).imag());
  return geo;
}

/// F(x) = Tr H - x^T H x - 2 J.x: the leading coefficient for the qubit
/// state with Bloch vector x.
inline double quadratic_form_F(const NoiseGeometry& geo, const BlochVector& x) {
  const Vec3& v = x.vec();
  return geo.h.trace() - v.dot(geo.h * v) - 2.0 * geo.j.dot(v);
}

// ---------------------------------------------------------------------------
// Quadratic minimization on the sphere

struct SphereMinimum {
  double value = 0.0;
  Vec3 argmin = Vec3::UnitX();
  double secular_value = 0.0; ///< value of the Lagrange-multiplier solution
  double grid_value = 0.0;    ///< value of the refined grid search
  bool ill_conditioned = false;
};

namespace detail {

struct SymmetricEigen3 {
  Vec3 values; // ascending
  Mat3 vectors;
};

inline SymmetricEigen3 eig3(const Mat3& h) {
  const auto e = hermitian_eig(h.cast<Complex>());
  return {e.values, e.vectors.real()};
}

// min x^T H x + 2 b.x over |x| = 1 via the secular equation.  The global
// minimizer satisfies (H + lambda I) x = -b with lambda >= -h_min.
inline std::pair<Vec3, bool> secular_sphere_min(const SymmetricEigen3& e, const Vec3& b) {
  const Vec3 c = e.vectors.transpose() * b;
  const Vec3& hv = e.values;
  const double scale = std::max({std::abs(hv(2)), std::abs(hv(0)), b.norm(), 1e-300});
  const double group_tol = 1e-10 * scale;
  std::array<bool, 3> low{};
  double c_low2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    low[static_cast<std::size_t>(i)] = hv(i) - hv(0) <= group_tol;
    if (low[static_cast<std::size_t>(i)]) c_low2 += c(i) * c(i);
  }

  Vec3 y = Vec3::Zero();
  bool ill = false;
  const double bn = b.norm();
  // Hard case: b has no weight in the lowest eigenspace.
  if (std::sqrt(c_low2) <= 1e-14 * scale) {
    double rest2 = 0.0;
    for (int i = 0; i < 3; ++i)
      if (!low[static_cast<std::size_t>(i)]) {
        y(i) = -c(i) / (hv(i) - hv(0));
        rest2 += y(i) * y(i);
      }
    if (rest2 <= 1.0) {
      for (int i = 0; i < 3; ++i)
        if (low[static_cast<std::size_t>(i)]) {
          y(i) = std::sqrt(1.0 - rest2);
          break;
        }
      return {e.vectors * y, ill};
    }
  }
  // Regular case: phi(lambda) = sum c_i^2 / (h_i + lambda)^2 = 1 on (-h_min, -h_min + |b|].
  auto phi = [&](double lambda) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = hv(i) + lambda;
      if (d <= 0.0) return std::numeric_limits<double>::infinity();
      s += c(i) * c(i) / (d * d);
    }
    return s;
  };
  double lo = -hv(0);
  double hi = -hv(0) + bn;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) > 1.0 ? lo : hi) = mid;
  }
  const double lambda = hi;
  if (hv(0) + lambda <= 1e-8 * scale) ill = true;
  for (int i = 0; i < 3; ++i) y(i) = -c(i) / (hv(i) + lambda);
  if (!(y.norm() > 0.0) || !y.allFinite()) return {e.vectors.col(0), true};
  return {e.vectors * y.normalized(), ill};
}

inline double linear_quadratic(const Mat3& h, const Vec3& b, const Vec3& x) { return x.dot(h * x) + 2.0 * b.dot(x); }

inline SphereMinimum sphere_min_linear(const Mat3& h, const Vec3& b, std::size_t grid_points = 10000) {
  SphereMinimum out;
  const auto e = eig3(h);
  const auto [xs, ill] = secular_sphere_min(e, b);
  out.secular_value = linear_quadratic(h, b, xs);
  out.ill_conditioned = ill;

  const auto grid = fibonacci_sphere(grid_points);
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = linear_quadratic(h, b, grid[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const auto [xg, vg] =
      refine_on_sphere([&](const Vec3& x) { return linear_quadratic(h, b, x); }, grid[best], 1e-15, 0.02);
  out.grid_value = vg;

  const double slack = 1e-12 * (1.0 + std::abs(out.secular_value));
  if (ill || vg < out.secular_value - slack) {
    out.value = vg;
    out.argmin = xg;
  } else {
    out.value = out.secular_value;
    out.argmin = xs;
  }
  return out;
}

} // namespace detail

/// min over |x| = 1 of (x + k)^T H (x + k) for symmetric positive
/// semidefinite H.
inline SphereMinimum min_quadratic_on_sphere(const Mat3& h, const Vec3& k) {
  if (!h.allFinite() || (h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw ValidationError("min_quadratic_on_sphere: H is not symmetric");
  const Vec3 b = h * k;
  const double shift = k.dot(b);
  auto res = detail::sphere_min_linear(h, b);
  res.value += shift;
  res.secular_value += shift;
  res.grid_value += shift;
  return res;
}

// ---------------------------------------------------------------------------
// Enhancement factor

enum class Regime { JZero, InsideBall, OutsideBall, SingularH };
enum class Method { ClosedForm, Direct, Both };

inline std::string to_string(Regime r) {
  switch (r) {
  case Regime::JZero: return "J_ZERO";
  case Regime::InsideBall: return "INSIDE_BALL";
  case Regime::OutsideBall: return "OUTSIDE_BALL";
  case Regime::SingularH: return "SINGULAR_H";
  }
  return "?";
}

inline std::string to_string(Method m) {
  switch (m) {
  case Method::ClosedForm: return "CLOSED_FORM";
  case Method::Direct: return "DIRECT";
  case Method::Both: return "BOTH";
  }
  return "?";
}

struct EnhancementReport {
  double eta = 1.0;
  Regime regime = Regime::JZero;
  double l_js = 0.0;  ///< max of F over pure states
  double l_jsa = 0.0; ///< max of F over all states (reduced states of extended inputs)
  BlochVector x_sphere;
  BlochVector x_ball;
  Method method = Method::Direct;
  std::optional<double> agreement; ///< |eta_closed - eta_direct| when both ran
  std::optional<double> k_norm;    ///< |H^{-1} J| when H is invertible
};

inline constexpr double kSingularCondition = 1e8;

namespace detail {

struct GeometryFacts {
  NoiseGeometry geo;
  SymmetricEigen3 eig;
  double trace;
  bool singular;
  Regime regime;
  std::optional<Vec3> k; // H^{-1} J
};

inline GeometryFacts analyse(const std::vector<ComplexMatrix>& ms) {
  GeometryFacts f{noise_geometry(ms), {}, 0.0, false, Regime::JZero, std::nullopt};
  f.eig = eig3(f.geo.h);
  f.trace = f.geo.h.trace();
  if (!(f.trace > 1e-300)) throw DegenerateError("every noise operator is proportional to the identity; eta is undefined");
  const double hmax = f.eig.values(2);
  f.singular = f.eig.values(0) <= hmax / kSingularCondition;
  if (!f.singular) {
    const Vec3 c = f.eig.vectors.transpose() * f.geo.j;
    f.k = f.eig.vectors * c.cwiseQuotient(f.eig.values);
  }
  if (f.geo.j.norm() <= 1e-12 * f.trace)
    f.regime = Regime::JZero;
  else if (f.singular)
    f.regime = Regime::SingularH;
  else
    f.regime = f.k->norm() <= 1.0 ? Regime::InsideBall : Regime::OutsideBall;
  return f;
}

inline EnhancementReport direct_report(const GeometryFacts& f) {
  EnhancementReport r;
  r.method = Method::Direct;
  r.regime = f.regime;
  if (f.k) r.k_norm = f.k->norm();
  const Mat3& h = f.geo.h;
  const Vec3& j = f.geo.j;

  const auto sphere = sphere_min_linear(h, j);
  r.l_js = f.trace - sphere.value;
  r.x_sphere = BlochVector(sphere.argmin.normalized());

  // F is concave; its unconstrained maximizers solve H x = -J.
  const Vec3 c = f.eig.vectors.transpose() * j;
  const double hmax = std::max(f.eig.values(2), 1e-300);
  Vec3 y = Vec3::Zero();
  double inconsistency = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (f.eig.values(i) > 1e-12 * hmax)
      y(i) = -c(i) / f.eig.values(i);
    else
      inconsistency += c(i) * c(i);
  }
  const Vec3 x_star = f.eig.vectors * y;
  const bool solvable = std::sqrt(inconsistency) <= 1e-12 * std::max(1.0, j.norm());
  if (solvable && x_star.norm() <= 1.0) {
    r.l_jsa = f.trace - linear_quadratic(h, j, x_star);
    r.x_ball = BlochVector(x_star);
  } else {
    r.l_jsa = r.l_js;
    r.x_ball = r.x_sphere;
  }
  r.eta = r.l_jsa / r.l_js;
  return r;
}

inline EnhancementReport closed_form_report(const GeometryFacts& f) {
  if (f.singular)
    throw SingularGeometryError("closed-form eta needs an invertible H (cond(H) <= 1e8); use the direct method");
  EnhancementReport r;
  r.method = Method::ClosedForm;
  r.regime = f.regime;
  const Vec3& k = *f.k;
  r.k_norm = k.norm();
  const double base = f.trace + f.geo.j.dot(k); // Tr H + J H^{-1} J
  const auto g = min_quadratic_on_sphere(f.geo.h, k);
  r.l_js = base - g.value;
  r.x_sphere = BlochVector(g.argmin.normalized());
  if (k.norm() <= 1.0) {
    r.l_jsa = base;
    r.x_ball = BlochVector(Vec3(-k));
    r.eta = r.l_jsa / r.l_js;
  } else {
    r.l_jsa = r.l_js;
    r.x_ball = r.x_sphere;
    r.eta = 1.0;
  }
  return r;
}

} // namespace detail

/// Enhancement factor eta for qubit noise operators.
///
/// Direct: maximizes F over the sphere and over the ball without inverting H.
/// ClosedForm: uses K = H^{-1} J; the ball maximum is Tr H + J.K when |K| <= 1,
/// otherwise it lies on the sphere and eta = 1.  Requires cond(H) <= 1e8.
/// Both: runs both when H is invertible and records their discrepancy;
/// falls back to Direct alone for singular H.
inline EnhancementReport enhancement_factor(const std::vector<ComplexMatrix>& ms, Method method = Method::Direct) {
  const auto facts = detail::analyse(ms);
  switch (method) {
  case Method::Direct: return detail::direct_report(facts);
  case Method::ClosedForm: return detail::closed_form_report(facts);
  case Method::Both: {
    auto direct = detail::direct_report(facts);
    if (facts.singular) return direct;
    auto closed = detail::closed_form_report(facts);
    closed.method = Method::Both;
    closed.agreement = std::abs(closed.eta - direct.eta);
    return closed;
  }
  }
  throw ValidationError("unknown method");
}

// ---------------------------------------------------------------------------
// Brute-force oracle

struct BruteForceCoefficients {
  double l_js;
  double l_jsa;
  Vec3 x_sphere;
  Vec3 x_ball;
};

/// Maximizes the leading coefficient by exhaustive search straight from its
/// trace definition: a Fibonacci sphere grid for pure inputs and a radial x
/// sphere grid for the ball of reduced states, each followed by a local
/// simplex refinement.
inline BruteForceCoefficients bruteforce_coefficients(const std::vector<ComplexMatrix>& ms, std::size_t grid_size = 2000) {
  if (grid_size < 1000) throw ValidationError("eta_bruteforce: grid_size must be >= 1000");
  if (ms.empty()) throw ValidationError("eta_bruteforce: no noise operators");
  std::vector<Eigen::Matrix2cd> m2;
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  for (const auto& m : ms) {
    if (m.rows() != 2 || m.cols() != 2) throw ValidationError("eta_bruteforce: noise operators must be 2x2");
    m2.emplace_back(m);
    s += m2.back().adjoint() * m2.back();
  }
  auto coeff = [&](const Vec3& x) {
    Eigen::Matrix2cd rho;
    rho << 0.5 * (1.0 + x(2)), 0.5 * Complex(x(0), -x(1)), 0.5 * Complex(x(0), x(1)), 0.5 * (1.0 - x(2));
    double v = (rho * s).trace().real();
    for (const auto& m : m2) v -= std::norm((rho * m).trace());
    return v;
  };

  const auto grid = detail::fibonacci_sphere(grid_size);
  Vec3 best_s = grid.front();
  double val_s = -std::numeric_limits<double>::infinity();
  for (const auto& p : grid)
    if (const double v = coeff(p); v > val_s) {
      val_s = v;
      best_s = p;
    }
  const auto [xs, ns] = detail::refine_on_sphere([&](const Vec3& x) { return -coeff(x); }, best_s, 1e-14, 0.02);

  const std::size_t radii = 20;
  Vec3 best_b = Vec3::Zero();
  double val_b = coeff(best_b);
  for (std::size_t r = 1; r <= radii; ++r) {
    const double rad = static_cast<double>(r) / static_cast<double>(radii);
    for (const auto& p : grid)
      if (const double v = coeff(rad * p); v > val_b) {
        val_b = v;
        best_b = rad * p;
      }
  }
  const auto [xb, nb] = detail::refine_in_ball([&](const Vec3& x) { return -coeff(x); }, best_b, 1e-14, 0.02);

  // The sphere lies inside the ball.
  if (-ns > -nb) return {-ns, -ns, xs, xs};
  return {-ns, -nb, xs, xb};
}

inline double eta_bruteforce(const std::vector<ComplexMatrix>& ms, std::size_t grid_size = 2000) {
  const auto c = bruteforce_coefficients(ms, grid_size);
  if (!(c.l_js > 0.0)) throw DegenerateError("eta_bruteforce: leading coefficient vanishes on every pure state");
  return c.l_jsa / c.l_js;
}

// ---------------------------------------------------------------------------
// Optimal inputs

struct OptimalInputs {
  PureState pure;                  ///< qubit input with Bloch vector x_sphere
  PureState extended;              ///< qubit (x) ancilla input, reduced state (I + x_ball.sigma)/2
  std::array<double, 2> schmidt{}; ///< Schmidt coefficients of extended, descending
};

inline OptimalInputs optimal_input_states(const EnhancementReport& report) {
  const auto rho = bloch_to_density(report.x_ball);
  const double r = report.x_ball.norm();
  const std::array<double, 2> schmidt{std::sqrt(0.5 * (1.0 + r)), std::sqrt(std::max(0.0, 0.5 * (1.0 - r)))};
  return {bloch_pure_state(report.x_sphere.vec().normalized()), purify(rho), schmidt};
}

} // namespace qest
