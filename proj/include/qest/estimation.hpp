#pragma once

// One-parameter quantum estimation: symmetric logarithmic derivative,
// quantum Fisher information, the optimal locally unbiased estimator and
// maximization of the Fisher information over pure inputs.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "qest/channel.hpp"
#include "qest/core.hpp"
#include "qest/detail/search.hpp"

namespace qest {

inline constexpr double kDefaultKernelTol = 1e-10;

struct EstimationResult {
  double theta = 0.0;
  DensityOperator rho = DensityOperator::trusted(ComplexMatrix());
  ComplexMatrix drho;
  ComplexMatrix sld;
  double qfi = 0.0;
  std::optional<ComplexMatrix> optimal_estimator; ///< empty when qfi vanishes
};

/// Solves drho = (L rho + rho L) / 2 in the eigenbasis of rho.  Entries whose
/// eigenvalue pair sums to <= kernel_tol are set to zero; the solution is
/// unique only on the support of rho.
inline ComplexMatrix sld(const DensityOperator& rho, const ComplexMatrix& drho, double kernel_tol = kDefaultKernelTol) {
  if (drho.rows() != rho.dim() || drho.cols() != rho.dim()) throw ValidationError("sld: dimension mismatch");
  if (!is_hermitian(drho)) throw ValidationError("sld: derivative of the state is not Hermitian");
  const auto eig = hermitian_eig(rho.matrix());
  const ComplexMatrix d = eig.vectors.adjoint() * drho * eig.vectors;
  ComplexMatrix l = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
      const double s = eig.values(i) + eig.values(j);
      if (s > kernel_tol) l(i, j) = 2.0 * d(i, j) / s;
    }
  return hermitian_part(eig.vectors * l * eig.vectors.adjoint());
}

/// Tr(rho L^2).
inline double qfi(const DensityOperator& rho, const ComplexMatrix& l) {
  return std::max(0.0, (rho.matrix() * l * l).trace().real());
}

/// Default finite-difference step for a parameter value.
inline double fd_step_for(double theta) { return std::max(1e-5, 1e-3 * std::abs(theta)); }

/// A state-valued one-parameter family theta -> rho_theta.
struct StateFamily {
  std::function<DensityOperator(double)> evaluate;
  Interval domain;
};

namespace detail {

// Values at theta, theta +- h, theta +- h/2.
struct Stencil {
  std::array<double, 5> points;
};

inline Stencil stencil_points(double theta, double h) {
  return {{theta, theta + h, theta - h, theta + h / 2.0, theta - h / 2.0}};
}

inline void check_stencil_domain(const Interval& dom, double theta, double h) {
  if (!dom.contains(theta) || !dom.contains(theta - h) || !dom.contains(theta + h)) {
    std::ostringstream os;
    os << "parameter " << theta << " +- " << h << " leaves the domain " << dom.describe();
    throw RangeError(os.str());
  }
  // Near a finite lower end (eps -> 0 for low-noise channels) the Fisher
  // information diverges like 1/eps; use the leading-order coefficient there.
  if (std::isfinite(dom.lo) && theta - dom.lo < 10.0 * h * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "parameter " << theta << " is within 10 finite-difference steps of the domain end " << dom.lo
       << "; use the leading-order coefficient instead";
    throw RangeError(os.str());
  }
}

// Central difference with one Richardson level: (4 D(h/2) - D(h)) / 3.
inline ComplexMatrix richardson_derivative(const std::array<ComplexMatrix, 5>& v, double h) {
  const ComplexMatrix dh = (v[1] - v[2]) / (2.0 * h);
  const ComplexMatrix dh2 = (v[3] - v[4]) / h;
  return hermitian_part((4.0 * dh2 - dh) / 3.0);
}

inline EstimationResult finish_result(double theta, const DensityOperator& rho, ComplexMatrix drho,
                                      double kernel_tol) {
  EstimationResult res;
  res.theta = theta;
  res.rho = rho;
  res.drho = std::move(drho);
  res.sld = qest::sld(rho, res.drho, kernel_tol);
  res.qfi = qest::qfi(rho, res.sld);
  if (res.qfi > 1e-12) res.optimal_estimator = res.sld / res.qfi + theta * identity(rho.dim());
  return res;
}

// Channels of a family frozen at the five stencil points, so that many
// inputs can be probed without re-evaluating the family.
struct FrozenStencil {
  double theta;
  double h;
  std::vector<KrausChannel> channels;
};

inline FrozenStencil freeze(const ChannelFamily& fam, double theta, double h) {
  check_stencil_domain(fam.domain(), theta, h);
  FrozenStencil fs{theta, h, {}};
  for (double p : stencil_points(theta, h).points) fs.channels.push_back(fam(p));
  return fs;
}

inline EstimationResult qfi_on_stencil(const FrozenStencil& fs, const DensityOperator& input,
                                       double kernel_tol = kDefaultKernelTol) {
  std::array<ComplexMatrix, 5> out;
  for (std::size_t i = 0; i < 5; ++i) out[i] = apply_channel(fs.channels[i], input).matrix();
  return finish_result(fs.theta, DensityOperator::trusted(out[0]), richardson_derivative(out, fs.h), kernel_tol);
}

} // namespace detail

/// Fisher information of a state family at theta, with the derivative taken
/// by Richardson-extrapolated central differences.
inline EstimationResult state_family_qfi(const StateFamily& fam, double theta, std::optional<double> step = {},
                                         double kernel_tol = kDefaultKernelTol) {
  const double h = step.value_or(fd_step_for(theta));
  detail::check_stencil_domain(fam.domain, theta, h);
  std::array<ComplexMatrix, 5> v;
  const auto pts = detail::stencil_points(theta, h).points;
  for (std::size_t i = 0; i < 5; ++i) v[i] = fam.evaluate(pts[i]).matrix();
  return detail::finish_result(theta, DensityOperator::trusted(v[0]), detail::richardson_derivative(v, h), kernel_tol);
}

/// Fisher information of theta -> Gamma_theta[input].
inline EstimationResult channel_qfi(const ChannelFamily& fam, const DensityOperator& input, double theta,
                                    std::optional<double> step = {}, double kernel_tol = kDefaultKernelTol) {
  const auto fs = detail::freeze(fam, theta, step.value_or(fd_step_for(theta)));
  if (fs.channels.front().dim() != input.dim()) throw ValidationError("channel_qfi: input dimension mismatch");
  return detail::qfi_on_stencil(fs, input, kernel_tol);
}

/// A = L / J + theta I: locally unbiased at theta with variance 1/J.
inline ComplexMatrix optimal_estimator(const EstimationResult& res, double tol = 1e-12) {
  if (!(res.qfi > tol)) throw DegenerateError("Fisher information vanishes; no locally unbiased estimator exists");
  return res.sld / res.qfi + res.theta * identity(res.rho.dim());
}

// ---------------------------------------------------------------------------
// Maximization over pure inputs

struct SearchConfig {
  std::size_t sphere_points = 2000; ///< qubit inputs: Fibonacci grid size
  int schmidt_grid = 20;            ///< two-qubit inputs: grid per parameter
  double tolerance = 1e-9;          ///< Nelder-Mead value tolerance
};

struct PureMaximum {
  PureState state;
  double qfi;
};

namespace detail {

inline ComplexVector qubit_from_angles(double polar, double azimuth) {
  ComplexVector v(2);
  v(0) = std::cos(polar / 2.0);
  v(1) = std::polar(1.0, azimuth) * std::sin(polar / 2.0);
  return v;
}

inline ComplexVector qubit_from_direction(const Vec3& n) {
  const double z = std::clamp(n.z(), -1.0, 1.0);
  return qubit_from_angles(std::acos(z), std::atan2(n.y(), n.x()));
}

// cos(chi) |u0>|0> + sin(chi) |u1>|1>, with {u0, u1} the qubit basis along
// the direction (polar, azimuth).  Up to ancilla unitaries this covers every
// two-qubit pure state, and Gamma (x) id commutes with those.
inline ComplexVector schmidt_state(double chi, double polar, double azimuth) {
  const ComplexVector u0 = qubit_from_angles(polar, azimuth);
  ComplexVector u1(2);
  u1(0) = -std::conj(u0(1));
  u1(1) = std::conj(u0(0));
  ComplexVector e0 = ComplexVector::Zero(2), e1 = ComplexVector::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  return std::cos(chi) * tensor_product(u0, e0) + std::sin(chi) * tensor_product(u1, e1);
}

} // namespace detail

/// Best pure input for the Fisher information of fam at theta.  dim 2 searches
/// the Bloch sphere; dim 4 searches two-qubit inputs of an ancilla-extended
/// qubit channel.  The returned value is attained by the returned state, so
/// it is a lower bound on the true maximum.
inline PureMaximum maximize_qfi_pure(const ChannelFamily& fam, double theta, Eigen::Index dim,
                                     const SearchConfig& cfg = {}) {
  const auto fs = detail::freeze(fam, theta, fd_step_for(theta));
  if (fs.channels.front().dim() != dim) throw ValidationError("maximize_qfi_pure: family dimension differs from dim");
  auto value = [&](const ComplexVector& psi) {
    return detail::qfi_on_stencil(fs, DensityOperator::trusted(psi * psi.adjoint())).qfi;
  };

  if (dim == 2) {
    const auto grid = detail::fibonacci_sphere(cfg.sphere_points);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = value(detail::qubit_from_direction(grid[i]));
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    const auto [x, neg] = detail::refine_on_sphere(
        [&](const Vec3& n) { return -value(detail::qubit_from_direction(n)); }, grid[best], cfg.tolerance);
    return {PureState::normalized(detail::qubit_from_direction(x)), -neg};
  }

  if (dim == 4) {
    const int n = cfg.schmidt_grid;
    auto lin = [n](double hi, int i, bool closed) { return hi * i / (closed ? n - 1 : n); };
    Eigen::VectorXd best(3);
    double best_val = -1.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double chi = lin(std::numbers::pi / 2.0, i, true);
          const double pol = lin(std::numbers::pi, j, true);
          const double az = lin(2.0 * std::numbers::pi, k, false);
          const double v = value(detail::schmidt_state(chi, pol, az));
          if (v > best_val) {
            best_val = v;
            best << chi, pol, az;
          }
        }
    detail::NelderMeadOptions opt;
    opt.tolerance = cfg.tolerance;
    opt.initial_step = 0.05;
    const auto res = detail::nelder_mead(
        [&](const Eigen::VectorXd& p) { return -value(detail::schmidt_state(p(0), p(1), p(2))); }, best, opt);
    const Eigen::VectorXd& p = -res.value >= best_val ? res.x : best;
    return {PureState::normalized(detail::schmidt_state(p(0), p(1), p(2))), std::max(best_val, -res.value)};
  }

  throw ValidationError("maximize_qfi_pure supports dim 2 or 4 only");
}

} // namespace qest
