#pragma once

// Deterministic derivative-free search helpers: Fibonacci sphere grids and
// a Nelder-Mead simplex minimizer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace qest::detail {

/// n nearly uniform unit vectors (golden-angle spiral).
inline std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t n) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

/// Two unit vectors completing n to an orthonormal frame.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_frame(const Eigen::Vector3d& n) {
  Eigen::Vector3d seed = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d e1 = (seed - seed.dot(n) * n).normalized();
  Eigen::Vector3d e2 = n.cross(e1);
  return {e1, e2};
}

struct NelderMeadOptions {
  double tolerance = 1e-9; ///< stop when the simplex value spread <= tolerance * (1 + |f_best|)
  double initial_step = 0.1;
  int max_evaluations = 4000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
};

inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& start, const NelderMeadOptions& opt = {}) {
  const auto n = start.size();
  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), start);
  std::vector<double> values(simplex.size());
  for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)](i) += opt.initial_step;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(simplex.size());
  while (true) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    if (values[worst] - values[best] <= opt.tolerance * (1.0 + std::abs(values[best])) || evals >= opt.max_evaluations)
      return {simplex[best], values[best], evals};

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }
}

/// Minimizes f over the unit sphere starting from x0, in the chart
/// (u, v) -> normalize(x0 + u e1 + v e2).
inline std::pair<Eigen::Vector3d, double> refine_on_sphere(const std::function<double(const Eigen::Vector3d&)>& f,
                                                           const Eigen::Vector3d& x0, double tolerance,
                                                           double step = 0.05) {
  const auto [e1, e2] = tangent_frame(x0);
  auto chart = [&](const Eigen::VectorXd& uv) -> Eigen::Vector3d {
    return (x0 + uv(0) * e1 + uv(1) * e2).normalized();
  };
  NelderMeadOptions opt;
  opt.tolerance = tolerance;
  opt.initial_step = step;
  const auto res = nelder_mead([&](const Eigen::VectorXd& uv) { return f(chart(uv)); }, Eigen::VectorXd::Zero(2), opt);
  const double f0 = f(x0);
  if (f0 <= res.value) return {x0, f0};
  return {chart(res.x), res.value};
}

/// Minimizes f over the closed unit ball starting from x0.  Points outside
/// the ball are projected radially onto the sphere and penalized by their
/// distance to it, so the simplex is pushed back instead of drifting on a
/// plateau.  The simplex is restarted from its best point until a restart
/// no longer improves the value.
inline std::pair<Eigen::Vector3d, double> refine_in_ball(const std::function<double(const Eigen::Vector3d&)>& f,
                                                         const Eigen::Vector3d& x0, double tolerance,
                                                         double step = 0.05) {
  auto project = [](const Eigen::Vector3d& y) -> Eigen::Vector3d {
    const double r = y.norm();
    return r > 1.0 ? Eigen::Vector3d(y / r) : y;
  };
  auto penalized = [&](const Eigen::VectorXd& y) {
    const double excess = std::max(0.0, y.norm() - 1.0);
    return f(project(y)) + excess * (1.0 + std::abs(f(Eigen::Vector3d::Zero())));
  };
  NelderMeadOptions opt;
  opt.tolerance = tolerance;
  opt.initial_step = step;
  Eigen::Vector3d best = x0;
  double best_val = f(x0);
  for (int restart = 0; restart < 8; ++restart) {
    const auto res = nelder_mead(penalized, Eigen::VectorXd(best), opt);
    const Eigen::Vector3d x = project(res.x);
    const double v = f(x);
    if (!(v < best_val - tolerance * (1.0 + std::abs(best_val)))) {
      if (v < best_val) {
        best = x;
        best_val = v;
      }
      break;
    }
    best = x;
    best_val = v;
    opt.initial_step = std::max(step * 0.1, 1e-4);
  }
  return {best, best_val};
}

} // namespace qest::detail
