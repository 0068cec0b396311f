#pragma once

// Kraus-form channels, ancilla extension and the low-noise channel model.

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qest/core.hpp"

namespace qest {

/// Parameter interval [lo, hi] with optionally open ends.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double x) const {
    if (!std::isfinite(x)) return false;
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
  }

  std::string describe() const {
    std::ostringstream os;
    os << (lo_open ? '(' : '[') << lo << ", " << hi << (hi_open ? ')' : ']');
    return os.str();
  }
};

/// rho -> sum_k K_k rho K_k^dagger on a dim-dimensional system.
class KrausChannel {
public:
  KrausChannel(std::vector<ComplexMatrix> kraus) : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw ValidationError("Kraus channel needs at least one operator");
    const auto d = kraus_.front().rows();
    for (const auto& k : kraus_)
      if (k.rows() != d || k.cols() != d)
        throw ValidationError("Kraus operators must all be square and of equal dimension");
  }

  static KrausChannel identity_channel(Eigen::Index dim) { return KrausChannel({qest::identity(dim)}); }

  Eigen::Index dim() const { return kraus_.front().rows(); }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

private:
  std::vector<ComplexMatrix> kraus_;
};

struct TraceCheck {
  double residual = 0.0;
  bool ok = true;
};

/// Max-abs entry of sum K^dagger K - I.
inline TraceCheck validate_trace_preserving(const KrausChannel& ch, double tol = 1e-9) {
  ComplexMatrix acc = -identity(ch.dim());
  for (const auto& k : ch.kraus()) acc += k.adjoint() * k;
  const double r = max_abs(acc);
  return {r, r <= tol};
}

inline DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho) {
  if (rho.dim() != ch.dim()) throw ValidationError("apply_channel: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& k : ch.kraus()) out.noalias() += k * rho.matrix() * k.adjoint();
  out = hermitian_part(out);
  if (std::abs(out.trace() - Complex{1.0}) > 1e-8)
    throw ValidationError("apply_channel: channel is not trace preserving");
  return DensityOperator::trusted(std::move(out));
}

/// Kraus operators K_k (x) I_dimA: the map Gamma (x) id_A.
inline KrausChannel extend_with_ancilla(const KrausChannel& ch, Eigen::Index dim_a) {
  if (dim_a < 1) throw ValidationError("ancilla dimension must be >= 1");
  std::vector<ComplexMatrix> ks;
  ks.reserve(ch.kraus().size());
  const ComplexMatrix id = identity(dim_a);
  for (const auto& k : ch.kraus()) ks.push_back(tensor_product(k, id));
  return KrausChannel(std::move(ks));
}

/// One-parameter family theta -> Gamma_theta.  Every evaluation is checked
/// for trace preservation.
class ChannelFamily {
public:
  using Rule = std::function<KrausChannel(double)>;

  ChannelFamily(std::string parameter, Interval domain, Rule rule)
      : parameter_(std::move(parameter)), domain_(domain), rule_(std::move(rule)) {}

  KrausChannel operator()(double theta) const {
    if (!domain_.contains(theta)) {
      std::ostringstream os;
      os << parameter_ << " = " << theta << " is outside " << domain_.describe();
      throw RangeError(os.str());
    }
    KrausChannel ch = rule_(theta);
    if (!validate_trace_preserving(ch).ok) throw ValidationError("channel family produced a non trace-preserving map");
    return ch;
  }

  const std::string& parameter() const { return parameter_; }
  const Interval& domain() const { return domain_; }

private:
  std::string parameter_;
  Interval domain_;
  Rule rule_;
};

inline ChannelFamily extend_with_ancilla(const ChannelFamily& fam, Eigen::Index dim_a) {
  return ChannelFamily(fam.parameter(), fam.domain(),
                       [fam, dim_a](double t) { return extend_with_ancilla(fam(t), dim_a); });
}

// ---------------------------------------------------------------------------
// Low-noise channels

/// Gamma_eps[rho] = sum_a B_a(eps) rho B_a(eps)^dagger + eps sum_alpha C_alpha(eps) rho C_alpha(eps)^dagger
/// with B_a(eps) = kappa_a I - eps N1_a + O(eps^2) and C_alpha(0) = M_alpha.
///
/// Only the first-order data is stored.  Higher orders live inside the
/// exact Kraus generator, so every instantiation is trace preserving to
/// rounding rather than to some truncation order.
struct LowNoiseChannel {
  using Generator = std::function<KrausChannel(double)>;

  Eigen::Index dim = 0;
  std::vector<Complex> kappas;
  std::vector<ComplexMatrix> n1;
  std::vector<ComplexMatrix> ms;
  Generator generator;
  Interval validity{0.0, std::numeric_limits<double>::infinity()};

  /// Canonical exact channel for a set of noise operators:
  ///   B(eps) = sqrt(I - eps S),  S = sum M^dagger M,  Kraus {B, sqrt(eps) M_alpha}.
  /// Valid on [0, 0.9 / lambda_max(S)].
  static LowNoiseChannel from_noise_operators(std::vector<ComplexMatrix> ms);
};

namespace detail {

inline ComplexMatrix noise_gram(const std::vector<ComplexMatrix>& ms, Eigen::Index dim) {
  ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
  for (const auto& m : ms) s += m.adjoint() * m;
  return s;
}

// N1 = -dB/deps at eps = 0 by symmetric differences with one Richardson level.
inline ComplexMatrix first_order_from_near_identity(const std::function<ComplexMatrix(double)>& b, double h = 1e-5) {
  auto central = [&](double step) -> ComplexMatrix { return (b(step) - b(-step)) / (2.0 * step); };
  return -(4.0 * central(h / 2.0) - central(h)) / 3.0;
}

} // namespace detail

inline LowNoiseChannel LowNoiseChannel::from_noise_operators(std::vector<ComplexMatrix> ms) {
  if (ms.empty()) throw ValidationError("low-noise channel needs at least one noise operator");
  const Eigen::Index d = ms.front().rows();
  for (const auto& m : ms)
    if (m.rows() != d || m.cols() != d) throw ValidationError("noise operators must be square and of equal dimension");

  const ComplexMatrix s = detail::noise_gram(ms, d);
  const double lmax = hermitian_eig(s).values.maxCoeff();

  LowNoiseChannel ln;
  ln.dim = d;
  ln.ms = ms;
  ln.validity = Interval{0.0, lmax > 0.0 ? 0.9 / lmax : std::numeric_limits<double>::infinity()};

  auto near_identity = [s, d](double eps) { return psd_sqrt(identity(d) - eps * s); };
  ln.kappas = {near_identity(0.0)(0, 0)};
  ln.n1 = {0.5 * s}; // -dB/deps at 0, exact for this generator
  ln.generator = [near_identity, ms](double eps) {
    std::vector<ComplexMatrix> ks;
    ks.reserve(ms.size() + 1);
    ks.push_back(near_identity(eps));
    const double w = std::sqrt(eps);
    for (const auto& m : ms) ks.push_back(w * m);
    return KrausChannel(std::move(ks));
  };
  return ln;
}

/// Kraus channel of the low-noise family at a fixed eps.
inline KrausChannel instantiate(const LowNoiseChannel& ln, double eps) {
  if (!(eps >= 0.0) || !ln.validity.contains(eps)) {
    std::ostringstream os;
    os << "epsilon = " << eps << " is outside the validity interval " << ln.validity.describe();
    throw RangeError(os.str());
  }
  return ln.generator(eps);
}

/// Max-abs entry of sum M^dagger M - sum_a (kappa_a N1_a^dagger + kappa_a^* N1_a).
inline double validate_first_order(const LowNoiseChannel& ln) {
  if (ln.kappas.size() != ln.n1.size())
    throw ValidationError("first-order data: kappa and N1 lists differ in length");
  ComplexMatrix r = detail::noise_gram(ln.ms, ln.dim);
  for (std::size_t a = 0; a < ln.kappas.size(); ++a)
    r -= ln.kappas[a] * ln.n1[a].adjoint() + std::conj(ln.kappas[a]) * ln.n1[a];
  return max_abs(r);
}

/// |sum |kappa_a|^2 - 1|.
inline double kappa_norm_residual(const LowNoiseChannel& ln) {
  double s = 0.0;
  for (const auto& k : ln.kappas) s += std::norm(k);
  return std::abs(s - 1.0);
}

inline ChannelFamily as_family(const LowNoiseChannel& ln) {
  return ChannelFamily("epsilon", ln.validity, [ln](double eps) { return instantiate(ln, eps); });
}

} // namespace qest
