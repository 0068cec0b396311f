#pragma once

// Unitary one-parameter families: logarithmic Hamiltonian, Fisher
// information of pure probes, its maximum, and the ancilla comparison.

#include <cmath>
#include <functional>
#include <sstream>
#include <utility>

#include "qest/channel.hpp"
#include "qest/core.hpp"
#include "qest/estimation.hpp"

namespace qest {

/// theta -> U(theta).  Evaluations are checked for unitarity.
class UnitaryFamily {
public:
  using Rule = std::function<ComplexMatrix(double)>;

  UnitaryFamily(Interval domain, Rule rule) : domain_(domain), rule_(std::move(rule)) {}

  ComplexMatrix operator()(double theta) const {
    if (!domain_.contains(theta)) {
      std::ostringstream os;
      os << "theta = " << theta << " is outside " << domain_.describe();
      throw RangeError(os.str());
    }
    ComplexMatrix u = rule_(theta);
    if (u.rows() != u.cols() || max_abs(u.adjoint() * u - identity(u.rows())) > 1e-10)
      throw ValidationError("unitary family produced a non-unitary matrix");
    return u;
  }

  const Interval& domain() const { return domain_; }

private:
  Interval domain_;
  Rule rule_;
};

/// exp(-i theta G) for Hermitian G.
inline UnitaryFamily generated_by(const ComplexMatrix& g) {
  const auto eig = hermitian_eig(g);
  return UnitaryFamily(Interval{}, [eig](double theta) {
    ComplexVector phases(eig.values.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, -theta * eig.values(i));
    return ComplexMatrix(eig.vectors * phases.asDiagonal() * eig.vectors.adjoint());
  });
}

/// The channel rho -> U(theta) rho U(theta)^dagger.
inline ChannelFamily as_channel_family(const UnitaryFamily& fam) {
  return ChannelFamily("theta", fam.domain(), [fam](double t) { return KrausChannel({fam(t)}); });
}

/// H = i (dU/dtheta) U^dagger, symmetrized.
inline ComplexMatrix log_hamiltonian(const UnitaryFamily& fam, double theta, std::optional<double> step = {}) {
  const double h = step.value_or(fd_step_for(theta));
  const ComplexMatrix du =
      (4.0 * (fam(theta + h / 2.0) - fam(theta - h / 2.0)) / h - (fam(theta + h) - fam(theta - h)) / (2.0 * h)) / 3.0;
  return hermitian_part(kI * du * fam(theta).adjoint());
}

/// 4 (<H^2> - <H>^2).
inline double unitary_qfi(const ComplexMatrix& h, const PureState& psi) {
  if (!is_hermitian(h)) throw ValidationError("unitary_qfi: H is not Hermitian");
  if (h.rows() != psi.dim()) throw ValidationError("unitary_qfi: dimension mismatch");
  const ComplexVector hp = h * psi.amplitudes();
  const double mean = psi.amplitudes().dot(hp).real();
  const double second = hp.squaredNorm();
  return std::max(0.0, 4.0 * (second - mean * mean));
}

struct UnitaryMaximum {
  double qfi;
  PureState optimal;
};

/// (E_max - E_min)^2, attained by (|max> + |min>) / sqrt(2).
inline UnitaryMaximum unitary_qfi_max(const ComplexMatrix& h) {
  const auto eig = hermitian_eig(h);
  const Eigen::Index n = eig.values.size();
  // Degenerate extremes: lowest index of the minimum, lowest index of the maximum.
  Eigen::Index lo = 0;
  Eigen::Index hi = n - 1;
  while (hi > 0 && eig.values(hi - 1) == eig.values(n - 1)) --hi;
  const double gap = eig.values(n - 1) - eig.values(0);
  if (hi == lo) return {0.0, PureState::normalized(eig.vectors.col(0))};
  return {gap * gap, PureState::normalized(eig.vectors.col(hi) + eig.vectors.col(lo))};
}

struct EnhancementCheck {
  double ratio = 1.0;
  double extended_max = 0.0;
  double unextended_max = 0.0;
  bool degenerate = false;
};

/// Ratio of the ancilla-extended to the unextended maximal Fisher
/// information of a one-parameter qubit unitary family.  Both maxima are
/// taken through the generic SLD pipeline.
inline EnhancementCheck no_enhancement_check(const UnitaryFamily& fam, double theta, Eigen::Index dim_a = 2,
                                             const SearchConfig& cfg = {}) {
  if (dim_a < 1) throw ValidationError("ancilla dimension must be >= 1");
  const auto chan = as_channel_family(fam);
  const Eigen::Index dim_s = fam(theta).rows();
  EnhancementCheck out;
  out.unextended_max = maximize_qfi_pure(chan, theta, dim_s, cfg).qfi;
  if (dim_a == 1) {
    out.extended_max = out.unextended_max;
  } else {
    if (dim_s != 2 || dim_a != 2) throw ValidationError("no_enhancement_check: extended search supports qubit + qubit only");
    out.extended_max = maximize_qfi_pure(extend_with_ancilla(chan, dim_a), theta, dim_s * dim_a, cfg).qfi;
  }
  if (out.unextended_max <= 1e-12 && out.extended_max <= 1e-12) {
    out.degenerate = true;
    out.ratio = 1.0;
  } else {
    out.ratio = out.extended_max / out.unextended_max;
  }
  return out;
}

} // namespace qest
