// Compares single-probe and ancilla-assisted estimation of the noise
// strength of a qubit channel built from user-chosen noise operators.

#include <iomanip>
#include <iostream>

#include "qest/qest.hpp"

int main() {
  using namespace qest;

  // Dephasing plus a weak, thermally biased decay.
  ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
  lower(0, 1) = 0.6;
  const std::vector<ComplexMatrix> ms = {0.5 * pauli(3), lower};

  const auto report = enhancement_factor(ms, Method::Both);
  std::cout << std::setprecision(10) << "eta      = " << report.eta << " (" << to_string(report.regime) << ")\n"
            << "L[J_S]   = " << report.l_js << "\n"
            << "L[J_S+A] = " << report.l_jsa << "\n";

  const auto ln = LowNoiseChannel::from_noise_operators(ms);
  const auto inputs = optimal_input_states(report);
  const auto fam = as_family(ln);
  for (double eps : {1e-2, 1e-3}) {
    const double js = channel_qfi(fam, inputs.pure.density(), eps).qfi;
    const double jsa = channel_qfi(extend_with_ancilla(fam, 2), inputs.extended.density(), eps).qfi;
    std::cout << "eps = " << eps << ": eps*J_S = " << eps * js << ", eps*J_S+A = " << eps * jsa << "\n";
  }
  return 0;
}
