#pragma once

#include <string>

#include "uqcm/protocol.hpp"
#include "uqcm/types.hpp"

namespace uqcm::metrics {

/// Per-probe summary of one protocol run.
struct CloneReport {
  std::string input_label;
  std::string layer;  // ideal | pulse | noisy
  double fidelity_q2 = 0.0;
  double fidelity_q3 = 0.0;
  double concurrence_q1q2 = 0.0;
  double concurrence_q1q3 = 0.0;
  double concurrence_q2q3 = 0.0;
};

/// F = <psi_in| rho_out |psi_in> for a pure input state.
double state_fidelity(const protocol::InputState& in, const CMatrix& rho_out);

/// rho (sigma_y ⊗ sigma_y) rho^* (sigma_y ⊗ sigma_y); rho^* is the entrywise
/// conjugate in the computational basis. Generally non-hermitian.
CMatrix rho_tilde(const CMatrix& rho);

/// Wootters concurrence C = max{sqrt(l1)-sqrt(l2)-sqrt(l3)-sqrt(l4), 0} from
/// the descending eigenvalues of rho_tilde. Eigenvalues within -1e-9 of zero
/// are clamped before the square roots.
double concurrence(const CMatrix& rho);

/// Joint original-copy density matrix of the ideal machine, in the basis
/// {|0_1 0_k>, |0_1 1_k>, |1_1 0_k>, |1_1 1_k>} (k = 2 or 3).
CMatrix analytic_joint_original_copy(const protocol::InputState& in);

/// Joint copy-copy density matrix of the ideal machine, in the basis
/// {|0_2 0_3>, |0_2 1_3>, |1_2 0_3>, |1_2 1_3>}.
CMatrix analytic_joint_copies(const protocol::InputState& in);

}  // namespace uqcm::metrics
