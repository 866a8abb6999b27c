#pragma once

#include <string>
#include <vector>

#include "uqcm/model.hpp"
#include "uqcm/types.hpp"

namespace uqcm::protocol {

/// Input qubit state alpha|0> + beta|1>.
struct InputState {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};

  void validate() const;  // throws NotNormalized
  double norm2() const { return std::norm(alpha) + std::norm(beta); }
};

struct Probe {
  std::string label;  // file-safe slug
  std::string pretty;
  InputState state;
};

/// The six probe states in the order the experiment iterates them.
const std::vector<Probe>& six_probes();

/// Gate-level protocol constants. Ideal defaults: tau = 2pi/(9 lambda),
/// tau' = pi/(3 lambda), compensation angle pi/2 + theta_d with theta_d = 0,
/// phi = 0, no numerical z rotations.
struct ProtocolParams {
  double lambda = 0.0;        // rad/ns
  double tau = 0.0;           // ns
  double tau_prime = 0.0;     // ns
  double theta_d = 0.0;       // extra dynamical phase in the Bell prep
  double phi = 0.0;           // residual frame phase on Q1 in the final state
  std::array<double, 3> z_rotation{0.0, 0.0, 0.0};

  static ProtocolParams ideal(double lambda);
};

// Single-qubit gate-level primitives.
CMatrix pauli_x_gate();                       // X_pi as the Pauli matrix
CMatrix rotation(double axis_angle, double angle);  // exp(-i a/2 (cos p X + sin p Y))
CMatrix z_phase(double theta);                // e^{i theta |1><1|}

/// Unitary preparing alpha|0>+beta|1> from |0> up to the global phase arg(alpha).
CMatrix prep_rotation(const InputState& in);

CVector prepare_input(const InputState& in);

/// sqrt(iSWAP): exp(-i He' t*) with t* = pi/(4 lambda).
CMatrix sqrt_iswap(double lambda);

/// X_pi on Q3, sqrt(iSWAP), then R_theta^z on Q3 with theta = pi/2 + theta_d.
/// With exact compensation the result is |psi+> = (|10> + |01>)/sqrt(2).
CVector bell_prep_ideal(double theta_d = 0.0);

/// Same sequence without the compensation pulse (diagnostic).
CVector bell_prep_uncompensated(double theta_d = 0.0);

struct IdealRun {
  CVector checkpoint;  // after the three-qubit coupling window
  CVector final_state;
  ProtocolParams params;
};

/// Full gate-level cloning sequence: input ⊗ |psi+>, evolve under He for tau,
/// then the two copy qubits under He' for tau_prime, then the phi rotation on
/// Q1. States are returned in the gauge where the closed-form amplitudes are
/// recovered exactly (the overlap with alpha|100> + beta|011> is made real
/// positive; a protocol-wide constant phase is unobservable).
IdealRun run_ideal_uqcm(const InputState& in, const ProtocolParams& params);

/// Ideal cloning channel on one qubit: (2/3) rho + (1/3) I/2.
CMatrix clone_channel_ideal(const CMatrix& rho_in);

/// Closed-form three-qubit output state (with the resonator traced away),
/// used as the oracle for the pulse-level path.
CVector ideal_output_state(const InputState& in, double phi);

void check_density_matrix(const CMatrix& rho, double tol = 1e-8);

}  // namespace uqcm::protocol
