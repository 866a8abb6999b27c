#pragma once

#include <array>

#include "uqcm/numkit.hpp"
#include "uqcm/types.hpp"

namespace uqcm::model {

/// Per-qubit device characteristics. Times in us where named so, rad/ns for
/// frequencies; idle/working pairs follow the measurement point convention.
struct QubitParams {
  double omega_idle = 0.0;        // rad/ns
  double g = 0.0;                 // qubit-resonator coupling, rad/ns
  double crosstalk_next = 0.0;    // direct coupling to the next qubit, rad/ns
  double t1_idle_us = 0.0;
  double t1_work_us = 0.0;
  double t2_star_idle_us = 0.0;
  double t2_star_work_us = 0.0;
  double t2_echo_idle_us = 0.0;
  double t2_echo_work_us = 0.0;
  double readout_leak_ns = 0.0;   // 1/kappa_r, carried but not simulated
  double f0 = 1.0;                // P(read 0 | prepared 0)
  double f1 = 1.0;                // P(read 1 | prepared 1)
};

struct DeviceParams {
  std::array<QubitParams, 3> qubit;
  double omega_working = 0.0;    // rad/ns
  double omega_resonator = 0.0;  // rad/ns

  /// Committed defaults for the three-qubit device.
  static DeviceParams defaults();

  /// Same device with all couplings replaced by a common g (rad/ns).
  DeviceParams with_uniform_g(double g_common) const;

  void validate() const;  // throws ConfigInvalid

  double detuning() const { return omega_resonator - omega_working; }
};

/// What to build: which qubits participate, their instantaneous frequencies,
/// the resonator Fock truncation, and whether direct crosstalk is included.
struct HamiltonianSpec {
  std::vector<int> active;          // subset of {0,1,2}, ascending
  std::array<double, 3> freq{};     // absolute rad/ns (entries for active qubits)
  int fock = 3;                     // photon numbers 0..fock-1
  bool crosstalk = false;
  double frame = 0.0;               // rotating-frame frequency, rad/ns

  numkit::SubsystemShape shape() const;
};

/// Full qubit(s)+resonator Hamiltonian in the rotating frame `spec.frame`:
/// detunings on the diagonal, Jaynes-Cummings couplings, optional direct
/// qubit-qubit exchange terms for adjacent pairs. Conserves excitation number.
CMatrix full_hamiltonian(const HamiltonianSpec& spec, const DeviceParams& params);

/// H_e = -lambda * sum_{j != k} S_j^+ S_k^-  on three qubits (8x8).
CMatrix effective_three_qubit_hamiltonian(double lambda);

/// H_e' = -lambda (S_2^+ S_3^- + S_2^- S_3^+)  on two qubits (4x4).
CMatrix effective_two_qubit_hamiltonian(double lambda);

/// Resonator-mediated coupling strength lambda = g^2 / delta.
/// Throws ZeroDetuning; warns on stderr when delta < 5 g (dispersive regime
/// assumption becomes shaky).
double mediated_coupling(double g, double delta);

/// Total excitation number operator for spec's space (qubit excitations plus
/// photons), used by the conservation checks.
CMatrix excitation_number(const HamiltonianSpec& spec);

}  // namespace uqcm::model
