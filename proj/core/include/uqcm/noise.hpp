#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "uqcm/model.hpp"
#include "uqcm/protocol.hpp"
#include "uqcm/types.hpp"

namespace uqcm::noise {

enum class DephasingMode { OrnsteinUhlenbeck, Markovian };

/// Decoherence parameters. T1 decay is always Markovian; pure dephasing is an
/// Ornstein-Uhlenbeck frequency-fluctuation process by default (Table-style
/// Ramsey decay is Gaussian, which a Markovian term cannot produce), with a
/// cheaper Markovian channel available as an alternative mode.
struct NoiseModel {
  struct PerQubit {
    double gamma1_idle = 0.0;   // 1/ns
    double gamma1_work = 0.0;
    double gamma_phi_idle = 0.0;  // Markovian-mode rate, 1/ns
    double gamma_phi_work = 0.0;
    double sigma_idle = 0.0;    // OU amplitude, rad/ns
    double sigma_work = 0.0;
  };
  std::array<PerQubit, 3> qubit;
  double tc_ns = 10000.0;       // OU correlation time
  int trajectories = 1000;
  std::uint64_t seed = 1;
  DephasingMode mode = DephasingMode::OrnsteinUhlenbeck;
  double dt_ns = 0.05;

  void validate() const;

  /// Rates calibrated from the device coherence times: gamma1 = 1/T1 and
  /// sigma such that the simulated Ramsey coherence reaches 1/e at T2*
  /// (including the T1 contribution); Markovian gamma_phi as the exponential
  /// equivalent.
  static NoiseModel from_device(const model::DeviceParams& dev);
};

/// OU amplitude with Ramsey 1/e time t2_star in the presence of T1.
double calibrate_sigma(double t2_star_ns, double t1_ns);

struct CollapseOp {
  CMatrix op;
  double rate = 0.0;  // 1/ns
};

/// Fixed-step RK4 integration of the Lindblad master equation
///   drho/dt = -i[H, rho] + sum_k rate_k (L rho L† - {L†L, rho}/2).
/// A step-halving error estimate on the first step guards dt; throws
/// StepTooLarge when the local truncation error estimate exceeds 1e-6.
CMatrix lindblad_evolve(const CMatrix& rho, const CMatrix& h,
                        const std::vector<CollapseOp>& collapse, double t,
                        double dt);

/// Stationary Ornstein-Uhlenbeck trajectory sampled on a dt grid
/// (duration/dt + 1 points), exact discrete update.
std::vector<double> ou_trajectory(double sigma, double tc, double duration,
                                  double dt, std::uint64_t seed);

/// The H0 eigenbasis {|00>, |psi+>, |psi->, |11>} as columns.
CMatrix dephasing_basis();

/// K2|1_2><1_2| + K3|1_3><1_3| expressed in the dephasing basis by an exact
/// basis change (not transcribed from a printed matrix): the psi+/psi-
/// off-diagonal carries (K2-K3)/2.
CMatrix h1_in_dressed_basis(double k2, double k3);

/// Accumulated phases of the effective dephasing Hamiltonian over a sampled
/// noise record (trapezoidal quadrature):
///   phi  = -(1/2) ∫ (K2+K3) [1 - (K2+K3)/lambda] dt
///   phi' = -      ∫ (K2+K3) dt
std::pair<double, double> accumulated_dephasing_phases(
    const std::vector<double>& k2, const std::vector<double>& k3, double lambda,
    double dt);

/// Maximum |psi+> -> |psi-> population transfer over [0, t] for static
/// fluctuations, from the exact evolution under H0 + H1.
double gap_protection_leakage(double k2, double k3, double lambda, double t);

/// Trajectory-averaged two-qubit dephasing during an exchange window:
/// population retention of |psi+> and coherence retention of
/// (|00> + |psi+>)/sqrt(2), with the coupling on and off.
struct DecouplingPoint {
  double pop_on = 0.0, pop_off = 0.0;
  double coh_on = 0.0, coh_off = 0.0;
};
DecouplingPoint decoupling_point(double sigma, double tc, double lambda,
                                 double duration, int trajectories,
                                 std::uint64_t seed, double dt = 0.05,
                                 bool paired_noise = true);

/// Full noisy protocol run on the effective three-qubit model: the gate-level
/// sequence with physical stage durations, Markovian T1, and per-stage
/// dephasing (OU trajectories or Markovian sigma_z channels). Returns the
/// trajectory-averaged three-qubit density matrix; deterministic for a given
/// seed, independent of evaluation order.
CMatrix run_noisy_uqcm(const protocol::InputState& in,
                       const protocol::ProtocolParams& params,
                       const NoiseModel& nm);

}  // namespace uqcm::noise
