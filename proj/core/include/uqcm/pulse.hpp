#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "uqcm/model.hpp"
#include "uqcm/protocol.hpp"
#include "uqcm/types.hpp"

namespace uqcm::pulse {

/// One timed step of the control sequence: a frequency setpoint per qubit,
/// held for `duration`, plus an optional XY rotation driven on one qubit
/// during the step. Frequency setpoints change through raised-cosine
/// transitions of length `ramp_ns` (the device's Z lines are low-pass
/// filtered; instantaneous jumps would ring the resonator).
struct XYPulse {
  int qubit = 0;
  double axis_angle = 0.0;  // 0 = x axis, pi/2 = y axis
  double angle = 0.0;       // rotation angle
  double duration = 40.0;   // drive window, ends at the step boundary
};

struct Step {
  std::string label;
  double duration = 0.0;                  // ns
  std::array<double, 3> setpoint{};       // absolute rad/ns per qubit
  std::optional<XYPulse> xy;
};

/// The three protocol stages (state preparation, cloning couplings, readout
/// hand-off) split into the five timed steps of the control sequence.
struct PulseSchedule {
  std::vector<Step> steps;
  double ramp_ns = 10.0;
  // Post-processing numerical z rotations and the reported Q1 frame phase.
  std::array<double, 3> z_rotation{0.0, 0.0, 0.0};
  double phi = 0.0;
  // Index of the first cloning step (prep stage = steps [0, clone_begin)).
  int clone_begin = 3;

  void validate() const;  // throws ScheduleInvalid
  double total_duration() const;

  /// The experiment's published timings (57.7 / 40.8 / 69.5 ns windows) with
  /// the compensation step at the Q3 idle frequency. No z-rotation data.
  static PulseSchedule paper_sequence(const model::DeviceParams& dev);
};

/// Schedule calibration: solves the step durations, the compensation-step
/// frequency and the numerical z rotations so that the pulse-level sequence
/// realizes the cloning transformation. All conditions are evaluated on the
/// exact dynamics restricted to the (0..2)-excitation sectors.
PulseSchedule calibrate_schedule(const model::DeviceParams& dev, bool crosstalk,
                                 int fock = 3, double ramp_ns = 10.0);

struct StepDiag {
  std::string label;
  double t_end = 0.0;
  double resonator_excitation = 0.0;  // P(n >= 1) at the step boundary
};

struct PulseRun {
  CVector state;                  // final joint state, qubits ⊗ resonator
  numkit::SubsystemShape shape;
  CMatrix rho3;                   // 3-qubit reduced state, z rotations applied
  std::vector<StepDiag> steps;
  std::array<double, 3> stage_boundary_excitation{};  // prep | clone | final
  double phi = 0.0;               // reported Q1 frame phase
};

/// Evolve the full system (Eq.-1-level Hamiltonian, Fock truncation `fock`)
/// through the schedule for a given input state.
PulseRun run_pulse_level(const protocol::InputState& in,
                         const PulseSchedule& schedule,
                         const model::DeviceParams& dev, bool crosstalk,
                         int fock = 3);

}  // namespace uqcm::pulse
