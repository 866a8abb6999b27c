#include "uqcm/protocol.hpp"

#include <cmath>

#include "uqcm/errors.hpp"
#include "uqcm/numkit.hpp"

namespace uqcm::protocol {

using numkit::SubsystemShape;
using numkit::embed;
using numkit::expm_scaled;
using numkit::identity;
using numkit::kron;

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

void InputState::validate() const {
  if (std::abs(norm2() - 1.0) > kTraceTol)
    throw NotNormalized("input state: |alpha|^2 + |beta|^2 != 1");
}

const std::vector<Probe>& six_probes() {
  static const std::vector<Probe> probes = {
      {"zero", "|0>", {1.0, 0.0}},
      {"plus_i", "(|0>+i|1>)/sqrt2", {kInvSqrt2, Complex(0.0, kInvSqrt2)}},
      {"minus_i", "(|0>-i|1>)/sqrt2", {kInvSqrt2, Complex(0.0, -kInvSqrt2)}},
      {"plus", "(|0>+|1>)/sqrt2", {kInvSqrt2, kInvSqrt2}},
      {"minus", "(|0>-|1>)/sqrt2", {kInvSqrt2, -kInvSqrt2}},
      {"one", "|1>", {0.0, 1.0}},
  };
  return probes;
}

ProtocolParams ProtocolParams::ideal(double lambda) {
  ProtocolParams p;
  p.lambda = lambda;
  p.tau = kTwoPi / (9.0 * lambda);
  p.tau_prime = kPi / (3.0 * lambda);
  return p;
}

CMatrix pauli_x_gate() { return numkit::sigma_x(); }

CMatrix rotation(double axis_angle, double angle) {
  const CMatrix gen = std::cos(axis_angle) * numkit::sigma_x() +
                      std::sin(axis_angle) * numkit::sigma_y();
  return expm_scaled(0.5 * angle * gen, 1.0);
}

CMatrix z_phase(double theta) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(1, 1) = std::exp(Complex(0.0, theta));
  return m;
}

CMatrix prep_rotation(const InputState& in) {
  in.validate();
  const double theta = 2.0 * std::acos(std::clamp(std::abs(in.alpha), 0.0, 1.0));
  if (theta < 1e-14) return identity(2);
  const double arg_a = std::abs(in.alpha) > 0 ? std::arg(in.alpha) : 0.0;
  const double arg_b = std::abs(in.beta) > 0 ? std::arg(in.beta) : 0.0;
  const double axis = arg_b - arg_a + kPi / 2.0;
  return rotation(axis, theta);
}

CVector prepare_input(const InputState& in) {
  in.validate();
  CVector v(2);
  v << in.alpha, in.beta;
  return v;
}

CMatrix sqrt_iswap(double lambda) {
  return expm_scaled(model::effective_two_qubit_hamiltonian(lambda),
                     kPi / (4.0 * lambda));
}

namespace {
CVector bell_sequence(double theta_d, bool compensate) {
  const SubsystemShape shape{2, 2};
  CVector v = CVector::Zero(4);
  v[0] = 1.0;  // |0_2 0_3>
  v = embed(pauli_x_gate(), shape, 1) * v;
  CMatrix swap = sqrt_iswap(1.0);  // the half-swap point is lambda-independent
  if (theta_d != 0.0)
    swap = embed(z_phase(theta_d), shape, 0) * swap;  // extra tuning phase
  v = swap * v;
  if (compensate)
    v = embed(z_phase(kPi / 2.0 + theta_d), shape, 1) * v;
  return v;
}
}  // namespace

CVector bell_prep_ideal(double theta_d) { return bell_sequence(theta_d, true); }

CVector bell_prep_uncompensated(double theta_d) {
  return bell_sequence(theta_d, false);
}

namespace {
/// Remove the unobservable constant phase: make <ref|psi> real positive with
/// ref = alpha|100> + beta|011>; the overlap has magnitude sqrt(2/3) for the
/// protocol's states, so the gauge is always well defined.
CVector fix_gauge(CVector psi, const InputState& in) {
  const Complex p =
      std::conj(in.alpha) * psi[0b100] + std::conj(in.beta) * psi[0b011];
  const double a = std::abs(p);
  if (a < 1e-12) return psi;
  return psi * (std::conj(p) / a);
}
}  // namespace

IdealRun run_ideal_uqcm(const InputState& in, const ProtocolParams& params) {
  in.validate();
  if (params.lambda <= 0.0)
    throw ConfigInvalid("run_ideal_uqcm: lambda must be positive");

  CVector q1 = prepare_input(in);
  CVector bell = bell_prep_ideal(params.theta_d);
  CVector psi = CVector::Zero(8);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) psi[i * 4 + j] = q1[i] * bell[j];

  const CMatrix u1 = expm_scaled(
      model::effective_three_qubit_hamiltonian(params.lambda), params.tau);
  psi = fix_gauge(u1 * psi, in);
  IdealRun out;
  out.checkpoint = psi;

  const SubsystemShape shape{2, 4};
  const CMatrix u2 =
      kron(identity(2), expm_scaled(model::effective_two_qubit_hamiltonian(
                                        params.lambda),
                                    params.tau_prime));
  psi = fix_gauge(u2 * psi, in);

  if (params.phi != 0.0) {
    const SubsystemShape s3{2, 2, 2};
    psi = embed(z_phase(params.phi), s3, 0) * psi;
  }
  out.final_state = psi;
  out.params = params;
  return out;
}

void check_density_matrix(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols())
    throw NotDensityMatrix("density matrix must be square");
  if (numkit::hermiticity_defect(rho) > 10 * kHermTol)
    throw NotDensityMatrix("density matrix not hermitian");
  if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
    throw NotDensityMatrix("density matrix trace != 1");
  const CMatrix sym = 0.5 * (rho + rho.adjoint());
  const RVector w = numkit::eigvals_hermitian(sym);
  if (w[w.size() - 1] < -tol)
    throw NotDensityMatrix("density matrix has a negative eigenvalue");
}

CMatrix clone_channel_ideal(const CMatrix& rho_in) {
  check_density_matrix(rho_in);
  if (rho_in.rows() != 2)
    throw NotDensityMatrix("clone_channel_ideal: expected a qubit state");
  return (2.0 / 3.0) * rho_in + (1.0 / 3.0) * 0.5 * identity(2);
}

CVector ideal_output_state(const InputState& in, double phi) {
  in.validate();
  const Complex eip = std::exp(Complex(0.0, phi));
  const double s23 = std::sqrt(2.0 / 3.0);
  const double s16 = std::sqrt(1.0 / 6.0);
  CVector e = CVector::Zero(8);
  e[0b100] = s23 * in.alpha * eip;
  e[0b010] = s16 * in.alpha;
  e[0b001] = s16 * in.alpha;
  e[0b011] = s23 * in.beta;
  e[0b110] = s16 * in.beta * eip;
  e[0b101] = s16 * in.beta * eip;
  return e;
}

}  // namespace uqcm::protocol
