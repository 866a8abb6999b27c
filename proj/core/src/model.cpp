#include "uqcm/model.hpp"

#include <cmath>
#include <iostream>

#include "uqcm/errors.hpp"

namespace uqcm::model {

using numkit::SubsystemShape;
using numkit::embed;
using numkit::identity;
using numkit::kron;

DeviceParams DeviceParams::defaults() {
  DeviceParams p;
  p.omega_working = ghz(5.44);
  p.omega_resonator = ghz(5.588);
  // Q1
  p.qubit[0] = {ghz(5.367), mhz(20.0), mhz(0.069), 24.0, 15.4, 2.2, 2.4,
                6.5, 6.9, 315.0, 0.984, 0.925};
  // Q2
  p.qubit[1] = {ghz(5.223), mhz(20.8), mhz(0.553), 25.8, 28.5, 0.7, 0.9,
                6.2, 7.1, 219.0, 0.988, 0.939};
  // Q3 (crosstalk_next refers to the unused Q4 pair and enters no Hamiltonian)
  p.qubit[2] = {ghz(5.311), mhz(19.9), mhz(-0.066), 22.7, 14.4, 2.6, 2.9,
                8.0, 8.9, 203.0, 0.986, 0.921};
  return p;
}

DeviceParams DeviceParams::with_uniform_g(double g_common) const {
  DeviceParams p = *this;
  for (auto& q : p.qubit) q.g = g_common;
  return p;
}

void DeviceParams::validate() const {
  auto bad = [](bool c, const char* msg) {
    if (c) throw ConfigInvalid(msg);
  };
  bad(omega_working <= 0 || omega_resonator <= 0, "device: frequencies must be positive");
  for (const auto& q : qubit) {
    bad(q.omega_idle <= 0, "device: qubit idle frequency must be positive");
    bad(q.t1_idle_us <= 0 || q.t1_work_us <= 0, "device: T1 must be positive");
    bad(q.t2_star_idle_us <= 0 || q.t2_star_work_us <= 0, "device: T2* must be positive");
    bad(q.t2_echo_idle_us <= 0 || q.t2_echo_work_us <= 0, "device: T2SE must be positive");
    bad(q.f0 < 0 || q.f0 > 1 || q.f1 < 0 || q.f1 > 1, "device: readout fidelities must be in [0,1]");
  }
}

SubsystemShape HamiltonianSpec::shape() const {
  SubsystemShape s;
  for (size_t i = 0; i < active.size(); ++i) s.dims.push_back(2);
  s.dims.push_back(fock);
  return s;
}

CMatrix full_hamiltonian(const HamiltonianSpec& spec, const DeviceParams& params) {
  if (spec.fock < 2) throw ShapeMismatch("full_hamiltonian: fock truncation must be >= 2");
  if (spec.active.empty()) throw ShapeMismatch("full_hamiltonian: no active qubits");
  for (int q : spec.active)
    if (q < 0 || q > 2) throw ShapeMismatch("full_hamiltonian: active qubits must be in {0,1,2}");

  const SubsystemShape shape = spec.shape();
  const int nq = static_cast<int>(spec.active.size());
  const int res_slot = nq;

  CMatrix a = CMatrix::Zero(spec.fock, spec.fock);
  for (int n = 1; n < spec.fock; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const CMatrix a_full = embed(a, shape, res_slot);
  const CMatrix ad_full = a_full.adjoint();

  const double frame = spec.frame;
  CMatrix h = (params.omega_resonator - frame) * (ad_full * a_full);

  std::vector<CMatrix> sm(nq), sp(nq);
  for (int i = 0; i < nq; ++i) {
    sm[i] = embed(numkit::sigma_minus(), shape, i);
    sp[i] = sm[i].adjoint();
    const int q = spec.active[i];
    const CMatrix n1 = embed((CMatrix(2, 2) << 0, 0, 0, 1).finished(), shape, i);
    h += (spec.freq[q] - frame) * n1;
    h += params.qubit[q].g * (ad_full * sm[i] + a_full * sp[i]);
  }

  if (spec.crosstalk) {
    for (int i = 0; i + 1 < nq; ++i) {
      const int q = spec.active[i];
      if (spec.active[i + 1] == q + 1) {
        const double lam = params.qubit[q].crosstalk_next;
        h += lam * (sp[i] * sm[i + 1] + sp[i + 1] * sm[i]);
      }
    }
  }
  return h;
}

CMatrix effective_three_qubit_hamiltonian(double lambda) {
  SubsystemShape shape{2, 2, 2};
  CMatrix h = CMatrix::Zero(8, 8);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      if (j == k) continue;
      h += -lambda * embed(numkit::sigma_plus(), shape, j) *
           embed(numkit::sigma_minus(), shape, k);
    }
  return h;
}

CMatrix effective_two_qubit_hamiltonian(double lambda) {
  SubsystemShape shape{2, 2};
  const CMatrix sp2 = embed(numkit::sigma_plus(), shape, 0);
  const CMatrix sm2 = embed(numkit::sigma_minus(), shape, 0);
  const CMatrix sp3 = embed(numkit::sigma_plus(), shape, 1);
  const CMatrix sm3 = embed(numkit::sigma_minus(), shape, 1);
  return -lambda * (sp2 * sm3 + sm2 * sp3);
}

double mediated_coupling(double g, double delta) {
  if (delta == 0.0) throw ZeroDetuning("mediated_coupling: zero qubit-resonator detuning");
  if (g != 0.0 && std::abs(delta) < 5.0 * std::abs(g))
    std::cerr << "[uqcm] warning: detuning < 5g, dispersive approximation is marginal\n";
  return g * g / delta;
}

CMatrix excitation_number(const HamiltonianSpec& spec) {
  const SubsystemShape shape = spec.shape();
  const int nq = static_cast<int>(spec.active.size());
  CMatrix n = CMatrix::Zero(shape.dim(), shape.dim());
  for (int i = 0; i < nq; ++i)
    n += embed((CMatrix(2, 2) << 0, 0, 0, 1).finished(), shape, i);
  CMatrix nph = CMatrix::Zero(spec.fock, spec.fock);
  for (int k = 0; k < spec.fock; ++k) nph(k, k) = k;
  n += embed(nph, shape, nq);
  return n;
}

}  // namespace uqcm::model
