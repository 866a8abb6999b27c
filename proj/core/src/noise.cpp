#include "uqcm/noise.hpp"

#include <cmath>

#include "uqcm/errors.hpp"
#include "uqcm/numkit.hpp"
#include "uqcm/rng.hpp"

namespace uqcm::noise {

using numkit::SubsystemShape;
using numkit::embed;

void NoiseModel::validate() const {
  for (const auto& q : qubit) {
    if (q.gamma1_idle < 0 || q.gamma1_work < 0 || q.gamma_phi_idle < 0 ||
        q.gamma_phi_work < 0 || q.sigma_idle < 0 || q.sigma_work < 0)
      throw ConfigInvalid("noise: rates must be non-negative");
  }
  if (trajectories < 1) throw ConfigInvalid("noise: trajectory count must be >= 1");
  if (!(tc_ns > 0) || !(dt_ns > 0)) throw ConfigInvalid("noise: tc and dt must be positive");
}

double calibrate_sigma(double t2_star_ns, double t1_ns) {
  // exp(-t/(2 T1)) * exp(-sigma^2 t^2 / 2) = 1/e at t = T2*
  const double rem = 1.0 - t2_star_ns / (2.0 * t1_ns);
  if (rem <= 0.0) return 0.0;
  return std::sqrt(2.0 * rem) / t2_star_ns;
}

NoiseModel NoiseModel::from_device(const model::DeviceParams& dev) {
  NoiseModel nm;
  for (int q = 0; q < 3; ++q) {
    const auto& d = dev.qubit[q];
    const double t1i = d.t1_idle_us * 1e3, t1w = d.t1_work_us * 1e3;
    const double t2i = d.t2_star_idle_us * 1e3, t2w = d.t2_star_work_us * 1e3;
    auto& n = nm.qubit[q];
    n.gamma1_idle = 1.0 / t1i;
    n.gamma1_work = 1.0 / t1w;
    n.sigma_idle = calibrate_sigma(t2i, t1i);
    n.sigma_work = calibrate_sigma(t2w, t1w);
    n.gamma_phi_idle = std::max(0.0, 1.0 / t2i - 0.5 / t1i);
    n.gamma_phi_work = std::max(0.0, 1.0 / t2w - 0.5 / t1w);
  }
  return nm;
}

namespace {

void lindblad_rhs(const CMatrix& rho, const CMatrix& h,
                  const std::vector<CollapseOp>& collapse, CMatrix& out) {
  const Complex mi(0.0, -1.0);
  out = mi * (h * rho - rho * h);
  for (const auto& c : collapse) {
    if (c.rate == 0.0) continue;
    const CMatrix lr = c.op * rho;
    const CMatrix ldl = c.op.adjoint() * c.op;
    out += c.rate * (lr * c.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
}

void rk4_lindblad_step(CMatrix& rho, const CMatrix& h,
                       const std::vector<CollapseOp>& collapse, double dt,
                       CMatrix& k1, CMatrix& k2, CMatrix& k3, CMatrix& k4,
                       CMatrix& tmp) {
  lindblad_rhs(rho, h, collapse, k1);
  tmp = rho + 0.5 * dt * k1;
  lindblad_rhs(tmp, h, collapse, k2);
  tmp = rho + 0.5 * dt * k2;
  lindblad_rhs(tmp, h, collapse, k3);
  tmp = rho + dt * k3;
  lindblad_rhs(tmp, h, collapse, k4);
  rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

CMatrix lindblad_evolve(const CMatrix& rho0, const CMatrix& h,
                        const std::vector<CollapseOp>& collapse, double t,
                        double dt) {
  protocol::check_density_matrix(rho0, 1e-7);
  if (dt > t) throw StepTooLarge("lindblad_evolve: dt exceeds total time");
  const int n = std::max(1, static_cast<int>(std::ceil(t / dt)));
  const double h_step = t / n;
  const Eigen::Index d = rho0.rows();
  CMatrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);

  // Step-halving local error estimate on the first step.
  {
    CMatrix one = rho0;
    rk4_lindblad_step(one, h, collapse, h_step, k1, k2, k3, k4, tmp);
    CMatrix two = rho0;
    rk4_lindblad_step(two, h, collapse, 0.5 * h_step, k1, k2, k3, k4, tmp);
    rk4_lindblad_step(two, h, collapse, 0.5 * h_step, k1, k2, k3, k4, tmp);
    const double err = (one - two).cwiseAbs().maxCoeff() / 15.0;
    if (err > 1e-6)
      throw StepTooLarge("lindblad_evolve: local truncation error above 1e-6");
  }

  CMatrix rho = rho0;
  for (int s = 0; s < n; ++s)
    rk4_lindblad_step(rho, h, collapse, h_step, k1, k2, k3, k4, tmp);
  return rho;
}

std::vector<double> ou_trajectory(double sigma, double tc, double duration,
                                  double dt, std::uint64_t seed) {
  if (dt >= tc / 5.0)
    throw StepTooLarge("ou_trajectory: dt must be below tc/5");
  const int n = static_cast<int>(std::ceil(duration / dt));
  std::vector<double> k(n + 1, 0.0);
  if (sigma == 0.0) return k;
  rng::Prng prng(seed);
  const double decay = std::exp(-dt / tc);
  const double kick = sigma * std::sqrt(1.0 - decay * decay);
  k[0] = sigma * prng.normal();  // stationary initial condition
  for (int i = 1; i <= n; ++i) k[i] = k[i - 1] * decay + kick * prng.normal();
  return k;
}

CMatrix dephasing_basis() {
  CMatrix b = CMatrix::Zero(4, 4);
  const double s = 1.0 / std::sqrt(2.0);
  b(0, 0) = 1.0;                       // |00>
  b(0b10, 1) = s; b(0b01, 1) = s;      // |psi+>
  b(0b10, 2) = s; b(0b01, 2) = -s;     // |psi->
  b(0b11, 3) = 1.0;                    // |11>
  return b;
}

CMatrix h1_in_dressed_basis(double k2, double k3) {
  SubsystemShape shape{2, 2};
  const CMatrix n1 = (CMatrix(2, 2) << 0, 0, 0, 1).finished();
  const CMatrix h1 = k2 * embed(n1, shape, 0) + k3 * embed(n1, shape, 1);
  const CMatrix b = dephasing_basis();
  return b.adjoint() * h1 * b;
}

std::pair<double, double> accumulated_dephasing_phases(
    const std::vector<double>& k2, const std::vector<double>& k3, double lambda,
    double dt) {
  if (k2.size() != k3.size() || k2.size() < 2)
    throw ShapeMismatch("accumulated_dephasing_phases: series mismatch");
  double phi = 0.0, phi_prime = 0.0;
  auto f = [&](size_t i) {
    const double s = k2[i] + k3[i];
    return -0.5 * s * (1.0 - s / lambda);
  };
  auto fp = [&](size_t i) { return -(k2[i] + k3[i]); };
  for (size_t i = 0; i + 1 < k2.size(); ++i) {
    phi += 0.5 * dt * (f(i) + f(i + 1));
    phi_prime += 0.5 * dt * (fp(i) + fp(i + 1));
  }
  return {phi, phi_prime};
}

double gap_protection_leakage(double k2, double k3, double lambda, double t) {
  const CMatrix b = dephasing_basis();
  const CMatrix h0d =
      b.adjoint() * model::effective_two_qubit_hamiltonian(lambda) * b;
  const CMatrix h = h0d + h1_in_dressed_basis(k2, k3);
  // dressed basis order: {|00>, psi+, psi-, |11>}
  CVector psi0 = CVector::Zero(4);
  psi0[1] = 1.0;
  const int samples = 2000;
  double max_leak = 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CVector w = es.eigenvalues().cast<Complex>();
  const CVector c0 = es.eigenvectors().adjoint() * psi0;
  for (int s = 1; s <= samples; ++s) {
    const double ts = t * s / samples;
    CVector c(4);
    for (int k = 0; k < 4; ++k)
      c[k] = c0[k] * std::exp(Complex(0.0, -w[k].real() * ts));
    const CVector psi = es.eigenvectors() * c;
    max_leak = std::max(max_leak, std::norm(psi[2]));
  }
  return max_leak;
}

namespace {

struct TwoQubitNoiseRun {
  double pop = 0.0;
  Complex coh = 0.0;
};

TwoQubitNoiseRun two_qubit_dephasing_avg(double sigma, double tc, double lambda,
                                         double duration, int trajectories,
                                         std::uint64_t seed, double dt,
                                         const CVector& psi0, bool coupling_on,
                                         std::uint64_t stream_offset) {
  const CMatrix b = dephasing_basis();
  const CMatrix h0 =
      coupling_on ? CMatrix(b.adjoint() *
                            model::effective_two_qubit_hamiltonian(lambda) * b)
                  : CMatrix(CMatrix::Zero(4, 4));
  TwoQubitNoiseRun acc;
  const int n = static_cast<int>(std::ceil(duration / dt));
  const double h = duration / n;
  const Complex mi(0.0, -1.0);
  for (int traj = 0; traj < trajectories; ++traj) {
    const auto k2 = ou_trajectory(sigma, tc, duration, h,
                                  rng::derive_seed(seed, 2 * traj + stream_offset));
    const auto k3 = ou_trajectory(sigma, tc, duration, h,
                                  rng::derive_seed(seed, 2 * traj + 1 + stream_offset));
    CVector psi = psi0;
    for (int s = 0; s < n; ++s) {
      auto hmat = [&](double k2v, double k3v) {
        return CMatrix(h0 + h1_in_dressed_basis(k2v, k3v));
      };
      const CMatrix ha = hmat(k2[s], k3[s]);
      const CMatrix hm = hmat(0.5 * (k2[s] + k2[s + 1]), 0.5 * (k3[s] + k3[s + 1]));
      const CMatrix hb = hmat(k2[s + 1], k3[s + 1]);
      const CVector q1 = mi * (ha * psi);
      const CVector q2 = mi * (hm * (psi + 0.5 * h * q1));
      const CVector q3 = mi * (hm * (psi + 0.5 * h * q2));
      const CVector q4 = mi * (hb * (psi + h * q3));
      psi += (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
    }
    acc.pop += std::norm(psi[1]);
    acc.coh += psi[1] * std::conj(psi[0]);
  }
  acc.pop /= trajectories;
  acc.coh /= static_cast<double>(trajectories);
  return acc;
}

}  // namespace

DecouplingPoint decoupling_point(double sigma, double tc, double lambda,
                                 double duration, int trajectories,
                                 std::uint64_t seed, double dt,
                                 bool paired_noise) {
  CVector pure = CVector::Zero(4);
  pure[1] = 1.0;  // |psi+>
  CVector super = CVector::Zero(4);
  super[0] = super[1] = 1.0 / std::sqrt(2.0);

  const std::uint64_t off_on = 0;
  const std::uint64_t off_off = paired_noise ? 0 : 1000003;

  DecouplingPoint out;
  out.pop_on = two_qubit_dephasing_avg(sigma, tc, lambda, duration, trajectories,
                                       seed, dt, pure, true, off_on)
                   .pop;
  out.pop_off = two_qubit_dephasing_avg(sigma, tc, lambda, duration, trajectories,
                                        seed, dt, pure, false, off_off)
                    .pop;
  // coherence retention relative to the initial value 1/2
  out.coh_on = 2.0 * std::abs(two_qubit_dephasing_avg(sigma, tc, lambda, duration,
                                                      trajectories, seed, dt,
                                                      super, true, off_on)
                                  .coh);
  out.coh_off = 2.0 * std::abs(two_qubit_dephasing_avg(sigma, tc, lambda, duration,
                                                       trajectories, seed, dt,
                                                       super, false, off_off)
                                   .coh);
  return out;
}

namespace {

struct NoisyStage {
  double duration = 0.0;
  CMatrix h0;                       // 8x8 coherent part
  std::array<bool, 3> at_work{};    // selects idle vs working rates
  CMatrix gate_after;               // applied instantaneously at the stage end
};

std::vector<NoisyStage> noisy_timeline(const protocol::InputState& in,
                                       const protocol::ProtocolParams& p) {
  const SubsystemShape s3{2, 2, 2};
  const CMatrix id8 = CMatrix::Identity(8, 8);
  const CMatrix he2_23 =
      numkit::kron(numkit::identity(2), model::effective_two_qubit_hamiltonian(p.lambda));
  std::vector<NoisyStage> st;
  st.push_back({40.0, CMatrix::Zero(8, 8), {false, false, false},
                embed(protocol::pauli_x_gate(), s3, 2)});
  st.push_back({kPi / (4.0 * p.lambda), he2_23, {false, true, true},
                embed(protocol::z_phase(kPi / 2.0 + p.theta_d), s3, 2)});
  st.push_back({30.0, CMatrix::Zero(8, 8), {false, false, false},
                embed(protocol::prep_rotation(in), s3, 0)});
  st.push_back({p.tau, model::effective_three_qubit_hamiltonian(p.lambda),
                {true, true, true}, id8});
  st.push_back({p.tau_prime, he2_23, {false, true, true}, id8});
  return st;
}

}  // namespace

CMatrix run_noisy_uqcm(const protocol::InputState& in,
                       const protocol::ProtocolParams& params,
                       const NoiseModel& nm) {
  in.validate();
  nm.validate();
  const SubsystemShape s3{2, 2, 2};
  const auto stages = noisy_timeline(in, params);
  double total = 0.0;
  for (const auto& st : stages) total += st.duration;

  std::array<CMatrix, 3> n1ops, smops, szops;
  for (int q = 0; q < 3; ++q) {
    n1ops[q] = embed((CMatrix(2, 2) << 0, 0, 0, 1).finished(), s3, q);
    smops[q] = embed(numkit::sigma_minus(), s3, q);
    szops[q] = embed(numkit::sigma_z(), s3, q);
  }

  const double dt = nm.dt_ns;
  const bool markovian = nm.mode == DephasingMode::Markovian;
  CMatrix rho_sum = CMatrix::Zero(8, 8);
  const int ntraj = markovian ? 1 : nm.trajectories;

  CMatrix k1(8, 8), k2m(8, 8), k3m(8, 8), k4(8, 8), tmp(8, 8);

  for (int traj = 0; traj < ntraj; ++traj) {
    // unit-variance OU paths per qubit, scaled per stage by sigma(point)
    std::array<std::vector<double>, 3> x;
    int total_steps = 0;
    for (const auto& st : stages)
      total_steps += static_cast<int>(std::ceil(st.duration / dt));
    if (!markovian) {
      for (int q = 0; q < 3; ++q)
        x[q] = ou_trajectory(1.0, nm.tc_ns, total_steps * dt, dt,
                             rng::derive_seed(rng::derive_seed(nm.seed, traj), q));
    }

    CMatrix rho = CMatrix::Zero(8, 8);
    rho(0, 0) = 1.0;
    int grid = 0;
    for (const auto& st : stages) {
      const int n = static_cast<int>(std::ceil(st.duration / dt));
      const double h = st.duration / n;
      std::vector<CollapseOp> collapse;
      for (int q = 0; q < 3; ++q) {
        const auto& nq = nm.qubit[q];
        collapse.push_back({smops[q], st.at_work[q] ? nq.gamma1_work : nq.gamma1_idle});
        if (markovian) {
          const double gp = st.at_work[q] ? nq.gamma_phi_work : nq.gamma_phi_idle;
          collapse.push_back({szops[q], 0.5 * gp});
        }
      }
      for (int s = 0; s < n; ++s) {
        CMatrix hmat = st.h0;
        if (!markovian) {
          for (int q = 0; q < 3; ++q) {
            const auto& nq = nm.qubit[q];
            const double sig = st.at_work[q] ? nq.sigma_work : nq.sigma_idle;
            const double kv = sig * 0.5 * (x[q][grid + s] + x[q][grid + s + 1]);
            if (kv != 0.0) hmat += kv * n1ops[q];
          }
        }
        rk4_lindblad_step(rho, hmat, collapse, h, k1, k2m, k3m, k4, tmp);
      }
      grid += n;
      if (!st.gate_after.isIdentity(1e-15))
        rho = st.gate_after * rho * st.gate_after.adjoint();
    }
    rho_sum += rho;
  }
  CMatrix mean = rho_sum / static_cast<double>(ntraj);
  // guard hermiticity against accumulated roundoff
  mean = 0.5 * (mean + CMatrix(mean.adjoint()));
  return mean;
}

}  // namespace uqcm::noise
