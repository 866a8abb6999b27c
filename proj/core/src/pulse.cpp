#include "uqcm/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "uqcm/errors.hpp"
#include "uqcm/numkit.hpp"

namespace uqcm::pulse {

using numkit::SubsystemShape;

namespace {

constexpr double kTXpi = 40.0;
constexpr double kTComp = 30.0;
constexpr double kPrepDrive = 40.0;

double wrap_angle(double x) {
  x = std::fmod(x + kPi, kTwoPi);
  if (x < 0) x += kTwoPi;
  return x - kPi;
}

double raised_cosine(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * x));
}

struct FreqPath {
  double base = 0.0;
  double ramp = 10.0;
  std::vector<std::pair<double, double>> switches;  // (start time, target)

  FreqPath& to(double t, double f) {
    switches.emplace_back(t, f);
    return *this;
  }
  double operator()(double t) const {
    double f = base;
    for (const auto& [ts, ft] : switches) f += (ft - f) * raised_cosine((t - ts) / ramp);
    return f;
  }
  bool constant_on(double a, double b) const {
    for (const auto& [ts, ft] : switches)
      if (ts < b && ts + ramp > a) return false;
    return true;
  }
};

struct Drive {
  int qubit = 0;
  double omega_rabi = 0.0;  // rad/ns
  double carrier = 0.0;     // rad/ns, relative to the frame
  double axis = 0.0;
  double t_ref = 0.0;       // carrier phase reference (drive end)
  double t_on = 0.0;
  double t_off = 0.0;
};

/// A schedule compiled against a device: per-qubit frequency paths, drive
/// windows and the step/stage time marks.
struct Realized {
  const model::DeviceParams* dev = nullptr;
  bool crosstalk = false;
  int fock = 3;
  double frame = 0.0;
  std::array<FreqPath, 3> path;
  std::vector<Drive> drives;
  std::vector<double> step_end;
  std::vector<std::string> step_label;
  double t_end = 0.0;
  double prep_end = 0.0;

  bool drive_on(double a, double b) const {
    for (const auto& d : drives)
      if (d.t_on < b && d.t_off > a) return true;
    return false;
  }
  bool constant_on(double a, double b) const {
    if (drive_on(a, b)) return false;
    for (const auto& p : path)
      if (!p.constant_on(a, b)) return false;
    return true;
  }
};

double dressed_idle_carrier(const model::DeviceParams& dev, int q, double frame) {
  const double wq = dev.qubit[q].omega_idle;
  const double g = dev.qubit[q].g;
  return (wq - frame) + g * g / (wq - dev.omega_resonator);
}

Realized realize(const PulseSchedule& sched, const model::DeviceParams& dev,
                 bool crosstalk, int fock, const protocol::InputState* input) {
  sched.validate();
  Realized r;
  r.dev = &dev;
  r.crosstalk = crosstalk;
  r.fock = fock;
  r.frame = dev.omega_working;
  for (int q = 0; q < 3; ++q) {
    r.path[q].base = dev.qubit[q].omega_idle;
    r.path[q].ramp = sched.ramp_ns;
  }
  double t = 0.0;
  std::array<double, 3> current{dev.qubit[0].omega_idle, dev.qubit[1].omega_idle,
                                dev.qubit[2].omega_idle};
  for (size_t k = 0; k < sched.steps.size(); ++k) {
    const Step& st = sched.steps[k];
    for (int q = 0; q < 3; ++q) {
      if (std::abs(st.setpoint[q] - current[q]) > 1e-12) {
        r.path[q].to(t, st.setpoint[q]);
        current[q] = st.setpoint[q];
      }
    }
    if (st.xy) {
      const XYPulse& xy = *st.xy;
      const double end = t + st.duration;
      Drive d;
      d.qubit = xy.qubit;
      d.omega_rabi = xy.angle / xy.duration;
      d.carrier = dressed_idle_carrier(dev, xy.qubit, r.frame);
      d.axis = xy.axis_angle;
      d.t_ref = end;
      d.t_on = end - xy.duration;  // may start inside the previous step
      d.t_off = end;
      if (d.omega_rabi > 1e-14) r.drives.push_back(d);
    }
    t += st.duration;
    r.step_end.push_back(t);
    r.step_label.push_back(st.label);
    if (static_cast<int>(k) + 1 == sched.clone_begin) r.prep_end = t;
  }
  // Input-state preparation on Q1: drive window ending at the cloning stage.
  if (input != nullptr) {
    const double theta =
        2.0 * std::acos(std::clamp(std::abs(input->alpha), 0.0, 1.0));
    if (theta > 1e-14) {
      const double arg_a = std::abs(input->alpha) > 0 ? std::arg(input->alpha) : 0.0;
      const double arg_b = std::abs(input->beta) > 0 ? std::arg(input->beta) : 0.0;
      Drive d;
      d.qubit = 0;
      d.omega_rabi = theta / kPrepDrive;
      d.carrier = dressed_idle_carrier(dev, 0, r.frame);
      d.axis = arg_b - arg_a + kPi / 2.0;
      d.t_ref = r.prep_end;
      d.t_on = r.prep_end - kPrepDrive;
      d.t_off = r.prep_end;
      r.drives.push_back(d);
    }
  }
  // Hand-off: every qubit returns to idle after the last step.
  for (int q = 0; q < 3; ++q)
    if (std::abs(current[q] - dev.qubit[q].omega_idle) > 1e-12)
      r.path[q].to(t, dev.qubit[q].omega_idle);
  r.t_end = t + sched.ramp_ns;
  return r;
}

/// Static operator set for the full qubits ⊗ resonator space.
struct Ops {
  int fock = 3;
  int dim = 0;
  CMatrix base;  // resonator detuning + JC couplings + crosstalk
  std::array<CMatrix, 3> n1;
  std::array<CMatrix, 3> sp;
  std::array<CMatrix, 3> sm;

  explicit Ops(const Realized& r) {
    fock = r.fock;
    SubsystemShape shape{2, 2, 2, fock};
    dim = shape.dim();
    CMatrix a = CMatrix::Zero(fock, fock);
    for (int n = 1; n < fock; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const CMatrix af = numkit::embed(a, shape, 3);
    const CMatrix adf = af.adjoint();
    base = (r.dev->omega_resonator - r.frame) * (adf * af);
    for (int q = 0; q < 3; ++q) {
      sm[q] = numkit::embed(numkit::sigma_minus(), shape, q);
      sp[q] = sm[q].adjoint();
      n1[q] = numkit::embed((CMatrix(2, 2) << 0, 0, 0, 1).finished(), shape, q);
      base += r.dev->qubit[q].g * (adf * sm[q] + af * sp[q]);
    }
    if (r.crosstalk) {
      base += r.dev->qubit[0].crosstalk_next * (sp[0] * sm[1] + sp[1] * sm[0]);
      base += r.dev->qubit[1].crosstalk_next * (sp[1] * sm[2] + sp[2] * sm[1]);
    }
  }

  void hamiltonian(const Realized& r, double t, CMatrix& h) const {
    h = base;
    for (int q = 0; q < 3; ++q) {
      const double d = r.path[q](t) - r.frame;
      if (d != 0.0) h += d * n1[q];
    }
    for (const auto& dr : r.drives) {
      if (t < dr.t_on || t >= dr.t_off) continue;
      const Complex z = 0.5 * dr.omega_rabi *
                        std::exp(Complex(0.0, dr.axis - dr.carrier * (t - dr.t_ref)));
      h += z * sp[dr.qubit] + std::conj(z) * sm[dr.qubit];
    }
  }
};

void rk4_segment(const Realized& r, const Ops& ops, CVector& psi, double t0,
                 double t1, double dt) {
  const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt)));
  const double h = (t1 - t0) / n;
  CMatrix ha(ops.dim, ops.dim), hb(ops.dim, ops.dim), hc(ops.dim, ops.dim);
  CVector k1(ops.dim), k2(ops.dim), k3(ops.dim), k4(ops.dim);
  double t = t0;
  const Complex mi(0.0, -1.0);
  for (int s = 0; s < n; ++s) {
    ops.hamiltonian(r, t, ha);
    ops.hamiltonian(r, t + 0.5 * h, hb);
    ops.hamiltonian(r, t + h, hc);
    k1 = mi * (ha * psi);
    k2 = mi * (hb * (psi + 0.5 * h * k1));
    k3 = mi * (hb * (psi + 0.5 * h * k2));
    k4 = mi * (hc * (psi + h * k3));
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
}

void expm_segment(const Realized& r, const Ops& ops, CVector& psi, double t0,
                  double t1) {
  CMatrix h(ops.dim, ops.dim);
  ops.hamiltonian(r, 0.5 * (t0 + t1), h);
  psi = numkit::expm_scaled(h, t1 - t0) * psi;
}

/// Evolve psi through [0, r.t_end], sampling P(n_ph >= 1) at requested times.
void evolve(const Realized& r, const Ops& ops, CVector& psi,
            const std::vector<double>& sample_at, std::vector<double>* leak_out,
            double dt) {
  std::vector<double> bps{0.0, r.t_end};
  for (const auto& p : r.path)
    for (const auto& [ts, ft] : p.switches) {
      if (ts > 0 && ts < r.t_end) bps.push_back(ts);
      if (ts + p.ramp > 0 && ts + p.ramp < r.t_end) bps.push_back(ts + p.ramp);
    }
  for (const auto& d : r.drives) {
    if (d.t_on > 0 && d.t_on < r.t_end) bps.push_back(d.t_on);
    if (d.t_off > 0 && d.t_off < r.t_end) bps.push_back(d.t_off);
  }
  for (double s : sample_at)
    if (s > 0 && s <= r.t_end) bps.push_back(s);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-9; }),
            bps.end());

  auto leak = [&](const CVector& v) {
    double p0 = 0.0;
    for (int i = 0; i < ops.dim; i += r.fock) p0 += std::norm(v[i]);
    return 1.0 - p0;
  };

  if (leak_out) leak_out->assign(sample_at.size(), 0.0);
  for (size_t i = 0; i + 1 < bps.size(); ++i) {
    const double a = bps[i], b = bps[i + 1];
    if (b - a < 1e-9) continue;
    if (r.constant_on(a, b))
      expm_segment(r, ops, psi, a, b);
    else
      rk4_segment(r, ops, psi, a, b, dt);
    if (leak_out) {
      for (size_t s = 0; s < sample_at.size(); ++s)
        if (std::abs(b - sample_at[s]) < 1e-9) (*leak_out)[s] = leak(psi);
    }
  }
}

// ----- calibration on the (0..2)-excitation sectors ------------------------

struct Chain {
  std::vector<int> idx;      // full-space indices, excitation <= 2
  std::vector<int> pos;      // full index -> chain position (-1 outside)
  int i100, i010, i001, i011, i110, i101, ivac, iph1;
  CMatrix base;
  std::array<CMatrix, 3> n1;
  std::array<CMatrix, 3> sp;
  std::array<CMatrix, 3> sm;

  Chain(const Realized& r, const Ops& ops) {
    const int fock = r.fock;
    pos.assign(ops.dim, -1);
    for (int i = 0; i < ops.dim; ++i) {
      const int ph = i % fock;
      const int q = i / fock;
      const int exc = __builtin_popcount(static_cast<unsigned>(q)) + ph;
      if (exc <= 2) {
        pos[i] = static_cast<int>(idx.size());
        idx.push_back(i);
      }
    }
    auto at = [&](int q1, int q2, int q3, int ph) {
      return pos[((q1 * 2 + q2) * 2 + q3) * fock + ph];
    };
    i100 = at(1, 0, 0, 0); i010 = at(0, 1, 0, 0); i001 = at(0, 0, 1, 0);
    i011 = at(0, 1, 1, 0); i110 = at(1, 1, 0, 0); i101 = at(1, 0, 1, 0);
    ivac = at(0, 0, 0, 0); iph1 = at(0, 0, 0, 1);
    const int n = static_cast<int>(idx.size());
    auto slice = [&](const CMatrix& m) {
      CMatrix out(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = m(idx[i], idx[j]);
      return out;
    };
    base = slice(ops.base);
    for (int q = 0; q < 3; ++q) {
      n1[q] = slice(ops.n1[q]);
      sp[q] = slice(ops.sp[q]);
      sm[q] = slice(ops.sm[q]);
    }
  }

  void hamiltonian(const Realized& r, double t, CMatrix& h) const {
    h = base;
    for (int q = 0; q < 3; ++q) {
      const double d = r.path[q](t) - r.frame;
      if (d != 0.0) h += d * n1[q];
    }
    for (const auto& dr : r.drives) {
      if (t < dr.t_on || t >= dr.t_off) continue;
      const Complex z = 0.5 * dr.omega_rabi *
                        std::exp(Complex(0.0, dr.axis - dr.carrier * (t - dr.t_ref)));
      h += z * sp[dr.qubit] + std::conj(z) * sm[dr.qubit];
    }
  }

  CVector run(const Realized& r, double t1, double dt = 0.02) const {
    const int n = static_cast<int>(idx.size());
    CVector v = CVector::Zero(n);
    v[ivac] = 1.0;
    rk4(r, v, 0.0, t1, dt);
    return v;
  }

  void rk4(const Realized& r, CVector& v, double t0, double t1, double dt) const {
    const int n = static_cast<int>(idx.size());
    const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt)));
    const double h = (t1 - t0) / steps;
    CMatrix ha(n, n), hb(n, n), hc(n, n);
    CVector k1(n), k2(n), k3(n), k4(n);
    double t = t0;
    const Complex mi(0.0, -1.0);
    for (int s = 0; s < steps; ++s) {
      hamiltonian(r, t, ha);
      hamiltonian(r, t + 0.5 * h, hb);
      hamiltonian(r, t + h, hc);
      k1 = mi * (ha * v);
      k2 = mi * (hb * (v + 0.5 * h * k1));
      k3 = mi * (hb * (v + 0.5 * h * k2));
      k4 = mi * (hc * (v + h * k3));
      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
    }
  }
};

struct CalibState {
  double tB, tD, tE, fc;
  const model::DeviceParams* dev;
  bool crosstalk;
  int fock;
  double ramp;
};

PulseSchedule assemble(const CalibState& c) {
  const auto& dev = *c.dev;
  PulseSchedule s;
  s.ramp_ns = c.ramp;
  const std::array<double, 3> idle{dev.qubit[0].omega_idle, dev.qubit[1].omega_idle,
                                   dev.qubit[2].omega_idle};
  const double w = dev.omega_working;
  s.steps = {
      {"x_pi_q3", kTXpi, idle, XYPulse{2, kPi / 2.0, kPi, kTXpi}},
      {"sqrt_iswap", c.tB, {idle[0], w, w}, std::nullopt},
      {"phase_comp", kTComp, {idle[0], idle[1], c.fc}, std::nullopt},
      {"c123", c.tD, {w, w, w}, std::nullopt},
      {"c23", c.tE, {idle[0], w, w}, std::nullopt},
  };
  s.clone_begin = 3;
  return s;
}

struct ChainEval {
  CVector va;  // input |0_1> chain amplitudes at t_end
  CVector vb;  // input |1_1>
};

class Calibrator {
 public:
  Calibrator(const model::DeviceParams& dev, bool crosstalk, int fock, double ramp)
      : dev_(dev), ct_(crosstalk), fock_(fock), ramp_(ramp) {
    const double delta = dev.detuning();
    const double g2 = dev.qubit[1].g, g3 = dev.qubit[2].g;
    const double lct = crosstalk ? dev.qubit[1].crosstalk_next : 0.0;
    lam23_ = 0.25 * (std::sqrt(delta * delta + 4.0 * (g2 * g2 + g3 * g3)) - delta) - lct;
    double gm = (dev.qubit[0].g + g2 + g3) / 3.0;
    lamD_ = (std::sqrt(delta * delta + 12.0 * gm * gm) - delta) / 6.0;
    st_ = {kPi / (4.0 * lam23_) + 3.0, kTwoPi / (9.0 * lamD_) + 10.0,
           kPi / (3.0 * lam23_) + 8.0, dev.qubit[2].omega_idle, &dev_, ct_, fock_, ramp_};
  }

  PulseSchedule solve() {
    for (int outer = 0; outer < 4; ++outer) {
      solve_tB();
      solve_chi();
      solve_fc();
      solve_tD();
      solve_tE();
    }
    PulseSchedule s = assemble(st_);
    attach_corrections(s);
    return s;
  }

 private:
  Realized make(const CalibState& c, double alpha, double beta) const {
    protocol::InputState in{alpha, beta};
    return realize(assemble(c), dev_, ct_, fock_, &in);
  }

  // chain amplitudes at time T for the alpha=1 reference (no Q1 drive)
  CVector runA(const CalibState& c, double T = -1.0) const {
    Realized r = make(c, 1.0, 0.0);
    Ops ops(r);
    Chain ch(r, ops);
    chain_ = std::make_shared<Chain>(ch);
    return ch.run(r, T < 0 ? r.t_end : T);
  }
  CVector runB(const CalibState& c) const {
    Realized r = make(c, 0.0, 1.0);
    Ops ops(r);
    Chain ch(r, ops);
    return ch.run(r, r.t_end);
  }

  double prep_end(const CalibState& c) const {
    return kTXpi + c.tB + kTComp;
  }

  void solve_tB() {
    auto bal = [&](double tb) {
      CalibState c = st_;
      c.tB = tb;
      const CVector v = runA(c, prep_end(c));
      return std::norm(v[chain_->i010]) - std::norm(v[chain_->i001]);
    };
    const double t0 = kPi / (4.0 * lam23_);
    double lo = t0 - 4.0, hi = t0 + 12.0;
    while (bal(hi) > 0 && hi < t0 + 28.0) hi += 4.0;
    st_.tB = bisect(bal, lo, hi);
  }

  void solve_chi() {
    // One-excitation propagation of the cloning stages from synthetic psi±.
    Realized r = make(st_, 1.0, 0.0);
    Ops ops(r);
    Chain ch(r, ops);
    const int n = static_cast<int>(ch.idx.size());
    auto de_run = [&](const CVector& vin) {
      CVector v = vin;
      ch.rk4(r, v, prep_end(st_), r.t_end, 0.02);
      return v;
    };
    CVector vp = CVector::Zero(n), vm = CVector::Zero(n);
    vp[ch.i010] = vp[ch.i001] = 1.0 / std::sqrt(2.0);
    vm[ch.i010] = 1.0 / std::sqrt(2.0);
    vm[ch.i001] = -1.0 / std::sqrt(2.0);
    const CVector a = de_run(vp), b = de_run(vm);
    const Complex a0 = a[ch.i100], b0 = b[ch.i100];
    auto p100 = [&](double chi) {
      return std::norm(std::cos(chi / 2.0) * a0 +
                       Complex(0.0, 1.0) * std::sin(chi / 2.0) * b0);
    };
    double best = -kPi, pb = -1.0;
    for (int k = 0; k <= 720; ++k) {
      const double chi = -kPi + kTwoPi * k / 720.0;
      const double p = p100(chi);
      if (p > pb) { pb = p; best = chi; }
    }
    for (int it = 0; it < 40; ++it) {
      const double d = 1e-4;
      const double gr = (p100(best + d) - p100(best - d)) / (2 * d);
      const double hh = (p100(best + d) - 2 * p100(best) + p100(best - d)) / (d * d);
      if (hh < 0) best = wrap_angle(best - gr / hh);
    }
    chi_ = best;
  }

  void solve_fc() {
    auto pherr = [&](double fc) {
      CalibState c = st_;
      c.fc = fc;
      const CVector v = runA(c, prep_end(c));
      return wrap_angle(std::arg(v[chain_->i010]) - std::arg(v[chain_->i001]) - chi_);
    };
    double fc = st_.fc;
    for (int it = 0; it < 14; ++it) {
      const double e = pherr(fc);
      if (std::abs(e) < 1e-9) break;
      const double dfc = 2e-4;
      const double slope = wrap_angle(pherr(fc + dfc) - e) / dfc;
      if (std::abs(slope) < 1.0) break;
      fc -= std::clamp(e / slope, -0.1, 0.1);
    }
    st_.fc = fc;
  }

  void solve_tD() {
    auto ratio = [&](double td) {
      CalibState c = st_;
      c.tD = td;
      const CVector va = runA(c);
      const CVector vb = runB(c);
      const auto& ch = *chain_;
      const double qa = std::norm(va[ch.i100]) + std::norm(va[ch.i010]) +
                        std::norm(va[ch.i001]);
      const double qb = std::norm(vb[ch.i011]) + std::norm(vb[ch.i110]) +
                        std::norm(vb[ch.i101]);
      return 0.5 * (std::norm(va[ch.i100]) / qa + std::norm(vb[ch.i011]) / qb) -
             2.0 / 3.0;
    };
    // rising crossing: march up from below
    double lo = st_.tD - 10.0;
    while (ratio(lo) > 0 && lo > 15.0) lo -= 4.0;
    double hi = lo + 3.0;
    while (ratio(hi) < 0 && hi < st_.tD + 45.0) hi += 3.0;
    st_.tD = bisect(ratio, hi - 3.0, hi);
  }

  void solve_tE() {
    auto f4 = [&](double te) {
      CalibState c = st_;
      c.tE = te;
      const CVector va = runA(c);
      const CVector vb = runB(c);
      const auto& ch = *chain_;
      const double A1 = std::arg(va[ch.i010]), A2 = std::arg(va[ch.i001]),
                   A3 = std::arg(va[ch.i100]);
      const double B1 = std::arg(vb[ch.i011]), B2 = std::arg(vb[ch.i110]),
                   B3 = std::arg(vb[ch.i101]);
      const double c1 = A3 - A2 - B2 + B1;
      const double c2 = A3 - A1 - B3 + B1;
      return std::arg(std::exp(Complex(0, c1)) + std::exp(Complex(0, c2)));
    };
    const double t0 = kPi / (3.0 * lam23_) + 8.0;
    double lo = t0 - 22.0, hi = t0 + 26.0;
    double flo = f4(lo), fhi = f4(hi);
    int guard = 0;
    while (flo * fhi > 0 && guard++ < 4) {
      lo -= 12.0;
      hi += 12.0;
      if (lo < 12.0) lo = 12.0;
      flo = f4(lo);
      fhi = f4(hi);
    }
    st_.tE = bisect(f4, lo, hi);
  }

  void attach_corrections(PulseSchedule& s) const {
    const CVector va = runA(st_);
    const CVector vb = runB(st_);
    const auto& ch = *chain_;
    const double ang[6] = {std::arg(va[ch.i010]), std::arg(va[ch.i001]),
                           std::arg(va[ch.i100]), std::arg(vb[ch.i011]),
                           std::arg(vb[ch.i110]), std::arg(vb[ch.i101])};
    // model: A1=g-t2; A2=g-t3; A3=g+ph; B1=g-t2-t3; B2=g+ph-t2; B3=g+ph-t3
    Eigen::Matrix<double, 6, 4> m;
    m << -1, 0, 0, 1,
          0, -1, 0, 1,
          0, 0, 1, 1,
         -1, -1, 0, 1,
         -1, 0, 1, 1,
          0, -1, 1, 1;
    Eigen::Vector4d u = Eigen::Vector4d::Zero();
    for (int it = 0; it < 8; ++it) {
      Eigen::Matrix<double, 6, 1> res;
      for (int k = 0; k < 6; ++k) res[k] = wrap_angle(ang[k] - (m.row(k) * u)(0));
      if (res.cwiseAbs().maxCoeff() < 1e-12) break;
      u += (m.transpose() * m).ldlt().solve(m.transpose() * res);
    }
    const double th2 = u[0], th3 = u[1], phihat = u[2];
    // Split phihat = phi - theta1 using the isolated-qubit bookkeeping phase
    // for Q1 over the three-qubit coupling window.
    Realized r = make(st_, 1.0, 0.0);
    const double th1 = -single_particle_phase(r, 0, prep_end(st_),
                                              prep_end(st_) + st_.tD + ramp_);
    s.z_rotation = {th1, th2, th3};
    s.phi = phihat + th1;
  }

  double single_particle_phase(const Realized& r, int q, double t0, double t1) const {
    // phase of <1_q;0| U |1_q;0> in the isolated qubit+resonator block
    const double g = dev_.qubit[q].g;
    CVector v(2);
    v << 1.0, 0.0;
    const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / 0.02)));
    const double h = (t1 - t0) / steps;
    const Complex mi(0.0, -1.0);
    double t = t0;
    auto hmat = [&](double tt) {
      CMatrix m2(2, 2);
      m2 << r.path[q](tt) - r.frame, g, g, dev_.omega_resonator - r.frame;
      return m2;
    };
    for (int sIdx = 0; sIdx < steps; ++sIdx) {
      const CMatrix ha = hmat(t), hb = hmat(t + 0.5 * h), hc = hmat(t + h);
      const CVector k1 = mi * (ha * v);
      const CVector k2 = mi * (hb * (v + 0.5 * h * k1));
      const CVector k3 = mi * (hb * (v + 0.5 * h * k2));
      const CVector k4 = mi * (hc * (v + h * k3));
      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
    }
    return std::arg(v[0]);
  }

  template <class F>
  static double bisect(F f, double a, double b, double tol = 1e-7) {
    double fa = f(a), fb = f(b);
    if (fa * fb > 0) throw ConvergenceFailure("pulse calibration: no bracket");
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = f(mid);
      if (fa * fm <= 0) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
      if (b - a < tol) break;
    }
    return 0.5 * (a + b);
  }

  const model::DeviceParams& dev_;
  bool ct_;
  int fock_;
  double ramp_;
  double lam23_ = 0.0, lamD_ = 0.0, chi_ = 0.0;
  CalibState st_{};
  mutable std::shared_ptr<Chain> chain_;
};

}  // namespace

void PulseSchedule::validate() const {
  if (steps.empty()) throw ScheduleInvalid("schedule has no steps");
  for (const auto& st : steps) {
    if (!(st.duration > 0)) throw ScheduleInvalid("step duration must be positive");
    for (double f : st.setpoint)
      if (!(f > 0)) throw ScheduleInvalid("step setpoints must be positive");
    if (st.xy) {
      if (st.xy->qubit < 0 || st.xy->qubit > 2)
        throw ScheduleInvalid("xy pulse qubit out of range");
      if (!(st.xy->duration > 0)) throw ScheduleInvalid("xy duration must be positive");
    }
  }
  if (!(ramp_ns > 0)) throw ScheduleInvalid("ramp time must be positive");
  if (clone_begin <= 0 || clone_begin >= static_cast<int>(steps.size()))
    throw ScheduleInvalid("clone_begin out of range");
}

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : steps) t += s.duration;
  return t + ramp_ns;
}

PulseSchedule PulseSchedule::paper_sequence(const model::DeviceParams& dev) {
  PulseSchedule s;
  const std::array<double, 3> idle{dev.qubit[0].omega_idle, dev.qubit[1].omega_idle,
                                   dev.qubit[2].omega_idle};
  const double w = dev.omega_working;
  s.steps = {
      {"x_pi_q3", kTXpi, idle, XYPulse{2, kPi / 2.0, kPi, kTXpi}},
      {"sqrt_iswap", 57.7, {idle[0], w, w}, std::nullopt},
      {"phase_comp", kTComp, {idle[0], idle[1], idle[2]}, std::nullopt},
      {"c123", 40.8, {w, w, w}, std::nullopt},
      {"c23", 69.5, {idle[0], w, w}, std::nullopt},
  };
  s.clone_begin = 3;
  return s;
}

PulseSchedule calibrate_schedule(const model::DeviceParams& dev, bool crosstalk,
                                 int fock, double ramp_ns) {
  dev.validate();
  Calibrator cal(dev, crosstalk, fock, ramp_ns);
  return cal.solve();
}

PulseRun run_pulse_level(const protocol::InputState& in,
                         const PulseSchedule& schedule,
                         const model::DeviceParams& dev, bool crosstalk,
                         int fock) {
  in.validate();
  schedule.validate();
  if (fock < 2) throw ScheduleInvalid("run_pulse_level: fock must be >= 2");

  Realized r = realize(schedule, dev, crosstalk, fock, &in);
  Ops ops(r);

  std::vector<double> samples = r.step_end;
  samples.push_back(r.t_end);
  CVector psi = CVector::Zero(ops.dim);
  psi[0] = 1.0;
  std::vector<double> leaks;
  evolve(r, ops, psi, samples, &leaks, 0.01);

  PulseRun out;
  out.state = psi;
  out.shape = SubsystemShape{2, 2, 2, fock};
  out.phi = schedule.phi;
  for (size_t k = 0; k < r.step_end.size(); ++k)
    out.steps.push_back({r.step_label[k], r.step_end[k], leaks[k]});
  out.stage_boundary_excitation = {leaks[schedule.clone_begin - 1], leaks.back(),
                                   leaks.back()};

  CMatrix rho = CMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      Complex s = 0.0;
      for (int n = 0; n < fock; ++n) s += psi[i * fock + n] * std::conj(psi[j * fock + n]);
      rho(i, j) = s;
    }
  const SubsystemShape s3{2, 2, 2};
  CMatrix zall = CMatrix::Identity(8, 8);
  for (int q = 0; q < 3; ++q)
    zall = numkit::embed(protocol::z_phase(schedule.z_rotation[q]), s3, q) * zall;
  out.rho3 = zall * rho * zall.adjoint();
  return out;
}

}  // namespace uqcm::pulse
