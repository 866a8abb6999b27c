#include "uqcm/tomography.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "uqcm/errors.hpp"
#include "uqcm/numkit.hpp"
#include "uqcm/rng.hpp"

namespace uqcm::tomography {

using numkit::SubsystemShape;
using numkit::kron;

namespace {

CMatrix pre_rotation_matrix(PreRotation r) {
  switch (r) {
    case PreRotation::I:
      return numkit::identity(2);
    case PreRotation::X2:
      return numkit::expm_scaled(0.5 * kPi * numkit::sigma_x(), 0.5);
    case PreRotation::Y2:
      return numkit::expm_scaled(0.5 * kPi * numkit::sigma_y(), -0.5);
  }
  return numkit::identity(2);
}

/// Pauli measured on this axis after the pre-rotation (Z, Y, X respectively).
CMatrix measured_pauli(PreRotation r) {
  switch (r) {
    case PreRotation::I:
      return numkit::sigma_z();
    case PreRotation::X2:
      return numkit::sigma_y();
    case PreRotation::Y2:
      return numkit::sigma_x();
  }
  return numkit::sigma_z();
}

const char* rot_name(PreRotation r) {
  switch (r) {
    case PreRotation::I: return "I";
    case PreRotation::X2: return "X2";
    case PreRotation::Y2: return "Y2";
  }
  return "?";
}

}  // namespace

std::string TomographySetting::name() const {
  std::string s;
  for (size_t i = 0; i < rot.size(); ++i) {
    if (i) s += ".";
    s += rot_name(rot[i]);
  }
  return s;
}

CMatrix TomographySetting::unitary() const {
  CMatrix u = numkit::identity(1);
  for (PreRotation r : rot) u = kron(u, pre_rotation_matrix(r));
  return u;
}

std::vector<TomographySetting> all_settings(int n_qubits) {
  const PreRotation basis[3] = {PreRotation::I, PreRotation::X2, PreRotation::Y2};
  std::vector<TomographySetting> out;
  int total = 1;
  for (int i = 0; i < n_qubits; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    TomographySetting s;
    int c = code;
    for (int q = 0; q < n_qubits; ++q) {
      s.rot.insert(s.rot.begin(), basis[c % 3]);
      c /= 3;
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::vector<double> bitstring_probabilities(const CMatrix& rho,
                                            const TomographySetting& setting) {
  const CMatrix u = setting.unitary();
  const CMatrix rotated = u * rho * u.adjoint();
  std::vector<double> p(rho.rows());
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    p[i] = std::max(0.0, rotated(i, i).real());
  double s = 0.0;
  for (double v : p) s += v;
  for (double& v : p) v /= s;
  return p;
}

std::vector<double> apply_confusion(const std::vector<double>& p,
                                    const ReadoutErrors& ro) {
  const int nq = static_cast<int>(ro.f0.size());
  std::vector<double> cur = p;
  for (int q = 0; q < nq; ++q) {
    // bit q counts from the most significant side
    const int stride = 1 << (nq - 1 - q);
    std::vector<double> next(cur.size());
    for (size_t i = 0; i < cur.size(); ++i) {
      const bool bit = (i / stride) % 2;
      const size_t flip = bit ? i - stride : i + stride;
      // reported распределение: rows of [[F0, 1-F1],[1-F0, F1]]
      if (!bit)
        next[i] = ro.f0[q] * cur[i] + (1.0 - ro.f1[q]) * cur[flip];
      else
        next[i] = ro.f1[q] * cur[i] + (1.0 - ro.f0[q]) * cur[flip];
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

MeasurementRecord simulate_counts(const CMatrix& rho,
                                  const TomographySetting& setting, int shots,
                                  const ReadoutErrors& ro, std::uint64_t seed) {
  protocol::check_density_matrix(rho, 1e-6);
  if (shots < 1) throw ConfigInvalid("simulate_counts: shots must be >= 1");
  const int nq = static_cast<int>(setting.rot.size());
  if ((1 << nq) != rho.rows())
    throw ShapeMismatch("simulate_counts: setting does not match state size");
  if (ro.f0.size() != setting.rot.size() || ro.f1.size() != setting.rot.size())
    throw ShapeMismatch("simulate_counts: readout errors per qubit required");

  std::vector<double> p = apply_confusion(bitstring_probabilities(rho, setting), ro);
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  MeasurementRecord rec;
  rec.setting = setting;
  rec.shots = shots;
  rec.seed = seed;
  rec.counts.assign(p.size(), 0);
  rng::Prng prng(seed);
  for (int s = 0; s < shots; ++s) {
    const double u = prng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    rec.counts[std::distance(cdf.begin(), it)]++;
  }
  return rec;
}

std::vector<double> readout_correct(const std::vector<double>& probs,
                                    const ReadoutErrors& ro, double* clipped) {
  const int nq = static_cast<int>(ro.f0.size());
  if (probs.size() != static_cast<size_t>(1) << nq)
    throw ShapeMismatch("readout_correct: probability vector size mismatch");
  std::vector<double> cur = probs;
  for (int q = 0; q < nq; ++q) {
    const double det = ro.f0[q] + ro.f1[q] - 1.0;
    if (det <= 1e-12)
      throw SingularConfusion("readout_correct: confusion matrix not invertible");
    // inverse of [[F0, 1-F1],[1-F0, F1]]
    const double i00 = ro.f1[q] / det, i01 = (ro.f1[q] - 1.0) / det;
    const double i10 = (ro.f0[q] - 1.0) / det, i11 = ro.f0[q] / det;
    const int stride = 1 << (nq - 1 - q);
    std::vector<double> next(cur.size());
    for (size_t i = 0; i < cur.size(); ++i) {
      const bool bit = (i / stride) % 2;
      const size_t flip = bit ? i - stride : i + stride;
      if (!bit)
        next[i] = i00 * cur[i] + i01 * cur[flip];
      else
        next[i] = i11 * cur[i] + i10 * cur[flip];
    }
    cur = std::move(next);
  }
  double clip = 0.0, total = 0.0;
  for (double& v : cur) {
    if (v < 0) {
      clip -= v;
      v = 0;
    }
    total += v;
  }
  if (total > 0)
    for (double& v : cur) v /= total;
  if (clipped) *clipped = clip;
  return cur;
}

namespace {

/// <P_1 ⊗ ... ⊗ P_n> from one setting's probabilities: sum over bitstrings of
/// the parity restricted to the non-identity slots.
double pauli_expectation(const std::vector<double>& p, int n_qubits,
                         const std::vector<bool>& active) {
  double e = 0.0;
  for (size_t b = 0; b < p.size(); ++b) {
    int parity = 0;
    for (int q = 0; q < n_qubits; ++q) {
      if (!active[q]) continue;
      parity ^= static_cast<int>((b >> (n_qubits - 1 - q)) & 1u);
    }
    e += (parity ? -1.0 : 1.0) * p[b];
  }
  return e;
}

CMatrix linear_inversion(
    int n_qubits,
    const std::function<std::vector<double>(const TomographySetting&)>& probs_of) {
  const auto settings = all_settings(n_qubits);
  const int dim = 1 << n_qubits;
  // accumulate <S> for every Pauli string S, averaged over compatible settings
  const int n_strings = 1;
  int total_strings = 1;
  for (int q = 0; q < n_qubits; ++q) total_strings *= 4;
  (void)n_strings;
  std::vector<double> expect(total_strings, 0.0);
  std::vector<int> hits(total_strings, 0);

  std::vector<std::vector<double>> setting_probs;
  setting_probs.reserve(settings.size());
  for (const auto& s : settings) setting_probs.push_back(probs_of(s));

  auto pauli_code = [&](const TomographySetting& s, const std::vector<bool>& act) {
    // 0 = I, 1 = X, 2 = Y, 3 = Z per qubit, most significant first
    int code = 0;
    for (int q = 0; q < n_qubits; ++q) {
      int pq = 0;
      if (act[q]) {
        switch (s.rot[q]) {
          case PreRotation::I: pq = 3; break;   // Z
          case PreRotation::X2: pq = 2; break;  // Y
          case PreRotation::Y2: pq = 1; break;  // X
        }
      }
      code = code * 4 + pq;
    }
    return code;
  };

  for (size_t si = 0; si < settings.size(); ++si) {
    for (int mask = 0; mask < (1 << n_qubits); ++mask) {
      std::vector<bool> act(n_qubits);
      for (int q = 0; q < n_qubits; ++q) act[q] = (mask >> (n_qubits - 1 - q)) & 1;
      const int code = pauli_code(settings[si], act);
      expect[code] += pauli_expectation(setting_probs[si], n_qubits, act);
      hits[code]++;
    }
  }
  for (int c = 0; c < total_strings; ++c)
    if (hits[c]) expect[c] /= hits[c];

  const CMatrix paulis[4] = {numkit::identity(2), numkit::sigma_x(),
                             numkit::sigma_y(), numkit::sigma_z()};
  CMatrix rho = CMatrix::Zero(dim, dim);
  for (int code = 0; code < total_strings; ++code) {
    CMatrix op = numkit::identity(1);
    int c = code;
    std::vector<int> digits(n_qubits);
    for (int q = n_qubits - 1; q >= 0; --q) {
      digits[q] = c % 4;
      c /= 4;
    }
    for (int q = 0; q < n_qubits; ++q) op = kron(op, paulis[digits[q]]);
    rho += expect[code] * op;
  }
  return rho / static_cast<double>(dim);
}

/// Nearest (Frobenius) positive semidefinite unit-trace matrix: eigenvalue
/// water-filling on the hermitized input.
CMatrix project_physical(const CMatrix& rho) {
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  RVector w = es.eigenvalues();
  const int n = static_cast<int>(w.size());
  std::vector<double> mu(w.data(), w.data() + n);
  std::sort(mu.begin(), mu.end(), std::greater<double>());
  double acc = 0.0;
  int kept = n;
  for (int k = 0; k < n; ++k) {
    acc += mu[k];
    const double level = (acc - 1.0) / (k + 1);
    if (k + 1 < n && mu[k + 1] > level) continue;
    if (mu[k] - level < 0) {
      kept = k;
      break;
    }
    kept = k + 1;
  }
  double shift = 0.0;
  {
    double acc2 = 0.0;
    for (int k = 0; k < kept; ++k) acc2 += mu[k];
    shift = (acc2 - 1.0) / kept;
  }
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (int k = 0; k < n; ++k) {
    const double ev = std::max(0.0, es.eigenvalues()[k] - shift);
    if (ev > 0)
      out += ev * es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  }
  return out;
}

}  // namespace

Reconstruction reconstruct_state(const std::vector<MeasurementRecord>& records,
                                 int n_qubits) {
  if (n_qubits != 1 && n_qubits != 2)
    throw IncompleteSettings("reconstruct_state: supports 1 or 2 qubits");
  const auto settings = all_settings(n_qubits);
  if (records.size() != settings.size())
    throw IncompleteSettings("reconstruct_state: need all I/X2/Y2 settings");

  auto find_probs = [&](const TomographySetting& s) {
    for (const auto& r : records) {
      if (r.setting.name() == s.name()) {
        std::vector<double> p(r.counts.size());
        for (size_t i = 0; i < p.size(); ++i)
          p[i] = static_cast<double>(r.counts[i]) / r.shots;
        return p;
      }
    }
    throw IncompleteSettings("reconstruct_state: missing setting " + s.name());
  };
  Reconstruction rec;
  rec.raw = linear_inversion(n_qubits, find_probs);
  rec.projected = project_physical(rec.raw);
  return rec;
}

Reconstruction reconstruct_state_exact(const CMatrix& rho, int n_qubits) {
  auto probs_of = [&](const TomographySetting& s) {
    return bitstring_probabilities(rho, s);
  };
  Reconstruction rec;
  rec.raw = linear_inversion(n_qubits, probs_of);
  rec.projected = project_physical(rec.raw);
  return rec;
}

ChiMatrix process_tomography(
    const std::vector<std::pair<CMatrix, CMatrix>>& in_out_pairs) {
  if (in_out_pairs.size() < 4)
    throw RankDeficient("process_tomography: need at least 4 probe states");
  const CMatrix paulis[4] = {numkit::identity(2), numkit::sigma_x(),
                             numkit::sigma_y(), numkit::sigma_z()};
  const int rows = static_cast<int>(in_out_pairs.size()) * 4;
  Eigen::MatrixXcd a(rows, 16);
  Eigen::VectorXcd b(rows);
  int r = 0;
  for (const auto& [rin, rout] : in_out_pairs) {
    for (int e = 0; e < 4; ++e) {
      const int i = e / 2, j = e % 2;
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          const CMatrix t = paulis[m] * rin * paulis[n];
          a(r, m * 4 + n) = t(i, j);
        }
      b(r) = rout(i, j);
      ++r;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.rank() < 16)
    throw RankDeficient("process_tomography: probe set does not span the operator space");
  const Eigen::VectorXcd x = svd.solve(b);
  CMatrix chi(4, 4);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) chi(m, n) = x(m * 4 + n);
  chi = 0.5 * (chi + chi.adjoint());
  const double tr = chi.trace().real();
  if (std::abs(tr) > 1e-12) chi /= tr;
  return {chi};
}

double process_fidelity(const ChiMatrix& meas, const ChiMatrix& ideal) {
  return (meas.chi * ideal.chi).trace().real();
}

ChiMatrix chi_identity() {
  CMatrix chi = CMatrix::Zero(4, 4);
  chi(0, 0) = 1.0;
  return {chi};
}

ChiMatrix chi_ideal_clone() {
  CMatrix chi = CMatrix::Zero(4, 4);
  chi(0, 0) = 0.75;
  chi(1, 1) = chi(2, 2) = chi(3, 3) = 1.0 / 12.0;
  return {chi};
}

}  // namespace uqcm::tomography
