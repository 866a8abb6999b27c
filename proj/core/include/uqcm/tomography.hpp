#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "uqcm/protocol.hpp"
#include "uqcm/types.hpp"

namespace uqcm::tomography {

/// Per-qubit tomographic pre-rotation. Convention (fixed so reconstructed
/// imaginary parts are reproducible): I measures sigma_z, X/2 = exp(-i pi/4 X)
/// maps sigma_y onto sigma_z, Y/2 = exp(+i pi/4 Y) maps sigma_x onto sigma_z.
enum class PreRotation { I, X2, Y2 };

struct TomographySetting {
  std::vector<PreRotation> rot;  // one entry per qubit

  std::string name() const;
  CMatrix unitary() const;  // tensor product of the pre-rotations
};

std::vector<TomographySetting> all_settings(int n_qubits);

struct MeasurementRecord {
  TomographySetting setting;
  int shots = 0;
  std::vector<long> counts;  // per bitstring, size 2^n
  std::uint64_t seed = 0;
};

struct ReadoutErrors {
  std::vector<double> f0;  // per qubit
  std::vector<double> f1;
};

/// Apply the setting's pre-rotations to rho, push the ideal bitstring
/// probabilities through each qubit's confusion matrix
/// [[F0, 1-F1], [1-F0, F1]], and sample `shots` outcomes.
MeasurementRecord simulate_counts(const CMatrix& rho,
                                  const TomographySetting& setting, int shots,
                                  const ReadoutErrors& ro, std::uint64_t seed);

/// Invert the per-qubit confusion matrices on a probability vector; negative
/// entries are clipped and the vector renormalized. Returns the clipped mass
/// through `clipped` when non-null. Throws SingularConfusion if F0 + F1 <= 1.
std::vector<double> readout_correct(const std::vector<double>& probs,
                                    const ReadoutErrors& ro,
                                    double* clipped = nullptr);

struct Reconstruction {
  CMatrix raw;        // linear-inversion estimate
  CMatrix projected;  // nearest positive semidefinite unit-trace matrix
};

/// Linear inversion from Pauli expectation values over the 3^n settings,
/// followed by eigenvalue water-filling onto the physical set. Probabilities
/// are taken as counts/shots, already readout-corrected by the caller when
/// applicable.
Reconstruction reconstruct_state(const std::vector<MeasurementRecord>& records,
                                 int n_qubits);

/// Exact-probability variant (no sampling): expectation values computed
/// directly from rho; useful for oracles and the infinite-shot limit.
Reconstruction reconstruct_state_exact(const CMatrix& rho, int n_qubits);

struct ChiMatrix {
  CMatrix chi;  // 4x4, Pauli basis {I, X, Y, Z}
};

/// Least-squares chi matrix from (input, output) state pairs over the probe
/// set: E(rho) = sum_mn chi_mn P_m rho P_n. Hermitized and trace-normalized.
ChiMatrix process_tomography(
    const std::vector<std::pair<CMatrix, CMatrix>>& in_out_pairs);

double process_fidelity(const ChiMatrix& meas, const ChiMatrix& ideal);

ChiMatrix chi_identity();

/// chi of rho -> (2/3) rho + (1/3) I/2: diag(3/4, 1/12, 1/12, 1/12).
ChiMatrix chi_ideal_clone();

}  // namespace uqcm::tomography
