#pragma once

#include <vector>

#include "uqcm/errors.hpp"
#include "uqcm/types.hpp"

namespace uqcm::numkit {

/// Ordered subsystem dimensions of a composite Hilbert space.
/// Subsystem 0 is the most significant index; when a resonator is present
/// it is the last (least significant) factor, matching the |q1 q2 q3> ⊗ |n>
/// ket ordering used throughout.
struct SubsystemShape {
  std::vector<int> dims;

  SubsystemShape() = default;
  SubsystemShape(std::initializer_list<int> d) : dims(d) {}
  explicit SubsystemShape(std::vector<int> d) : dims(std::move(d)) {}

  int dim() const {
    int n = 1;
    for (int d : dims) n *= d;
    return n;
  }
  int subsystems() const { return static_cast<int>(dims.size()); }
};

double hermiticity_defect(const CMatrix& m);
bool is_finite(const CMatrix& m);

/// Kronecker product; the left factor is the most significant index.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// exp(-i h t) for hermitian h via spectral decomposition.
/// Throws NonHermitianInput if max|h - h†| exceeds kHermTol.
CMatrix expm_scaled(const CMatrix& h, double t);

/// Trace out all subsystems not listed in `keep` (indices into shape.dims,
/// ascending). The kept subsystems retain their original relative order.
CMatrix partial_trace(const CMatrix& rho, const SubsystemShape& shape,
                      const std::vector<int>& keep);

/// Real eigenvalues of a hermitian matrix, descending.
RVector eigvals_hermitian(const CMatrix& h);

/// Eigenvalues of a general (possibly non-hermitian) 4x4 matrix, sorted by
/// real part descending. Used for the spin-flipped rho-tilde products.
CVector eigvals_general_4x4(const CMatrix& m);

// Small helpers shared across modules.
CMatrix identity(int n);
CMatrix sigma_x();
CMatrix sigma_y();
CMatrix sigma_z();
CMatrix sigma_minus();  // |0><1|
CMatrix sigma_plus();   // |1><0|

/// Embed a single-subsystem operator at position `slot` of a composite space.
CMatrix embed(const CMatrix& op, const SubsystemShape& shape, int slot);

}  // namespace uqcm::numkit
