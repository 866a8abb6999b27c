#include "uqcm/metrics.hpp"

#include <cmath>

#include "uqcm/errors.hpp"
#include "uqcm/numkit.hpp"

namespace uqcm::metrics {

double state_fidelity(const protocol::InputState& in, const CMatrix& rho_out) {
  in.validate();
  protocol::check_density_matrix(rho_out);
  if (rho_out.rows() != 2)
    throw NotDensityMatrix("state_fidelity: expected a qubit state");
  CVector psi(2);
  psi << in.alpha, in.beta;
  const Complex f = psi.adjoint() * rho_out * psi;
  if (std::abs(f.imag()) > 1e-12)
    throw NotDensityMatrix("state_fidelity: expectation not real");
  return f.real();
}

CMatrix rho_tilde(const CMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4)
    throw ShapeMismatch("rho_tilde: expected a 4x4 matrix");
  const CMatrix yy = numkit::kron(numkit::sigma_y(), numkit::sigma_y());
  return rho * yy * rho.conjugate() * yy;
}

double concurrence(const CMatrix& rho) {
  protocol::check_density_matrix(rho);
  if (rho.rows() != 4)
    throw NotDensityMatrix("concurrence: expected a two-qubit state");
  const CVector w = numkit::eigvals_general_4x4(rho_tilde(rho));
  double roots[4];
  for (int k = 0; k < 4; ++k) {
    double ev = w[k].real();
    if (ev < 0.0 && ev > -1e-9) ev = 0.0;
    roots[k] = ev > 0.0 ? std::sqrt(ev) : 0.0;
  }
  const double c = roots[0] - roots[1] - roots[2] - roots[3];
  return c > 0.0 ? c : 0.0;
}

CMatrix analytic_joint_original_copy(const protocol::InputState& in) {
  in.validate();
  const Complex a = in.alpha, b = in.beta;
  const double aa = std::norm(a), bb = std::norm(b);
  const Complex ab = a * std::conj(b);
  CMatrix rho(4, 4);
  rho << aa / 6.0, ab / 3.0, ab / 6.0, 0.0,
      std::conj(ab) / 3.0, aa / 6.0 + 2.0 * bb / 3.0, 1.0 / 3.0, ab / 6.0,
      std::conj(ab) / 6.0, 1.0 / 3.0, 2.0 * aa / 3.0 + bb / 6.0, ab / 3.0,
      0.0, std::conj(ab) / 6.0, std::conj(ab) / 3.0, bb / 6.0;
  return rho;
}

CMatrix analytic_joint_copies(const protocol::InputState& in) {
  in.validate();
  const Complex a = in.alpha, b = in.beta;
  const double aa = std::norm(a), bb = std::norm(b);
  const Complex ab = a * std::conj(b);
  CMatrix rho(4, 4);
  rho << 2.0 * aa / 3.0, ab / 3.0, ab / 3.0, 0.0,
      std::conj(ab) / 3.0, 1.0 / 6.0, 1.0 / 6.0, ab / 3.0,
      std::conj(ab) / 3.0, 1.0 / 6.0, 1.0 / 6.0, ab / 3.0,
      0.0, std::conj(ab) / 3.0, std::conj(ab) / 3.0, 2.0 * bb / 3.0;
  return rho;
}

}  // namespace uqcm::metrics
