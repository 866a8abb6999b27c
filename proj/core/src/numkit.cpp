#include "uqcm/numkit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace uqcm::numkit {

double hermiticity_defect(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_finite(const CMatrix& m) {
  return m.allFinite();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix expm_scaled(const CMatrix& h, double t) {
  if (h.rows() != h.cols())
    throw ShapeMismatch("expm_scaled: matrix must be square");
  if (hermiticity_defect(h) > kHermTol)
    throw NonHermitianInput("expm_scaled: input not hermitian within 1e-10");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("expm_scaled: eigensolver failed");
  const auto& w = es.eigenvalues();
  CVector phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k)
    phases[k] = std::exp(Complex(0.0, -w[k] * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix partial_trace(const CMatrix& rho, const SubsystemShape& shape,
                      const std::vector<int>& keep) {
  if (rho.rows() != rho.cols())
    throw ShapeMismatch("partial_trace: matrix must be square");
  if (shape.dim() != rho.rows())
    throw ShapeMismatch("partial_trace: shape does not match matrix dimension");
  const int n = shape.subsystems();
  for (int k : keep)
    if (k < 0 || k >= n) throw ShapeMismatch("partial_trace: bad keep index");

  std::vector<int> strides(n);
  int acc = 1;
  for (int s = n - 1; s >= 0; --s) {
    strides[s] = acc;
    acc *= shape.dims[s];
  }
  std::vector<int> traced;
  for (int s = 0; s < n; ++s)
    if (std::find(keep.begin(), keep.end(), s) == keep.end()) traced.push_back(s);

  int dk = 1;
  for (int s : keep) dk *= shape.dims[s];
  int dt = 1;
  for (int s : traced) dt *= shape.dims[s];

  auto full_index = [&](int ik, int it) {
    int idx = 0, rk = ik, rt = it;
    for (int p = static_cast<int>(keep.size()) - 1; p >= 0; --p) {
      const int s = keep[p];
      idx += (rk % shape.dims[s]) * strides[s];
      rk /= shape.dims[s];
    }
    for (int p = static_cast<int>(traced.size()) - 1; p >= 0; --p) {
      const int s = traced[p];
      idx += (rt % shape.dims[s]) * strides[s];
      rt /= shape.dims[s];
    }
    return idx;
  };

  CMatrix out = CMatrix::Zero(dk, dk);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dk; ++j) {
      Complex sum = 0.0;
      for (int t = 0; t < dt; ++t) sum += rho(full_index(i, t), full_index(j, t));
      out(i, j) = sum;
    }
  return out;
}

RVector eigvals_hermitian(const CMatrix& h) {
  if (h.rows() != h.cols())
    throw ShapeMismatch("eigvals_hermitian: matrix must be square");
  if (hermiticity_defect(h) > kHermTol)
    throw NonHermitianInput("eigvals_hermitian: input not hermitian within 1e-10");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("eigvals_hermitian: eigensolver failed");
  RVector w = es.eigenvalues();
  std::sort(w.data(), w.data() + w.size(), std::greater<double>());
  return w;
}

CVector eigvals_general_4x4(const CMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4)
    throw ShapeMismatch("eigvals_general_4x4: expected a 4x4 matrix");
  Eigen::ComplexEigenSolver<CMatrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("eigvals_general_4x4: Schur iteration failed");
  CVector w = es.eigenvalues();
  std::sort(w.data(), w.data() + w.size(),
            [](const Complex& a, const Complex& b) { return a.real() > b.real(); });
  return w;
}

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

CMatrix sigma_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix sigma_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

CMatrix sigma_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix sigma_minus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

CMatrix sigma_plus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

CMatrix embed(const CMatrix& op, const SubsystemShape& shape, int slot) {
  if (slot < 0 || slot >= shape.subsystems())
    throw ShapeMismatch("embed: slot out of range");
  if (op.rows() != shape.dims[slot])
    throw ShapeMismatch("embed: operator does not match subsystem dimension");
  CMatrix out = CMatrix::Identity(1, 1);
  for (int s = 0; s < shape.subsystems(); ++s)
    out = kron(out, s == slot ? op : identity(shape.dims[s]));
  return out;
}

}  // namespace uqcm::numkit
