#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace uqcm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Repository-wide numerical tolerances.
inline constexpr double kHermTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-9;
inline constexpr double kTraceTol = 1e-12;

// Frequencies are stored as angular frequencies in rad/ns.
inline constexpr double ghz(double f) { return kTwoPi * f; }
inline constexpr double mhz(double f) { return kTwoPi * 1e-3 * f; }

}  // namespace uqcm
