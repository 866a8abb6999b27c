#pragma once

#include <stdexcept>
#include <string>

namespace uqcm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonHermitianInput : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct ZeroDetuning : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };
struct NotDensityMatrix : Error { using Error::Error; };
struct ScheduleInvalid : Error { using Error::Error; };
struct StepTooLarge : Error { using Error::Error; };
struct SingularConfusion : Error { using Error::Error; };
struct IncompleteSettings : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };

}  // namespace uqcm
