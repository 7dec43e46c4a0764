#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nisto {

using Vec3 = Eigen::Vector3d;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

struct NistoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : NistoError {
  using NistoError::NistoError;
};

struct SingularityError : NistoError {
  using NistoError::NistoError;
};

struct ConvergenceError : NistoError {
  using NistoError::NistoError;
};

struct SchemaError : NistoError {
  using NistoError::NistoError;
};

}  // namespace nisto
