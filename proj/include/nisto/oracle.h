#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nisto/basis.h"
#include "nisto/core.h"
#include "nisto/quadrature.h"

namespace nisto {

struct OracleConfig {
  int radial_order = 20;       // Gauss-Legendre nodes per radial panel
  int angular_order = 14;      // theta nodes; phi gets twice as many
  int partition_sharpness = 3; // fuzzy-cell switching iterations
  std::int64_t mc_samples = 400000;
  std::uint64_t seed = 1;
  double target_tol = 1e-9;
  int max_refinements = 3;
};

struct OracleResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
  bool converged = true;
  std::string message;
};

// Brute-force multicenter integral of `f` over 3-space: fuzzy-cell
// partitioning among `centers`, per-center spherical grids, refined until two
// consecutive grid levels agree within target_tol or max_refinements is hit
// (then converged = false with the best value and the level difference as the
// estimate).  `scales` sets the per-center radial map parameter (1/zeta_max
// of the functions peaked there); empty means 1 everywhere.
OracleResult integrate_3d(const std::function<double(const Vec3&)>& f,
                          const std::vector<Vec3>& centers, const OracleConfig& cfg,
                          const std::vector<double>& scales = {});

// Two-center overlap <chi_p | chi_q> in prolate spheroidal coordinates about
// the line of centers, with real harmonics evaluated in the global frame.
// The azimuthal integral uses a uniform grid fine enough to be exact for the
// trigonometric-polynomial phi dependence of the orbital product.
OracleResult overlap_two_center_spheroidal(const StoParams& p, const StoParams& q,
                                           const OracleConfig& cfg);

// 6D Monte Carlo estimate of
//   integral |chi_a(x1)|^2 |chi_b(x2)|^2 k(x1, x2) dv1 dv2
// with exact importance sampling from the normalized orbital densities
// (gamma radial draws, rejection-sampled |S_lm|^2 directions).  Deterministic
// for a fixed seed; error_estimate is the batch standard error.
OracleResult integrate_6d_mc(const std::function<double(const Vec3&, const Vec3&)>& kernel_factor,
                             const StoParams& a, const StoParams& b, const OracleConfig& cfg);

}  // namespace nisto
