// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "nfbeam/rng.hpp"
#include "nfbeam/types.hpp"

namespace nfbeam {

/// Per-CPI velocity increment variances, (m/s)^2.
struct MotionNoise {
  double sigma_vx2 = 0.01;
  double sigma_vy2 = 0.01;

  void validate() const;
  /// diag{0, 0, sigma_vx2, sigma_vy2}
  Mat4 covariance() const;
};

/// Constant-velocity transition matrix for a step of dt seconds.
Mat4 transition_matrix(double dt);

/// [x + vx dt, y + vy dt, vx, vy].
MotionState kinematic_forecast(const MotionState& eta, double dt);

/// One CPI of the ground-truth process: position advances with the pre-step
/// velocity, then each velocity component receives an independent Gaussian
/// increment.
MotionState step_motion(const MotionState& eta, double dt, const MotionNoise& noise,
                        RandomStream& rng);

/// num_cpis states starting at eta0.
std::vector<MotionState> generate_trajectory(const MotionState& eta0, double dt,
                                             const MotionNoise& noise, long num_cpis,
                                             RandomStream& rng);

}  // namespace nfbeam
