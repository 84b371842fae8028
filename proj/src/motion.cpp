// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/motion.hpp"

namespace nfbeam {

void MotionNoise::validate() const {
  if (!(sigma_vx2 >= 0.0)) throw ConfigError("motion.sigma_vx2", "must be >= 0");
  if (!(sigma_vy2 >= 0.0)) throw ConfigError("motion.sigma_vy2", "must be >= 0");
}

Mat4 MotionNoise::covariance() const {
  Mat4 q = Mat4::Zero();
  q(2, 2) = sigma_vx2;
  q(3, 3) = sigma_vy2;
  return q;
}

Mat4 transition_matrix(double dt) {
  Mat4 f = Mat4::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  return f;
}

MotionState kinematic_forecast(const MotionState& eta, double dt) {
  return {eta.x + eta.vx * dt, eta.y + eta.vy * dt, eta.vx, eta.vy};
}

MotionState step_motion(const MotionState& eta, double dt, const MotionNoise& noise,
                        RandomStream& rng) {
  MotionState next = kinematic_forecast(eta, dt);
  next.vx += rng.normal(noise.sigma_vx2);
  next.vy += rng.normal(noise.sigma_vy2);
  return next;
}

std::vector<MotionState> generate_trajectory(const MotionState& eta0, double dt,
                                             const MotionNoise& noise, long num_cpis,
                                             RandomStream& rng) {
  if (num_cpis < 1) throw ConfigError("num_cpis", "must be >= 1");
  std::vector<MotionState> out;
  out.reserve(static_cast<size_t>(num_cpis));
  out.push_back(eta0);
  for (long l = 1; l < num_cpis; ++l) out.push_back(step_motion(out.back(), dt, noise, rng));
  return out;
}

}  // namespace nfbeam
