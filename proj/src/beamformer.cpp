// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/beamformer.hpp"

#include <cmath>

namespace nfbeam {

BeamformerSet predictive_beamformers(const SystemConfig& sys, const Vec2& p_pred,
                                     const Vec2& v_pred) {
  const ComplexVec steer_conj = steering_vector(sys.array, p_pred).conjugate();
  const RealVec vm = element_velocities(sys.array, v_pred, p_pred);
  const double k = sys.array.wavenumber();
  const double norm = 1.0 / std::sqrt(static_cast<double>(sys.num_antennas()));

  BeamformerSet out;
  out.reserve(static_cast<size_t>(sys.symbols_per_cpi));
  for (int n = 1; n <= sys.symbols_per_cpi; ++n) {
    const double t = n * sys.symbol_period;
    Beamformer f(sys.num_antennas());
    for (int m = 0; m < sys.num_antennas(); ++m) {
      const double phase = k * t * vm(m);  // conjugate Doppler
      f(m) = norm * steer_conj(m) * cdouble(std::cos(phase), std::sin(phase));
    }
    out.push_back(std::move(f));
  }
  return out;
}

BeamformerSet beamformers_from_estimate(const SystemConfig& sys, const MotionState& estimate) {
  const MotionState next = kinematic_forecast(estimate, sys.cpi_duration());
  return predictive_beamformers(sys, next.position(), next.velocity());
}

BeamformerSet opt_beamformers(const SystemConfig& sys, const MotionState& eta_true) {
  return predictive_beamformers(sys, eta_true.position(), eta_true.velocity());
}

BeamformerSet ff_beamformers(const SystemConfig& sys, const MotionState& eta_true) {
  const PolarState polar = to_polar(eta_true);
  const double ux = std::cos(polar.angle);  // unit direction; antennas have zero y
  const double k = sys.array.wavenumber();
  const double norm = 1.0 / std::sqrt(static_cast<double>(sys.num_antennas()));

  BeamformerSet out;
  out.reserve(static_cast<size_t>(sys.symbols_per_cpi));
  for (int n = 1; n <= sys.symbols_per_cpi; ++n) {
    const double doppler_phase = -k * n * sys.symbol_period * polar.radial_velocity;
    Beamformer f(sys.num_antennas());
    for (int m = 0; m < sys.num_antennas(); ++m) {
      const double phase = doppler_phase - k * ux * sys.array.antenna_x(m);
      f(m) = norm * cdouble(std::cos(phase), std::sin(phase));
    }
    out.push_back(std::move(f));
  }
  return out;
}

FeedbackTracker::FeedbackTracker(const SystemConfig& sys, long period_cpis,
                                 const MotionState& initial)
    : sys_(sys), period_(period_cpis), latched_(initial) {
  if (period_cpis < 1) throw ConfigError("feedback_period_s", "must cover at least one CPI");
}

MotionState FeedbackTracker::belief(long cpi) const {
  const long steps = cpi - latched_cpi_;
  return kinematic_forecast(latched_, static_cast<double>(steps) * sys_.cpi_duration());
}

BeamformerSet FeedbackTracker::beamformers(long cpi) const {
  const MotionState s = belief(cpi);
  return predictive_beamformers(sys_, s.position(), s.velocity());
}

void FeedbackTracker::report(long cpi, const MotionState& truth) {
  if (cpi % period_ == 0) {
    latched_ = truth;
    latched_cpi_ = cpi;
  }
}

long feedback_period_cpis(double feedback_period_s, double cpi_duration) {
  const double ratio = feedback_period_s / cpi_duration;
  const long cpis = std::lround(ratio);
  if (cpis < 1 || std::abs(ratio - static_cast<double>(cpis)) > 1e-6 * ratio) {
    throw ConfigError("feedback_period_s", "must be a positive multiple of the CPI duration");
  }
  return cpis;
}

std::vector<BeamformerSet> fd_tracker(const SystemConfig& sys, double feedback_period_s,
                                      const std::vector<MotionState>& trajectory) {
  std::vector<BeamformerSet> out;
  if (trajectory.empty()) return out;
  FeedbackTracker tracker(sys, feedback_period_cpis(feedback_period_s, sys.cpi_duration()),
                          trajectory.front());
  out.reserve(trajectory.size());
  for (size_t i = 0; i < trajectory.size(); ++i) {
    const long cpi = static_cast<long>(i) + 1;
    out.push_back(tracker.beamformers(cpi));
    tracker.report(cpi, trajectory[i]);
  }
  return out;
}

}  // namespace nfbeam
