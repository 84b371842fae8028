// SPDX-License-Identifier: Apache-2.0
//
// Position-based predictive beamforming and the perfect-CSI, far-field and
// feedback baselines.

#pragma once

#include <vector>

#include "nfbeam/echo.hpp"
#include "nfbeam/motion.hpp"

namespace nfbeam {

/// f(n) = conj(steering(p_pred)) ⊙ conj(doppler(n; v_pred)) / sqrt(M), n = 1..N.
BeamformerSet predictive_beamformers(const SystemConfig& sys, const Vec2& p_pred,
                                     const Vec2& v_pred);

/// Beamformers for the next CPI from the current estimate: the position is
/// pushed forward one CPI and the velocity is held.
BeamformerSet beamformers_from_estimate(const SystemConfig& sys, const MotionState& estimate);

/// MRT with the true state of the CPI being served.
BeamformerSet opt_beamformers(const SystemConfig& sys, const MotionState& eta_true);

/// Far-field steering towards the true direction of arrival with a common
/// radial-velocity Doppler term. Ignores range and transverse velocity.
BeamformerSet ff_beamformers(const SystemConfig& sys, const MotionState& eta_true);

/// Feedback baseline. The user reports its true state every `period_cpis`
/// CPIs; in between, the base station dead-reckons the last report.
class FeedbackTracker {
 public:
  /// `initial` is the state of CPI 1, known exactly from initial access.
  FeedbackTracker(const SystemConfig& sys, long period_cpis, const MotionState& initial);

  /// State assumed for CPI `cpi` (1-based).
  MotionState belief(long cpi) const;
  BeamformerSet beamformers(long cpi) const;

  /// Offer the true state at the end of CPI `cpi`. It is latched only when
  /// a report is due, and becomes usable from CPI `cpi + 1`.
  void report(long cpi, const MotionState& truth);

  long period() const { return period_; }
  long latched_cpi() const { return latched_cpi_; }

 private:
  SystemConfig sys_;
  long period_;
  MotionState latched_;
  long latched_cpi_ = 1;
};

long feedback_period_cpis(double feedback_period_s, double cpi_duration);

/// Runs FeedbackTracker over a whole trajectory. trajectory[0] is CPI 1.
std::vector<BeamformerSet> fd_tracker(const SystemConfig& sys, double feedback_period_s,
                                      const std::vector<MotionState>& trajectory);

}  // namespace nfbeam
