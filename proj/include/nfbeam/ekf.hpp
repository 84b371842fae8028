// SPDX-License-Identifier: Apache-2.0
//
// Extended Kalman filter over the motion state [x, y, vx, vy].
//
// The complex observation y = s H(N; eta) f + z is handled in stacked real
// form: y_r = [Re y; Im y] with noise covariance (sigma_e2 / 2) I and the
// 2M x 4 Jacobian J_r = [Re J; Im J]. This keeps P real and symmetric.

#pragma once

#include <functional>
#include <iosfwd>
#include <utility>

#include "nfbeam/beamformer.hpp"
#include "nfbeam/motion.hpp"

namespace nfbeam {

using ObservationJacobian = Eigen::Matrix<cdouble, Eigen::Dynamic, 4>;

struct TrackerBelief {
  MotionState mean;
  Mat4 covariance = Mat4::Zero();
};

struct EkfConfig {
  MotionNoise process;    // Q = diag{0, 0, sigma_vx2, sigma_vy2}
  double sigma_e2 = 1e-8; // R = sigma_e2 I
  double p_init_scale = 0.1;

  void validate() const;
};

/// Which algebraic route produced an update and what it saw.
struct UpdateDiagnostics {
  double innovation_norm = 0.0;
  bool dense_route = false;
  bool ridge_used = false;
};

/// eta_prior = F eta, P_prior = F P F^T + Q.
TrackerBelief ekf_forecast(const TrackerBelief& belief, double dt, const Mat4& process_cov);

/// d(s H(N; eta) f)/d eta, columns ordered (x, y, vx, vy). Throws
/// DegeneratePositionError where the projection derivative is undefined.
ObservationJacobian observation_jacobian(const SystemConfig& sys, const MotionState& eta,
                                         const Beamformer& f, double s_amp);

/// Kalman data assimilation. The gain is formed in the 4-dimensional state
/// space via the push-through identity, so the cost is O(M). With
/// sigma_e2 = 0 a ridge of 1e-12 trace(J P J^T) stands in for R, matching
/// the dense route's fallback.
TrackerBelief kalman_update(const TrackerBelief& prior, const ComplexVec& y,
                            const ObservationJacobian& jacobian, const ComplexVec& h_mean,
                            double sigma_e2, UpdateDiagnostics* diag = nullptr);

/// Same update with the 2M x 2M innovation covariance solved directly
/// (LDLT, ridge 1e-12 trace on failure). O(M^3).
TrackerBelief kalman_update_dense(const TrackerBelief& prior, const ComplexVec& y,
                                  const ObservationJacobian& jacobian, const ComplexVec& h_mean,
                                  double sigma_e2, UpdateDiagnostics* diag = nullptr);

/// Closed-loop tracker following forecast -> beamform -> assimilate.
class EkfTracker {
 public:
  EkfTracker(const SystemConfig& sys, const EkfConfig& config, const MotionState& initial);

  /// Forecasts one CPI and returns the beamformers designed from the prior.
  BeamformerSet forecast();

  /// Assimilates the echo of the CPI just forecast. `f` is the beamformer
  /// transmitted at the last symbol of that CPI.
  const TrackerBelief& assimilate(const Observation& obs, const Beamformer& f, double s_amp);

  const TrackerBelief& belief() const { return belief_; }
  const TrackerBelief& prior() const { return prior_; }
  const UpdateDiagnostics& diagnostics() const { return diag_; }

 private:
  SystemConfig sys_;
  EkfConfig config_;
  TrackerBelief belief_;
  TrackerBelief prior_;
  UpdateDiagnostics diag_;
  bool has_prior_ = false;
};

using ObserveFn = std::function<Observation(const BeamformerSet&)>;

/// Forecast, design beamformers, obtain the echo through `observe`, update.
std::pair<BeamformerSet, TrackerBelief> ekf_track_step(const TrackerBelief& belief,
                                                       const ObserveFn& observe,
                                                       const SystemConfig& sys,
                                                       const EkfConfig& config, double s_amp,
                                                       UpdateDiagnostics* diag = nullptr);

/// Symmetry defect max|P - P^T| and min eigenvalue / trace.
struct CovarianceHealth {
  double asymmetry = 0.0;
  double min_eig_over_trace = 0.0;
};
CovarianceHealth covariance_health(const Mat4& p);

}  // namespace nfbeam
