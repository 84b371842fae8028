// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/ekf.hpp"

#include <cmath>

namespace nfbeam {

namespace {

constexpr double kRidgeScale = 1e-12;

// Partial derivatives of the projection coefficients g_m, q_m with respect
// to the user position.
struct ProjectionDerivatives {
  double dg_dx, dg_dy, dq_dx, dq_dy;
};

ProjectionDerivatives projection_derivatives(Projection convention, double ux, double uy,
                                             double r) {
  const double r3 = r * r * r;
  if (convention == Projection::Signed) {
    return {uy * uy / r3, -ux * uy / r3, -ux * uy / r3, ux * ux / r3};
  }
  if (std::abs(ux) < kDegenerateDistance || std::abs(uy) < kDegenerateDistance) {
    throw DegeneratePositionError(
        "absolute projection is not differentiable where the user aligns with an antenna axis");
  }
  const double sx = ux > 0.0 ? 1.0 : -1.0;
  const double sy = uy > 0.0 ? 1.0 : -1.0;
  return {sx / r - std::abs(ux) * ux / r3, -std::abs(ux) * uy / r3, -std::abs(uy) * ux / r3,
          sy / r - std::abs(uy) * uy / r3};
}

Eigen::MatrixXd stack_real(const ObservationJacobian& j) {
  Eigen::MatrixXd out(2 * j.rows(), 4);
  out.topRows(j.rows()) = j.real();
  out.bottomRows(j.rows()) = j.imag();
  return out;
}

Eigen::VectorXd stack_real(const ComplexVec& v) {
  Eigen::VectorXd out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

Mat4 symmetrized(const Mat4& p) { return 0.5 * (p + p.transpose()); }

void check_dimensions(const ComplexVec& y, const ObservationJacobian& j, const ComplexVec& h) {
  if (y.size() != j.rows() || h.size() != y.size()) {
    throw std::invalid_argument("observation, Jacobian and mean dimensions disagree");
  }
}

}  // namespace

void EkfConfig::validate() const {
  process.validate();
  if (!(sigma_e2 >= 0.0)) throw ConfigError("ekf.sigma_e2", "must be >= 0");
  if (!(p_init_scale >= 0.0)) throw ConfigError("ekf.p_init_scale", "must be >= 0");
}

TrackerBelief ekf_forecast(const TrackerBelief& belief, double dt, const Mat4& process_cov) {
  const Mat4 f = transition_matrix(dt);
  return {kinematic_forecast(belief.mean, dt),
          f * belief.covariance * f.transpose() + process_cov};
}

// Each column is s * d(alpha_2 a a^T f)/d(eta_i)
//   = s [ d(alpha_2) a (a^T f) + alpha_2 ( da (a^T f) + a (da^T f) ) ].
// For position coordinates both the steering phase (through r_m) and the
// Doppler phase (through g_m, q_m) move:
//   da/dxi = -j a ⊙ ( k dr/dxi + c (vx dg/dxi + vy dq/dxi) ),
// with k = 2 pi / lambda and c = k N T_s. For velocities only the Doppler
// phase moves: da/dvx = -j c g ⊙ a.
ObservationJacobian observation_jacobian(const SystemConfig& sys, const MotionState& eta,
                                         const Beamformer& f, double s_amp) {
  const int m_count = sys.num_antennas();
  if (f.size() != m_count) throw std::invalid_argument("beamformer length does not match the array");
  const Vec2 p = eta.position();
  const Vec2 v = eta.velocity();
  const ArrayGeometry& geom = sys.array;
  const double k = geom.wavenumber();
  const double c = k * sys.cpi_duration();

  const ComplexVec a = array_response(geom, sys.symbols_per_cpi, sys.symbol_period, v, p);
  const ProjectionCoeffs proj = projection_coeffs(geom, p);
  const double alpha2 = pathloss(sys.pathloss, p, PathKind::RoundTrip);
  const Vec2 dalpha2 = roundtrip_pathloss_gradient(sys.pathloss, p);

  // Real phase sensitivities: da_m/d(eta_i) = -j a_m * w_i(m).
  Eigen::Matrix<double, Eigen::Dynamic, 4> w(m_count, 4);
  for (int m = 0; m < m_count; ++m) {
    const double ux = p.x() - geom.antenna_x(m);
    const double uy = p.y();
    const double r = std::hypot(ux, uy);
    const ProjectionDerivatives dp = projection_derivatives(geom.projection, ux, uy, r);
    w(m, 0) = k * ux / r + c * (v.x() * dp.dg_dx + v.y() * dp.dq_dx);
    w(m, 1) = k * uy / r + c * (v.x() * dp.dg_dy + v.y() * dp.dq_dy);
    w(m, 2) = c * proj.g(m);
    w(m, 3) = c * proj.q(m);
  }

  const cdouble af = (a.transpose() * f)(0);
  const double dalpha[4] = {dalpha2.x(), dalpha2.y(), 0.0, 0.0};
  ObservationJacobian jac(m_count, 4);
  for (int i = 0; i < 4; ++i) {
    const ComplexVec da = cdouble(0.0, -1.0) * w.col(i).cast<cdouble>().cwiseProduct(a);
    const cdouble daf = (da.transpose() * f)(0);
    jac.col(i) = s_amp * (dalpha[i] * af * a + alpha2 * (af * da + daf * a));
  }
  return jac;
}

TrackerBelief kalman_update_dense(const TrackerBelief& prior, const ComplexVec& y,
                                  const ObservationJacobian& jacobian, const ComplexVec& h_mean,
                                  double sigma_e2, UpdateDiagnostics* diag) {
  check_dimensions(y, jacobian, h_mean);
  const Eigen::MatrixXd jr = stack_real(jacobian);
  const Eigen::VectorXd innovation = stack_real(ComplexVec(y - h_mean));
  const Mat4& p = prior.covariance;

  Eigen::MatrixXd s = jr * p * jr.transpose();
  s.diagonal().array() += 0.5 * sigma_e2;

  // K = P J^T S^{-1}  <=>  S K^T = J P
  const Eigen::MatrixXd jp = jr * p;
  bool ridge = false;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= kRidgeScale * s.trace() / static_cast<double>(s.rows())) {
    const double ridge_value = kRidgeScale * std::max(s.trace(), 1e-300);
    s.diagonal().array() += ridge_value;
    ldlt.compute(s);
    ridge = true;
  }
  const Eigen::Matrix<double, 4, Eigen::Dynamic> gain = ldlt.solve(jp).transpose();

  TrackerBelief post;
  post.mean = MotionState::from_vector(prior.mean.vector() + gain * innovation);
  post.covariance = symmetrized((Mat4::Identity() - gain * jr) * p);
  if (diag != nullptr) *diag = {innovation.norm(), true, ridge};
  return post;
}

TrackerBelief kalman_update(const TrackerBelief& prior, const ComplexVec& y,
                            const ObservationJacobian& jacobian, const ComplexVec& h_mean,
                            double sigma_e2, UpdateDiagnostics* diag) {
  check_dimensions(y, jacobian, h_mean);

  // With R = r I, P J^T (J P J^T + R)^{-1} = P (I + S P)^{-1} J^T / r,
  // S = J^T J / r. In stacked-real form J^T J = Re{J^H J} and
  // J^T e = Re{J^H e}.
  const ComplexVec e = y - h_mean;
  const Mat4 gram = (jacobian.adjoint() * jacobian).real();
  const Mat4& p = prior.covariance;
  double r = 0.5 * sigma_e2;
  bool ridge = false;
  if (!(r > 0.0)) {
    // Singular innovation covariance: the same ridge the dense route adds,
    // 1e-12 trace(J P J^T), acts as the observation noise.
    const double tr = (p * gram).trace();
    if (!(tr > 0.0)) {
      if (diag != nullptr) *diag = {std::sqrt(e.squaredNorm()), false, true};
      return {prior.mean, symmetrized(p)};
    }
    r = kRidgeScale * tr;
    ridge = true;
  }
  const Mat4 s = gram / r;
  const Vec4 z = (jacobian.adjoint() * e).real() / r;

  const Eigen::FullPivLU<Mat4> lu(Mat4::Identity() + s * p);
  const Mat4 pg = p * lu.inverse();  // P (I + S P)^{-1}

  TrackerBelief post;
  post.mean = MotionState::from_vector(prior.mean.vector() + pg * z);
  // (I - K J) P = P - P G S P = P G
  post.covariance = symmetrized(pg);
  if (diag != nullptr) *diag = {std::sqrt(e.squaredNorm()), false, ridge};
  return post;
}

EkfTracker::EkfTracker(const SystemConfig& sys, const EkfConfig& config,
                       const MotionState& initial)
    : sys_(sys), config_(config) {
  config_.validate();
  belief_.mean = initial;
  belief_.covariance = config.p_init_scale * Mat4::Identity();
  prior_ = belief_;
}

BeamformerSet EkfTracker::forecast() {
  prior_ = ekf_forecast(belief_, sys_.cpi_duration(), config_.process.covariance());
  has_prior_ = true;
  return predictive_beamformers(sys_, prior_.mean.position(), prior_.mean.velocity());
}

const TrackerBelief& EkfTracker::assimilate(const Observation& obs, const Beamformer& f,
                                            double s_amp) {
  if (!has_prior_) throw std::logic_error("assimilate() called without a pending forecast");
  const ObservationJacobian jac = observation_jacobian(sys_, prior_.mean, f, s_amp);
  const ComplexVec h = observation_mean(sys_, prior_.mean, f, s_amp);
  belief_ = kalman_update(prior_, obs.y, jac, h, config_.sigma_e2, &diag_);
  has_prior_ = false;
  return belief_;
}

std::pair<BeamformerSet, TrackerBelief> ekf_track_step(const TrackerBelief& belief,
                                                       const ObserveFn& observe,
                                                       const SystemConfig& sys,
                                                       const EkfConfig& config, double s_amp,
                                                       UpdateDiagnostics* diag) {
  const TrackerBelief prior = ekf_forecast(belief, sys.cpi_duration(), config.process.covariance());
  BeamformerSet bf = predictive_beamformers(sys, prior.mean.position(), prior.mean.velocity());
  const Observation obs = observe(bf);
  const Beamformer& f_last = bf.back();
  const ObservationJacobian jac = observation_jacobian(sys, prior.mean, f_last, s_amp);
  const ComplexVec h = observation_mean(sys, prior.mean, f_last, s_amp);
  TrackerBelief post = kalman_update(prior, obs.y, jac, h, config.sigma_e2, diag);
  return {std::move(bf), std::move(post)};
}

CovarianceHealth covariance_health(const Mat4& p) {
  CovarianceHealth h;
  h.asymmetry = (p - p.transpose()).cwiseAbs().maxCoeff();
  const Eigen::SelfAdjointEigenSolver<Mat4> eig(symmetrized(p), Eigen::EigenvaluesOnly);
  const double tr = p.trace();
  const double min_eig = eig.eigenvalues().minCoeff();
  h.min_eig_over_trace = tr > 0.0 ? min_eig / tr : (min_eig >= 0.0 ? 0.0 : -1.0);
  return h;
}

}  // namespace nfbeam
