// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/agdao.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include "nfbeam/motion.hpp"

namespace nfbeam {

namespace {

constexpr double kVelocityFloor = 1e-6;  // m/s, denominator guard for relative change

double relative_change(double current, double previous) {
  return std::abs(current - previous) / std::max(std::abs(current), kVelocityFloor);
}

void check_finite(double objective, int k) {
  if (!std::isfinite(objective)) {
    throw EstimationDivergedError("objective became non-finite at iteration " + std::to_string(k));
  }
}

}  // namespace

const char* to_string(GdVariant v) {
  switch (v) {
    case GdVariant::AdamAo: return "adam-ao";
    case GdVariant::AdamJoint: return "adam-joint";
    case GdVariant::PlainGd: return "plain-gd";
  }
  return "?";
}

GdVariant gd_variant_from_string(const std::string& name) {
  if (name == "adam-ao") return GdVariant::AdamAo;
  if (name == "adam-joint") return GdVariant::AdamJoint;
  if (name == "plain-gd") return GdVariant::PlainGd;
  throw ConfigError("variant", "unknown optimizer variant '" + name + "'");
}

void AdamHyper::validate() const {
  for (const auto& [a, prefix] : {std::pair{&x, "adam.x."}, std::pair{&y, "adam.y."}}) {
    const std::string p(prefix);
    if (!(a->alpha > 0.0)) throw ConfigError(p + "alpha", "must be positive");
    if (!(a->zeta >= 0.0 && a->zeta < 1.0)) throw ConfigError(p + "zeta", "must be in [0, 1)");
    if (!(a->varpi >= 0.0 && a->varpi < 1.0)) throw ConfigError(p + "varpi", "must be in [0, 1)");
    if (!(a->gamma_stop >= 0.0)) throw ConfigError(p + "gamma_stop", "must be >= 0");
  }
  if (!(epsilon > 0.0)) throw ConfigError("adam.epsilon", "must be positive");
  if (max_iterations < 1) throw ConfigError("adam.max_iterations", "must be >= 1");
}

double AdamMoments::step(double grad, int k, const AdamAxis& axis, double epsilon) {
  first_ = axis.zeta * first_ + (1.0 - axis.zeta) * grad;
  second_ = axis.varpi * second_ + (1.0 - axis.varpi) * grad * grad;
  const double m_hat = first_ / (1.0 - std::pow(axis.zeta, k));
  const double n_hat = second_ / (1.0 - std::pow(axis.varpi, k));
  return axis.alpha * m_hat / std::sqrt(n_hat + epsilon);
}

void write_trace_csv(std::ostream& os, const OptimizerTrace& trace) {
  os << "k,vx,vy,objective,grad_x,grad_y\n";
  const auto old = os.precision(17);
  for (const auto& r : trace) {
    os << r.k << ',' << r.vx << ',' << r.vy << ',' << r.objective << ',' << r.grad_x << ','
       << r.grad_y << '\n';
  }
  os.precision(old);
}

VelocityLikelihood::VelocityLikelihood(const SystemConfig& sys, ComplexVec y, const Vec2& p_hat,
                                       Beamformer f, double s_amp)
    : y_(std::move(y)), f_(std::move(f)) {
  if (y_.size() != sys.num_antennas() || f_.size() != sys.num_antennas()) {
    throw std::invalid_argument("observation/beamformer length does not match the array");
  }
  steer_ = steering_vector(sys.array, p_hat);
  const ProjectionCoeffs c = projection_coeffs(sys.array, p_hat);
  g_ = c.g;
  q_ = c.q;
  gain_ = s_amp * pathloss(sys.pathloss, p_hat, PathKind::RoundTrip);
  phase_ = sys.array.wavenumber() * sys.cpi_duration();
}

ComplexVec VelocityLikelihood::response(const Vec2& v) const {
  ComplexVec a(steer_.size());
  for (Eigen::Index m = 0; m < a.size(); ++m) {
    const double ph = -phase_ * (g_(m) * v.x() + q_(m) * v.y());
    a(m) = steer_(m) * cdouble(std::cos(ph), std::sin(ph));
  }
  return a;
}

ComplexVec VelocityLikelihood::mean(const Vec2& v) const {
  const ComplexVec a = response(v);
  return (gain_ * (a.transpose() * f_)(0)) * a;
}

double VelocityLikelihood::objective(const Vec2& v) const {
  const ComplexVec b = mean(v);
  return 2.0 * y_.dot(b).real() - b.squaredNorm();
}

// db/dv = gain * [ (da)(a^T f) + a (da^T f) ],  da = -j c (w ⊙ a),
// where w is g for vx and q for vy. Both terms of the product rule are kept.
double VelocityLikelihood::gradient_with(const ComplexVec& a, const ComplexVec& b,
                                         Axis axis) const {
  const RealVec& w = axis == Axis::X ? g_ : q_;
  const cdouble minus_jc(0.0, -phase_);
  const ComplexVec da = minus_jc * (w.cast<cdouble>().cwiseProduct(a));
  const cdouble af = (a.transpose() * f_)(0);
  const cdouble daf = (da.transpose() * f_)(0);
  const ComplexVec db = gain_ * (af * da + daf * a);
  return 2.0 * (y_ - b).dot(db).real();
}

double VelocityLikelihood::gradient(const Vec2& v, Axis axis) const {
  const ComplexVec a = response(v);
  const ComplexVec b = (gain_ * (a.transpose() * f_)(0)) * a;
  return gradient_with(a, b, axis);
}

Vec2 VelocityLikelihood::gradient(const Vec2& v) const {
  const ComplexVec a = response(v);
  const ComplexVec b = (gain_ * (a.transpose() * f_)(0)) * a;
  return {gradient_with(a, b, Axis::X), gradient_with(a, b, Axis::Y)};
}

double ml_objective(const SystemConfig& sys, const Observation& obs, const Vec2& p_hat,
                    const Vec2& v, const Beamformer& f, double s_amp) {
  return VelocityLikelihood(sys, obs.y, p_hat, f, s_amp).objective(v);
}

double grad_velocity(const SystemConfig& sys, const Observation& obs, const Vec2& p_hat,
                     const Vec2& v, const Beamformer& f, double s_amp, Axis axis) {
  return VelocityLikelihood(sys, obs.y, p_hat, f, s_amp).gradient(v, axis);
}

namespace {

TraceRow trace_row(const VelocityLikelihood& lik, int k, const Vec2& v, const Vec2& grad) {
  return {k, v.x(), v.y(), lik.objective(v), grad.x(), grad.y()};
}

}  // namespace

VelocityEstimate gd_estimate(const VelocityLikelihood& lik, const Vec2& v_init,
                             const AdamHyper& hyper, GdVariant variant, bool record_trace) {
  hyper.validate();
  VelocityEstimate est{v_init, {}, 0, false};
  if (record_trace) est.trace.push_back(trace_row(lik, 0, v_init, lik.gradient(v_init)));

  AdamMoments mx;
  AdamMoments my;
  Vec2 v = v_init;
  for (int k = 1; k <= hyper.max_iterations; ++k) {
    const Vec2 prev = v;
    Vec2 grad;
    switch (variant) {
      case GdVariant::AdamAo:
        grad.x() = lik.gradient(v, Axis::X);
        v.x() += mx.step(grad.x(), k, hyper.x, hyper.epsilon);
        grad.y() = lik.gradient(v, Axis::Y);
        v.y() += my.step(grad.y(), k, hyper.y, hyper.epsilon);
        break;
      case GdVariant::AdamJoint:
        grad = lik.gradient(v);
        v.x() += mx.step(grad.x(), k, hyper.x, hyper.epsilon);
        v.y() += my.step(grad.y(), k, hyper.y, hyper.epsilon);
        break;
      case GdVariant::PlainGd:
        grad = lik.gradient(v);
        v.x() += hyper.x.alpha * grad.x();
        v.y() += hyper.y.alpha * grad.y();
        break;
    }
    est.iterations = k;
    if (!v.allFinite()) throw EstimationDivergedError("velocity became non-finite");
    if (record_trace) {
      est.trace.push_back(trace_row(lik, k, v, grad));
      check_finite(est.trace.back().objective, k);
    }
    if (relative_change(v.x(), prev.x()) < hyper.x.gamma_stop &&
        relative_change(v.y(), prev.y()) < hyper.y.gamma_stop) {
      est.converged = true;
      break;
    }
  }
  if (!record_trace) check_finite(lik.objective(v), est.iterations);
  est.velocity = v;
  return est;
}

VelocityEstimate adam_ao_estimate(const VelocityLikelihood& lik, const Vec2& v_init,
                                  const AdamHyper& hyper, bool record_trace) {
  return gd_estimate(lik, v_init, hyper, GdVariant::AdamAo, record_trace);
}

MotionState agdao_track_step(const SystemConfig& sys, const MotionState& previous,
                             const Observation& obs, const Beamformer& f, double s_amp,
                             const AdamHyper& hyper, int* iterations) {
  const MotionState propagated = kinematic_forecast(previous, sys.cpi_duration());
  const VelocityLikelihood lik(sys, obs.y, propagated.position(), f, s_amp);
  const VelocityEstimate est = adam_ao_estimate(lik, previous.velocity(), hyper);
  if (iterations != nullptr) *iterations = est.iterations;
  return MotionState::from_parts(propagated.position(), est.velocity);
}

}  // namespace nfbeam
