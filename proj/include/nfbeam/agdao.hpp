// SPDX-License-Identifier: Apache-2.0
//
// Single-CPI velocity estimation. The position is propagated kinematically
// from the previous estimate; the velocity maximises the least-squares
// likelihood surrogate
//
//   g(v) = 2 Re{y^H b(v)} - ||b(v)||^2,   b(v) = s H(v, p_hat) f,
//
// with Adam moment estimates applied alternately to vx and vy.

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "nfbeam/echo.hpp"

namespace nfbeam {

enum class Axis { X, Y };

enum class GdVariant { AdamAo, AdamJoint, PlainGd };

const char* to_string(GdVariant v);
GdVariant gd_variant_from_string(const std::string& name);

/// Per-axis Adam settings.
struct AdamAxis {
  double alpha = 5e-2;       // step size
  double zeta = 0.9;         // first-moment decay
  double varpi = 0.999;      // second-moment decay
  double gamma_stop = 1e-5;  // relative-change stopping threshold
};

struct AdamHyper {
  AdamAxis x;
  AdamAxis y;
  double epsilon = 1e-8;
  int max_iterations = 500;

  void validate() const;
};

/// Bias-corrected moment state for one scalar parameter.
class AdamMoments {
 public:
  /// Feeds gradient `grad` at 1-based iteration `k` and returns the ascent step.
  double step(double grad, int k, const AdamAxis& axis, double epsilon);
  void reset() { first_ = second_ = 0.0; }

  double first() const { return first_; }
  double second() const { return second_; }

 private:
  double first_ = 0.0;
  double second_ = 0.0;
};

struct TraceRow {
  int k = 0;
  double vx = 0.0;
  double vy = 0.0;
  double objective = 0.0;
  double grad_x = 0.0;
  double grad_y = 0.0;
};

/// Row k = 0 holds the initial point; rows 1..iterations follow.
using OptimizerTrace = std::vector<TraceRow>;

void write_trace_csv(std::ostream& os, const OptimizerTrace& trace);

class EstimationDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Forward model and likelihood for a fixed observation, position estimate
/// and transmitted beamformer. Everything that does not depend on v is
/// precomputed, so objective and gradient evaluations are O(M).
class VelocityLikelihood {
 public:
  VelocityLikelihood(const SystemConfig& sys, ComplexVec y, const Vec2& p_hat, Beamformer f,
                     double s_amp);

  /// b(v) = s H(N; v, p_hat) f.
  ComplexVec mean(const Vec2& v) const;
  double objective(const Vec2& v) const;
  double gradient(const Vec2& v, Axis axis) const;
  Vec2 gradient(const Vec2& v) const;

  const ComplexVec& observation() const { return y_; }

 private:
  ComplexVec response(const Vec2& v) const;
  double gradient_with(const ComplexVec& a, const ComplexVec& b, Axis axis) const;

  ComplexVec y_;
  Beamformer f_;
  ComplexVec steer_;
  RealVec g_;
  RealVec q_;
  double gain_;   // s * alpha_2(p_hat)
  double phase_;  // 2 pi / lambda * N T_s
};

double ml_objective(const SystemConfig& sys, const Observation& obs, const Vec2& p_hat,
                    const Vec2& v, const Beamformer& f, double s_amp);

double grad_velocity(const SystemConfig& sys, const Observation& obs, const Vec2& p_hat,
                     const Vec2& v, const Beamformer& f, double s_amp, Axis axis);

struct VelocityEstimate {
  Vec2 velocity;
  OptimizerTrace trace;
  int iterations = 0;
  bool converged = false;  // stopped on the relative-change rule before K
};

/// Alternating Adam: vx is stepped with the gradient at (vx_{k-1}, vy_{k-1}),
/// then vy with the gradient at (vx_k, vy_{k-1}). Stops after K iterations
/// or once both relative changes fall below their thresholds.
VelocityEstimate adam_ao_estimate(const VelocityLikelihood& lik, const Vec2& v_init,
                                  const AdamHyper& hyper, bool record_trace = false);

/// Ablations: Adam on both axes at once, or plain gradient ascent.
VelocityEstimate gd_estimate(const VelocityLikelihood& lik, const Vec2& v_init,
                             const AdamHyper& hyper, GdVariant variant,
                             bool record_trace = false);

/// One closed-loop AGD-AO step: p_hat = prev_p + dT prev_v, then the
/// velocity is estimated starting from prev_v.
MotionState agdao_track_step(const SystemConfig& sys, const MotionState& previous,
                             const Observation& obs, const Beamformer& f, double s_amp,
                             const AdamHyper& hyper, int* iterations = nullptr);

}  // namespace nfbeam
