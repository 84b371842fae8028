// SPDX-License-Identifier: Apache-2.0
//
// Uniform linear array geometry and the dynamic near-field channel model.
//
// The array lies on the x-axis, centred at the origin. Antenna m (0-based
// here) sits at (delta_m * d, 0) with delta_m = m - (M - 1) / 2. A user at
// p = (x, y) moving with v = (vx, vy) sees per-element distances r_m, a
// spherical-wavefront steering vector, and a per-element Doppler vector
// built from the projection of v onto each element's line of sight.

#pragma once

#include <vector>

#include "nfbeam/types.hpp"

namespace nfbeam {

/// How the velocity is projected onto each element's line of sight.
///  - Absolute: g_m = |k_m,x - x| / r_m, q_m = |k_m,y - y| / r_m.
///  - Signed:   g_m = (x - k_m,x) / r_m, q_m = (y - k_m,y) / r_m.
/// The echo synthesizer and every estimator read the convention from the
/// same ArrayGeometry, so they can never disagree.
enum class Projection { Absolute, Signed };

/// Distances below this (m) are treated as a degenerate position.
inline constexpr double kDegenerateDistance = 1e-9;

struct ArrayGeometry {
  int num_antennas = 512;
  double spacing = 0.0;     // m
  double wavelength = 0.0;  // m
  Projection projection = Projection::Absolute;

  /// Half-wavelength ULA for a carrier frequency in Hz.
  static ArrayGeometry half_wavelength(int num_antennas, double carrier_hz,
                                       Projection projection = Projection::Absolute);

  void validate() const;

  /// delta for 0-based antenna index m.
  double offset(int m) const { return m - 0.5 * (num_antennas - 1); }
  double antenna_x(int m) const { return offset(m) * spacing; }
  double wavenumber() const { return 2.0 * kPi / wavelength; }
};

struct PathlossModel {
  double beta = 1.0;       // reference channel power gain
  double sigma_rcs = 1.0;  // radar cross section, held constant

  void validate() const;
};

enum class PathKind { Downlink, RoundTrip };

struct ProjectionCoeffs {
  RealVec g;  // x-axis coefficients
  RealVec q;  // y-axis coefficients
};

std::vector<Vec2> antenna_positions(const ArrayGeometry& geom);

/// r_m = ||k_m - p||. Throws DegeneratePositionError if any r_m < 1e-9 m.
RealVec element_distances(const ArrayGeometry& geom, const Vec2& p);

/// exp(-j 2pi/lambda r_m(p)).
ComplexVec steering_vector(const ArrayGeometry& geom, const Vec2& p);

ProjectionCoeffs projection_coeffs(const ArrayGeometry& geom, const Vec2& p);

/// Per-element composite velocity v_m = g_m vx + q_m vy.
RealVec element_velocities(const ArrayGeometry& geom, const Vec2& v, const Vec2& p);

/// exp(-j 2pi/lambda n T_s v_m) at symbol index n (1-based).
ComplexVec doppler_vector(const ArrayGeometry& geom, int n, double symbol_period,
                          const Vec2& v, const Vec2& p);

/// Downlink: beta / r^2. Round trip: sigma_rcs * beta / (2 r)^2.
double pathloss(const PathlossModel& model, const Vec2& p, PathKind kind);

/// Gradient of the round-trip gain with respect to (x, y).
Vec2 roundtrip_pathloss_gradient(const PathlossModel& model, const Vec2& p);

/// a(n; v, p) = steering ⊙ doppler.
ComplexVec array_response(const ArrayGeometry& geom, int n, double symbol_period,
                          const Vec2& v, const Vec2& p);

/// h = alpha_1(p) a(n; v, p).
ComplexVec downlink_channel(const ArrayGeometry& geom, const PathlossModel& model, int n,
                            double symbol_period, const Vec2& v, const Vec2& p);

/// H = alpha_2(p) a a^T (plain transpose). Dense M x M; prefer
/// roundtrip_apply when only H f is needed.
ComplexMat roundtrip_channel(const ArrayGeometry& geom, const PathlossModel& model, int n,
                             double symbol_period, const Vec2& v, const Vec2& p);

/// H f = alpha_2 a (a^T f) without forming H.
ComplexVec roundtrip_apply(const ArrayGeometry& geom, const PathlossModel& model, int n,
                           double symbol_period, const Vec2& v, const Vec2& p,
                           const ComplexVec& f);

/// Diagnostic polar view (angle, range, radial velocity, transverse velocity).
struct PolarState {
  double angle;
  double range;
  double radial_velocity;
  double transverse_velocity;
};
PolarState to_polar(const MotionState& eta);

}  // namespace nfbeam
