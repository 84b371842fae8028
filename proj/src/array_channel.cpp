// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/array_channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nfbeam {

namespace {

cdouble unit_phasor(double phase) { return {std::cos(phase), std::sin(phase)}; }

double range_squared(const Vec2& p) { return p.squaredNorm(); }

void require_off_origin(const Vec2& p) {
  if (p.norm() < kDegenerateDistance) {
    throw DegeneratePositionError("user position coincides with the array origin");
  }
}

}  // namespace

ArrayGeometry ArrayGeometry::half_wavelength(int num_antennas, double carrier_hz,
                                             Projection projection) {
  if (!(carrier_hz > 0.0)) throw ConfigError("array.carrier_hz", "must be positive");
  const double lambda = kSpeedOfLight / carrier_hz;
  return ArrayGeometry{num_antennas, 0.5 * lambda, lambda, projection};
}

void ArrayGeometry::validate() const {
  if (num_antennas < 1) throw ConfigError("array.num_antennas", "must be >= 1");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("array.spacing_wavelengths", "must be positive");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    throw ConfigError("array.carrier_hz", "must be positive");
  }
}

void PathlossModel::validate() const {
  if (!(beta > 0.0)) throw ConfigError("pathloss.beta", "must be positive");
  if (!(sigma_rcs > 0.0)) throw ConfigError("pathloss.sigma_rcs", "must be positive");
}

std::vector<Vec2> antenna_positions(const ArrayGeometry& geom) {
  std::vector<Vec2> out;
  out.reserve(static_cast<size_t>(geom.num_antennas));
  for (int m = 0; m < geom.num_antennas; ++m) out.emplace_back(geom.antenna_x(m), 0.0);
  return out;
}

RealVec element_distances(const ArrayGeometry& geom, const Vec2& p) {
  RealVec r(geom.num_antennas);
  for (int m = 0; m < geom.num_antennas; ++m) {
    r(m) = std::hypot(geom.antenna_x(m) - p.x(), p.y());
    if (r(m) < kDegenerateDistance) {
      throw DegeneratePositionError("user position coincides with antenna " + std::to_string(m));
    }
  }
  return r;
}

ComplexVec steering_vector(const ArrayGeometry& geom, const Vec2& p) {
  const RealVec r = element_distances(geom, p);
  const double k = geom.wavenumber();
  ComplexVec a(geom.num_antennas);
  for (int m = 0; m < geom.num_antennas; ++m) a(m) = unit_phasor(-k * r(m));
  return a;
}

ProjectionCoeffs projection_coeffs(const ArrayGeometry& geom, const Vec2& p) {
  const RealVec r = element_distances(geom, p);
  ProjectionCoeffs c{RealVec(geom.num_antennas), RealVec(geom.num_antennas)};
  for (int m = 0; m < geom.num_antennas; ++m) {
    const double ux = p.x() - geom.antenna_x(m);
    const double uy = p.y();
    if (geom.projection == Projection::Absolute) {
      c.g(m) = std::abs(ux) / r(m);
      c.q(m) = std::abs(uy) / r(m);
    } else {
      c.g(m) = ux / r(m);
      c.q(m) = uy / r(m);
    }
  }
  return c;
}

RealVec element_velocities(const ArrayGeometry& geom, const Vec2& v, const Vec2& p) {
  const ProjectionCoeffs c = projection_coeffs(geom, p);
  return c.g * v.x() + c.q * v.y();
}

ComplexVec doppler_vector(const ArrayGeometry& geom, int n, double symbol_period,
                          const Vec2& v, const Vec2& p) {
  if (n < 1) throw std::invalid_argument("symbol index must be >= 1");
  const RealVec vm = element_velocities(geom, v, p);
  const double scale = -geom.wavenumber() * n * symbol_period;
  ComplexVec d(geom.num_antennas);
  for (int m = 0; m < geom.num_antennas; ++m) d(m) = unit_phasor(scale * vm(m));
  return d;
}

double pathloss(const PathlossModel& model, const Vec2& p, PathKind kind) {
  require_off_origin(p);
  const double r2 = range_squared(p);
  switch (kind) {
    case PathKind::Downlink:
      return model.beta / r2;
    case PathKind::RoundTrip:
      return model.sigma_rcs * model.beta / (4.0 * r2);
  }
  return 0.0;
}

Vec2 roundtrip_pathloss_gradient(const PathlossModel& model, const Vec2& p) {
  require_off_origin(p);
  const double r2 = range_squared(p);
  // d/dx [c / (4 r^2)] = -c x / (2 r^4)
  const double scale = -model.sigma_rcs * model.beta / (2.0 * r2 * r2);
  return scale * p;
}

ComplexVec array_response(const ArrayGeometry& geom, int n, double symbol_period,
                          const Vec2& v, const Vec2& p) {
  const RealVec r = element_distances(geom, p);
  const RealVec vm = element_velocities(geom, v, p);
  const double k = geom.wavenumber();
  const double t = n * symbol_period;
  ComplexVec a(geom.num_antennas);
  for (int m = 0; m < geom.num_antennas; ++m) a(m) = unit_phasor(-k * r(m)) * unit_phasor(-k * t * vm(m));
  return a;
}

ComplexVec downlink_channel(const ArrayGeometry& geom, const PathlossModel& model, int n,
                            double symbol_period, const Vec2& v, const Vec2& p) {
  return pathloss(model, p, PathKind::Downlink) * array_response(geom, n, symbol_period, v, p);
}

ComplexMat roundtrip_channel(const ArrayGeometry& geom, const PathlossModel& model, int n,
                             double symbol_period, const Vec2& v, const Vec2& p) {
  const ComplexVec a = array_response(geom, n, symbol_period, v, p);
  return pathloss(model, p, PathKind::RoundTrip) * (a * a.transpose());
}

ComplexVec roundtrip_apply(const ArrayGeometry& geom, const PathlossModel& model, int n,
                           double symbol_period, const Vec2& v, const Vec2& p,
                           const ComplexVec& f) {
  const ComplexVec a = array_response(geom, n, symbol_period, v, p);
  const cdouble proj = (a.transpose() * f)(0);
  return (pathloss(model, p, PathKind::RoundTrip) * proj) * a;
}

PolarState to_polar(const MotionState& eta) {
  const double theta = std::atan2(eta.y, eta.x);
  return {theta, std::hypot(eta.x, eta.y),
          eta.vx * std::cos(theta) + eta.vy * std::sin(theta),
          eta.vx * std::sin(theta) + eta.vy * std::cos(theta)};
}

}  // namespace nfbeam
