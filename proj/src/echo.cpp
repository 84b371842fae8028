// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/echo.hpp"

#include <cmath>

namespace nfbeam {

void SystemConfig::validate() const {
  array.validate();
  pathloss.validate();
  if (!(symbol_period > 0.0)) throw ConfigError("timing.symbol_period", "must be positive");
  if (symbols_per_cpi < 1) throw ConfigError("timing.symbols_per_cpi", "must be >= 1");
}

void NoiseConfig::validate() const {
  if (!(sigma_c2 > 0.0)) throw ConfigError("noise.sigma_c2", "must be positive");
  if (!(sigma_e2 >= 0.0)) throw ConfigError("noise.sigma_e2", "must be >= 0");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double echo_amplitude(const NoiseConfig& noise, double power_watts) {
  return noise.include_transmit_power ? std::sqrt(power_watts) : 1.0;
}

void require_unit_norm(const Beamformer& f) {
  if (std::abs(f.norm() - 1.0) > kUnitNormTolerance) {
    throw BeamformerNormError("beamformer norm " + std::to_string(f.norm()) + " is not 1");
  }
}

ComplexVec observation_mean(const SystemConfig& sys, const MotionState& eta,
                            const Beamformer& f, double s_amp) {
  return s_amp * roundtrip_apply(sys.array, sys.pathloss, sys.symbols_per_cpi, sys.symbol_period,
                                 eta.velocity(), eta.position(), f);
}

Observation synthesize_observation(const SystemConfig& sys, const MotionState& eta,
                                   const Beamformer& f, const NoiseConfig& noise,
                                   double power_watts, RandomStream& rng, long cpi_index) {
  require_unit_norm(f);
  Observation obs{observation_mean(sys, eta, f, echo_amplitude(noise, power_watts)), cpi_index};
  if (noise.sigma_e2 > 0.0) {
    for (Eigen::Index m = 0; m < obs.y.size(); ++m) obs.y(m) += rng.complex_normal(noise.sigma_e2);
  }
  return obs;
}

double received_snr(const SystemConfig& sys, const MotionState& eta, const Beamformer& f, int n,
                    double power_watts, double sigma_c2) {
  const ComplexVec h = downlink_channel(sys.array, sys.pathloss, n, sys.symbol_period,
                                        eta.velocity(), eta.position());
  return power_watts * std::norm((h.transpose() * f)(0)) / sigma_c2;
}

double cpi_throughput(const SystemConfig& sys, const MotionState& eta,
                      std::span<const Beamformer> beamformers, double power_watts,
                      double sigma_c2) {
  if (beamformers.empty()) throw std::invalid_argument("empty beamformer set");
  // The static part of the channel is shared by every symbol.
  const Vec2 p = eta.position();
  const ComplexVec steer = steering_vector(sys.array, p);
  const RealVec vm = element_velocities(sys.array, eta.velocity(), p);
  const double alpha1 = pathloss(sys.pathloss, p, PathKind::Downlink);
  const double k = sys.array.wavenumber();

  double total = 0.0;
  for (size_t i = 0; i < beamformers.size(); ++i) {
    const auto& f = beamformers[i];
    require_unit_norm(f);
    const double t = static_cast<double>(i + 1) * sys.symbol_period;
    cdouble inner{0.0, 0.0};
    for (Eigen::Index m = 0; m < f.size(); ++m) {
      const double phase = -k * t * vm(m);
      inner += steer(m) * cdouble(std::cos(phase), std::sin(phase)) * f(m);
    }
    const double gamma = power_watts * alpha1 * alpha1 * std::norm(inner) / sigma_c2;
    total += std::log2(1.0 + gamma);
  }
  return total / static_cast<double>(beamformers.size());
}

double mrt_throughput(const SystemConfig& sys, const MotionState& eta, double power_watts,
                      double sigma_c2) {
  const double alpha1 = pathloss(sys.pathloss, eta.position(), PathKind::Downlink);
  return std::log2(1.0 + power_watts * sys.num_antennas() * alpha1 * alpha1 / sigma_c2);
}

}  // namespace nfbeam
