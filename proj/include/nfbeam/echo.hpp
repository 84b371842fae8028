// SPDX-License-Identifier: Apache-2.0
//
// Matched-filtered echo observations and downlink SNR / throughput.

#pragma once

#include <span>
#include <vector>

#include "nfbeam/rng.hpp"
#include "nfbeam/system.hpp"

namespace nfbeam {

using Beamformer = ComplexVec;
/// One unit-norm beamformer per symbol; element 0 is symbol n = 1.
using BeamformerSet = std::vector<Beamformer>;

inline constexpr double kUnitNormTolerance = 1e-9;

struct NoiseConfig {
  double sigma_c2 = 1e-8;  // downlink noise power at the user
  double sigma_e2 = 1e-8;  // echo noise power at the base station
  /// Scale the echo by sqrt(P). When false the matched-filter mean is H f.
  bool include_transmit_power = true;

  void validate() const;
};

struct Observation {
  ComplexVec y;
  long cpi_index = 0;
};

class BeamformerNormError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double dbm_to_watts(double dbm);

/// Amplitude applied to the echo mean: sqrt(P) or 1.
double echo_amplitude(const NoiseConfig& noise, double power_watts);

void require_unit_norm(const Beamformer& f);

/// s H(N; v, p) f, the noiseless observation at the last symbol of a CPI.
ComplexVec observation_mean(const SystemConfig& sys, const MotionState& eta,
                            const Beamformer& f, double s_amp);

/// y = s H(N; v, p) f + z, z ~ CN(0, sigma_e2 I).
Observation synthesize_observation(const SystemConfig& sys, const MotionState& eta,
                                   const Beamformer& f, const NoiseConfig& noise,
                                   double power_watts, RandomStream& rng, long cpi_index = 0);

/// gamma(n) = P |h^T(n) f|^2 / sigma_c2.
double received_snr(const SystemConfig& sys, const MotionState& eta, const Beamformer& f, int n,
                    double power_watts, double sigma_c2);

/// (1/N) sum_n log2(1 + gamma(n)).
double cpi_throughput(const SystemConfig& sys, const MotionState& eta,
                      std::span<const Beamformer> beamformers, double power_watts,
                      double sigma_c2);

/// log2(1 + P M alpha_1^2 / sigma_c2), the perfect-CSI rate.
double mrt_throughput(const SystemConfig& sys, const MotionState& eta, double power_watts,
                      double sigma_c2);

}  // namespace nfbeam
