// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "nfbeam/types.hpp"

namespace nfbeam {

/// Seeded generator identified by (master seed, stream id). Two streams with
/// different ids never share state, so adding draws to one consumer leaves
/// every other consumer's sequence untouched.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);
  RandomStream(std::uint64_t seed, std::string_view stream_name);

  double normal(double variance);
  /// Circularly-symmetric CN(0, variance): real and imaginary parts each N(0, variance/2).
  cdouble complex_normal(double variance);

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t stream_id(std::string_view name);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> standard_{0.0, 1.0};
};

/// Named streams used by the simulation harness.
namespace streams {
inline constexpr std::string_view kTrajectory = "trajectory";
inline constexpr std::string_view kEchoNoise = "echo-noise";
inline constexpr std::string_view kEstimatorInit = "estimator-init";
}  // namespace streams

}  // namespace nfbeam
