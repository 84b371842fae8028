// SPDX-License-Identifier: Apache-2.0
//
// Self-check suites run by `nfbeam check`: closed-form throughput, gradient
// and Jacobian against finite differences, and geometric identities, each
// over randomly drawn states.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nfbeam/experiment.hpp"

namespace nfbeam {

struct CheckResult {
  std::string name;
  long samples = 0;
  double worst = 0.0;  // largest observed error
  double tolerance = 0.0;
  bool passed = false;
};

/// Draws x in [-10, 10] m, y in [2, 20] m, v in [-10, 10]^2 m/s. Under the
/// absolute convention, positions within `min_axis_gap` of an antenna's x
/// coordinate are redrawn.
MotionState random_state(RandomStream& rng, const ArrayGeometry& geom, double min_axis_gap = 0.0);

CheckResult check_mrt(const ExperimentConfig& config, int samples);
CheckResult check_gradient(const ExperimentConfig& config, int samples, int num_antennas,
                           Projection projection);
CheckResult check_jacobian(const ExperimentConfig& config, int samples, int num_antennas,
                           Projection projection);
CheckResult check_geometry(const ExperimentConfig& config, int samples);

/// Every suite at its default sample count.
std::vector<CheckResult> run_checks(const ExperimentConfig& config);

void write_checks_csv(std::ostream& os, std::span<const CheckResult> rows);

}  // namespace nfbeam
