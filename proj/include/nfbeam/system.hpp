// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nfbeam/array_channel.hpp"

namespace nfbeam {

/// Physical layer: array, propagation, and the symbol/CPI timing grid.
struct SystemConfig {
  ArrayGeometry array = ArrayGeometry::half_wavelength(512, 30e9);
  PathlossModel pathloss;
  double symbol_period = 1e-5;  // s
  int symbols_per_cpi = 10;

  /// Delta T = N T_s.
  double cpi_duration() const { return symbols_per_cpi * symbol_period; }
  int num_antennas() const { return array.num_antennas; }

  void validate() const;
};

}  // namespace nfbeam
