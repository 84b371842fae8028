// SPDX-License-Identifier: Apache-2.0
//
// Closed-loop simulation harness. Each CPI:
//   transmit with the current beamformers -> synthesize the echo ->
//   estimate/track -> design the next CPI's beamformers -> log a MetricRow.
// CPI 1 is served from the initial-access state, which is exact.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nfbeam/agdao.hpp"
#include "nfbeam/ekf.hpp"

namespace nfbeam {

enum class Method { Agdao, Ekf, Ff, Fd, Opt };

const char* to_string(Method m);
Method method_from_string(const std::string& name);

/// Open-loop single-CPI setup for optimizer convergence studies.
struct ConvergenceSetup {
  MotionState state{0.0, 10.0, 8.0, 7.0};
  Vec2 v_init{0.0, 0.0};
  int num_seeds = 10;
  bool noiseless = false;
};

struct ExperimentConfig {
  SystemConfig system;
  NoiseConfig noise;
  MotionNoise motion;
  MotionState initial{5.0, 10.0, 8.0, 7.0};
  long num_cpis = 2000;
  Method method = Method::Ekf;
  AdamHyper adam;
  double p_init_scale = 0.1;
  double power_dbm = 30.0;
  double feedback_period_s = 0.1;
  ConvergenceSetup convergence;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  void validate() const;
  double power_watts() const { return dbm_to_watts(power_dbm); }
  double echo_amplitude() const;
  EkfConfig ekf_config() const;
};

struct MetricRow {
  long cpi = 0;
  MotionState truth;
  MotionState estimate;
  double rate_method = 0.0;
  double rate_opt = 0.0;
  double rate_ff = 0.0;
  double rate_fd = 0.0;
  double err_vx = 0.0;
  double err_vy = 0.0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

struct BeliefRow {
  long cpi = 0;
  MotionState mean;
  Vec4 cov_diag = Vec4::Zero();
  double innovation_norm = 0.0;
};

struct RunSummary {
  std::string method;
  double power_dbm = 0.0;
  long num_cpis = 0;
  double mean_rate_method = 0.0;
  double mean_rate_opt = 0.0;
  double mean_rate_ff = 0.0;
  double mean_rate_fd = 0.0;
  double mean_position_error = 0.0;
  double mean_err_vx = 0.0;
  double mean_err_vy = 0.0;
};

struct RunResult {
  std::vector<MetricRow> rows;
  std::vector<BeliefRow> beliefs;  // EKF only
  RunSummary summary;
  /// Worst covariance health seen over the run (EKF only).
  CovarianceHealth worst_health{0.0, std::numeric_limits<double>::infinity()};
  long ridge_updates = 0;
};

RunResult run_experiment(const ExperimentConfig& config);

/// Trailing moving average; output l covers inputs l..l+window-1, so the
/// result has length n - window + 1 (empty when window > n).
std::vector<double> moving_average(std::span<const double> series, size_t window);

/// One run per (power, method); same seed, hence the same trajectory and
/// echo-noise realisation, in every cell.
std::vector<RunSummary> power_sweep(const ExperimentConfig& config,
                                    std::span<const double> powers_dbm,
                                    std::span<const Method> methods);

struct ConvergenceRecord {
  GdVariant variant = GdVariant::AdamAo;
  int seed_index = 0;
  TraceRow row;
  double err_vx = 0.0;
  double err_vy = 0.0;
  double rse = 0.0;
};

std::vector<ConvergenceRecord> convergence_study(const ExperimentConfig& config,
                                                 std::span<const GdVariant> variants);

/// Per-variant medians over seeds. A run that stopped before iteration
/// `probe_k` holds its last value.
struct ConvergenceSummary {
  GdVariant variant = GdVariant::AdamAo;
  int seeds = 0;
  int probe_k = 100;
  double median_rse_initial = 0.0;
  double median_rse_at_probe = 0.0;
  double median_final_err_vx = 0.0;
  double median_final_err_vy = 0.0;
  double median_iterations = 0.0;
};

std::vector<ConvergenceSummary> summarize_convergence(std::span<const ConvergenceRecord> records,
                                                      int probe_k = 100);

double median(std::vector<double> values);

// CSV emission. Every floating-point field is written with 17 significant
// digits so that rows parse back exactly.
void write_metrics_csv(std::ostream& os, std::span<const MetricRow> rows);
std::vector<MetricRow> read_metrics_csv(std::istream& is);
void write_summary_csv(std::ostream& os, std::span<const RunSummary> rows);
void write_beliefs_csv(std::ostream& os, std::span<const BeliefRow> rows);
void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRecord> rows);
void write_convergence_summary_csv(std::ostream& os, std::span<const ConvergenceSummary> rows);

}  // namespace nfbeam
