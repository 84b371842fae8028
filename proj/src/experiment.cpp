// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace nfbeam {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double mean_of(const std::vector<MetricRow>& rows, double MetricRow::*field) {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.*field;
  return s / static_cast<double>(rows.size());
}

RunSummary summarize(const ExperimentConfig& config, const std::vector<MetricRow>& rows) {
  RunSummary s;
  s.method = to_string(config.method);
  s.power_dbm = config.power_dbm;
  s.num_cpis = static_cast<long>(rows.size());
  s.mean_rate_method = mean_of(rows, &MetricRow::rate_method);
  s.mean_rate_opt = mean_of(rows, &MetricRow::rate_opt);
  s.mean_rate_ff = mean_of(rows, &MetricRow::rate_ff);
  s.mean_rate_fd = mean_of(rows, &MetricRow::rate_fd);
  s.mean_err_vx = mean_of(rows, &MetricRow::err_vx);
  s.mean_err_vy = mean_of(rows, &MetricRow::err_vy);
  double pos = 0.0;
  for (const auto& r : rows) pos += (r.truth.position() - r.estimate.position()).norm();
  s.mean_position_error = rows.empty() ? 0.0 : pos / static_cast<double>(rows.size());
  return s;
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::Agdao: return "agdao";
    case Method::Ekf: return "ekf";
    case Method::Ff: return "ff";
    case Method::Fd: return "fd";
    case Method::Opt: return "opt";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "agdao") return Method::Agdao;
  if (name == "ekf") return Method::Ekf;
  if (name == "ff") return Method::Ff;
  if (name == "fd") return Method::Fd;
  if (name == "opt") return Method::Opt;
  throw ConfigError("method", "unknown method '" + name + "' (agdao|ekf|ff|fd|opt)");
}

void ExperimentConfig::validate() const {
  system.validate();
  noise.validate();
  motion.validate();
  adam.validate();
  if (num_cpis < 1) throw ConfigError("num_cpis", "must be >= 1");
  if (!(p_init_scale >= 0.0)) throw ConfigError("ekf.p_init_scale", "must be >= 0");
  if (!std::isfinite(power_dbm)) throw ConfigError("power_dbm", "must be finite");
  if (!initial.vector().allFinite()) throw ConfigError("initial", "must be finite");
  if (initial.position().norm() < kDegenerateDistance) {
    throw ConfigError("initial", "position must not be at the array origin");
  }
  (void)feedback_period_cpis(feedback_period_s, system.cpi_duration());
  if (convergence.num_seeds < 1) throw ConfigError("convergence.seeds", "must be >= 1");
}

double ExperimentConfig::echo_amplitude() const {
  return nfbeam::echo_amplitude(noise, power_watts());
}

EkfConfig ExperimentConfig::ekf_config() const {
  return EkfConfig{motion, noise.sigma_e2, p_init_scale};
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const SystemConfig& sys = config.system;
  const double power = config.power_watts();
  const double s_amp = config.echo_amplitude();
  const double sigma_c2 = config.noise.sigma_c2;
  const double dt = sys.cpi_duration();

  RandomStream traj_rng(config.seed, streams::kTrajectory);
  RandomStream echo_rng(config.seed, streams::kEchoNoise);

  FeedbackTracker fd(sys, feedback_period_cpis(config.feedback_period_s, dt), config.initial);
  std::optional<EkfTracker> ekf;
  if (config.method == Method::Ekf) ekf.emplace(sys, config.ekf_config(), config.initial);

  RunResult result;
  result.rows.reserve(static_cast<size_t>(config.num_cpis));

  MotionState truth = config.initial;
  MotionState estimate = config.initial;
  BeamformerSet next_bf;  // designed during the previous CPI

  for (long l = 1; l <= config.num_cpis; ++l) {
    if (l > 1) truth = step_motion(truth, dt, config.motion, traj_rng);

    const BeamformerSet opt_bf = opt_beamformers(sys, truth);
    const BeamformerSet fd_bf = fd.beamformers(l);
    BeamformerSet bf;
    switch (config.method) {
      case Method::Agdao:
      case Method::Ekf:
        bf = l == 1 ? opt_bf : std::move(next_bf);
        break;
      case Method::Ff: bf = ff_beamformers(sys, truth); break;
      case Method::Fd: bf = fd_bf; break;
      case Method::Opt: bf = opt_bf; break;
    }

    MetricRow row;
    row.cpi = l;
    row.truth = truth;
    row.rate_method = cpi_throughput(sys, truth, bf, power, sigma_c2);
    row.rate_opt = cpi_throughput(sys, truth, opt_bf, power, sigma_c2);
    row.rate_ff = cpi_throughput(sys, truth, ff_beamformers(sys, truth), power, sigma_c2);
    row.rate_fd = cpi_throughput(sys, truth, fd_bf, power, sigma_c2);

    switch (config.method) {
      case Method::Agdao: {
        if (l > 1) {
          const Observation obs = synthesize_observation(sys, truth, bf.back(), config.noise,
                                                         power, echo_rng, l);
          estimate = agdao_track_step(sys, estimate, obs, bf.back(), s_amp, config.adam);
        }
        next_bf = beamformers_from_estimate(sys, estimate);
        break;
      }
      case Method::Ekf: {
        if (l > 1) {
          const Observation obs = synthesize_observation(sys, truth, bf.back(), config.noise,
                                                         power, echo_rng, l);
          const TrackerBelief& b = ekf->assimilate(obs, bf.back(), s_amp);
          estimate = b.mean;
          if (ekf->diagnostics().ridge_used) ++result.ridge_updates;
          const CovarianceHealth h = covariance_health(b.covariance);
          result.worst_health.asymmetry = std::max(result.worst_health.asymmetry, h.asymmetry);
          result.worst_health.min_eig_over_trace =
              std::min(result.worst_health.min_eig_over_trace, h.min_eig_over_trace);
        }
        const TrackerBelief& b = ekf->belief();
        result.beliefs.push_back({l, b.mean, b.covariance.diagonal(),
                                  l > 1 ? ekf->diagnostics().innovation_norm : 0.0});
        next_bf = ekf->forecast();
        break;
      }
      case Method::Fd: estimate = fd.belief(l); break;
      case Method::Ff:
      case Method::Opt: estimate = truth; break;
    }
    fd.report(l, truth);

    row.estimate = estimate;
    row.err_vx = std::abs(truth.vx - estimate.vx);
    row.err_vy = std::abs(truth.vy - estimate.vy);
    result.rows.push_back(row);
  }

  result.summary = summarize(config, result.rows);
  return result;
}

std::vector<double> moving_average(std::span<const double> series, size_t window) {
  if (window == 0) throw std::invalid_argument("moving average window must be >= 1");
  std::vector<double> out;
  if (window > series.size()) return out;
  out.reserve(series.size() - window + 1);
  for (size_t l = window - 1; l < series.size(); ++l) {
    double s = 0.0;
    for (size_t k = 0; k < window; ++k) s += series[l - k];
    out.push_back(s / static_cast<double>(window));
  }
  return out;
}

std::vector<RunSummary> power_sweep(const ExperimentConfig& config,
                                    std::span<const double> powers_dbm,
                                    std::span<const Method> methods) {
  std::vector<ExperimentConfig> cells;
  for (const double p : powers_dbm) {
    for (const Method m : methods) {
      ExperimentConfig cell = config;
      cell.power_dbm = p;
      cell.method = m;
      cells.push_back(std::move(cell));
    }
  }
  // Cells are independent; each slot is written by exactly one worker, so
  // the result order (and content) does not depend on scheduling.
  std::vector<RunSummary> out(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) {
      try {
        out[i] = run_experiment(cells[i]).summary;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const size_t workers =
      std::min<size_t>(cells.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<ConvergenceRecord> convergence_study(const ExperimentConfig& config,
                                                 std::span<const GdVariant> variants) {
  config.validate();
  const SystemConfig& sys = config.system;
  const ConvergenceSetup& cs = config.convergence;
  const MotionState& gt = cs.state;
  const double s_amp = config.echo_amplitude();
  NoiseConfig noise = config.noise;
  if (cs.noiseless) noise.sigma_e2 = 0.0;

  const Beamformer f = opt_beamformers(sys, gt).back();
  std::vector<ConvergenceRecord> out;
  for (int seed = 0; seed < cs.num_seeds; ++seed) {
    RandomStream rng(config.seed + static_cast<std::uint64_t>(seed), streams::kEchoNoise);
    const Observation obs = synthesize_observation(sys, gt, f, noise, config.power_watts(), rng);
    const VelocityLikelihood lik(sys, obs.y, gt.position(), f, s_amp);
    for (const GdVariant variant : variants) {
      const VelocityEstimate est = gd_estimate(lik, cs.v_init, config.adam, variant, true);
      for (const TraceRow& r : est.trace) {
        const double ex = std::abs(r.vx - gt.vx);
        const double ey = std::abs(r.vy - gt.vy);
        out.push_back({variant, seed, r, ex, ey, std::hypot(ex, ey)});
      }
    }
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<ConvergenceSummary> summarize_convergence(std::span<const ConvergenceRecord> records,
                                                      int probe_k) {
  struct Run {
    double initial = 0.0, probe = 0.0, final_vx = 0.0, final_vy = 0.0;
    int last_k = -1;
  };
  std::vector<GdVariant> order;
  std::map<std::pair<GdVariant, int>, Run> runs;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.variant) == order.end()) order.push_back(r.variant);
    Run& run = runs[{r.variant, r.seed_index}];
    if (r.row.k == 0) run.initial = r.rse;
    if (r.row.k <= probe_k) run.probe = r.rse;
    if (r.row.k > run.last_k) {
      run.last_k = r.row.k;
      run.final_vx = r.err_vx;
      run.final_vy = r.err_vy;
    }
  }
  std::vector<ConvergenceSummary> out;
  for (const GdVariant v : order) {
    std::vector<double> initial, probe, fvx, fvy, iters;
    for (const auto& [key, run] : runs) {
      if (key.first != v) continue;
      initial.push_back(run.initial);
      probe.push_back(run.probe);
      fvx.push_back(run.final_vx);
      fvy.push_back(run.final_vy);
      iters.push_back(run.last_k);
    }
    out.push_back({v, static_cast<int>(initial.size()), probe_k, median(initial), median(probe),
                   median(fvx), median(fvy), median(iters)});
  }
  return out;
}

void write_metrics_csv(std::ostream& os, std::span<const MetricRow> rows) {
  os << "cpi,x,y,vx,vy,x_hat,y_hat,vx_hat,vy_hat,rate_method,rate_opt,rate_ff,rate_fd,err_vx,"
        "err_vy\n";
  for (const auto& r : rows) {
    os << r.cpi << ',' << num(r.truth.x) << ',' << num(r.truth.y) << ',' << num(r.truth.vx)
       << ',' << num(r.truth.vy) << ',' << num(r.estimate.x) << ',' << num(r.estimate.y) << ','
       << num(r.estimate.vx) << ',' << num(r.estimate.vy) << ',' << num(r.rate_method) << ','
       << num(r.rate_opt) << ',' << num(r.rate_ff) << ',' << num(r.rate_fd) << ','
       << num(r.err_vx) << ',' << num(r.err_vy) << '\n';
  }
}

std::vector<MetricRow> read_metrics_csv(std::istream& is) {
  std::vector<MetricRow> rows;
  std::string line;
  if (!std::getline(is, line)) return rows;  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 15) throw std::runtime_error("metrics row has " + std::to_string(f.size()) + " fields");
    auto d = [&](size_t i) { return std::stod(f[i]); };
    MetricRow r;
    r.cpi = std::stol(f[0]);
    r.truth = {d(1), d(2), d(3), d(4)};
    r.estimate = {d(5), d(6), d(7), d(8)};
    r.rate_method = d(9);
    r.rate_opt = d(10);
    r.rate_ff = d(11);
    r.rate_fd = d(12);
    r.err_vx = d(13);
    r.err_vy = d(14);
    rows.push_back(r);
  }
  return rows;
}

void write_summary_csv(std::ostream& os, std::span<const RunSummary> rows) {
  os << "method,power_dbm,num_cpis,mean_rate_method,mean_rate_opt,mean_rate_ff,mean_rate_fd,"
        "mean_position_error,mean_err_vx,mean_err_vy\n";
  for (const auto& s : rows) {
    os << s.method << ',' << num(s.power_dbm) << ',' << s.num_cpis << ','
       << num(s.mean_rate_method) << ',' << num(s.mean_rate_opt) << ',' << num(s.mean_rate_ff)
       << ',' << num(s.mean_rate_fd) << ',' << num(s.mean_position_error) << ','
       << num(s.mean_err_vx) << ',' << num(s.mean_err_vy) << '\n';
  }
}

void write_beliefs_csv(std::ostream& os, std::span<const BeliefRow> rows) {
  os << "cpi,x,y,vx,vy,p_xx,p_yy,p_vxvx,p_vyvy,innovation_norm\n";
  for (const auto& b : rows) {
    os << b.cpi << ',' << num(b.mean.x) << ',' << num(b.mean.y) << ',' << num(b.mean.vx) << ','
       << num(b.mean.vy);
    for (int i = 0; i < 4; ++i) os << ',' << num(b.cov_diag(i));
    os << ',' << num(b.innovation_norm) << '\n';
  }
}

void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRecord> rows) {
  os << "variant,seed,k,vx,vy,objective,grad_x,grad_y,err_vx,err_vy,rse\n";
  for (const auto& c : rows) {
    os << to_string(c.variant) << ',' << c.seed_index << ',' << c.row.k << ',' << num(c.row.vx)
       << ',' << num(c.row.vy) << ',' << num(c.row.objective) << ',' << num(c.row.grad_x) << ','
       << num(c.row.grad_y) << ',' << num(c.err_vx) << ',' << num(c.err_vy) << ','
       << num(c.rse) << '\n';
  }
}

void write_convergence_summary_csv(std::ostream& os, std::span<const ConvergenceSummary> rows) {
  os << "variant,seeds,probe_k,median_rse_initial,median_rse_at_probe,median_final_err_vx,"
        "median_final_err_vy,median_iterations\n";
  for (const auto& c : rows) {
    os << to_string(c.variant) << ',' << c.seeds << ',' << c.probe_k << ','
       << num(c.median_rse_initial) << ',' << num(c.median_rse_at_probe) << ','
       << num(c.median_final_err_vx) << ',' << num(c.median_final_err_vy) << ','
       << num(c.median_iterations) << '\n';
  }
}

}  // namespace nfbeam
