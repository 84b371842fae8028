// SPDX-License-Identifier: Apache-2.0
//
// nfbeam: command-line harness for the near-field tracking simulator.
//
//   nfbeam track        closed-loop run, one row per CPI
//   nfbeam sweep-power  mean throughput per (power, method)
//   nfbeam converge     single-CPI optimizer traces against ground truth
//   nfbeam check        oracle self-checks
//
// Errors are reported on stderr as one JSON object per line, e.g.
//   {"error":"config","field":"noise.sigma_e2","message":"must be >= 0"}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nfbeam/checks.hpp"
#include "nfbeam/config.hpp"

namespace fs = std::filesystem;
using namespace nfbeam;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> cpis;
  std::string method;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_method) {
  cmd->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--cpis", o.cpis, "number of CPIs");
  if (with_method) cmd->add_option("--method", o.method, "ekf, agdao, ff, fd or opt");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--set", o.sets, "override, dotted.key=value (repeatable)");
}

ExperimentConfig resolve(const CommonOptions& o) {
  std::vector<std::string> overrides = o.sets;
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  if (o.cpis) overrides.push_back("num_cpis=" + std::to_string(*o.cpis));
  if (!o.method.empty() && o.method.find(',') == std::string::npos) {
    overrides.push_back("method=\"" + o.method + "\"");
  }
  if (!o.out.empty()) overrides.push_back("out=" + nlohmann::json(o.out).dump());
  return load_config(o.config_path, overrides);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

fs::path prepare_out(const ExperimentConfig& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  fn(os);
}

void write_config_echo(const fs::path& dir, const ExperimentConfig& c) {
  write_file(dir / "config.json", [&](std::ostream& os) { os << config_to_json(c).dump(2) << '\n'; });
}

int cmd_track(const CommonOptions& o, size_t window) {
  const ExperimentConfig c = resolve(o);
  const fs::path dir = prepare_out(c);
  const RunResult r = run_experiment(c);
  write_config_echo(dir, c);
  write_file(dir / "metrics.csv", [&](std::ostream& os) { write_metrics_csv(os, r.rows); });
  write_file(dir / "summary.csv", [&](std::ostream& os) {
    write_summary_csv(os, std::span<const RunSummary>(&r.summary, 1));
  });
  if (!r.beliefs.empty()) {
    write_file(dir / "beliefs.csv", [&](std::ostream& os) { write_beliefs_csv(os, r.beliefs); });
  }
  if (window > 0) {
    std::vector<double> method, opt, ff, fd;
    for (const auto& row : r.rows) {
      method.push_back(row.rate_method);
      opt.push_back(row.rate_opt);
      ff.push_back(row.rate_ff);
      fd.push_back(row.rate_fd);
    }
    const auto sm = moving_average(method, window), so = moving_average(opt, window),
               sf = moving_average(ff, window), sd = moving_average(fd, window);
    write_file(dir / "smoothed.csv", [&](std::ostream& os) {
      os << "cpi,rate_method,rate_opt,rate_ff,rate_fd\n";
      char buf[160];
      for (size_t i = 0; i < sm.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", i + 1, sm[i], so[i], sf[i],
                      sd[i]);
        os << buf;
      }
    });
  }
  std::printf("%s: %ld CPIs, mean rate %.4f (opt %.4f, ff %.4f, fd %.4f) -> %s\n",
              r.summary.method.c_str(), r.summary.num_cpis, r.summary.mean_rate_method,
              r.summary.mean_rate_opt, r.summary.mean_rate_ff, r.summary.mean_rate_fd,
              dir.string().c_str());
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& powers_arg) {
  const ExperimentConfig c = resolve(o);
  std::vector<double> powers;
  for (const auto& p : split(powers_arg)) {
    try {
      powers.push_back(std::stod(p));
    } catch (const std::exception&) {
      throw ConfigError("powers", "'" + p + "' is not a number");
    }
  }
  if (powers.empty()) throw ConfigError("powers", "at least one power is required");
  std::vector<Method> methods;
  for (const auto& m : split(o.method.empty() ? "ekf,agdao" : o.method)) {
    methods.push_back(method_from_string(m));
  }
  const fs::path dir = prepare_out(c);
  const auto rows = power_sweep(c, powers, methods);
  write_config_echo(dir, c);
  write_file(dir / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, rows); });
  for (const auto& s : rows) {
    std::printf("%-6s %6.1f dBm  rate %.4f  opt %.4f\n", s.method.c_str(), s.power_dbm,
                s.mean_rate_method, s.mean_rate_opt);
  }
  return 0;
}

int cmd_converge(const CommonOptions& o, const std::string& variants_arg, std::optional<int> seeds,
                 bool noiseless) {
  CommonOptions opts = o;
  if (seeds) opts.sets.push_back("convergence.seeds=" + std::to_string(*seeds));
  if (noiseless) opts.sets.push_back("convergence.noiseless=true");
  const ExperimentConfig c = resolve(opts);
  std::vector<GdVariant> variants;
  for (const auto& v : split(variants_arg)) variants.push_back(gd_variant_from_string(v));
  const fs::path dir = prepare_out(c);
  const auto records = convergence_study(c, variants);
  const auto summary = summarize_convergence(records);
  write_config_echo(dir, c);
  write_file(dir / "trace.csv", [&](std::ostream& os) { write_convergence_csv(os, records); });
  write_file(dir / "summary.csv",
             [&](std::ostream& os) { write_convergence_summary_csv(os, summary); });
  for (const auto& s : summary) {
    std::printf("%-10s rse@%d %.4g  final |dvx| %.4g |dvy| %.4g  iterations %.0f\n",
                to_string(s.variant), s.probe_k, s.median_rse_at_probe, s.median_final_err_vx,
                s.median_final_err_vy, s.median_iterations);
  }
  return 0;
}

int cmd_check(const CommonOptions& o) {
  const ExperimentConfig c = resolve(o);
  const auto results = run_checks(c);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-4s %-26s worst %.3e  tol %.0e  (n=%ld)\n", r.passed ? "ok" : "FAIL",
                r.name.c_str(), r.worst, r.tolerance, r.samples);
    ok = ok && r.passed;
  }
  if (!o.out.empty()) {
    const fs::path dir = prepare_out(c);
    write_file(dir / "summary.csv", [&](std::ostream& os) { write_checks_csv(os, results); });
  }
  return ok ? 0 : 1;
}

void error_line(const std::string& kind, const std::string& field, const std::string& message) {
  nlohmann::json j = {{"error", kind}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field predictive beamforming simulator"};
  app.require_subcommand(1);

  CommonOptions track_opts, sweep_opts, conv_opts, check_opts;
  size_t window = 0;
  std::string powers = "10,20,30,40";
  std::string variants = "plain-gd,adam-joint,adam-ao";
  std::optional<int> seeds;
  bool noiseless = false;

  auto* track = app.add_subcommand("track", "closed-loop tracking run");
  add_common(track, track_opts, true);
  track->add_option("--window", window, "also write smoothed.csv with this moving-average window");

  auto* sweep = app.add_subcommand("sweep-power", "throughput versus transmit power");
  add_common(sweep, sweep_opts, true);
  sweep->add_option("--powers", powers, "comma-separated powers in dBm");

  auto* conv = app.add_subcommand("converge", "optimizer convergence traces");
  add_common(conv, conv_opts, false);
  conv->add_option("--variants", variants, "comma-separated: plain-gd, adam-joint, adam-ao");
  conv->add_option("--seeds", seeds, "number of noise realisations");
  conv->add_flag("--noiseless", noiseless, "synthesize echoes without noise");

  auto* check = app.add_subcommand("check", "oracle self-checks");
  add_common(check, check_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("usage", "", e.what());
    return 2;
  }

  try {
    if (*track) return cmd_track(track_opts, window);
    if (*sweep) return cmd_sweep(sweep_opts, powers);
    if (*conv) return cmd_converge(conv_opts, variants, seeds, noiseless);
    if (*check) return cmd_check(check_opts);
  } catch (const ConfigError& e) {
    error_line("config", e.field(), e.message());
    return 2;
  } catch (const std::exception& e) {
    error_line("runtime", "", e.what());
    return 1;
  }
  return 0;
}
