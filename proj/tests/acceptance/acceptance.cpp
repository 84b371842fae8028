// Acceptance runner. `acceptance N` evaluates criterion N and prints one line
//   [PASS] C<N> <description>: <measured> (<tolerance>), <seconds> s
// Exit status 0 on pass, 1 on fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "nfbeam/checks.hpp"

using namespace nfbeam;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig defaults() { return ExperimentConfig{}; }

Verdict worst_of(std::initializer_list<CheckResult> results) {
  Verdict v{true, ""};
  for (const auto& r : results) {
    v.passed = v.passed && r.passed;
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += fmt("%s worst %.2e (tol %.0e, n=%ld)", r.name.c_str(), r.worst, r.tolerance,
                    r.samples);
  }
  return v;
}

Verdict c1() { return worst_of({check_mrt(defaults(), 100)}); }

Verdict c2() {
  const ExperimentConfig c = defaults();
  return worst_of({check_gradient(c, 100, 64, Projection::Absolute),
                   check_gradient(c, 100, 64, Projection::Signed),
                   check_gradient(c, 100, 512, Projection::Absolute),
                   check_gradient(c, 100, 512, Projection::Signed)});
}

Verdict c3() {
  const ExperimentConfig c = defaults();
  return worst_of({check_jacobian(c, 50, 64, Projection::Absolute),
                   check_jacobian(c, 50, 64, Projection::Signed)});
}

ConvergenceSummary find(const std::vector<ConvergenceSummary>& s, GdVariant v) {
  return *std::find_if(s.begin(), s.end(), [&](const auto& x) { return x.variant == v; });
}

Verdict c4() {
  ExperimentConfig c = defaults();
  c.convergence.state = {0, 10, 8, 7};
  c.convergence.num_seeds = 10;
  const std::vector<GdVariant> variants{GdVariant::AdamAo, GdVariant::AdamJoint,
                                        GdVariant::PlainGd};
  const auto summary = summarize_convergence(convergence_study(c, variants), 100);
  const auto ao = find(summary, GdVariant::AdamAo);
  const auto joint = find(summary, GdVariant::AdamJoint);
  const auto plain = find(summary, GdVariant::PlainGd);
  const bool accurate = ao.median_final_err_vx < 0.05 && ao.median_final_err_vy < 0.05;
  const bool ordered = ao.median_rse_at_probe <= joint.median_rse_at_probe &&
                       joint.median_rse_at_probe <= plain.median_rse_at_probe;
  std::string detail = fmt(
      "adam-ao median |dvx| %.4f |dvy| %.4f (tol 0.05); RSE@100 ao %.4f joint %.4f plain %.4f",
      ao.median_final_err_vx, ao.median_final_err_vy, ao.median_rse_at_probe,
      joint.median_rse_at_probe, plain.median_rse_at_probe);

  // Reported for context only; the criterion is judged on the default
  // (absolute) projection above.
  c.system.array.projection = Projection::Signed;
  const auto signed_ao =
      summarize_convergence(convergence_study(c, std::vector<GdVariant>{GdVariant::AdamAo}), 100);
  detail += fmt(" [signed projection: adam-ao |dvx| %.4f |dvy| %.4f]",
                signed_ao[0].median_final_err_vx, signed_ao[0].median_final_err_vy);
  return {accurate && ordered, detail};
}

RunResult track(Method m, double power_dbm = 30.0) {
  ExperimentConfig c = defaults();
  c.method = m;
  c.power_dbm = power_dbm;
  return run_experiment(c);
}

Verdict c5() {
  const RunSummary ekf = track(Method::Ekf).summary;
  const RunSummary agdao = track(Method::Agdao).summary;
  const RunSummary ff = track(Method::Ff).summary;
  const double opt = ekf.mean_rate_opt;
  const bool ok = ekf.mean_rate_method >= 0.98 * opt && agdao.mean_rate_method >= 0.95 * opt &&
                  ff.mean_rate_method < ekf.mean_rate_method &&
                  ff.mean_rate_method < agdao.mean_rate_method;
  return {ok, fmt("opt %.4f, ekf %.4f (%.4f of opt, tol 0.98), agdao %.4f (%.4f, tol 0.95), "
                  "ff %.4f",
                  opt, ekf.mean_rate_method, ekf.mean_rate_method / opt, agdao.mean_rate_method,
                  agdao.mean_rate_method / opt, ff.mean_rate_method)};
}

Verdict c6() {
  const std::vector<double> powers{10, 20, 30, 40};
  const std::vector<Method> ekf_only{Method::Ekf};
  const auto ekf = power_sweep(defaults(), powers, ekf_only);
  bool monotone = true;
  std::string rates;
  for (size_t i = 0; i < ekf.size(); ++i) {
    if (i > 0) monotone = monotone && ekf[i].mean_rate_method >= ekf[i - 1].mean_rate_method;
    rates += fmt("%s%.4f", i ? " " : "", ekf[i].mean_rate_method);
  }
  const double agdao10 = track(Method::Agdao, 10.0).summary.mean_rate_method;
  const bool ok = monotone && agdao10 <= ekf[0].mean_rate_method;
  return {ok, fmt("ekf at 10/20/30/40 dBm: %s; agdao at 10 dBm %.6f vs ekf %.6f", rates.c_str(),
                  agdao10, ekf[0].mean_rate_method)};
}

Verdict c7() {
  const RunResult r = track(Method::Ekf);
  const bool ok = r.worst_health.asymmetry <= 1e-10 && r.worst_health.min_eig_over_trace >= -1e-9;
  return {ok, fmt("max |P - P^T| %.2e (tol 1e-10), min eig/trace %.3e (tol -1e-9) over %zu CPIs",
                  r.worst_health.asymmetry, r.worst_health.min_eig_over_trace, r.rows.size())};
}

Verdict c8() { return worst_of({check_geometry(defaults(), 1000)}); }

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Verdict c9() {
  const fs::path root = fs::temp_directory_path() / "nfbeam_acceptance_c9";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"track", "track --seed 5 --cpis 200 --method agdao --window 20"},
      {"track-ekf", "track --seed 5 --cpis 200 --method ekf"},
      {"sweep", "sweep-power --seed 5 --cpis 100 --powers 10,40 --method ekf,agdao,fd"},
      {"converge", "converge --seed 5 --seeds 3"},
      {"check", "check --seed 5"},
  };
  bool ok = true;
  int files = 0;
  std::string detail;
  for (const auto& [tag, args] : commands) {
    for (const char* run : {"a", "b"}) {
      const fs::path out = root / tag / run;
      const std::string cmd =
          std::string(NFBEAM_CLI_PATH) + " " + args + " --out " + out.string() + " > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        ok = false;
        detail += tag + " exited nonzero; ";
      }
    }
    for (const auto& entry : fs::directory_iterator(root / tag / "a")) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const fs::path other = root / tag / "b" / entry.path().filename();
      if (slurp(entry.path()) != slurp(other)) {
        ok = false;
        detail += tag + "/" + entry.path().filename().string() + " differs; ";
      }
    }
  }
  fs::remove_all(root);
  return {ok && files > 0, detail + fmt("%d CSV files compared across 5 invocations", files)};
}

Verdict c10() {
  double worst = 0.0;
  for (const Method m : {Method::Ekf, Method::Agdao}) {
    ExperimentConfig c = defaults();
    c.method = m;
    c.num_cpis = 100;
    c.motion = {0, 0};
    c.noise.sigma_e2 = 0.0;
    for (const auto& row : run_experiment(c).rows) {
      worst = std::max(worst, (row.estimate.position() - row.truth.position()).norm());
    }
  }
  return {worst < 1e-6, fmt("max position error %.2e m (tol 1e-6) for ekf and agdao", worst)};
}

struct Criterion {
  const char* description;
  std::function<Verdict()> run;
  double budget_s;  // 0 = no runtime bound
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {"closed-form MRT SNR", c1, 5},
      {"velocity gradient vs finite differences", c2, 30},
      {"observation Jacobian vs finite differences", c3, 60},
      {"optimizer convergence at (0, 10, 8, 7)", c4, 120},
      {"tracking throughput vs Opt at 30 dBm", c5, 600},
      {"throughput vs transmit power", c6, 0},
      {"EKF covariance health", c7, 0},
      {"geometry identities", c8, 0},
      {"byte-identical CLI reruns", c9, 0},
      {"noiseless fixed points", c10, 0},
  };
  const int count = static_cast<int>(std::size(criteria));
  const int which = argc > 1 ? std::atoi(argv[1]) : 0;
  if (which < 1 || which > count) {
    std::fprintf(stderr, "usage: acceptance <1..%d>\n", count);
    return 2;
  }
  const Criterion& c = criteria[which - 1];
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v = c.run();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.budget_s > 0 && secs > c.budget_s) {
    v.passed = false;
    v.detail += fmt(" [runtime over %.0f s budget]", c.budget_s);
  }
  std::printf("[%s] C%d %s: %s, %.1f s\n", v.passed ? "PASS" : "FAIL", which, c.description,
              v.detail.c_str(), secs);
  return v.passed ? 0 : 1;
}
