// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/SVD>

namespace nfbeam {

namespace {

double uniform(RandomStream& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng.engine());
}

double relative(double err, double ref) { return err / std::max(std::abs(ref), 1e-300); }

SystemConfig with_array(const SystemConfig& base, int num_antennas, Projection projection) {
  SystemConfig sys = base;
  const double carrier = kSpeedOfLight / base.array.wavelength;
  sys.array = ArrayGeometry::half_wavelength(num_antennas, carrier, projection);
  return sys;
}

Beamformer perturbed_beamformer(const SystemConfig& sys, const MotionState& eta, RandomStream& rng) {
  const MotionState off{eta.x + uniform(rng, -0.05, 0.05), eta.y + uniform(rng, -0.05, 0.05),
                        eta.vx + uniform(rng, -1.0, 1.0), eta.vy + uniform(rng, -1.0, 1.0)};
  return opt_beamformers(sys, off).back();
}

}  // namespace

MotionState random_state(RandomStream& rng, const ArrayGeometry& geom, double min_axis_gap) {
  while (true) {
    const MotionState s{uniform(rng, -10.0, 10.0), uniform(rng, 2.0, 20.0),
                        uniform(rng, -10.0, 10.0), uniform(rng, -10.0, 10.0)};
    if (geom.projection == Projection::Signed || min_axis_gap <= 0.0) return s;
    bool clear = true;
    for (int m = 0; m < geom.num_antennas && clear; ++m) {
      clear = std::abs(s.x - geom.antenna_x(m)) >= min_axis_gap;
    }
    if (clear) return s;
  }
}

CheckResult check_mrt(const ExperimentConfig& config, int samples) {
  const SystemConfig& sys = config.system;
  const double power = config.power_watts();
  const double sigma_c2 = config.noise.sigma_c2;
  RandomStream rng(config.seed, "check-mrt");
  CheckResult out{"mrt_snr", samples, 0.0, 1e-9, false};
  for (int i = 0; i < samples; ++i) {
    const MotionState eta = random_state(rng, sys.array);
    const BeamformerSet opt = opt_beamformers(sys, eta);
    const double a1 = pathloss(sys.pathloss, eta.position(), PathKind::Downlink);
    const double closed = power * sys.num_antennas() * a1 * a1 / sigma_c2;
    for (int n = 1; n <= sys.symbols_per_cpi; ++n) {
      const double snr = received_snr(sys, eta, opt[n - 1], n, power, sigma_c2);
      out.worst = std::max(out.worst, relative(std::abs(snr - closed), closed));
    }
  }
  out.passed = out.worst < out.tolerance;
  return out;
}

CheckResult check_gradient(const ExperimentConfig& config, int samples, int num_antennas,
                           Projection projection) {
  const SystemConfig sys = with_array(config.system, num_antennas, projection);
  const double s_amp = config.echo_amplitude();
  RandomStream rng(config.seed, "check-gradient");
  RandomStream noise_rng(config.seed, streams::kEchoNoise);
  char name[64];
  std::snprintf(name, sizeof name, "gradient_m%d_%s", num_antennas,
                projection == Projection::Absolute ? "absolute" : "signed");
  CheckResult out{name, samples, 0.0, 1e-5, false};
  constexpr double h = 1e-4;
  for (int i = 0; i < samples; ++i) {
    const MotionState truth = random_state(rng, sys.array);
    const Beamformer f = perturbed_beamformer(sys, truth, rng);
    const Observation obs =
        synthesize_observation(sys, truth, f, config.noise, config.power_watts(), noise_rng);
    const VelocityLikelihood lik(sys, obs.y, truth.position(), f, s_amp);
    const Vec2 v{truth.vx + uniform(rng, -2.0, 2.0), truth.vy + uniform(rng, -2.0, 2.0)};
    const Vec2 analytic = lik.gradient(v);
    Vec2 fd;
    for (int axis = 0; axis < 2; ++axis) {
      Vec2 e = Vec2::Zero();
      e(axis) = h;
      fd(axis) = (lik.objective(v + e) - lik.objective(v - e)) / (2.0 * h);
    }
    out.worst = std::max(out.worst, relative((analytic - fd).norm(), fd.norm()));
  }
  out.passed = out.worst < out.tolerance;
  return out;
}

CheckResult check_jacobian(const ExperimentConfig& config, int samples, int num_antennas,
                           Projection projection) {
  const SystemConfig sys = with_array(config.system, num_antennas, projection);
  const double s_amp = config.echo_amplitude();
  RandomStream rng(config.seed, "check-jacobian");
  char name[64];
  std::snprintf(name, sizeof name, "jacobian_m%d_%s", num_antennas,
                projection == Projection::Absolute ? "absolute" : "signed");
  CheckResult out{name, samples, 0.0, 1e-4, false};
  // A 2-point stencil at 1e-4 m leaves a truncation error of (k h)^2 / 6,
  // about 7e-4 at 30 GHz, in the position columns; the 4-point stencil
  // brings that to (k h)^4 / 30.
  constexpr double h = 1e-4;
  for (int i = 0; i < samples; ++i) {
    const MotionState eta = random_state(rng, sys.array, 4.0 * h);
    const Beamformer f = perturbed_beamformer(sys, eta, rng);
    const ObservationJacobian jac = observation_jacobian(sys, eta, f, s_amp);
    auto mean = [&](const Vec4& e) {
      return observation_mean(sys, MotionState::from_vector(e), f, s_amp);
    };
    const Vec4 e = eta.vector();
    for (int col = 0; col < 4; ++col) {
      Vec4 u = Vec4::Zero();
      u(col) = h;
      const ComplexVec fd =
          (-mean(e + 2.0 * u) + 8.0 * mean(e + u) - 8.0 * mean(e - u) + mean(e - 2.0 * u)) /
          (12.0 * h);
      out.worst = std::max(out.worst, relative((jac.col(col) - fd).norm(), fd.norm()));
    }
  }
  out.passed = out.worst < out.tolerance;
  return out;
}

CheckResult check_geometry(const ExperimentConfig& config, int samples) {
  RandomStream rng(config.seed, "check-geometry");
  const SystemConfig big = config.system;
  const SystemConfig small = with_array(config.system, 32, config.system.array.projection);
  CheckResult out{"geometry", samples, 0.0, 1e-12, false};
  for (int i = 0; i < samples; ++i) {
    const MotionState eta = random_state(rng, big.array);
    const int n = 1 + static_cast<int>(rng.engine()() % static_cast<unsigned>(big.symbols_per_cpi));
    const ComplexVec a = steering_vector(big.array, eta.position());
    const ComplexVec d = doppler_vector(big.array, n, big.symbol_period, eta.velocity(), eta.position());
    out.worst = std::max(out.worst, (a.cwiseAbs().array() - 1.0).abs().maxCoeff());
    out.worst = std::max(out.worst, (d.cwiseAbs().array() - 1.0).abs().maxCoeff());
    const ProjectionCoeffs pc = projection_coeffs(big.array, eta.position());
    out.worst = std::max(
        out.worst, (pc.g.array().square() + pc.q.array().square() - 1.0).abs().maxCoeff());

    const ComplexMat hm = roundtrip_channel(small.array, small.pathloss, n, small.symbol_period,
                                            eta.velocity(), eta.position());
    const double scale = hm.norm();
    out.worst = std::max(out.worst, (hm - hm.transpose()).cwiseAbs().maxCoeff() / scale);
    const Eigen::JacobiSVD<ComplexMat> svd(hm);
    out.worst = std::max(out.worst, svd.singularValues()(1) / svd.singularValues()(0));
  }
  out.passed = out.worst < out.tolerance;
  return out;
}

std::vector<CheckResult> run_checks(const ExperimentConfig& config) {
  std::vector<CheckResult> out;
  out.push_back(check_mrt(config, 100));
  for (const int m : {64, 512}) {
    for (const Projection p : {Projection::Absolute, Projection::Signed}) {
      out.push_back(check_gradient(config, 100, m, p));
    }
  }
  for (const Projection p : {Projection::Absolute, Projection::Signed}) {
    out.push_back(check_jacobian(config, 50, 64, p));
  }
  out.push_back(check_geometry(config, 1000));
  return out;
}

void write_checks_csv(std::ostream& os, std::span<const CheckResult> rows) {
  os << "check,samples,worst,tolerance,passed\n";
  char buf[64];
  for (const auto& r : rows) {
    os << r.name << ',' << r.samples << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.worst, r.tolerance);
    os << buf << ',' << (r.passed ? 1 : 0) << '\n';
  }
}

}  // namespace nfbeam
