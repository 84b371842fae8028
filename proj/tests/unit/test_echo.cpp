#include <doctest.h>

#include <cmath>

#include "nfbeam/beamformer.hpp"
#include "nfbeam/echo.hpp"

using namespace nfbeam;

namespace {

SystemConfig small_system(int m = 16) {
  SystemConfig sys;
  sys.array = ArrayGeometry::half_wavelength(m, 30e9);
  return sys;
}

Beamformer random_unit(int m, RandomStream& rng) {
  Beamformer f(m);
  for (int i = 0; i < m; ++i) f(i) = rng.complex_normal(1.0);
  return f / f.norm();
}

}  // namespace

TEST_CASE("power conversion") {
  CHECK(dbm_to_watts(30) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dbm_to_watts(10) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(dbm_to_watts(40) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(echo_amplitude(NoiseConfig{1e-8, 1e-8, true}, 4.0) == 2.0);
  CHECK(echo_amplitude(NoiseConfig{1e-8, 1e-8, false}, 4.0) == 1.0);
}

TEST_CASE("noiseless observations equal the analytic mean") {
  const SystemConfig sys = small_system();
  const MotionState eta{1.5, 6, 3, -2};
  RandomStream rng(9, "echo-noise");
  const Beamformer f = random_unit(sys.num_antennas(), rng);
  const ComplexMat h = roundtrip_channel(sys.array, sys.pathloss, sys.symbols_per_cpi,
                                         sys.symbol_period, eta.velocity(), eta.position());

  const NoiseConfig literal{1e-8, 0.0, false};
  const Observation y1 = synthesize_observation(sys, eta, f, literal, 1.0, rng, 7);
  CHECK(y1.cpi_index == 7);
  CHECK((y1.y - h * f).cwiseAbs().maxCoeff() < 1e-17);

  const NoiseConfig scaled{1e-8, 0.0, true};
  const Observation y2 = synthesize_observation(sys, eta, f, scaled, dbm_to_watts(30), rng);
  CHECK((y2.y - y1.y).cwiseAbs().maxCoeff() < 1e-17);

  const Observation y3 = synthesize_observation(sys, eta, f, scaled, 4.0, rng);
  CHECK((y3.y - 2.0 * h * f).cwiseAbs().maxCoeff() < 1e-17);
}

TEST_CASE("echo noise is circular with the configured power") {
  const SystemConfig sys = small_system(4);
  const MotionState eta{1, 5, 2, 2};
  RandomStream rng(21, "echo-noise");
  const Beamformer f = opt_beamformers(sys, eta).back();
  const NoiseConfig noise{1e-8, 2e-6, true};
  const ComplexVec mean = observation_mean(sys, eta, f, 1.0);
  const int draws = 100000;
  const int m = sys.num_antennas();
  ComplexMat cov = ComplexMat::Zero(m, m);
  Eigen::VectorXd var_re = Eigen::VectorXd::Zero(m), var_im = Eigen::VectorXd::Zero(m),
                  cross = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < draws; ++i) {
    const ComplexVec z = synthesize_observation(sys, eta, f, noise, 1.0, rng).y - mean;
    cov += z * z.adjoint();
    var_re += z.real().cwiseAbs2();
    var_im += z.imag().cwiseAbs2();
    cross += z.real().cwiseProduct(z.imag());
  }
  cov /= draws;
  var_re /= draws;
  var_im /= draws;
  cross /= draws;
  const double s2 = noise.sigma_e2;
  for (int k = 0; k < m; ++k) {
    CHECK(std::abs(cov(k, k).real() / s2 - 1.0) < 0.03);
    // Standard error of a variance estimate is sqrt(2/n) relative.
    const double se = std::sqrt(2.0 / draws);
    CHECK(std::abs(var_re(k) / (s2 / 2) - 1.0) < 3 * se);
    CHECK(std::abs(var_im(k) / (s2 / 2) - 1.0) < 3 * se);
    CHECK(std::abs(cross(k)) < 3 * (s2 / 2) / std::sqrt(draws));
    for (int j = 0; j < m; ++j) {
      if (j != k) CHECK(std::abs(cov(k, j)) < 0.03 * s2);
    }
  }
}

TEST_CASE("beamformer norm is enforced") {
  const SystemConfig sys = small_system();
  RandomStream rng(1, "echo-noise");
  const MotionState eta{1, 5, 2, 2};
  const Beamformer bad = 1.01 * opt_beamformers(sys, eta).back();
  CHECK_THROWS_AS(synthesize_observation(sys, eta, bad, NoiseConfig{}, 1.0, rng),
                  BeamformerNormError);
  CHECK_THROWS_AS(require_unit_norm(bad), BeamformerNormError);
  const BeamformerSet set(sys.symbols_per_cpi, bad);
  CHECK_THROWS_AS(cpi_throughput(sys, eta, set, 1.0, 1e-8), BeamformerNormError);
}

TEST_CASE("MRT closed form") {
  SystemConfig sys = small_system(4);
  const MotionState eta{0, 10, 5, 1};
  const Beamformer mrt = opt_beamformers(sys, eta)[2];
  CHECK(received_snr(sys, eta, mrt, 3, 1.0, 1e-8) == doctest::Approx(4e4).epsilon(1e-12));

  sys = SystemConfig{};
  RandomStream rng(5, "check");
  std::uniform_real_distribution<double> ux(-10, 10), uy(2, 20), uv(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const MotionState s{ux(rng.engine()), uy(rng.engine()), uv(rng.engine()), uv(rng.engine())};
    const double a1 = 1.0 / (s.x * s.x + s.y * s.y);
    const double closed = 1.0 * 512 * a1 * a1 / 1e-8;
    const BeamformerSet opt = opt_beamformers(sys, s);
    for (int n = 1; n <= sys.symbols_per_cpi; ++n) {
      CHECK(received_snr(sys, s, opt[n - 1], n, 1.0, 1e-8) == doctest::Approx(closed).epsilon(1e-9));
    }
    CHECK(cpi_throughput(sys, s, opt, 1.0, 1e-8) ==
          doctest::Approx(std::log2(1 + closed)).epsilon(1e-12));
    CHECK(mrt_throughput(sys, s, 1.0, 1e-8) == doctest::Approx(std::log2(1 + closed)).epsilon(1e-12));

    const Beamformer other = random_unit(512, rng);
    CHECK(received_snr(sys, s, other, 1, 1.0, 1e-8) <= closed);
  }
}

TEST_CASE("throughput") {
  const SystemConfig sys = small_system(32);
  const MotionState eta{0.5, 4, 3, 2};

  SUBCASE("constant SNR gives log2(1 + snr)") {
    const Beamformer f = predictive_beamformers(sys, eta.position(), {0, 0})[0];
    // With zero velocity the channel is the same for every symbol.
    const MotionState still{eta.x, eta.y, 0, 0};
    const BeamformerSet set(sys.symbols_per_cpi, f);
    const double g0 = received_snr(sys, still, f, 1, 1.0, 1e-8);
    CHECK(cpi_throughput(sys, still, set, 1.0, 1e-8) == doctest::Approx(std::log2(1 + g0)).epsilon(1e-13));
  }

  SUBCASE("mis-pointed beam loses rate") {
    const BeamformerSet off = opt_beamformers(sys, {eta.x + 1, eta.y, eta.vx, eta.vy});
    CHECK(cpi_throughput(sys, eta, off, 1.0, 1e-8) < cpi_throughput(sys, eta, opt_beamformers(sys, eta), 1.0, 1e-8));
  }

  SUBCASE("global phase does not matter") {
    RandomStream rng(2, "check");
    BeamformerSet set;
    for (int n = 0; n < sys.symbols_per_cpi; ++n) set.push_back(random_unit(32, rng));
    BeamformerSet rotated = set;
    for (auto& f : rotated) f *= std::polar(1.0, 1.234);
    CHECK(cpi_throughput(sys, eta, rotated, 1.0, 1e-8) ==
          doctest::Approx(cpi_throughput(sys, eta, set, 1.0, 1e-8)).epsilon(1e-13));
  }
}

TEST_CASE("noise configuration validation") {
  CHECK_THROWS_AS(NoiseConfig({0.0, 1e-8, true}).validate(), ConfigError);
  CHECK_THROWS_AS(NoiseConfig({1e-8, -1.0, true}).validate(), ConfigError);
  CHECK_NOTHROW(NoiseConfig({1e-8, 0.0, true}).validate());
}
