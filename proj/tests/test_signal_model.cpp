#include <algorithm>
#include <cmath>
#include <numbers>

#include "biphoton/signal_model.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace biphoton;
using doctest::Approx;

TEST_CASE("pump train samples") {
  PulseTrainSpec single{1.0, 10.0, 0, 1.0};
  CHECK(pump_train_at(single, 0.0) == 1.0);
  CHECK(pump_train_at(single, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-15));

  PulseTrainSpec dense{1.0, 2.0, 3, 1.0};
  CHECK(pump_train_at(dense, 1.0) == Approx(oracle::train(1.0, 1.0, 2.0, 3)).epsilon(1e-15));

  const Grid1D g{801, -9.0, 9.0};
  const auto s = sample_pump_train(dense, g);
  REQUIRE(s.values.size() == g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i)
    CHECK(s.values[i] == Approx(oracle::train(g.at(i), 1.0, 2.0, 3)).epsilon(1e-14));
}

TEST_CASE("pump train flags a window shorter than the train") {
  PulseTrainSpec train{1.0, 10.0, 3, 1.0};
  CHECK(sample_pump_train(train, Grid1D{64, -5.0, 5.0}).window_truncated);
  CHECK_FALSE(sample_pump_train(train, Grid1D{1024, -35.0, 35.0}).window_truncated);
}

TEST_CASE("single-pulse train equals the isolated pulse everywhere") {
  PulseTrainSpec train{0.7, 3.0, 0, 2.5};
  const Grid1D g{512, -6.0, 6.0};
  const auto s = sample_pump_train(train, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_points; ++i)
    worst = std::max(worst, std::abs(s.values[i] - 2.5 * std::exp(-std::pow(g.at(i) / 0.7, 2))));
  CHECK(worst == 0.0);
}

TEST_CASE("sampled envelopes are non-negative and bounded by their peaks") {
  const Grid1D g{1001, -20.0, 20.0};
  PulseTrainSpec train{1.0, 5.0, 3, 1.0};
  for (double v : sample_pump_train(train, g).values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 2.0 * std::exp(-25.0) + 1e-15);
  }
  for (double v : sample_filter_time(GaussianFilterSpec{0.4, 0.0}, g)) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("filter time response") {
  CHECK(filter_time_at({1.0, 0.0}, 0.0) == 1.0);
  CHECK(filter_time_at({1.0, 0.0}, 1.0) == Approx(std::exp(-1.0)));
  CHECK(filter_time_at({0.85, 0.0}, 2.0) == Approx(0.0556).epsilon(2e-3));
  CHECK(filter_time_at({0.85, 0.0}, 2.0) == Approx(std::exp(-1.7 * 1.7)).epsilon(1e-15));
  CHECK(sample_filter_time({2.0, 0.0}, Grid1D{3, -1.0, 1.0})[1] == 1.0);
}

TEST_CASE("gate is a closed interval") {
  TimeGateSpec gate{2.0, 0.0};
  CHECK(gate_at(gate, 0.0) == 1.0);
  CHECK(gate_at(gate, 1.0001) == 0.0);
  CHECK(gate_at(gate, 1.0) == 1.0);
  CHECK(gate_at(gate, -1.0) == 1.0);
  CHECK(gate_at(TimeGateSpec{2.0, 5.0}, 4.0) == 1.0);
  CHECK(gate_at(TimeGateSpec{2.0, 5.0}, 3.5) == 0.0);
}

TEST_CASE("gating twice equals gating once") {
  const Grid1D g{401, -3.0, 3.0};
  TimeGateSpec gate{2.0, 0.25};
  const auto once = sample_gate(gate, g);
  auto f = sample_filter_time({0.3, 0.0}, g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= once[i];
  auto twice = f;
  for (std::size_t i = 0; i < f.size(); ++i) twice[i] *= once[i];
  CHECK(twice == f);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK(error_code([] { pump_train_at({0.0, 10.0, 3, 1.0}, 0.0); }) == ErrorCode::parameter);
  CHECK(error_code([] { pump_train_at({1.0, -1.0, 3, 1.0}, 0.0); }) == ErrorCode::parameter);
  CHECK(error_code([] { filter_time_at({0.0, 0.0}, 0.0); }) == ErrorCode::parameter);
  CHECK(error_code([] { gate_at({0.0, 0.0}, 0.0); }) == ErrorCode::parameter);
  CHECK(error_code([] { parameter_from_fwhm(FwhmKind::duration, -1.0); }) == ErrorCode::parameter);
  CHECK(error_code([] { Grid1D{1, 0.0, 1.0}.validate(); }) == ErrorCode::parameter);
  CHECK(error_code([] { Grid1D{10, 1.0, 1.0}.validate(); }) == ErrorCode::parameter);
}

TEST_CASE("grid resolution predicate") {
  CHECK(resolves(Grid1D{161, 0.0, 10.0}, 1.0));
  CHECK_FALSE(resolves(Grid1D{100, 0.0, 10.0}, 1.0));
}

TEST_CASE("pump bandwidth conversion matches the sampled spectrum") {
  const double sigma = parameter_from_fwhm(FwhmKind::pump_intensity_bandwidth, 1.3);
  CHECK(sigma == Approx(0.2883).epsilon(2e-4));
  // Intensity spectrum |Omega(nu)|^2 of the sampled pulse drops to half at fwhm/2.
  const auto pulse = [&](double t) { return std::exp(-std::pow(t / sigma, 2)); };
  const double peak = std::pow(oracle::dtft_abs(pulse, 0.0, 12 * sigma, 4000), 2);
  const double half = oracle::bisect(
      [&](double nu) { return std::pow(oracle::dtft_abs(pulse, nu, 12 * sigma, 4000), 2) - 0.5 * peak; }, 0.0,
      3.0);
  CHECK(2.0 * half == Approx(1.3).epsilon(1e-9));
}

TEST_CASE("filter bandwidth conversion matches the sampled transmission") {
  const double gamma = parameter_from_fwhm(FwhmKind::filter_amplitude_bandwidth, 1.4);
  CHECK(gamma == Approx(2.641).epsilon(2e-4));
  const auto filter = [&](double t) { return std::exp(-std::pow(gamma * t, 2)); };
  const double peak = oracle::dtft_abs(filter, 0.0, 12 / gamma, 4000);
  const double half = oracle::bisect(
      [&](double nu) { return oracle::dtft_abs(filter, nu, 12 / gamma, 4000) - 0.5 * peak; }, 0.0, 3.0);
  CHECK(2.0 * half == Approx(1.4).epsilon(1e-9));
}

TEST_CASE("duration conversion and round trips") {
  CHECK(fwhm_from_parameter(FwhmKind::duration, 1.0) == Approx(std::sqrt(2.0 * std::numbers::ln2)));
  CHECK(fwhm_from_parameter(FwhmKind::duration, 1.0) == Approx(1.1774).epsilon(1e-4));
  for (FwhmKind k : {FwhmKind::pump_intensity_bandwidth, FwhmKind::filter_amplitude_bandwidth, FwhmKind::duration})
    for (double v : {0.01, 0.37, 1.0, 4.2, 1e3})
      CHECK(fwhm_from_parameter(k, parameter_from_fwhm(k, v)) == Approx(v).epsilon(1e-14));
  CHECK(filter_intensity_fwhm(std::sqrt(2.0)) == Approx(1.0));
}

TEST_CASE("time-bandwidth product of a Gaussian pulse") {
  for (double sigma : {0.3, 1.0, 2.7}) {
    const auto pulse = [&](double t) { return std::exp(-std::pow(t / sigma, 2)); };
    // Intensity duration FWHM located numerically on the amplitude envelope.
    const double t_half = oracle::bisect([&](double t) { return pulse(t) * pulse(t) - 0.5; }, 0.0, 5 * sigma);
    const double reach = 12 * sigma;
    const double peak = std::pow(oracle::dtft_abs(pulse, 0.0, reach, 6000), 2);
    const double nu_half = oracle::bisect(
        [&](double nu) { return std::pow(oracle::dtft_abs(pulse, nu, reach, 6000), 2) - 0.5 * peak; }, 0.0,
        5.0 / sigma);
    CHECK(std::abs(4.0 * t_half * nu_half - 2.0 * std::numbers::ln2 / std::numbers::pi) < 1e-9);
    CHECK(fwhm_from_parameter(FwhmKind::duration, sigma) *
              fwhm_from_parameter(FwhmKind::pump_intensity_bandwidth, sigma) ==
          Approx(2.0 * std::numbers::ln2 / std::numbers::pi).epsilon(1e-14));
  }
}

TEST_CASE("default train grid covers the train and resolves the pump") {
  PulseTrainSpec train{1.0, 10.0, 3, 1.0};
  const Grid1D g = default_train_grid(train, {0.85, 0.0});
  CHECK(g.lo <= -35.0);
  CHECK(g.hi >= 35.0);
  CHECK(resolves(g, 1.0));
  const Grid1D wide = default_train_grid(train, {0.01, 0.0});
  CHECK(wide.hi - wide.lo >= 8.0 / 0.01);
  CHECK(resolves(wide, 1.0));
}
