#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "biphoton/spectral_fit.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace biphoton;
using doctest::Approx;

namespace {

// Closed-form forward model: Gaussian photon line of FWHM dnu convolved with
// the intensity filter line; widths add in quadrature.
std::vector<SweepPoint> synthetic(double dnu, double filter_amp_fwhm, double centre = 0.0, double scale = 1.0,
                                  double noise = 0.0, unsigned seed = 7) {
  const double w = std::hypot(dnu, filter_amp_fwhm / std::sqrt(2.0));
  const double reach = 2.5 * w;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<SweepPoint> pts;
  for (int k = 0; k <= 40; ++k) {
    const double x = -reach + centre + k * 2.0 * reach / 40.0;
    double y = scale * std::exp(-4.0 * std::numbers::ln2 * std::pow((x - centre) / w, 2));
    if (noise > 0) y *= 1.0 + noise * n01(rng);
    pts.push_back({x, std::max(y, 0.0)});
  }
  return pts;
}

GaussianFilterSpec filter_of(double amp_fwhm) {
  return {parameter_from_fwhm(FwhmKind::filter_amplitude_bandwidth, amp_fwhm), 0.0};
}

}  // namespace

TEST_CASE("noiseless round trip across bandwidths and filters") {
  for (double f : {0.5, 1.1, 2.0})
    for (double dnu : {0.5, 0.8, 1.78, 3.0, 5.0}) {
      CAPTURE(f);
      CAPTURE(dnu);
      const SpectralFit fit = fit_hsp_bandwidth(synthetic(dnu, f), filter_of(f));
      CHECK(fit.converged);
      CHECK(std::abs(fit.delta_nu_ghz / dnu - 1.0) < 0.01);
      CHECK_FALSE(fit.below_resolution);
    }
}

TEST_CASE("offset and scaled sweep") {
  const SpectralFit fit = fit_hsp_bandwidth(synthetic(1.78, 1.1, 0.4, 0.8), filter_of(1.1));
  CHECK(fit.delta_nu_ghz == Approx(1.78).epsilon(1e-3));
  CHECK(fit.centre_ghz == Approx(0.4).epsilon(1e-3));
  CHECK(fit.scale == Approx(0.8).epsilon(1e-3));
  CHECK(fit.delta_t_ns == Approx(duration_from_bandwidth(1.78)).epsilon(1e-3));
}

TEST_CASE("noisy round trip") {
  for (double dnu : {0.8, 1.78, 3.0}) {
    const SpectralFit fit = fit_hsp_bandwidth(synthetic(dnu, 1.1, 0.0, 1.0, 0.02, 99), filter_of(1.1));
    CHECK(std::abs(fit.delta_nu_ghz / dnu - 1.0) < 0.05);
    CHECK(fit.delta_nu_err_ghz > 0.0);
    CHECK(fit.residuals.size() == 41);
  }
}

TEST_CASE("numeric forward model matches the Gaussian closed form") {
  for (double dnu : {0.5, 1.78, 4.0}) {
    const GaussianFilterSpec f = filter_of(1.1);
    const double dt = duration_from_bandwidth(dnu);
    const double expect = std::hypot(dnu, 1.1 / std::sqrt(2.0));
    const double half = 0.5 * expect;
    CHECK(sweep_model(0.0, dt, 0.0, 1.0, f, FilterLine::intensity) == Approx(1.0));
    // Model value at the closed-form half width is one half.
    CHECK(std::abs(sweep_model(half, dt, 0.0, 1.0, f, FilterLine::intensity) - 0.5) < 5e-4);
  }
}

TEST_CASE("monochromatic photon reproduces the filter line") {
  const double f = 1.1;
  const GaussianFilterSpec spec = filter_of(f);
  std::vector<SweepPoint> pts;
  for (int k = -20; k <= 20; ++k) {
    const double x = 0.1 * k;
    pts.push_back({x, std::exp(-4.0 * std::numbers::ln2 * std::pow(x / (f / std::sqrt(2.0)), 2))});
  }
  const SpectralFit fit = fit_hsp_bandwidth(pts, spec);
  CHECK(fit.below_resolution);
  CHECK(fit.delta_nu_ghz < fit.resolution_bound_ghz);
  CHECK(fit.resolution_bound_ghz == Approx(0.1 * filter_line_fwhm(spec, FilterLine::intensity)));
  for (double r : fit.residuals) CHECK(std::abs(r) < 1e-3);
}

TEST_CASE("amplitude filter line option") {
  const GaussianFilterSpec spec = filter_of(1.1);
  CHECK(filter_line_fwhm(spec, FilterLine::amplitude) == Approx(1.1));
  CHECK(filter_line_fwhm(spec, FilterLine::intensity) == Approx(1.1 / std::sqrt(2.0)));
  std::vector<SweepPoint> pts;
  const double dt = duration_from_bandwidth(1.5);
  for (int k = -20; k <= 20; ++k)
    pts.push_back({0.2 * k, sweep_model(0.2 * k, dt, 0.0, 1.0, spec, FilterLine::amplitude)});
  SpectralFitOptions opt;
  opt.line = FilterLine::amplitude;
  CHECK(fit_hsp_bandwidth(pts, spec, opt).delta_nu_ghz == Approx(1.5).epsilon(1e-3));
}

TEST_CASE("bandwidth and duration conversions") {
  CHECK(bandwidth_from_duration(duration_from_bandwidth(1.78)) == Approx(1.78).epsilon(1e-15));
  CHECK(bandwidth_from_duration(1.0) == Approx(std::sqrt(std::numbers::ln2) / std::numbers::pi));
  CHECK(error_code([] { bandwidth_from_duration(0.0); }) == ErrorCode::parameter);
}

TEST_CASE("fit preconditions") {
  const GaussianFilterSpec spec = filter_of(1.1);
  auto pts = synthetic(1.78, 1.1);
  CHECK(error_code([&] { fit_hsp_bandwidth({pts.begin(), pts.begin() + 3}, spec); }) == ErrorCode::precondition);
  std::vector<SweepPoint> narrow;
  for (int k = 0; k < 10; ++k) narrow.push_back({0.05 * k, 1.0});
  CHECK(error_code([&] { fit_hsp_bandwidth(narrow, spec); }) == ErrorCode::precondition);
  for (auto& p : pts) p.normalized_coincidences = 0.0;
  CHECK(error_code([&] { fit_hsp_bandwidth(pts, spec); }) == ErrorCode::precondition);
}

TEST_CASE("non-convergence is reported, not hidden") {
  SpectralFitOptions opt;
  opt.max_iterations = 1;
  opt.tolerance = 1e-300;
  const SpectralFit fit = fit_hsp_bandwidth(synthetic(1.78, 1.1, 0.3, 1.0, 0.02), filter_of(1.1), opt);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations == 1);
}

TEST_CASE("sweep csv ingestion") {
  std::istringstream in("normalized_coincidences,detuning_GHz\n1.0,0\n0.5,abc\n-0.1,1\n0.2,2\n3\n");
  const SweepTable t = read_sweep_csv(in);
  REQUIRE(t.points.size() == 2);
  CHECK(t.points[1].detuning_ghz == 2.0);
  CHECK(t.points[1].normalized_coincidences == 0.2);
  REQUIRE(t.issues.size() == 3);
  CHECK(t.issues[0].line == 3);
  std::istringstream bad("x,y\n1,2\n");
  CHECK(error_code([&] { read_sweep_csv(bad); }) == ErrorCode::parse);
}
