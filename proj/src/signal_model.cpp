#include "biphoton/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "biphoton/error.hpp"

namespace biphoton {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

const double kLn2 = std::numbers::ln2;

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parameter: return "parameter error";
    case ErrorCode::domain_mismatch: return "domain mismatch";
    case ErrorCode::zero_norm: return "zero norm";
    case ErrorCode::numerical: return "numerical failure";
    case ErrorCode::not_converged: return "not converged";
    case ErrorCode::undefined: return "undefined";
    case ErrorCode::precondition: return "precondition violated";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::parse: return "parse error";
  }
  return "unknown error";
}

void Grid1D::validate() const {
  if (n_points < 2) fail(ErrorCode::parameter, "grid needs at least 2 points");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    fail(ErrorCode::parameter, "grid requires finite bounds with hi > lo");
}

Grid1D Grid1D::cell_centred(double lo, double step, std::size_t n) {
  if (n < 2 || !positive_finite(step))
    fail(ErrorCode::parameter, "cell-centred grid needs n >= 2 and step > 0");
  Grid1D g;
  g.n_points = n;
  g.lo = lo + 0.5 * step;
  g.hi = lo + (static_cast<double>(n) - 0.5) * step;
  return g;
}

bool resolves(const TimeGrid& grid, double sigma_p) {
  return grid.step() <= sigma_p / 16.0 * (1.0 + 1e-12);
}

void PulseTrainSpec::validate() const {
  if (!positive_finite(sigma_p)) fail(ErrorCode::parameter, "sigma_p must be > 0");
  if (!positive_finite(period)) fail(ErrorCode::parameter, "pump period must be > 0");
  if (side_pulses < 0) fail(ErrorCode::parameter, "side pulse count must be >= 0");
  if (!std::isfinite(amplitude)) fail(ErrorCode::parameter, "pump amplitude must be finite");
}

void GaussianFilterSpec::validate() const {
  if (!positive_finite(gamma)) fail(ErrorCode::parameter, "filter gamma must be > 0");
  if (!std::isfinite(center_frequency))
    fail(ErrorCode::parameter, "filter centre frequency must be finite");
}

void TimeGateSpec::validate() const {
  if (!(width > 0.0) || std::isnan(width)) fail(ErrorCode::parameter, "gate width must be > 0");
  if (!std::isfinite(center)) fail(ErrorCode::parameter, "gate centre must be finite");
}

TimeGateSpec gate_for(const PulseTrainSpec& train) {
  train.validate();
  return TimeGateSpec{train.period, 0.0};
}

double pump_train_at(const PulseTrainSpec& spec, double t) {
  spec.validate();
  double sum = 0.0;
  for (int j = -spec.side_pulses; j <= spec.side_pulses; ++j) {
    const double x = (t - j * spec.period) / spec.sigma_p;
    sum += std::exp(-x * x);
  }
  return spec.amplitude * sum;
}

double filter_time_at(const GaussianFilterSpec& spec, double t) {
  spec.validate();
  const double x = spec.gamma * t;
  return std::exp(-x * x);
}

double gate_at(const TimeGateSpec& spec, double t) {
  spec.validate();
  return std::abs(t - spec.center) <= 0.5 * spec.width ? 1.0 : 0.0;
}

PumpTrainSamples sample_pump_train(const PulseTrainSpec& spec, const TimeGrid& grid) {
  spec.validate();
  grid.validate();
  PumpTrainSamples out;
  out.values.resize(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) out.values[i] = pump_train_at(spec, grid.at(i));
  const double reach = (spec.side_pulses + 0.5) * spec.period;
  out.window_truncated = grid.lo > -reach || grid.hi < reach;
  return out;
}

std::vector<double> sample_filter_time(const GaussianFilterSpec& spec, const TimeGrid& grid) {
  spec.validate();
  grid.validate();
  std::vector<double> v(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) v[i] = filter_time_at(spec, grid.at(i));
  return v;
}

std::vector<double> sample_gate(const TimeGateSpec& spec, const TimeGrid& grid) {
  spec.validate();
  grid.validate();
  std::vector<double> v(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) v[i] = gate_at(spec, grid.at(i));
  return v;
}

double parameter_from_fwhm(FwhmKind kind, double fwhm) {
  if (!positive_finite(fwhm)) fail(ErrorCode::parameter, "FWHM must be > 0");
  switch (kind) {
    case FwhmKind::pump_intensity_bandwidth:
      return std::sqrt(2.0 * kLn2) / (std::numbers::pi * fwhm);
    case FwhmKind::filter_amplitude_bandwidth:
      return std::numbers::pi * fwhm / (2.0 * std::sqrt(kLn2));
    case FwhmKind::duration:
      return fwhm / std::sqrt(2.0 * kLn2);
  }
  fail(ErrorCode::parameter, "unknown FWHM kind");
}

double fwhm_from_parameter(FwhmKind kind, double parameter) {
  if (!positive_finite(parameter)) fail(ErrorCode::parameter, "parameter must be > 0");
  switch (kind) {
    case FwhmKind::pump_intensity_bandwidth:
      return std::sqrt(2.0 * kLn2) / (std::numbers::pi * parameter);
    case FwhmKind::filter_amplitude_bandwidth:
      return 2.0 * std::sqrt(kLn2) * parameter / std::numbers::pi;
    case FwhmKind::duration:
      return parameter * std::sqrt(2.0 * kLn2);
  }
  fail(ErrorCode::parameter, "unknown FWHM kind");
}

double filter_intensity_fwhm(double amplitude_fwhm) {
  if (!positive_finite(amplitude_fwhm)) fail(ErrorCode::parameter, "FWHM must be > 0");
  return amplitude_fwhm / std::numbers::sqrt2;
}

TimeGrid default_train_grid(const PulseTrainSpec& train, const GaussianFilterSpec& filter) {
  train.validate();
  filter.validate();
  double half = (train.side_pulses + 0.5) * train.period;
  half = std::max(half, 4.0 / filter.gamma);
  std::size_t n = 1024;
  const double max_step = train.sigma_p / 16.0;
  if (2.0 * half / static_cast<double>(n - 1) > max_step)
    n = static_cast<std::size_t>(std::ceil(2.0 * half / max_step)) + 1;
  return TimeGrid{n, -half, half};
}

}  // namespace biphoton
