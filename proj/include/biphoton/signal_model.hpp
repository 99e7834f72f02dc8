#pragma once

// Sampling grids and the elementary field envelopes: Gaussian pump pulse
// trains, Gaussian spectral filters and rectangular time gates.
//
// Units are whatever the caller uses consistently. Design-space studies run
// in units of the pump width (sigma_p = 1); laboratory conversions use ns and
// GHz, with gamma in rad/ns.

#include <cstddef>
#include <vector>

namespace biphoton {

/// Uniform 1-D grid including both end points.
struct Grid1D {
  std::size_t n_points = 2;
  double lo = 0.0;
  double hi = 1.0;

  double step() const { return (hi - lo) / static_cast<double>(n_points - 1); }
  double at(std::size_t i) const { return lo + static_cast<double>(i) * step(); }
  double span() const { return hi - lo; }

  /// Throws ErrorCode::parameter unless n_points >= 2 and hi > lo.
  void validate() const;

  /// Grid of n cells of width step covering [lo, lo + n*step], sampled at
  /// cell centres. Midpoint quadrature on such a grid integrates over the
  /// closed interval without end-point weighting.
  static Grid1D cell_centred(double lo, double step, std::size_t n);
};

using TimeGrid = Grid1D;
using FrequencyGrid = Grid1D;

/// A grid resolves a pump of width sigma_p when step <= sigma_p / 16.
bool resolves(const TimeGrid& grid, double sigma_p);

struct PulseTrainSpec {
  double sigma_p = 1.0;   // amplitude 1/e half-width
  double period = 10.0;   // pump repetition period T
  int side_pulses = 3;    // train truncated to j in [-M, M]
  double amplitude = 1.0;

  void validate() const;
  double t_hat() const { return period / sigma_p; }
};

struct GaussianFilterSpec {
  double gamma = 1.0;             // amplitude transmission exp(-(gamma t)^2)
  double center_frequency = 0.0;  // GHz; only used in the frequency domain

  void validate() const;
};

struct TimeGateSpec {
  double width = 10.0;
  double center = 0.0;

  void validate() const;
};

/// Gate spanning one period around the central pump pulse.
TimeGateSpec gate_for(const PulseTrainSpec& train);

double pump_train_at(const PulseTrainSpec& spec, double t);
double filter_time_at(const GaussianFilterSpec& spec, double t);
double gate_at(const TimeGateSpec& spec, double t);

struct PumpTrainSamples {
  std::vector<double> values;
  // Set when the grid does not reach +-(M + 1/2) T, so the outer pulses of the
  // truncated train are cut by the sampling window.
  bool window_truncated = false;
};

PumpTrainSamples sample_pump_train(const PulseTrainSpec& spec, const TimeGrid& grid);
std::vector<double> sample_filter_time(const GaussianFilterSpec& spec, const TimeGrid& grid);
std::vector<double> sample_gate(const TimeGateSpec& spec, const TimeGrid& grid);

enum class FwhmKind {
  pump_intensity_bandwidth,    // GHz  <-> sigma_p [ns]
  filter_amplitude_bandwidth,  // GHz  <-> gamma [rad/ns]
  duration,                    // intensity FWHM in time <-> sigma_p
};

/// Maps a quoted FWHM onto the canonical parameter (sigma_p or gamma).
double parameter_from_fwhm(FwhmKind kind, double fwhm);
/// Inverse of parameter_from_fwhm.
double fwhm_from_parameter(FwhmKind kind, double parameter);

/// Intensity FWHM of |filter|^2 given its amplitude FWHM (Gaussian lines).
double filter_intensity_fwhm(double amplitude_fwhm);

/// Default sampling grid for a pump train seen through a filter: 1024 points
/// over [-(M + 1/2) T, (M + 1/2) T], widened to at least 8 / gamma and
/// refined until step <= sigma_p / 16.
TimeGrid default_train_grid(const PulseTrainSpec& train, const GaussianFilterSpec& filter);

}  // namespace biphoton
