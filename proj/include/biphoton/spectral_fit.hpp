#pragma once

// Heralded-photon bandwidth from a filter sweep: the coincidence rate seen
// through a fixed Gaussian filter while the photon spectrum is detuned is the
// convolution of the filter line with the photon spectrum.

#include <istream>
#include <string>
#include <vector>

#include "biphoton/counting.hpp"
#include "biphoton/signal_model.hpp"

namespace biphoton {

struct SweepPoint {
  double detuning_ghz = 0.0;
  double normalized_coincidences = 0.0;
};

struct SweepTable {
  std::vector<SweepPoint> points;
  std::vector<RowIssue> issues;
};

/// CSV with header `detuning_GHz, normalized_coincidences`.
SweepTable read_sweep_csv(std::istream& is);
SweepTable read_sweep_csv_file(const std::string& path);

/// Which filter response enters the convolution. Count rates follow the
/// intensity transmission |T(nu)|^2; the amplitude variant is kept for
/// sensitivity checks.
enum class FilterLine { intensity, amplitude };

/// FWHM of the chosen filter response, GHz.
double filter_line_fwhm(const GaussianFilterSpec& filter, FilterLine line);

/// Intensity FWHM of S(nu) = exp(-4 pi^2 dt^2 nu^2): sqrt(ln 2) / (pi dt).
double bandwidth_from_duration(double delta_t_ns);
double duration_from_bandwidth(double delta_nu_ghz);

/// scale * conv(detuning - centre) / conv(filter centre), where conv is the
/// numerically integrated convolution of the filter line with S(nu).
double sweep_model(double detuning_ghz, double delta_t_ns, double centre_ghz, double scale,
                   const GaussianFilterSpec& filter, FilterLine line);

struct SpectralFitOptions {
  FilterLine line = FilterLine::intensity;
  int max_iterations = 200;
  double tolerance = 1e-6;  // relative parameter step
};

struct SpectralFit {
  double delta_t_ns = 0.0;
  double delta_t_err_ns = 0.0;
  double delta_nu_ghz = 0.0;
  double delta_nu_err_ghz = 0.0;
  double centre_ghz = 0.0;
  double centre_err_ghz = 0.0;
  double scale = 0.0;
  double scale_err = 0.0;
  std::vector<double> residuals;  // observed - model, in input order
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
  // Fitted bandwidth is below a tenth of the filter line width, where the
  // convolution no longer constrains it.
  bool below_resolution = false;
  double resolution_bound_ghz = 0.0;
};

/// Levenberg-Marquardt fit of (dt, centre, scale) with a numerically
/// differentiated Jacobian. Throws ErrorCode::precondition for fewer than five
/// points, a detuning span narrower than the filter FWHM, or all-zero data.
/// Non-convergence is reported through `converged`.
SpectralFit fit_hsp_bandwidth(const std::vector<SweepPoint>& points, const GaussianFilterSpec& signal_filter,
                              const SpectralFitOptions& options = {});

}  // namespace biphoton
