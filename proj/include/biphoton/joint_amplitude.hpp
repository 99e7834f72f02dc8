#pragma once

// Joint temporal/spectral amplitude of the filtered, gated biphoton state and
// the signal marginals derived from it.

#include <complex>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/signal_model.hpp"

namespace biphoton {

enum class Domain { time, frequency };

/// Complex amplitude sampled on a product grid. Rows run along the idler
/// axis, columns along the signal axis. Frequency axes are in ordinary
/// frequency (cycles per time unit, GHz when time is in ns).
struct JointAmplitude {
  Domain domain = Domain::time;
  Grid1D idler_axis;
  Grid1D signal_axis;
  Eigen::MatrixXcd values;

  /// Sum |f|^2 dx_i dx_s.
  double norm_squared() const;
  /// Throws unless dimensions match the axes and every entry is finite.
  void validate() const;
  bool is_real() const;
};

struct JtaGrids {
  TimeGrid idler;
  TimeGrid signal;
};

/// values[i][s] = G(t_i) G(t_s) T(t_i - t_s) Omega_tot(t_s), with the gate
/// omitted when `gate` is empty. The signal step must not exceed sigma_p/16
/// and the idler step max(sigma_p, 1/gamma)/16.
JointAmplitude assemble_jta(const PulseTrainSpec& train, const GaussianFilterSpec& filter,
                            const std::optional<TimeGateSpec>& gate, const JtaGrids& grids);

inline JointAmplitude assemble_gated_jta(const PulseTrainSpec& train,
                                         const GaussianFilterSpec& filter,
                                         const TimeGateSpec& gate, const JtaGrids& grids) {
  return assemble_jta(train, filter, gate, grids);
}

/// 2-D Fourier transform f(nu_i, nu_s) = sum f(t_i, t_s) exp(-2 pi i (nu_i t_i +
/// nu_s t_s)) dt_i dt_s on the DFT frequency grid, centred on zero frequency.
/// Unitary up to the quadrature weights, so norm_squared() is preserved.
JointAmplitude to_frequency_domain(const JointAmplitude& jta);

/// Reduced signal state rho(s, s') = sum_i f(i, s) conj(f(i, s')) dx_i.
Eigen::MatrixXcd signal_density_matrix(const JointAmplitude& jta);

struct MarginalSpectrum {
  Grid1D axis;                   // GHz for spectra
  std::vector<double> intensity; // peak-normalised
  double fwhm = 0.0;
};

/// Signal marginal S(nu_s) ~ integral |T(nu_i)|^2 |Omega(nu_s + nu_i)|^2 dnu_i
/// for a Gaussian pump (intensity FWHM, GHz) and a Gaussian idler filter
/// (amplitude FWHM, GHz, centred at filter_center_ghz), integrated numerically.
/// Throws ErrorCode::precondition when the FWHM spans fewer than 8 samples.
MarginalSpectrum marginal_signal_spectrum(double pump_intensity_fwhm_ghz,
                                          double filter_amplitude_fwhm_ghz,
                                          const FrequencyGrid& grid,
                                          double filter_center_ghz = 0.0);

/// Closed form for the Gaussian case: quadrature sum of the pump intensity
/// FWHM and the filter intensity FWHM.
double marginal_fwhm_closed_form(double pump_intensity_fwhm_ghz,
                                 double filter_amplitude_fwhm_ghz);

/// Signal marginal of a sampled joint amplitude, sum_i |f|^2 dx_i.
MarginalSpectrum signal_marginal(const JointAmplitude& jta);

/// Full width at half maximum of a sampled single-peaked curve, using linear
/// interpolation between the samples that bracket half maximum on each side.
/// Throws ErrorCode::precondition if either crossing lies outside the grid.
double measure_fwhm(const Grid1D& axis, std::span<const double> values);

/// norm^2(gated) / norm^2(reference). Both must share grid steps.
double gating_loss(const JointAmplitude& gated, const JointAmplitude& ungated_single_pulse);

/// Norm^2 of the ungated single-pulse (j = 0) filtered JTA over the whole
/// plane, evaluated as a product of two 1-D quadratures.
double single_pulse_norm_squared(const PulseTrainSpec& train, const GaussianFilterSpec& filter);

/// CSV with columns: idler axis, signal axis, re, im (one row per sample).
void write_csv(std::ostream& os, const JointAmplitude& jta);
/// CSV with columns: frequency_GHz, intensity.
void write_csv(std::ostream& os, const MarginalSpectrum& spectrum);

}  // namespace biphoton
