#pragma once

// Memory read-in efficiency of time-gated heralded photons and the
// (pump period, idler filter bandwidth) design space.
//
// Everything here is dimensionless: times in units of the pump width sigma_p,
// so t_hat = T / sigma_p and gamma_hat = gamma * sigma_p.

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/joint_amplitude.hpp"

namespace biphoton {

enum class KernelSource {
  gated_self,  // first Schmidt mode of the gated amplitude itself
  ungated,     // first signal mode of the ungated single-pulse amplitude
};

const char* to_string(KernelSource k) noexcept;

struct NumericControls {
  int side_pulses = 3;               // train truncation M
  double samples_per_scale = 16.0;   // grid points per shortest feature (sigma_p or 1/gamma)
  std::size_t min_grid_points = 64;  // per axis
  std::size_t max_grid_points = 1024;

  void validate() const;
};

struct DesignPoint {
  double t_hat = 11.0;
  double gamma_hat = 0.85;
  // Without gates the pump period plays no role: this is the T -> infinity
  // limit, with only the central pulse and no time-bin clipping.
  bool gates_enabled = true;
  KernelSource kernel = KernelSource::gated_self;
  NumericControls numerics;

  void validate() const;
};

/// Sampling grids used for a design point: cell-centred grids covering the
/// gate window intersected with the support of the amplitude.
JtaGrids design_grids(const DesignPoint& point);

struct EfficiencyResult {
  double eta_in = 0.0;
  double purity = 0.0;           // of the gated heralded state
  double gating_loss = 0.0;      // norm^2(gated) / reference norm^2
  double reference_norm = 0.0;   // norm^2 of the ungated single-pulse amplitude
  double leading_weight = 0.0;   // sigma_1^2 of the gated amplitude
  std::vector<double> lambda_head;  // leading normalised Schmidt coefficients
  std::size_t idler_points = 0;
  std::size_t signal_points = 0;
  bool kernel_tie = false;
};

/// eta_in = <K| rho_s |K> / N, where rho_s is the reduced signal state of the
/// gated amplitude and N the norm^2 of the ungated single-pulse amplitude.
EfficiencyResult evaluate_design_point(const DesignPoint& point);

inline double read_in_efficiency(const DesignPoint& point) { return evaluate_design_point(point).eta_in; }

/// eta_mem = eta_in * eta_ret; both inputs must lie in [0, 1].
double total_memory_efficiency(double eta_in, double eta_ret);

struct SweepRequest {
  std::vector<double> t_values;
  std::vector<double> gamma_values;
  NumericControls numerics;
  KernelSource kernel = KernelSource::gated_self;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct CellFailure {
  std::size_t t_index = 0;
  std::size_t gamma_index = 0;
  double t_hat = 0.0;
  double gamma_hat = 0.0;
  std::string message;
};

struct EfficiencyMap {
  std::vector<double> t_values;
  std::vector<double> gamma_values;
  Eigen::MatrixXd eta_in;  // rows: t, cols: gamma; NaN marks a failed cell
  std::vector<double> gamma_opt;      // refined argmax per t row (NaN if row empty)
  std::vector<double> eta_opt;        // refined maximum per t row
  std::vector<std::size_t> argmax;    // sampled argmax column per t row
  std::vector<CellFailure> failures;
  NumericControls numerics;
  KernelSource kernel = KernelSource::gated_self;
};

/// n evenly spaced values from lo to hi inclusive (just lo when n == 1).
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Evaluates every cell (in parallel when threads != 1). Cell results are
/// placed by index, so the map does not depend on scheduling. A failing cell
/// is recorded in `failures` and left NaN.
EfficiencyMap sweep_design_space(const SweepRequest& request);

struct PeakEstimate {
  double x = 0.0;
  double y = 0.0;
  bool refined = false;
};

/// Vertex of the parabola through samples k-1, k, k+1 (non-uniform spacing
/// allowed). Falls back to the sample itself at the edges.
PeakEstimate refine_peak(const std::vector<double>& x, const Eigen::VectorXd& y, std::size_t k);

/// CSV columns: t_hat, gamma_hat, eta_in. Rows ordered t-major.
void write_csv(std::ostream& os, const EfficiencyMap& map);

/// JSON summary: gamma_opt curve, eta_opt, failures and numeric controls.
std::string summary_json(const EfficiencyMap& map);

}  // namespace biphoton
