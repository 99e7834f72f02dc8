#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/joint_amplitude.hpp"

namespace biphoton {

/// Schmidt decomposition f(t_i, t_s) = norm * sum_k lambda_k zeta_k(t_i) xi_k(t_s).
struct SchmidtResult {
  // All singular values, normalised so sum lambda_k^2 = 1, non-increasing.
  std::vector<double> lambdas;
  // Leading modes as columns, unit norm under the grid quadrature
  // (sum |xi|^2 dx = 1). Largest-magnitude sample of each mode is real positive.
  Eigen::MatrixXcd signal_modes;
  Eigen::MatrixXcd idler_modes;
  Grid1D signal_axis;
  Grid1D idler_axis;

  double purity = 1.0;          // sum lambda_k^4
  double schmidt_number = 1.0;  // 1 / purity
  double tail_mass = 0.0;       // sum of lambda_k^2 beyond the returned modes
  double norm_squared = 0.0;    // norm^2 of the input amplitude
  bool leading_tie = false;     // lambda_1 - lambda_2 < 1e-12

  /// Unnormalised weight of the leading mode pair, sigma_1^2 = lambda_1^2 * norm^2.
  double leading_weight() const { return lambdas.empty() ? 0.0 : lambdas[0] * lambdas[0] * norm_squared; }
};

inline constexpr std::size_t kDefaultModeCount = 16;

/// SVD of the quadrature-weighted amplitude. Real inputs take a real SVD.
/// Throws ErrorCode::zero_norm for a vanishing amplitude and
/// ErrorCode::numerical if the SVD does not converge.
SchmidtResult schmidt_decompose(const JointAmplitude& jta, std::size_t k_max = kDefaultModeCount);

/// Singular values only; cheaper path used by design-space sweeps.
SchmidtResult schmidt_spectrum(const JointAmplitude& jta);

struct MemoryKernel {
  Grid1D axis;
  Eigen::VectorXcd values;  // unit norm under the grid quadrature
  bool tie = false;         // leading Schmidt coefficient degenerate; mode 1 used
};

/// Fundamental signal Schmidt mode, the memory acceptance mode that maximises
/// the read-in weight.
MemoryKernel fundamental_kernel(const SchmidtResult& result);

/// <K| rho |K> for a kernel sampled on the signal axis of rho.
double kernel_overlap(const MemoryKernel& kernel, const Eigen::MatrixXcd& rho);

double purity_of(const JointAmplitude& jta);

/// JSON with singular values, purity, Schmidt number, tail mass and tie flag.
std::string to_json(const SchmidtResult& result);

/// CSV of the returned signal modes: t_s, then re/im column pairs per mode.
void write_modes_csv(std::ostream& os, const SchmidtResult& result);

}  // namespace biphoton
