#include "biphoton/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "biphoton/error.hpp"
#include "biphoton/format.hpp"
#include "json.hpp"

namespace biphoton {

namespace {

using cd = std::complex<double>;

template <typename Svd>
void check_svd(const Svd& svd) {
  if (svd.info() != Eigen::Success) fail(ErrorCode::numerical, "SVD did not converge");
  if (!svd.singularValues().allFinite()) fail(ErrorCode::numerical, "SVD produced non-finite values");
}

void fill_spectrum(SchmidtResult& r, const Eigen::VectorXd& sv, std::size_t k_max) {
  const double total = sv.squaredNorm();
  if (!(total > 0.0)) fail(ErrorCode::zero_norm, "amplitude has zero norm");
  const double scale = 1.0 / std::sqrt(total);
  r.norm_squared = total;
  r.lambdas.resize(static_cast<std::size_t>(sv.size()));
  double p = 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    const double l = sv[k] * scale;
    r.lambdas[static_cast<std::size_t>(k)] = l;
    p += l * l * l * l;
  }
  r.purity = p;
  r.schmidt_number = 1.0 / p;
  double tail = 0.0;
  for (std::size_t k = std::min(k_max, r.lambdas.size()); k < r.lambdas.size(); ++k)
    tail += r.lambdas[k] * r.lambdas[k];
  r.tail_mass = tail;
  r.leading_tie = r.lambdas.size() > 1 && r.lambdas[0] - r.lambdas[1] < 1e-12;
}

// Rotates mode k so its largest-magnitude sample is real positive, applying the
// inverse phase to the partner so the product zeta_k xi_k is unchanged.
void fix_phase(Eigen::MatrixXcd& signal, Eigen::MatrixXcd& idler, Eigen::Index k) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index s = 0; s < signal.rows(); ++s) {
    const double m = std::abs(signal(s, k));
    if (m > best * (1.0 + 1e-12)) {
      best = m;
      arg = s;
    }
  }
  if (best <= 0.0) return;
  const cd phase = signal(arg, k) / best;
  signal.col(k) *= std::conj(phase);
  idler.col(k) *= phase;
}

}  // namespace

SchmidtResult schmidt_decompose(const JointAmplitude& jta, std::size_t k_max) {
  jta.validate();
  if (k_max == 0) fail(ErrorCode::parameter, "k_max must be >= 1");
  const double di = jta.idler_axis.step();
  const double ds = jta.signal_axis.step();
  const double w = std::sqrt(di * ds);

  SchmidtResult r;
  r.signal_axis = jta.signal_axis;
  r.idler_axis = jta.idler_axis;

  Eigen::VectorXd sv;
  Eigen::MatrixXcd u, v;
  if (jta.is_real()) {
    const Eigen::MatrixXd m = jta.values.real() * w;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    check_svd(svd);
    sv = svd.singularValues();
    u = svd.matrixU().cast<cd>();
    v = svd.matrixV().cast<cd>();
  } else {
    const Eigen::MatrixXcd m = jta.values * w;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    check_svd(svd);
    sv = svd.singularValues();
    u = svd.matrixU();
    v = svd.matrixV();
  }
  fill_spectrum(r, sv, k_max);

  const auto k = static_cast<Eigen::Index>(std::min<std::size_t>(k_max, r.lambdas.size()));
  // W = U S V^*, so f(i, s) ~ sum_k U(i,k) conj(V(s,k)).
  r.signal_modes = v.leftCols(k).conjugate() / std::sqrt(ds);
  r.idler_modes = u.leftCols(k) / std::sqrt(di);
  for (Eigen::Index c = 0; c < k; ++c) fix_phase(r.signal_modes, r.idler_modes, c);
  return r;
}

SchmidtResult schmidt_spectrum(const JointAmplitude& jta) {
  jta.validate();
  const double w = std::sqrt(jta.idler_axis.step() * jta.signal_axis.step());
  SchmidtResult r;
  r.signal_axis = jta.signal_axis;
  r.idler_axis = jta.idler_axis;
  Eigen::VectorXd sv;
  if (jta.is_real()) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(jta.values.real() * w);
    check_svd(svd);
    sv = svd.singularValues();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(jta.values * w);
    check_svd(svd);
    sv = svd.singularValues();
  }
  fill_spectrum(r, sv, 0);
  r.tail_mass = 0.0;
  return r;
}

MemoryKernel fundamental_kernel(const SchmidtResult& result) {
  if (result.lambdas.empty() || result.signal_modes.cols() == 0)
    fail(ErrorCode::parameter, "Schmidt result carries no modes");
  MemoryKernel k;
  k.axis = result.signal_axis;
  k.values = result.signal_modes.col(0);
  k.tie = result.leading_tie;
  return k;
}

double kernel_overlap(const MemoryKernel& kernel, const Eigen::MatrixXcd& rho) {
  if (rho.rows() != kernel.values.size() || rho.cols() != kernel.values.size())
    fail(ErrorCode::domain_mismatch, "kernel and density matrix sizes differ");
  const double ds = kernel.axis.step();
  const cd v = kernel.values.dot(rho * kernel.values);  // conj(K)^T rho K
  return v.real() * ds * ds;
}

double purity_of(const JointAmplitude& jta) { return schmidt_spectrum(jta).purity; }

std::string to_json(const SchmidtResult& r) {
  nlohmann::json lambdas = nlohmann::json::array();
  for (double l : r.lambdas) lambdas.push_back(round_to_output_precision(l));
  nlohmann::json j;
  j["singular_values"] = lambdas;
  j["purity"] = round_to_output_precision(r.purity);
  j["schmidt_number"] = round_to_output_precision(r.schmidt_number);
  j["tail_mass"] = round_to_output_precision(r.tail_mass);
  j["norm_squared"] = round_to_output_precision(r.norm_squared);
  j["modes_returned"] = r.signal_modes.cols();
  j["leading_tie"] = r.leading_tie;
  return j.dump(2);
}

void write_modes_csv(std::ostream& os, const SchmidtResult& r) {
  os << "t_s";
  for (Eigen::Index k = 0; k < r.signal_modes.cols(); ++k) os << ",xi" << k + 1 << "_re,xi" << k + 1 << "_im";
  os << '\n';
  for (Eigen::Index s = 0; s < r.signal_modes.rows(); ++s) {
    os << format_number(r.signal_axis.at(static_cast<std::size_t>(s)));
    for (Eigen::Index k = 0; k < r.signal_modes.cols(); ++k)
      os << ',' << format_number(r.signal_modes(s, k).real()) << ',' << format_number(r.signal_modes(s, k).imag());
    os << '\n';
  }
}

}  // namespace biphoton
