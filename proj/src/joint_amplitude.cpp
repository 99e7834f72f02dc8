#include "biphoton/joint_amplitude.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "biphoton/error.hpp"
#include "biphoton/format.hpp"

namespace biphoton {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool same_step(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

Grid1D frequency_axis(const Grid1D& time_axis) {
  const auto n = static_cast<double>(time_axis.n_points);
  const double centre = std::floor(n / 2.0);
  const double dnu = 1.0 / (n * time_axis.step());
  return Grid1D{time_axis.n_points, -centre * dnu, (n - 1.0 - centre) * dnu};
}

}  // namespace

double JointAmplitude::norm_squared() const {
  return values.cwiseAbs2().sum() * idler_axis.step() * signal_axis.step();
}

void JointAmplitude::validate() const {
  idler_axis.validate();
  signal_axis.validate();
  if (static_cast<std::size_t>(values.rows()) != idler_axis.n_points ||
      static_cast<std::size_t>(values.cols()) != signal_axis.n_points)
    fail(ErrorCode::domain_mismatch, "amplitude matrix does not match its axes");
  if (!values.allFinite()) fail(ErrorCode::numerical, "amplitude contains non-finite entries");
}

bool JointAmplitude::is_real() const { return values.imag().cwiseAbs().maxCoeff() == 0.0; }

JointAmplitude assemble_jta(const PulseTrainSpec& train, const GaussianFilterSpec& filter,
                            const std::optional<TimeGateSpec>& gate, const JtaGrids& grids) {
  train.validate();
  filter.validate();
  if (gate) gate->validate();
  grids.idler.validate();
  grids.signal.validate();
  // The idler enters only through T(t_i - t_s), so its axis needs to resolve
  // the longer of sigma_p and 1/gamma.
  if (!resolves(grids.signal, train.sigma_p))
    fail(ErrorCode::parameter, "signal grid step exceeds sigma_p/16");
  if (!resolves(grids.idler, std::max(train.sigma_p, 1.0 / filter.gamma)))
    fail(ErrorCode::parameter, "idler grid step exceeds max(sigma_p, 1/gamma)/16");

  const auto ni = static_cast<Eigen::Index>(grids.idler.n_points);
  const auto ns = static_cast<Eigen::Index>(grids.signal.n_points);

  Eigen::VectorXd pump(ns), gate_s(ns), ti(ni), gate_i(ni);
  for (Eigen::Index s = 0; s < ns; ++s) {
    const double t = grids.signal.at(static_cast<std::size_t>(s));
    pump[s] = pump_train_at(train, t);
    gate_s[s] = gate ? gate_at(*gate, t) : 1.0;
  }
  for (Eigen::Index i = 0; i < ni; ++i) {
    ti[i] = grids.idler.at(static_cast<std::size_t>(i));
    gate_i[i] = gate ? gate_at(*gate, ti[i]) : 1.0;
  }

  JointAmplitude out;
  out.domain = Domain::time;
  out.idler_axis = grids.idler;
  out.signal_axis = grids.signal;
  out.values = Eigen::MatrixXcd::Zero(ni, ns);
  for (Eigen::Index s = 0; s < ns; ++s) {
    const double ts = grids.signal.at(static_cast<std::size_t>(s));
    const double col = gate_s[s] * pump[s];
    if (col == 0.0) continue;
    for (Eigen::Index i = 0; i < ni; ++i) {
      if (gate_i[i] == 0.0) continue;
      out.values(i, s) = col * filter_time_at(filter, ti[i] - ts);
    }
  }
  return out;
}

JointAmplitude to_frequency_domain(const JointAmplitude& jta) {
  if (jta.domain != Domain::time) fail(ErrorCode::domain_mismatch, "input is not in the time domain");
  jta.validate();

  const int ni = static_cast<int>(jta.idler_axis.n_points);
  const int ns = static_cast<int>(jta.signal_axis.n_points);
  const std::size_t total = static_cast<std::size_t>(ni) * static_cast<std::size_t>(ns);

  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  if (!buf) fail(ErrorCode::numerical, "FFT buffer allocation failed");
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_2d(ni, ns, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (int i = 0; i < ni; ++i)
    for (int s = 0; s < ns; ++s) {
      const cd v = jta.values(i, s);
      buf[i * ns + s][0] = v.real();
      buf[i * ns + s][1] = v.imag();
    }
  fftw_execute(plan);

  JointAmplitude out;
  out.domain = Domain::frequency;
  out.idler_axis = frequency_axis(jta.idler_axis);
  out.signal_axis = frequency_axis(jta.signal_axis);
  out.values.resize(ni, ns);

  const double dti = jta.idler_axis.step();
  const double dts = jta.signal_axis.step();
  const int ci = ni / 2;
  const int cs = ns / 2;
  // Phase factor restores the absolute time origin of the first sample.
  std::vector<cd> phase_i(static_cast<std::size_t>(ni)), phase_s(static_cast<std::size_t>(ns));
  for (int k = 0; k < ni; ++k)
    phase_i[static_cast<std::size_t>(k)] =
        std::polar(dti, -2.0 * kPi * out.idler_axis.at(static_cast<std::size_t>(k)) * jta.idler_axis.lo);
  for (int k = 0; k < ns; ++k)
    phase_s[static_cast<std::size_t>(k)] =
        std::polar(dts, -2.0 * kPi * out.signal_axis.at(static_cast<std::size_t>(k)) * jta.signal_axis.lo);

  for (int ki = 0; ki < ni; ++ki) {
    const int src_i = ((ki - ci) % ni + ni) % ni;
    for (int ks = 0; ks < ns; ++ks) {
      const int src_s = ((ks - cs) % ns + ns) % ns;
      const auto& b = buf[src_i * ns + src_s];
      out.values(ki, ks) = cd(b[0], b[1]) * phase_i[static_cast<std::size_t>(ki)] *
                           phase_s[static_cast<std::size_t>(ks)];
    }
  }

  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

Eigen::MatrixXcd signal_density_matrix(const JointAmplitude& jta) {
  jta.validate();
  // rho = F^T conj(F) dx_i
  return (jta.values.transpose() * jta.values.conjugate()) * jta.idler_axis.step();
}

double measure_fwhm(const Grid1D& axis, std::span<const double> values) {
  if (values.size() != axis.n_points || values.size() < 3)
    fail(ErrorCode::precondition, "curve does not match its axis");
  const auto peak_it = std::max_element(values.begin(), values.end());
  const double half = 0.5 * *peak_it;
  if (!(half > 0.0)) fail(ErrorCode::precondition, "curve has no positive peak");
  const auto peak = static_cast<std::size_t>(peak_it - values.begin());

  std::size_t l = peak;
  while (l > 0 && values[l - 1] >= half) --l;
  if (l == 0) fail(ErrorCode::precondition, "left half-maximum crossing outside the grid");
  std::size_t r = peak;
  while (r + 1 < values.size() && values[r + 1] >= half) ++r;
  if (r + 1 == values.size()) fail(ErrorCode::precondition, "right half-maximum crossing outside the grid");

  auto cross = [&](std::size_t below, std::size_t above) {
    const double x0 = axis.at(below), x1 = axis.at(above);
    const double y0 = values[below], y1 = values[above];
    return x0 + (half - y0) * (x1 - x0) / (y1 - y0);
  };
  return cross(r + 1, r) - cross(l - 1, l);
}

MarginalSpectrum marginal_signal_spectrum(double pump_intensity_fwhm_ghz,
                                          double filter_amplitude_fwhm_ghz,
                                          const FrequencyGrid& grid, double filter_center_ghz) {
  grid.validate();
  const double sigma_p = parameter_from_fwhm(FwhmKind::pump_intensity_bandwidth, pump_intensity_fwhm_ghz);
  const double gamma = parameter_from_fwhm(FwhmKind::filter_amplitude_bandwidth, filter_amplitude_fwhm_ghz);
  if (!std::isfinite(filter_center_ghz)) fail(ErrorCode::parameter, "filter centre must be finite");

  // |T(nu)|^2 = exp(-2 pi^2 nu^2 / gamma^2),  |Omega(nu)|^2 = exp(-2 pi^2 sigma_p^2 nu^2)
  const double filter_rate = 2.0 * kPi * kPi / (gamma * gamma);
  const double pump_rate = 2.0 * kPi * kPi * sigma_p * sigma_p;
  const double filter_std = gamma / (2.0 * kPi);
  const double pump_std = 1.0 / (2.0 * kPi * sigma_p);

  const double dnu = std::min(filter_std, pump_std) / 16.0;
  const double half_span = 10.0 * filter_std;
  const auto n_quad = static_cast<std::size_t>(std::ceil(2.0 * half_span / dnu)) + 1;

  MarginalSpectrum out;
  out.axis = grid;
  out.intensity.resize(grid.n_points);
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double nu_s = grid.at(k);
    double acc = 0.0;
    for (std::size_t q = 0; q < n_quad; ++q) {
      const double u = -half_span + static_cast<double>(q) * dnu;  // nu_i - filter centre
      const double nu_i = filter_center_ghz + u;
      const double w = (q == 0 || q + 1 == n_quad) ? 0.5 : 1.0;
      const double x = nu_s + nu_i;
      acc += w * std::exp(-filter_rate * u * u - pump_rate * x * x);
    }
    out.intensity[k] = acc * dnu;
  }
  const double peak = *std::max_element(out.intensity.begin(), out.intensity.end());
  if (!(peak > 0.0)) fail(ErrorCode::precondition, "marginal spectrum vanishes on the grid");
  for (double& v : out.intensity) v /= peak;
  out.fwhm = measure_fwhm(grid, out.intensity);
  if (out.fwhm < 8.0 * grid.step())
    fail(ErrorCode::precondition, "frequency grid too coarse: FWHM spans fewer than 8 samples");
  return out;
}

double marginal_fwhm_closed_form(double pump_intensity_fwhm_ghz, double filter_amplitude_fwhm_ghz) {
  const double f = filter_intensity_fwhm(filter_amplitude_fwhm_ghz);
  if (!(pump_intensity_fwhm_ghz > 0.0)) fail(ErrorCode::parameter, "FWHM must be > 0");
  return std::hypot(pump_intensity_fwhm_ghz, f);
}

MarginalSpectrum signal_marginal(const JointAmplitude& jta) {
  jta.validate();
  MarginalSpectrum out;
  out.axis = jta.signal_axis;
  const Eigen::VectorXd col = jta.values.cwiseAbs2().colwise().sum().transpose() * jta.idler_axis.step();
  out.intensity.assign(col.data(), col.data() + col.size());
  const double peak = col.maxCoeff();
  if (!(peak > 0.0)) fail(ErrorCode::zero_norm, "marginal of a zero amplitude");
  for (double& v : out.intensity) v /= peak;
  out.fwhm = measure_fwhm(out.axis, out.intensity);
  return out;
}

double gating_loss(const JointAmplitude& gated, const JointAmplitude& reference) {
  gated.validate();
  reference.validate();
  if (gated.domain != reference.domain) fail(ErrorCode::domain_mismatch, "domains differ");
  if (!same_step(gated.idler_axis.step(), reference.idler_axis.step()) ||
      !same_step(gated.signal_axis.step(), reference.signal_axis.step()))
    fail(ErrorCode::domain_mismatch, "grid steps differ");
  const double denom = reference.norm_squared();
  if (!(denom > 0.0)) fail(ErrorCode::zero_norm, "reference amplitude has zero norm");
  return gated.norm_squared() / denom;
}

double single_pulse_norm_squared(const PulseTrainSpec& train, const GaussianFilterSpec& filter) {
  train.validate();
  filter.validate();
  // With u = t_i - t_s the double integral separates into
  // int |Omega(t)|^2 dt * int |T(u)|^2 du.
  auto gaussian_power = [](double width) {
    const double h = width / 32.0;
    double acc = 0.0;
    for (int k = -32 * 10; k <= 32 * 10; ++k) {
      const double x = k * h / width;
      acc += std::exp(-2.0 * x * x);
    }
    return acc * h;
  };
  return train.amplitude * train.amplitude * gaussian_power(train.sigma_p) *
         gaussian_power(1.0 / filter.gamma);
}

void write_csv(std::ostream& os, const JointAmplitude& jta) {
  jta.validate();
  os << (jta.domain == Domain::time ? "t_i,t_s,re,im\n" : "nu_i,nu_s,re,im\n");
  for (Eigen::Index i = 0; i < jta.values.rows(); ++i)
    for (Eigen::Index s = 0; s < jta.values.cols(); ++s) {
      const cd v = jta.values(i, s);
      os << format_number(jta.idler_axis.at(static_cast<std::size_t>(i))) << ','
         << format_number(jta.signal_axis.at(static_cast<std::size_t>(s))) << ','
         << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
    }
}

void write_csv(std::ostream& os, const MarginalSpectrum& spectrum) {
  os << "frequency_GHz,intensity\n";
  for (std::size_t k = 0; k < spectrum.intensity.size(); ++k)
    os << format_number(spectrum.axis.at(k)) << ',' << format_number(spectrum.intensity[k]) << '\n';
}

}  // namespace biphoton
