#include "biphoton/spectral_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "biphoton/error.hpp"
#include "csv.hpp"

namespace biphoton {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtLn2 = std::sqrt(std::numbers::ln2);

// Standard deviation of the filter response as a function of frequency.
double filter_std(const GaussianFilterSpec& f, FilterLine line) {
  // |T|^2 = exp(-2 pi^2 nu^2 / gamma^2), T = exp(-pi^2 nu^2 / gamma^2)
  return line == FilterLine::intensity ? f.gamma / (2.0 * kPi) : f.gamma / (kPi * std::numbers::sqrt2);
}

double filter_value(const GaussianFilterSpec& f, FilterLine line, double nu) {
  const double x = kPi * nu / f.gamma;
  return std::exp(-(line == FilterLine::intensity ? 2.0 : 1.0) * x * x);
}

double convolution(double x, double delta_t, const GaussianFilterSpec& f, FilterLine line) {
  const double sf = filter_std(f, line);
  const double ss = 1.0 / (2.0 * kPi * std::numbers::sqrt2 * delta_t);
  const double lo = std::max(f.center_frequency - 10.0 * sf, x - 10.0 * ss);
  const double hi = std::min(f.center_frequency + 10.0 * sf, x + 10.0 * ss);
  if (!(hi > lo)) return 0.0;
  const double h = std::min(sf, ss) / 8.0;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h));
  const double step = (hi - lo) / static_cast<double>(std::max<std::size_t>(n, 1));
  const double a = 4.0 * kPi * kPi * delta_t * delta_t;
  double acc = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double nu = lo + static_cast<double>(k) * step;
    const double d = x - nu;
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    acc += w * filter_value(f, line, nu - f.center_frequency) * std::exp(-a * d * d);
  }
  return acc * step;
}

struct Params {
  double log_dt;
  double centre;
  double scale;
};

Eigen::Vector3d to_vec(const Params& p) { return {p.log_dt, p.centre, p.scale}; }
Params from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

}  // namespace

double filter_line_fwhm(const GaussianFilterSpec& f, FilterLine line) {
  f.validate();
  return 2.0 * std::sqrt(2.0 * std::numbers::ln2) * filter_std(f, line);
}

double bandwidth_from_duration(double dt) {
  if (!(dt > 0.0)) fail(ErrorCode::parameter, "duration must be > 0");
  return kSqrtLn2 / (kPi * dt);
}

double duration_from_bandwidth(double dnu) {
  if (!(dnu > 0.0)) fail(ErrorCode::parameter, "bandwidth must be > 0");
  return kSqrtLn2 / (kPi * dnu);
}

double sweep_model(double detuning, double delta_t, double centre, double scale, const GaussianFilterSpec& f,
                   FilterLine line) {
  f.validate();
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) fail(ErrorCode::parameter, "delta_t must be > 0");
  const double peak = convolution(f.center_frequency, delta_t, f, line);
  return scale * convolution(detuning - centre, delta_t, f, line) / peak;
}

SweepTable read_sweep_csv(std::istream& is) {
  const auto lines = csv::read_lines(is);
  if (lines.empty()) fail(ErrorCode::parse, "sweep CSV is empty");
  const auto header = csv::split(lines.front().text);
  std::size_t c_det = header.size(), c_val = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "detuning_GHz") c_det = i;
    if (header[i] == "normalized_coincidences") c_val = i;
  }
  if (c_det == header.size() || c_val == header.size())
    fail(ErrorCode::parse, "sweep CSV header needs detuning_GHz and normalized_coincidences");

  SweepTable t;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto fields = csv::split(lines[k].text);
    if (fields.size() != header.size()) {
      t.issues.push_back({lines[k].number, "wrong number of fields"});
      continue;
    }
    const auto d = csv::to_double(fields[c_det]);
    const auto v = csv::to_double(fields[c_val]);
    if (!d || !v) {
      t.issues.push_back({lines[k].number, "non-numeric field"});
      continue;
    }
    if (*v < 0.0) {
      t.issues.push_back({lines[k].number, "negative coincidence rate"});
      continue;
    }
    t.points.push_back({*d, *v});
  }
  return t;
}

SweepTable read_sweep_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open sweep file '" + path + "'");
  return read_sweep_csv(in);
}

SpectralFit fit_hsp_bandwidth(const std::vector<SweepPoint>& pts, const GaussianFilterSpec& filter,
                              const SpectralFitOptions& opt) {
  filter.validate();
  const std::size_t n = pts.size();
  if (n < 5) fail(ErrorCode::precondition, "spectral fit needs at least 5 sweep points");
  double lo = pts[0].detuning_ghz, hi = lo, ymax = 0.0;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(pts[i].detuning_ghz) || !std::isfinite(pts[i].normalized_coincidences) ||
        pts[i].normalized_coincidences < 0.0)
      fail(ErrorCode::precondition, "sweep points must be finite with non-negative rates");
    lo = std::min(lo, pts[i].detuning_ghz);
    hi = std::max(hi, pts[i].detuning_ghz);
    if (pts[i].normalized_coincidences > ymax) {
      ymax = pts[i].normalized_coincidences;
      imax = i;
    }
  }
  const double amplitude_fwhm = fwhm_from_parameter(FwhmKind::filter_amplitude_bandwidth, filter.gamma);
  if (hi - lo < amplitude_fwhm) fail(ErrorCode::precondition, "sweep spans less than one filter FWHM");
  if (!(ymax > 0.0)) fail(ErrorCode::precondition, "sweep data are all zero");

  const double line_fwhm = filter_line_fwhm(filter, opt.line);
  // Bandwidths from 1e-3 to 1e3 filter widths.
  const double log_dt_max = std::log(duration_from_bandwidth(1e-3 * line_fwhm));
  const double log_dt_min = std::log(duration_from_bandwidth(1e3 * line_fwhm));

  auto residuals = [&](const Params& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    const double dt = std::exp(p.log_dt);
    for (std::size_t i = 0; i < n; ++i)
      r[static_cast<Eigen::Index>(i)] =
          pts[i].normalized_coincidences - sweep_model(pts[i].detuning_ghz, dt, p.centre, p.scale, filter, opt.line);
    return r;
  };
  auto clamp = [&](Params p) {
    p.log_dt = std::clamp(p.log_dt, log_dt_min, log_dt_max);
    return p;
  };

  // Coarse start: best of a few bandwidth guesses around the filter width.
  Params p{0.0, pts[imax].detuning_ghz - filter.center_frequency, ymax};
  double best = std::numeric_limits<double>::infinity();
  for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    Params c = p;
    c.log_dt = std::log(duration_from_bandwidth(f * line_fwhm));
    const double rss = residuals(c).squaredNorm();
    if (rss < best) {
      best = rss;
      p.log_dt = c.log_dt;
    }
  }

  SpectralFit fit;
  Eigen::VectorXd r = residuals(p);
  double rss = r.squaredNorm();
  double mu = 1e-3;
  Eigen::MatrixXd J(static_cast<Eigen::Index>(n), 3);

  auto jacobian = [&](const Params& at) {
    const Eigen::Vector3d v = to_vec(at);
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(v[k]));
      Eigen::Vector3d a = v, b = v;
      a[k] += h;
      b[k] -= h;
      // Residual derivative is minus the model derivative.
      J.col(k) = (residuals(from_vec(a)) - residuals(from_vec(b))) / (2.0 * h);
    }
  };

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    jacobian(p);
    const Eigen::Matrix3d jtj = J.transpose() * J;
    const Eigen::Vector3d g = J.transpose() * r;
    bool accepted = false;
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    while (mu < 1e12) {
      Eigen::Matrix3d a = jtj;
      for (int k = 0; k < 3; ++k) a(k, k) += mu * std::max(jtj(k, k), 1e-30);
      step = -a.ldlt().solve(g);
      const Params trial = clamp(from_vec(to_vec(p) + step));
      const Eigen::VectorXd rt = residuals(trial);
      const double rss_t = rt.squaredNorm();
      if (std::isfinite(rss_t) && rss_t <= rss) {
        step = to_vec(trial) - to_vec(p);
        p = trial;
        r = rt;
        rss = rss_t;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (!accepted) {
      // No downhill step at any damping: stationary to working precision.
      fit.converged = true;
      break;
    }
    const double rel = step.norm() / std::max(to_vec(p).norm(), 1e-12);
    if (rel < opt.tolerance || rss <= 1e-28 * static_cast<double>(n)) {
      fit.converged = true;
      ++it;
      break;
    }
  }
  fit.iterations = it;

  jacobian(p);
  const Eigen::Matrix3d jtj = J.transpose() * J;
  const double s2 = rss / static_cast<double>(n > 3 ? n - 3 : 1);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
  if (lu.isInvertible()) cov = s2 * lu.inverse();

  fit.delta_t_ns = std::exp(p.log_dt);
  fit.delta_nu_ghz = bandwidth_from_duration(fit.delta_t_ns);
  const double sd_log = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.delta_t_err_ns = fit.delta_t_ns * sd_log;
  fit.delta_nu_err_ghz = fit.delta_nu_ghz * sd_log;
  fit.centre_ghz = p.centre;
  fit.centre_err_ghz = std::sqrt(std::max(cov(1, 1), 0.0));
  fit.scale = p.scale;
  fit.scale_err = std::sqrt(std::max(cov(2, 2), 0.0));
  fit.rss = rss;
  fit.residuals.assign(r.data(), r.data() + r.size());
  fit.resolution_bound_ghz = 0.1 * line_fwhm;
  fit.below_resolution = fit.delta_nu_ghz < fit.resolution_bound_ghz;
  return fit;
}

}  // namespace biphoton
