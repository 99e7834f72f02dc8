#include "biphoton/memory_interface.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "json.hpp"

#include "biphoton/error.hpp"
#include "biphoton/format.hpp"
#include "biphoton/schmidt.hpp"

namespace biphoton {

namespace {

// Gaussian envelopes are treated as zero beyond this many widths (e^-36).
constexpr double kReach = 6.0;
constexpr std::size_t kLambdaHead = 8;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

struct Window {
  double lo;
  double hi;
};

std::size_t points_for(double length, double max_step, const NumericControls& nc) {
  const double needed = std::ceil(length / max_step - 1e-9);
  if (!(needed <= static_cast<double>(nc.max_grid_points)))
    fail(ErrorCode::parameter, "design point needs " + std::to_string(static_cast<long long>(needed)) +
                                   " grid points per axis, above max_grid_points");
  return std::max<std::size_t>(nc.min_grid_points, static_cast<std::size_t>(needed));
}

PulseTrainSpec train_for(const DesignPoint& p) {
  PulseTrainSpec train;
  train.sigma_p = 1.0;
  train.period = p.t_hat;
  train.side_pulses = p.gates_enabled ? p.numerics.side_pulses : 0;
  return train;
}

GaussianFilterSpec filter_for(const DesignPoint& p) { return GaussianFilterSpec{p.gamma_hat, 0.0}; }

// Signal-axis window of the (ungated) single-pulse amplitude on a grid that
// extends `gated` by whole steps, so the gated samples are a subset.
struct ExtendedSignalGrid {
  Grid1D grid;
  std::size_t offset = 0;  // index of gated sample 0 in the extended grid
};

ExtendedSignalGrid extend_signal_grid(const Grid1D& gated, double lo, double hi) {
  const double h = gated.step();
  const auto before = static_cast<std::size_t>(std::max(0.0, std::ceil((gated.lo - lo) / h)));
  const auto after = static_cast<std::size_t>(std::max(0.0, std::ceil((hi - gated.hi) / h)));
  ExtendedSignalGrid e;
  e.offset = before;
  e.grid.n_points = gated.n_points + before + after;
  e.grid.lo = gated.lo - static_cast<double>(before) * h;
  e.grid.hi = gated.hi + static_cast<double>(after) * h;
  return e;
}

}  // namespace

const char* to_string(KernelSource k) noexcept {
  return k == KernelSource::gated_self ? "gated_self" : "ungated";
}

void NumericControls::validate() const {
  if (side_pulses < 0) fail(ErrorCode::parameter, "side_pulses must be >= 0");
  if (!positive_finite(samples_per_scale) || samples_per_scale < 16.0)
    fail(ErrorCode::parameter, "samples_per_scale must be >= 16");
  if (min_grid_points < 2) fail(ErrorCode::parameter, "min_grid_points must be >= 2");
  if (max_grid_points < min_grid_points)
    fail(ErrorCode::parameter, "max_grid_points must be >= min_grid_points");
}

void DesignPoint::validate() const {
  if (!positive_finite(t_hat)) fail(ErrorCode::parameter, "t_hat must be > 0");
  if (!positive_finite(gamma_hat)) fail(ErrorCode::parameter, "gamma_hat must be > 0");
  numerics.validate();
}

JtaGrids design_grids(const DesignPoint& p) {
  p.validate();
  const double T = p.t_hat;
  const double g = p.gamma_hat;
  const double idler_reach = kReach / g;

  Window sig{-kReach, kReach};
  if (p.gates_enabled) {
    // Pulses j whose envelope reaches into the central time bin.
    const int m = p.numerics.side_pulses;
    int j_max = 0;
    while (j_max < m && (j_max + 1) * T - kReach < 0.5 * T) ++j_max;
    sig = {std::max(-0.5 * T, -j_max * T - kReach), std::min(0.5 * T, j_max * T + kReach)};
  }
  Window idl{sig.lo - idler_reach, sig.hi + idler_reach};
  if (p.gates_enabled) idl = {std::max(-0.5 * T, idl.lo), std::min(0.5 * T, idl.hi)};

  const double signal_scale = std::min(1.0, 1.0 / g);
  const double idler_scale = 1.0 / g;
  const std::size_t ns = points_for(sig.hi - sig.lo, signal_scale / p.numerics.samples_per_scale, p.numerics);
  const std::size_t ni = points_for(idl.hi - idl.lo, idler_scale / p.numerics.samples_per_scale, p.numerics);

  JtaGrids grids;
  grids.signal = Grid1D::cell_centred(sig.lo, (sig.hi - sig.lo) / static_cast<double>(ns), ns);
  grids.idler = Grid1D::cell_centred(idl.lo, (idl.hi - idl.lo) / static_cast<double>(ni), ni);
  return grids;
}

EfficiencyResult evaluate_design_point(const DesignPoint& p) {
  const JtaGrids grids = design_grids(p);
  const PulseTrainSpec train = train_for(p);
  const GaussianFilterSpec filter = filter_for(p);

  std::optional<TimeGateSpec> gate;
  if (p.gates_enabled) gate = gate_for(train);
  const JointAmplitude jta = assemble_jta(train, filter, gate, grids);

  EfficiencyResult out;
  out.idler_points = grids.idler.n_points;
  out.signal_points = grids.signal.n_points;
  out.reference_norm = single_pulse_norm_squared(train, filter);
  if (!(out.reference_norm > 0.0)) fail(ErrorCode::zero_norm, "reference amplitude has zero norm");

  if (p.kernel == KernelSource::gated_self) {
    const SchmidtResult s = schmidt_spectrum(jta);
    out.leading_weight = s.leading_weight();
    out.purity = s.purity;
    out.kernel_tie = s.leading_tie;
    out.lambda_head.assign(s.lambdas.begin(),
                           s.lambdas.begin() + static_cast<std::ptrdiff_t>(std::min(kLambdaHead, s.lambdas.size())));
    out.gating_loss = s.norm_squared / out.reference_norm;
    out.eta_in = out.leading_weight / out.reference_norm;
    return out;
  }

  // Kernel fixed by the ungated single-pulse amplitude, evaluated on the
  // gated state.
  const SchmidtResult gated = schmidt_spectrum(jta);
  out.purity = gated.purity;
  out.lambda_head.assign(gated.lambdas.begin(),
                         gated.lambdas.begin() + static_cast<std::ptrdiff_t>(std::min(kLambdaHead, gated.lambdas.size())));
  out.gating_loss = gated.norm_squared / out.reference_norm;

  PulseTrainSpec single = train;
  single.side_pulses = 0;
  const ExtendedSignalGrid ext = extend_signal_grid(grids.signal, -kReach, kReach);
  JtaGrids free_grids;
  free_grids.signal = ext.grid;
  const double idler_reach = kReach / p.gamma_hat;
  const double hi = grids.idler.step();
  const auto ni = static_cast<std::size_t>(
      std::ceil((ext.grid.hi - ext.grid.lo + 2.0 * idler_reach) / hi));
  free_grids.idler = Grid1D::cell_centred(ext.grid.lo - idler_reach, hi, std::max<std::size_t>(ni, 2));
  const SchmidtResult free = schmidt_decompose(assemble_jta(single, filter, std::nullopt, free_grids), 2);
  MemoryKernel kernel = fundamental_kernel(free);
  out.kernel_tie = kernel.tie;

  MemoryKernel restricted;
  restricted.axis = grids.signal;
  restricted.values = kernel.values.segment(static_cast<Eigen::Index>(ext.offset),
                                            static_cast<Eigen::Index>(grids.signal.n_points));
  out.leading_weight = kernel_overlap(restricted, signal_density_matrix(jta));
  out.eta_in = out.leading_weight / out.reference_norm;
  return out;
}

double total_memory_efficiency(double eta_in, double eta_ret) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(eta_in) || !unit(eta_ret)) fail(ErrorCode::parameter, "efficiencies must lie in [0, 1]");
  return eta_in * eta_ret;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) fail(ErrorCode::parameter, "linspace needs n >= 1");
  if (n == 1) return {lo};
  std::vector<double> v(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * h;
  v.back() = hi;
  return v;
}

PeakEstimate refine_peak(const std::vector<double>& x, const Eigen::VectorXd& y, std::size_t k) {
  PeakEstimate est{x[k], y[static_cast<Eigen::Index>(k)], false};
  if (k == 0 || k + 1 >= x.size()) return est;
  const auto kk = static_cast<Eigen::Index>(k);
  const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
  const double y0 = y[kk - 1], y1 = y[kk], y2 = y[kk + 1];
  if (!std::isfinite(y0) || !std::isfinite(y2)) return est;
  // Newton divided differences.
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (!(a < 0.0)) return est;
  const double b = d01 - a * (x0 + x1);
  double xv = -b / (2.0 * a);
  xv = std::clamp(xv, x0, x2);
  est.x = xv;
  est.y = y0 + d01 * (xv - x0) + a * (xv - x0) * (xv - x1);
  est.refined = true;
  return est;
}

EfficiencyMap sweep_design_space(const SweepRequest& req) {
  if (req.t_values.empty() || req.gamma_values.empty())
    fail(ErrorCode::parameter, "sweep needs at least one t and one gamma value");
  auto check_axis = [](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!positive_finite(v[i])) fail(ErrorCode::parameter, std::string(name) + " values must be > 0");
      if (i > 0 && !(v[i] > v[i - 1]))
        fail(ErrorCode::parameter, std::string(name) + " values must be strictly increasing");
    }
  };
  check_axis(req.t_values, "t_hat");
  check_axis(req.gamma_values, "gamma_hat");
  req.numerics.validate();

  EfficiencyMap map;
  map.t_values = req.t_values;
  map.gamma_values = req.gamma_values;
  map.numerics = req.numerics;
  map.kernel = req.kernel;
  const std::size_t nt = req.t_values.size();
  const std::size_t ng = req.gamma_values.size();
  const std::size_t cells = nt * ng;
  map.eta_in = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(ng),
                                         std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(cells);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      const std::size_t ti = c / ng, gi = c % ng;
      DesignPoint p;
      p.t_hat = req.t_values[ti];
      p.gamma_hat = req.gamma_values[gi];
      p.kernel = req.kernel;
      p.numerics = req.numerics;
      try {
        map.eta_in(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(gi)) = read_in_efficiency(p);
      } catch (const std::exception& e) {
        errors[c] = e.what();
        if (errors[c].empty()) errors[c] = "unknown failure";
      }
    }
  };

  unsigned threads = req.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : req.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t c = 0; c < cells; ++c)
    if (!errors[c].empty())
      map.failures.push_back({c / ng, c % ng, req.t_values[c / ng], req.gamma_values[c % ng], errors[c]});

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t ti = 0; ti < nt; ++ti) {
    const Eigen::VectorXd row = map.eta_in.row(static_cast<Eigen::Index>(ti)).transpose();
    std::size_t best = ng;
    for (std::size_t gi = 0; gi < ng; ++gi) {
      const double v = row[static_cast<Eigen::Index>(gi)];
      if (std::isfinite(v) && (best == ng || v > row[static_cast<Eigen::Index>(best)])) best = gi;
    }
    if (best == ng) {
      map.argmax.push_back(ng);
      map.gamma_opt.push_back(nan);
      map.eta_opt.push_back(nan);
      continue;
    }
    const PeakEstimate pk = refine_peak(req.gamma_values, row, best);
    map.argmax.push_back(best);
    map.gamma_opt.push_back(pk.x);
    map.eta_opt.push_back(pk.y);
  }
  return map;
}

void write_csv(std::ostream& os, const EfficiencyMap& map) {
  os << "t_hat,gamma_hat,eta_in\n";
  for (std::size_t ti = 0; ti < map.t_values.size(); ++ti)
    for (std::size_t gi = 0; gi < map.gamma_values.size(); ++gi)
      os << format_number(map.t_values[ti]) << ',' << format_number(map.gamma_values[gi]) << ','
         << format_number(map.eta_in(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(gi))) << '\n';
}

std::string summary_json(const EfficiencyMap& map) {
  using nlohmann::json;
  auto num = [](double v) -> json {
    if (!std::isfinite(v)) return nullptr;
    return round_to_output_precision(v);
  };
  json curve = json::array();
  for (std::size_t ti = 0; ti < map.t_values.size(); ++ti) {
    json row;
    row["t_hat"] = num(map.t_values[ti]);
    row["gamma_opt"] = num(map.gamma_opt[ti]);
    row["eta_opt"] = num(map.eta_opt[ti]);
    row["gamma_argmax"] =
        map.argmax[ti] < map.gamma_values.size() ? num(map.gamma_values[map.argmax[ti]]) : json(nullptr);
    curve.push_back(row);
  }
  json failures = json::array();
  for (const auto& f : map.failures)
    failures.push_back({{"t_hat", num(f.t_hat)}, {"gamma_hat", num(f.gamma_hat)}, {"message", f.message}});

  json j;
  j["gamma_opt_curve"] = curve;
  j["failures"] = failures;
  j["numerics"] = {{"side_pulses", map.numerics.side_pulses},
                   {"samples_per_scale", num(map.numerics.samples_per_scale)},
                   {"min_grid_points", map.numerics.min_grid_points},
                   {"max_grid_points", map.numerics.max_grid_points},
                   {"kernel", to_string(map.kernel)},
                   {"t_points", map.t_values.size()},
                   {"gamma_points", map.gamma_values.size()}};
  return j.dump(2);
}

}  // namespace biphoton
