// Acceptance checks; prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "biphoton/counting.hpp"
#include "biphoton/joint_amplitude.hpp"
#include "biphoton/memory_interface.hpp"
#include "biphoton/schmidt.hpp"
#include "biphoton/spectral_fit.hpp"

namespace fs = std::filesystem;
using namespace biphoton;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

DesignPoint point(double t, double g) {
  DesignPoint p;
  p.t_hat = t;
  p.gamma_hat = g;
  return p;
}

JointAmplitude ungated(double gamma) {
  DesignPoint p = point(1e3, gamma);
  p.gates_enabled = false;
  return assemble_jta({1.0, 1e3, 0, 1.0}, {gamma, 0.0}, std::nullopt, design_grids(p));
}

const std::vector<std::pair<double, double>> kDesignPoints = {{11.0, 0.85}, {2.0, 0.9}, {2.0, 0.3},
                                                              {6.0, 0.5},   {10.0, 0.25}, {12.0, 0.2}};

// Shared by criteria 1 and 7.
EfficiencyMap g_map;
double g_sweep_seconds = 0.0;

Outcome design_space() {
  Outcome o;
  SweepRequest req;
  req.t_values = linspace(2.0, 12.0, 32);
  req.gamma_values = linspace(0.1, 2.0, 64);
  req.numerics.min_grid_points = 512;  // 512 x 512 amplitude grids
  const auto start = std::chrono::steady_clock::now();
  g_map = sweep_design_space(req);
  g_sweep_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  o.require(g_map.failures.empty(), "sweep cells failed");
  const double g2 = g_map.gamma_opt.front();
  o.require(std::abs(g2 - 0.9) <= 0.15, "gamma_opt(2) = 0.9 +- 0.15");
  double lo = 1e9, hi = -1e9;
  for (std::size_t r = 0; r < req.t_values.size(); ++r)
    if (req.t_values[r] >= 10.0) {
      lo = std::min(lo, g_map.gamma_opt[r]);
      hi = std::max(hi, g_map.gamma_opt[r]);
    }
  o.require(lo >= 0.15 && hi <= 0.35, "gamma_opt(t >= 10) in [0.15, 0.35]");
  const double step = req.gamma_values[1] - req.gamma_values[0];
  for (std::size_t r = 1; r < g_map.gamma_opt.size(); ++r)
    o.require(g_map.gamma_opt[r] <= g_map.gamma_opt[r - 1] + step, "gamma_opt non-increasing");
  o.require(g_sweep_seconds < 300.0, "runtime under 5 min");
  o.note("32x64 cells on 512^2 grids");
  o.note("gamma_opt(2) = " + fmt("%.3f", g2));
  o.note("gamma_opt(t>=10) in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]");
  o.note("runtime " + fmt("%.1f", g_sweep_seconds) + " s");
  return o;
}

Outcome experimental_point() {
  Outcome o;
  const double eta = read_in_efficiency(point(11.0, 0.85));
  o.require(eta >= 0.70 && eta <= 0.90, "eta_in(11, 0.85) in [0.70, 0.90]");
  o.note("eta_in = " + fmt("%.4f", eta));
  o.note("measured ratio 0.76 +- 0.1 " +
         std::string(std::abs(eta - 0.76) <= 0.1 ? "is consistent" : "differs by more than its error"));
  return o;
}

Outcome purity() {
  Outcome o;
  const double sigma = parameter_from_fwhm(FwhmKind::pump_intensity_bandwidth, 1.3);
  const double gamma = parameter_from_fwhm(FwhmKind::filter_amplitude_bandwidth, 1.4);
  const double p = purity_of(ungated(gamma * sigma));
  o.require(std::abs(p - 0.77) <= 0.03, "purity 0.77 +- 0.03");
  double worst = 0.0;
  for (int k = 0; k <= 27; ++k) {
    const double ratio = 0.3 + 0.1 * k;
    worst = std::max(worst, std::abs(purity_of(ungated(ratio)) - 1.0 / std::sqrt(1.0 + ratio * ratio)));
  }
  o.require(worst < 1e-3, "closed-form purity within 1e-3");
  o.note("purity = " + fmt("%.4f", p));
  o.note("max closed-form deviation " + fmt("%.2e", worst));
  return o;
}

Outcome marginal() {
  Outcome o;
  const MarginalSpectrum m = marginal_signal_spectrum(1.3, 1.4, Grid1D{4001, -10.0, 10.0});
  const double closed = marginal_fwhm_closed_form(1.3, 1.4);
  o.require(m.fwhm >= 1.56 && m.fwhm <= 1.68, "FWHM in [1.56, 1.68] GHz");
  o.require(std::abs(m.fwhm / closed - 1.0) < 1e-3, "numeric vs closed form within 1e-3");
  o.note("FWHM = " + fmt("%.4f", m.fwhm) + " GHz");
  o.note("closed form " + fmt("%.4f", closed) + " GHz");
  return o;
}

Outcome counting() {
  Outcome o;
  CountRecord r;
  r.c_T = 1e4;
  r.c_H_given_T = 62.5;
  r.c_V_given_T = 62.5;
  r.integration_time_s = 3600.0;
  OpticalPath path{0.10, 0.01, 0.50, 0.0};
  const Measurement eta = heralding_efficiency(r, path);
  o.require(std::abs(eta.value - 0.25) < 1e-12, "eta_her = 0.25");
  o.require(std::abs(std::round(eta.error * 100) / 100 - 0.03) < 1e-12, "eta_her error rounds to 0.03");

  CountRecord g;
  g.c_T = 1e6;
  g.c_H_given_T = 1e3;
  g.c_V_given_T = 1e3;
  o.require(heralded_g2(g).value == 0.0, "g2 = 0 without triples");
  g.c_HV_given_T = 1.0;
  o.require(std::abs(heralded_g2(g).value - 1.0) < 1e-12, "g2 = 1 for factorising triples");
  const double base = heralded_g2(g).value;
  for (double k : {1e-3, 17.0, 1e4}) {
    CountRecord s = g;
    s.c_T *= k;
    s.c_H_given_T *= k;
    s.c_V_given_T *= k;
    s.c_HV_given_T *= k;
    o.require(std::abs(heralded_g2(s).value - base) < 1e-12, "g2 scale invariance");
  }
  o.note("eta_her = " + fmt("%.3f", eta.value) + " +- " + fmt("%.3f", eta.error));
  return o;
}

std::vector<SweepPoint> synthetic(double dnu, double noise, unsigned seed) {
  const double w = std::hypot(dnu, 1.1 / std::sqrt(2.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<SweepPoint> pts;
  for (int k = 0; k <= 40; ++k) {
    const double x = -2.5 * w + k * 5.0 * w / 40.0;
    double y = std::exp(-4.0 * std::numbers::ln2 * x * x / (w * w));
    if (noise > 0) y *= 1.0 + noise * n01(rng);
    pts.push_back({x, std::max(0.0, y)});
  }
  return pts;
}

Outcome spectral_fit() {
  Outcome o;
  const GaussianFilterSpec filter{parameter_from_fwhm(FwhmKind::filter_amplitude_bandwidth, 1.1), 0.0};
  double clean = 0.0, noisy = 0.0;
  for (double dnu : {0.8, 1.78, 3.0}) {
    clean = std::max(clean, std::abs(fit_hsp_bandwidth(synthetic(dnu, 0.0, 0), filter).delta_nu_ghz / dnu - 1.0));
    noisy = std::max(noisy, std::abs(fit_hsp_bandwidth(synthetic(dnu, 0.02, 2024), filter).delta_nu_ghz / dnu - 1.0));
  }
  o.require(clean < 0.01, "noiseless within 1%");
  o.require(noisy < 0.05, "2% noise within 5%");
  o.note("worst noiseless error " + fmt("%.2e", clean));
  o.note("worst noisy error " + fmt("%.2e", noisy));
  return o;
}

Outcome hygiene() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n01;
  double parseval = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    JointAmplitude f;
    f.idler_axis = Grid1D{48 + 7 * static_cast<std::size_t>(trial), 0.0, 3.0};
    f.signal_axis = Grid1D{64, -2.0, 2.0};
    f.values.resize(static_cast<Eigen::Index>(f.idler_axis.n_points), 64);
    for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = {n01(rng), n01(rng)};
    parseval = std::max(parseval, std::abs(to_frequency_domain(f).norm_squared() / f.norm_squared() - 1.0));
  }
  o.require(parseval <= 1e-9, "Parseval within 1e-9");

  double lambda_sum = 0.0, m_conv = 0.0, grid_conv = 0.0;
  for (auto [t, g] : kDesignPoints) {
    PulseTrainSpec train{1.0, t, 3, 1.0};
    const JointAmplitude f = assemble_jta(train, {g, 0.0}, gate_for(train), design_grids(point(t, g)));
    double s = 0.0;
    for (double l : schmidt_spectrum(f).lambdas) s += l * l;
    lambda_sum = std::max(lambda_sum, std::abs(s - 1.0));

    DesignPoint m4 = point(t, g), fine = point(t, g);
    m4.numerics.side_pulses = 4;
    fine.numerics.samples_per_scale = 32.0;
    fine.numerics.max_grid_points = 4096;
    const double base = read_in_efficiency(point(t, g));
    m_conv = std::max(m_conv, std::abs(read_in_efficiency(m4) - base));
    grid_conv = std::max(grid_conv, std::abs(read_in_efficiency(fine) - base));
  }
  o.require(lambda_sum <= 1e-9, "sum lambda^2 = 1 within 1e-9");
  o.require(m_conv < 1e-6, "M-convergence below 1e-6");
  o.require(grid_conv < 1e-3, "grid doubling below 1e-3");

  double lo = 1.0, hi = 0.0;
  for (Eigen::Index i = 0; i < g_map.eta_in.size(); ++i) {
    lo = std::min(lo, g_map.eta_in.data()[i]);
    hi = std::max(hi, g_map.eta_in.data()[i]);
  }
  o.require(g_map.eta_in.size() > 0 && lo >= 0.0 && hi <= 1.0 + 1e-6, "eta_in within [0, 1 + 1e-6]");
  o.note("Parseval " + fmt("%.1e", parseval));
  o.note("lambda sum " + fmt("%.1e", lambda_sum));
  o.note("M step " + fmt("%.1e", m_conv));
  o.note("grid doubling " + fmt("%.1e", grid_conv));
  o.note("eta_in range [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "biphoton_acceptance";
  fs::create_directories(dir);
  std::vector<std::string> csvs;
  for (int run = 0; run < 2; ++run) {
    const fs::path csv = dir / ("sweep_" + std::to_string(run) + ".csv");
    const fs::path json = dir / ("sweep_" + std::to_string(run) + ".json");
    fs::remove(csv);
    const std::string cmd = "BIPHOTON_THREADS=" + std::to_string(run + 1) + " \"" + cli +
                            "\" sweep --t-min 2 --t-max 12 --t-count 32 --gamma-min 0.1 --gamma-max 2 "
                            "--gamma-count 64 --csv \"" + csv.string() + "\" --summary \"" + json.string() + "\"";
    const int rc = std::system(cmd.c_str());
    o.require(rc == 0, "sweep run " + std::to_string(run + 1) + " exited cleanly");
    csvs.push_back(slurp(csv));
  }
  o.require(!csvs[0].empty() && csvs[0] == csvs[1], "byte-identical CSV");
  o.note("two CLI sweeps (1 and 2 threads), " + std::to_string(csvs[0].size()) + " bytes each");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "biphoton";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"design-space landmarks", design_space},
      {"experimental design point", experimental_point},
      {"purity", purity},
      {"marginal bandwidth", marginal},
      {"counting formulas", counting},
      {"spectral-fit round trip", spectral_fit},
      {"numerical hygiene", hygiene},
      {"determinism", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
