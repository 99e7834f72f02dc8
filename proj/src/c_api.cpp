#include "biphoton/biphoton.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>

#include "biphoton/counting.hpp"
#include "biphoton/error.hpp"
#include "biphoton/joint_amplitude.hpp"
#include "biphoton/memory_interface.hpp"
#include "biphoton/schmidt.hpp"
#include "biphoton/signal_model.hpp"
#include "biphoton/spectral_fit.hpp"

struct bp_joint_amplitude {
  biphoton::JointAmplitude value;
};
struct bp_spectrum {
  biphoton::MarginalSpectrum value;
};
struct bp_schmidt {
  biphoton::SchmidtResult value;
};
struct bp_efficiency_map {
  biphoton::EfficiencyMap value;
};
struct bp_counts_table {
  biphoton::CountsTable value;
};
struct bp_sweep_points {
  biphoton::SweepTable value;
};

namespace {

using namespace biphoton;

thread_local std::string g_last_error;

bp_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::parameter: return BP_ERR_PARAMETER;
    case ErrorCode::domain_mismatch: return BP_ERR_DOMAIN_MISMATCH;
    case ErrorCode::zero_norm: return BP_ERR_ZERO_NORM;
    case ErrorCode::numerical: return BP_ERR_NUMERICAL;
    case ErrorCode::not_converged: return BP_ERR_NOT_CONVERGED;
    case ErrorCode::undefined: return BP_ERR_UNDEFINED;
    case ErrorCode::precondition: return BP_ERR_PRECONDITION;
    case ErrorCode::io: return BP_ERR_IO;
    case ErrorCode::parse: return BP_ERR_PARSE;
  }
  return BP_ERR_INTERNAL;
}

bp_status set_error(bp_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <typename F>
bp_status guarded(F&& f) noexcept {
  try {
    g_last_error.clear();
    return f();
  } catch (const Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(BP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(BP_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(BP_ERR_INTERNAL, "unknown exception");
  }
}

#define BP_REQUIRE(cond)                                                          \
  do {                                                                            \
    if (!(cond)) return set_error(BP_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

Grid1D grid_of(const bp_grid& g) { return Grid1D{g.n_points, g.lo, g.hi}; }
bp_grid grid_out(const Grid1D& g) { return bp_grid{g.n_points, g.lo, g.hi}; }

PulseTrainSpec train_of(const bp_pulse_train& t) { return {t.sigma_p, t.period, t.side_pulses, t.amplitude}; }
GaussianFilterSpec filter_of(const bp_filter& f) { return {f.gamma, f.center_frequency}; }

bool fwhm_kind(bp_fwhm_kind k, FwhmKind& out) {
  switch (k) {
    case BP_FWHM_PUMP_INTENSITY_BANDWIDTH: out = FwhmKind::pump_intensity_bandwidth; return true;
    case BP_FWHM_FILTER_AMPLITUDE_BANDWIDTH: out = FwhmKind::filter_amplitude_bandwidth; return true;
    case BP_FWHM_DURATION: out = FwhmKind::duration; return true;
  }
  return false;
}

NumericControls numerics_of(const bp_numerics& n) {
  NumericControls c;
  c.side_pulses = n.side_pulses;
  c.samples_per_scale = n.samples_per_scale;
  c.min_grid_points = n.min_grid_points;
  c.max_grid_points = n.max_grid_points;
  return c;
}

bool kernel_of(bp_kernel_source k, KernelSource& out) {
  if (k == BP_KERNEL_GATED_SELF) out = KernelSource::gated_self;
  else if (k == BP_KERNEL_UNGATED) out = KernelSource::ungated;
  else return false;
  return true;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename Writer>
void write_file(const char* path, Writer&& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, std::string("cannot open '") + path + "' for writing");
  w(out);
  out.flush();
  if (!out) fail(ErrorCode::io, std::string("write to '") + path + "' failed");
}

CountRecord record_of(const bp_count_record& r) {
  CountRecord c;
  c.pump_power_mw = r.pump_power_mw;
  c.c_T = r.c_T;
  c.c_H = r.c_H;
  c.c_V = r.c_V;
  c.c_H_given_T = r.c_H_given_T;
  c.c_V_given_T = r.c_V_given_T;
  c.c_HV_given_T = r.c_HV_given_T;
  c.acc_s_given_T = r.acc_s_given_T;
  c.integration_time_s = r.integration_time_s;
  return c;
}

bp_count_record record_out(const CountRecord& c) {
  return bp_count_record{c.pump_power_mw, c.c_T, c.c_H, c.c_V, c.c_H_given_T,
                         c.c_V_given_T, c.c_HV_given_T, c.acc_s_given_T, c.integration_time_s};
}

}  // namespace

extern "C" {

const char* bp_version(void) { return "0.3.0"; }

const char* bp_status_string(bp_status s) {
  switch (s) {
    case BP_OK: return "ok";
    case BP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BP_ERR_PARAMETER: return "parameter error";
    case BP_ERR_DOMAIN_MISMATCH: return "domain mismatch";
    case BP_ERR_ZERO_NORM: return "zero norm";
    case BP_ERR_NUMERICAL: return "numerical failure";
    case BP_ERR_NOT_CONVERGED: return "not converged";
    case BP_ERR_UNDEFINED: return "undefined";
    case BP_ERR_PRECONDITION: return "precondition violated";
    case BP_ERR_IO: return "i/o error";
    case BP_ERR_PARSE: return "parse error";
    case BP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bp_last_error(void) { return g_last_error.c_str(); }

void bp_string_free(char* s) { std::free(s); }

bp_status bp_parameter_from_fwhm(bp_fwhm_kind kind, double fwhm, double* out) {
  return guarded([&] {
    FwhmKind k;
    BP_REQUIRE(out && fwhm_kind(kind, k));
    *out = parameter_from_fwhm(k, fwhm);
    return BP_OK;
  });
}

bp_status bp_fwhm_from_parameter(bp_fwhm_kind kind, double parameter, double* out) {
  return guarded([&] {
    FwhmKind k;
    BP_REQUIRE(out && fwhm_kind(kind, k));
    *out = fwhm_from_parameter(k, parameter);
    return BP_OK;
  });
}

bp_status bp_sample_pump_train(const bp_pulse_train* train, const bp_grid* grid, double* out,
                               int* window_truncated) {
  return guarded([&] {
    BP_REQUIRE(train && grid && out);
    const auto s = sample_pump_train(train_of(*train), grid_of(*grid));
    std::copy(s.values.begin(), s.values.end(), out);
    if (window_truncated) *window_truncated = s.window_truncated ? 1 : 0;
    return BP_OK;
  });
}

bp_status bp_sample_filter_time(const bp_filter* filter, const bp_grid* grid, double* out) {
  return guarded([&] {
    BP_REQUIRE(filter && grid && out);
    const auto v = sample_filter_time(filter_of(*filter), grid_of(*grid));
    std::copy(v.begin(), v.end(), out);
    return BP_OK;
  });
}

bp_status bp_sample_gate(const bp_gate* gate, const bp_grid* grid, double* out) {
  return guarded([&] {
    BP_REQUIRE(gate && grid && out);
    const auto v = sample_gate(TimeGateSpec{gate->width, gate->center}, grid_of(*grid));
    std::copy(v.begin(), v.end(), out);
    return BP_OK;
  });
}

bp_status bp_jta_assemble(const bp_pulse_train* train, const bp_filter* filter, const bp_gate* gate,
                          const bp_grid* idler_grid, const bp_grid* signal_grid, bp_joint_amplitude** out) {
  return guarded([&] {
    BP_REQUIRE(train && filter && idler_grid && signal_grid && out);
    std::optional<TimeGateSpec> g;
    if (gate) g = TimeGateSpec{gate->width, gate->center};
    auto jta = assemble_jta(train_of(*train), filter_of(*filter), g,
                            JtaGrids{grid_of(*idler_grid), grid_of(*signal_grid)});
    *out = new bp_joint_amplitude{std::move(jta)};
    return BP_OK;
  });
}

bp_status bp_jta_to_frequency(const bp_joint_amplitude* jta, bp_joint_amplitude** out) {
  return guarded([&] {
    BP_REQUIRE(jta && out);
    *out = new bp_joint_amplitude{to_frequency_domain(jta->value)};
    return BP_OK;
  });
}

void bp_jta_free(bp_joint_amplitude* jta) { delete jta; }

bp_status bp_jta_info(const bp_joint_amplitude* jta, bp_domain* domain, bp_grid* idler_axis, bp_grid* signal_axis) {
  return guarded([&] {
    BP_REQUIRE(jta);
    if (domain) *domain = jta->value.domain == Domain::time ? BP_DOMAIN_TIME : BP_DOMAIN_FREQUENCY;
    if (idler_axis) *idler_axis = grid_out(jta->value.idler_axis);
    if (signal_axis) *signal_axis = grid_out(jta->value.signal_axis);
    return BP_OK;
  });
}

bp_status bp_jta_norm_squared(const bp_joint_amplitude* jta, double* out) {
  return guarded([&] {
    BP_REQUIRE(jta && out);
    *out = jta->value.norm_squared();
    return BP_OK;
  });
}

bp_status bp_jta_values(const bp_joint_amplitude* jta, double* re, double* im, size_t capacity) {
  return guarded([&] {
    BP_REQUIRE(jta && re && im);
    const auto& m = jta->value.values;
    BP_REQUIRE(capacity >= static_cast<size_t>(m.size()));
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index s = 0; s < m.cols(); ++s, ++k) {
        re[k] = m(i, s).real();
        im[k] = m(i, s).imag();
      }
    return BP_OK;
  });
}

bp_status bp_jta_gating_loss(const bp_joint_amplitude* gated, const bp_joint_amplitude* reference, double* out) {
  return guarded([&] {
    BP_REQUIRE(gated && reference && out);
    *out = gating_loss(gated->value, reference->value);
    return BP_OK;
  });
}

bp_status bp_jta_write_csv(const bp_joint_amplitude* jta, const char* path) {
  return guarded([&] {
    BP_REQUIRE(jta && path);
    write_file(path, [&](std::ostream& os) { write_csv(os, jta->value); });
    return BP_OK;
  });
}

bp_status bp_marginal_spectrum(double pump_fwhm, double filter_fwhm, double filter_center, const bp_grid* grid,
                               bp_spectrum** out) {
  return guarded([&] {
    BP_REQUIRE(grid && out);
    *out = new bp_spectrum{marginal_signal_spectrum(pump_fwhm, filter_fwhm, grid_of(*grid), filter_center)};
    return BP_OK;
  });
}

bp_status bp_marginal_fwhm_closed_form(double pump_fwhm, double filter_fwhm, double* out) {
  return guarded([&] {
    BP_REQUIRE(out);
    *out = marginal_fwhm_closed_form(pump_fwhm, filter_fwhm);
    return BP_OK;
  });
}

void bp_spectrum_free(bp_spectrum* s) { delete s; }

bp_status bp_spectrum_fwhm(const bp_spectrum* s, double* out) {
  return guarded([&] {
    BP_REQUIRE(s && out);
    *out = s->value.fwhm;
    return BP_OK;
  });
}

bp_status bp_spectrum_write_csv(const bp_spectrum* s, const char* path) {
  return guarded([&] {
    BP_REQUIRE(s && path);
    write_file(path, [&](std::ostream& os) { write_csv(os, s->value); });
    return BP_OK;
  });
}

bp_status bp_schmidt_decompose(const bp_joint_amplitude* jta, size_t k_max, bp_schmidt** out) {
  return guarded([&] {
    BP_REQUIRE(jta && out);
    *out = new bp_schmidt{schmidt_decompose(jta->value, k_max)};
    return BP_OK;
  });
}

void bp_schmidt_free(bp_schmidt* s) { delete s; }

bp_status bp_schmidt_purity(const bp_schmidt* s, double* purity, double* schmidt_number) {
  return guarded([&] {
    BP_REQUIRE(s);
    if (purity) *purity = s->value.purity;
    if (schmidt_number) *schmidt_number = s->value.schmidt_number;
    return BP_OK;
  });
}

bp_status bp_schmidt_lambdas(const bp_schmidt* s, double* out, size_t capacity, size_t* count) {
  return guarded([&] {
    BP_REQUIRE(s);
    const auto& l = s->value.lambdas;
    if (count) *count = l.size();
    if (out) std::copy_n(l.begin(), std::min(capacity, l.size()), out);
    return BP_OK;
  });
}

bp_status bp_schmidt_kernel(const bp_schmidt* s, double* re, double* im, size_t capacity, int* tie) {
  return guarded([&] {
    BP_REQUIRE(s && re && im);
    const MemoryKernel k = fundamental_kernel(s->value);
    BP_REQUIRE(capacity >= static_cast<size_t>(k.values.size()));
    for (Eigen::Index i = 0; i < k.values.size(); ++i) {
      re[i] = k.values[i].real();
      im[i] = k.values[i].imag();
    }
    if (tie) *tie = k.tie ? 1 : 0;
    return BP_OK;
  });
}

bp_status bp_schmidt_to_json(const bp_schmidt* s, char** json) {
  return guarded([&] {
    BP_REQUIRE(s && json);
    *json = dup_string(to_json(s->value));
    return BP_OK;
  });
}

bp_status bp_schmidt_write_modes_csv(const bp_schmidt* s, const char* path) {
  return guarded([&] {
    BP_REQUIRE(s && path);
    write_file(path, [&](std::ostream& os) { write_modes_csv(os, s->value); });
    return BP_OK;
  });
}

void bp_numerics_init(bp_numerics* n) {
  if (!n) return;
  const NumericControls d;
  n->side_pulses = d.side_pulses;
  n->samples_per_scale = d.samples_per_scale;
  n->min_grid_points = d.min_grid_points;
  n->max_grid_points = d.max_grid_points;
}

void bp_design_point_init(bp_design_point* p) {
  if (!p) return;
  const DesignPoint d;
  p->t_hat = d.t_hat;
  p->gamma_hat = d.gamma_hat;
  p->gates_enabled = 1;
  p->kernel = BP_KERNEL_GATED_SELF;
  bp_numerics_init(&p->numerics);
}

bp_status bp_read_in_efficiency(const bp_design_point* p, bp_efficiency* out) {
  return guarded([&] {
    BP_REQUIRE(p && out);
    DesignPoint d;
    d.t_hat = p->t_hat;
    d.gamma_hat = p->gamma_hat;
    d.gates_enabled = p->gates_enabled != 0;
    BP_REQUIRE(kernel_of(p->kernel, d.kernel));
    d.numerics = numerics_of(p->numerics);
    const EfficiencyResult r = evaluate_design_point(d);
    *out = bp_efficiency{};
    out->eta_in = r.eta_in;
    out->purity = r.purity;
    out->gating_loss = r.gating_loss;
    out->reference_norm = r.reference_norm;
    out->leading_weight = r.leading_weight;
    out->n_lambda = std::min<size_t>(BP_LAMBDA_HEAD, r.lambda_head.size());
    std::copy_n(r.lambda_head.begin(), out->n_lambda, out->lambda_head);
    out->idler_points = r.idler_points;
    out->signal_points = r.signal_points;
    out->kernel_tie = r.kernel_tie ? 1 : 0;
    return BP_OK;
  });
}

bp_status bp_total_memory_efficiency(double eta_in, double eta_ret, double* out) {
  return guarded([&] {
    BP_REQUIRE(out);
    *out = total_memory_efficiency(eta_in, eta_ret);
    return BP_OK;
  });
}

bp_status bp_linspace(double lo, double hi, size_t n, double* out) {
  return guarded([&] {
    BP_REQUIRE(out);
    const auto v = linspace(lo, hi, n);
    std::copy(v.begin(), v.end(), out);
    return BP_OK;
  });
}

bp_status bp_sweep(const bp_sweep_request* req, bp_efficiency_map** out) {
  return guarded([&] {
    BP_REQUIRE(req && out && req->t_values && req->gamma_values);
    SweepRequest r;
    r.t_values.assign(req->t_values, req->t_values + req->n_t);
    r.gamma_values.assign(req->gamma_values, req->gamma_values + req->n_gamma);
    r.numerics = numerics_of(req->numerics);
    BP_REQUIRE(kernel_of(req->kernel, r.kernel));
    r.threads = req->threads;
    *out = new bp_efficiency_map{sweep_design_space(r)};
    return BP_OK;
  });
}

void bp_efficiency_map_free(bp_efficiency_map* m) { delete m; }

bp_status bp_efficiency_map_shape(const bp_efficiency_map* m, size_t* n_t, size_t* n_gamma, size_t* n_failures) {
  return guarded([&] {
    BP_REQUIRE(m);
    if (n_t) *n_t = m->value.t_values.size();
    if (n_gamma) *n_gamma = m->value.gamma_values.size();
    if (n_failures) *n_failures = m->value.failures.size();
    return BP_OK;
  });
}

bp_status bp_efficiency_map_eta(const bp_efficiency_map* m, size_t ti, size_t gi, double* out) {
  return guarded([&] {
    BP_REQUIRE(m && out && ti < m->value.t_values.size() && gi < m->value.gamma_values.size());
    *out = m->value.eta_in(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(gi));
    return BP_OK;
  });
}

bp_status bp_efficiency_map_optimum(const bp_efficiency_map* m, size_t ti, double* gamma_opt, double* eta_opt) {
  return guarded([&] {
    BP_REQUIRE(m && ti < m->value.t_values.size());
    if (gamma_opt) *gamma_opt = m->value.gamma_opt[ti];
    if (eta_opt) *eta_opt = m->value.eta_opt[ti];
    return BP_OK;
  });
}

bp_status bp_efficiency_map_write_csv(const bp_efficiency_map* m, const char* path) {
  return guarded([&] {
    BP_REQUIRE(m && path);
    write_file(path, [&](std::ostream& os) { write_csv(os, m->value); });
    return BP_OK;
  });
}

bp_status bp_efficiency_map_summary_json(const bp_efficiency_map* m, char** json) {
  return guarded([&] {
    BP_REQUIRE(m && json);
    *json = dup_string(summary_json(m->value));
    return BP_OK;
  });
}

bp_status bp_counts_load_csv(const char* path, bp_counts_table** out) {
  return guarded([&] {
    BP_REQUIRE(path && out);
    *out = new bp_counts_table{read_counts_csv_file(path)};
    return BP_OK;
  });
}

void bp_counts_free(bp_counts_table* t) { delete t; }

size_t bp_counts_size(const bp_counts_table* t) { return t ? t->value.records.size() : 0; }

bp_status bp_counts_record(const bp_counts_table* t, size_t index, bp_count_record* out) {
  return guarded([&] {
    BP_REQUIRE(t && out && index < t->value.records.size());
    *out = record_out(t->value.records[index]);
    return BP_OK;
  });
}

size_t bp_counts_issue_count(const bp_counts_table* t) { return t ? t->value.issues.size() : 0; }

bp_status bp_counts_issue(const bp_counts_table* t, size_t index, size_t* line, const char** message) {
  return guarded([&] {
    BP_REQUIRE(t && index < t->value.issues.size());
    if (line) *line = t->value.issues[index].line;
    if (message) *message = t->value.issues[index].message.c_str();
    return BP_OK;
  });
}

size_t bp_counts_warning_count(const bp_counts_table* t) { return t ? t->value.warnings.size() : 0; }

const char* bp_counts_warning(const bp_counts_table* t, size_t index) {
  if (!t || index >= t->value.warnings.size()) return nullptr;
  return t->value.warnings[index].c_str();
}

bp_status bp_subtract_accidentals(const bp_count_record* r, bp_net_coincidences* out) {
  return guarded([&] {
    BP_REQUIRE(r && out);
    const NetCoincidences n = subtract_accidentals(record_of(*r));
    *out = bp_net_coincidences{n.rate, n.error, n.floored ? 1 : 0, n.precondition_violated ? 1 : 0};
    return BP_OK;
  });
}

bp_status bp_heralding_efficiency(const bp_count_record* r, const bp_optical_path* path, bp_measurement* out) {
  return guarded([&] {
    BP_REQUIRE(r && path && out);
    OpticalPath p{path->transmission, path->transmission_err, path->detector_efficiency,
                  path->detector_efficiency_err};
    const Measurement m = heralding_efficiency(record_of(*r), p);
    *out = bp_measurement{m.value, m.error};
    return BP_OK;
  });
}

bp_status bp_heralded_g2(const bp_count_record* r, bp_measurement* out) {
  return guarded([&] {
    BP_REQUIRE(r && out);
    const Measurement m = heralded_g2(record_of(*r));
    *out = bp_measurement{m.value, m.error};
    return BP_OK;
  });
}

bp_status bp_linear_rate_fit(const bp_counts_table* t, const char* channel, bp_linear_fit* out, double* residuals,
                             size_t capacity) {
  return guarded([&] {
    BP_REQUIRE(t && channel && out);
    const LinearFit f = linear_rate_fit(t->value.records, parse_channel(channel));
    *out = bp_linear_fit{f.slope, f.intercept, f.slope_err, f.intercept_err};
    if (residuals) {
      BP_REQUIRE(capacity >= f.residuals.size());
      std::copy(f.residuals.begin(), f.residuals.end(), residuals);
    }
    return BP_OK;
  });
}

bp_status bp_mode_match_ratio(bp_measurement hsp, bp_measurement coh, bp_measurement* out) {
  return guarded([&] {
    BP_REQUIRE(out);
    const Measurement m = mode_match_ratio({hsp.value, hsp.error}, {coh.value, coh.error});
    *out = bp_measurement{m.value, m.error};
    return BP_OK;
  });
}

bp_status bp_sweep_points_load_csv(const char* path, bp_sweep_points** out) {
  return guarded([&] {
    BP_REQUIRE(path && out);
    *out = new bp_sweep_points{read_sweep_csv_file(path)};
    return BP_OK;
  });
}

bp_status bp_sweep_points_create(const double* detuning, const double* normalized, size_t n, bp_sweep_points** out) {
  return guarded([&] {
    BP_REQUIRE(out && (n == 0 || (detuning && normalized)));
    SweepTable t;
    for (size_t i = 0; i < n; ++i) t.points.push_back({detuning[i], normalized[i]});
    *out = new bp_sweep_points{std::move(t)};
    return BP_OK;
  });
}

void bp_sweep_points_free(bp_sweep_points* p) { delete p; }

size_t bp_sweep_points_size(const bp_sweep_points* p) { return p ? p->value.points.size() : 0; }

size_t bp_sweep_points_issue_count(const bp_sweep_points* p) { return p ? p->value.issues.size() : 0; }

bp_status bp_sweep_points_issue(const bp_sweep_points* p, size_t index, size_t* line, const char** message) {
  return guarded([&] {
    BP_REQUIRE(p && index < p->value.issues.size());
    if (line) *line = p->value.issues[index].line;
    if (message) *message = p->value.issues[index].message.c_str();
    return BP_OK;
  });
}

bp_status bp_fit_hsp_bandwidth(const bp_sweep_points* p, const bp_filter* filter, bp_filter_line line,
                               bp_spectral_fit* out, double* residuals, size_t capacity) {
  return guarded([&] {
    BP_REQUIRE(p && filter && out);
    BP_REQUIRE(line == BP_FILTER_LINE_INTENSITY || line == BP_FILTER_LINE_AMPLITUDE);
    SpectralFitOptions opt;
    opt.line = line == BP_FILTER_LINE_INTENSITY ? FilterLine::intensity : FilterLine::amplitude;
    const SpectralFit f = fit_hsp_bandwidth(p->value.points, filter_of(*filter), opt);
    *out = bp_spectral_fit{f.delta_t_ns, f.delta_t_err_ns, f.delta_nu_ghz, f.delta_nu_err_ghz,
                           f.centre_ghz, f.centre_err_ghz, f.scale, f.scale_err,
                           f.rss, f.iterations, f.converged ? 1 : 0, f.below_resolution ? 1 : 0,
                           f.resolution_bound_ghz};
    if (residuals) {
      BP_REQUIRE(capacity >= f.residuals.size());
      std::copy(f.residuals.begin(), f.residuals.end(), residuals);
    }
    if (!f.converged)
      return set_error(BP_ERR_NOT_CONVERGED, "spectral fit hit the iteration bound after " +
                                                 std::to_string(f.iterations) + " iterations (rss " +
                                                 std::to_string(f.rss) + ")");
    return BP_OK;
  });
}

}  // extern "C"
