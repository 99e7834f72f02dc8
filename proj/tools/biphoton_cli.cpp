// biphoton command-line driver. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "biphoton/biphoton.h"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "1";

enum Exit : int { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void raise(int code, std::string message) { throw CliError{code, std::move(message)}; }

int exit_for(bp_status s) {
  switch (s) {
    case BP_OK: return kOk;
    case BP_ERR_INVALID_ARGUMENT:
    case BP_ERR_PARAMETER: return kConfig;
    case BP_ERR_IO:
    case BP_ERR_PARSE: return kIo;
    default: return kNumerical;
  }
}

void check(bp_status s, const char* what) {
  if (s == BP_OK) return;
  std::string msg = std::string(what) + ": " + bp_status_string(s);
  if (*bp_last_error()) msg += ": " + std::string(bp_last_error());
  raise(exit_for(s), msg);
}

double rounded(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return rounded(x);
}

template <typename T, typename D>
using Handle = std::unique_ptr<T, D>;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { bp_string_free(p); }
};

// One parameter: settable by flag or config key, echoed in the output.
struct Param {
  std::string key;
  std::variant<double*, int*, std::size_t*, std::string*, bool*> target;
  bool required = false;
  CLI::Option* option = nullptr;
  bool set = false;  // value known from flag, config, or default
};

class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& description)
      : sub_(app.add_subcommand(name, description)) {
    sub_->add_option("--config", config_path_, "JSON config file; flags override its values");
  }

  CLI::App* app() { return sub_; }

  template <typename T>
  CLI::Option* add(const std::string& key, T& target, const std::string& help, bool required = false) {
    Param p{key, &target, required};
    const std::string flag = "--" + dashed(key);
    if constexpr (std::is_same_v<T, bool>)
      p.option = sub_->add_flag(flag + ",!--no-" + dashed(key), target, help);
    else
      p.option = sub_->add_option(flag, target, help);
    p.set = !required;
    params_.push_back(p);
    return p.option;
  }

  // Merge the config file under the command-line values and check requirements.
  void resolve() {
    for (auto& p : params_)
      if (p.option->count() > 0) p.set = true;
    if (!config_path_.empty()) merge_file();
    for (const auto& p : params_)
      if (p.required && !p.set) raise(kConfig, "missing required parameter --" + dashed(p.key));
  }

  Json echo() const {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = sub_->get_name();
    for (const auto& p : params_) {
      std::visit(
          [&](auto* v) {
            using V = std::remove_pointer_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>)
              j[p.key] = number(*v);
            else
              j[p.key] = *v;
          },
          p.target);
    }
    return j;
  }

 private:
  static std::string dashed(std::string s) {
    for (char& c : s)
      if (c == '_') c = '-';
    return s;
  }

  void merge_file() {
    std::ifstream in(config_path_);
    if (!in) raise(kIo, "cannot open config file '" + config_path_ + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      raise(kConfig, "config '" + config_path_ + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) raise(kConfig, "config root must be an object");
    if (!j.contains("schema_version") || !j["schema_version"].is_string())
      raise(kConfig, "config lacks a schema_version string");
    if (j["schema_version"] != kSchemaVersion)
      raise(kConfig, "unsupported schema_version '" + j["schema_version"].get<std::string>() + "'");
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key == "schema_version") continue;
      if (key == "command") {
        if (!it->is_string() || it->get<std::string>() != sub_->get_name())
          raise(kConfig, "config command does not match '" + sub_->get_name() + "'");
        continue;
      }
      Param* p = find(key);
      if (!p) raise(kConfig, "unknown config key '" + key + "'");
      if (p->option->count() > 0) continue;
      assign(*p, *it);
      p->set = true;
    }
  }

  Param* find(const std::string& key) {
    for (auto& p : params_)
      if (p.key == key) return &p;
    return nullptr;
  }

  static void assign(Param& p, const Json& v) {
    const auto bad = [&](const char* type) { raise(kConfig, "config key '" + p.key + "' must be " + type); };
    std::visit(
        [&](auto* t) {
          using V = std::remove_pointer_t<decltype(t)>;
          if constexpr (std::is_same_v<V, double>) {
            if (!v.is_number()) bad("a number");
            *t = v.get<double>();
          } else if constexpr (std::is_same_v<V, int>) {
            if (!v.is_number_integer()) bad("an integer");
            *t = v.get<int>();
          } else if constexpr (std::is_same_v<V, std::size_t>) {
            if (!v.is_number_unsigned()) bad("a non-negative integer");
            *t = v.get<std::size_t>();
          } else if constexpr (std::is_same_v<V, bool>) {
            if (!v.is_boolean()) bad("a boolean");
            *t = v.get<bool>();
          } else {
            if (!v.is_string()) bad("a string");
            *t = v.get<std::string>();
          }
        },
        p.target);
  }

  CLI::App* sub_;
  std::string config_path_;
  std::vector<Param> params_;
};

void emit(const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) raise(kIo, "cannot write '" + path + "'");
}

// ---- numerics shared by efficiency and sweep

struct NumericFlags {
  int side_pulses;
  double samples_per_scale;
  std::size_t min_grid_points;
  std::size_t max_grid_points;
  std::string kernel = "gated_self";

  NumericFlags() {
    bp_numerics n;
    bp_numerics_init(&n);
    side_pulses = n.side_pulses;
    samples_per_scale = n.samples_per_scale;
    min_grid_points = n.min_grid_points;
    max_grid_points = n.max_grid_points;
  }

  void add_to(Command& c) {
    c.add("side_pulses", side_pulses, "Neighbouring pump pulses kept on each side (M)");
    c.add("samples_per_scale", samples_per_scale, "Grid points per narrowest time scale (>= 16)");
    c.add("min_grid_points", min_grid_points, "Lower bound on points per axis");
    c.add("max_grid_points", max_grid_points, "Upper bound on points per axis");
    c.add("kernel", kernel, "Memory kernel source: gated_self or ungated")
        ->check(CLI::IsMember({"gated_self", "ungated"}));
  }

  bp_numerics numerics() const { return bp_numerics{side_pulses, samples_per_scale, min_grid_points, max_grid_points}; }

  bp_kernel_source source() const {
    if (kernel == "gated_self") return BP_KERNEL_GATED_SELF;
    if (kernel == "ungated") return BP_KERNEL_UNGATED;
    raise(kConfig, "kernel must be gated_self or ungated");
  }
};

// ---- efficiency

struct EfficiencyCmd {
  Command cmd;
  double t_hat = 0.0;
  double gamma_hat = 0.0;
  bool gates = true;
  NumericFlags num;
  std::string output;

  explicit EfficiencyCmd(CLI::App& app) : cmd(app, "efficiency", "Read-in efficiency at one design point") {
    cmd.add("t_hat", t_hat, "Pump period in units of the pump duration", true);
    cmd.add("gamma_hat", gamma_hat, "Idler filter width in units of the inverse pump duration", true);
    cmd.add("gates", gates, "Apply time gates (--no-gates takes the wide-period limit)");
    num.add_to(cmd);
    cmd.add("output", output, "Output JSON path (default stdout)");
  }

  int run() {
    cmd.resolve();
    bp_design_point p;
    bp_design_point_init(&p);
    p.t_hat = t_hat;
    p.gamma_hat = gamma_hat;
    p.gates_enabled = gates ? 1 : 0;
    p.kernel = num.source();
    p.numerics = num.numerics();
    bp_efficiency e;
    check(bp_read_in_efficiency(&p, &e), "efficiency");

    Json j;
    j["eta_in"] = number(e.eta_in);
    j["purity"] = number(e.purity);
    j["gating_loss"] = number(e.gating_loss);
    j["reference_norm"] = number(e.reference_norm);
    j["leading_weight"] = number(e.leading_weight);
    Json head = Json::array();
    for (std::size_t k = 0; k < e.n_lambda; ++k) head.push_back(number(e.lambda_head[k]));
    j["lambda_head"] = head;
    j["grid"] = {{"idler_points", e.idler_points}, {"signal_points", e.signal_points}};
    j["kernel_tie"] = e.kernel_tie != 0;
    j["config"] = cmd.echo();
    emit(j, output);
    return kOk;
  }
};

// ---- sweep

struct SweepCmd {
  Command cmd;
  double t_min = 2.0, t_max = 12.0, gamma_min = 0.1, gamma_max = 2.0;
  std::size_t t_count = 32, gamma_count = 64;
  int threads = -1;
  NumericFlags num;
  std::string csv, summary;

  explicit SweepCmd(CLI::App& app) : cmd(app, "sweep", "Read-in efficiency over a (t_hat, gamma_hat) grid") {
    cmd.add("t_min", t_min, "Smallest t_hat");
    cmd.add("t_max", t_max, "Largest t_hat");
    cmd.add("t_count", t_count, "Number of t_hat samples");
    cmd.add("gamma_min", gamma_min, "Smallest gamma_hat");
    cmd.add("gamma_max", gamma_max, "Largest gamma_hat");
    cmd.add("gamma_count", gamma_count, "Number of gamma_hat samples");
    num.add_to(cmd);
    cmd.add("threads", threads, "Worker threads (0 = auto; default from BIPHOTON_THREADS)");
    cmd.add("csv", csv, "Efficiency map CSV path", true);
    cmd.add("summary", summary, "Optimum-curve JSON path (default stdout)");
  }

  int run() {
    cmd.resolve();
    if (threads < 0) {
      threads = 0;
      if (const char* env = std::getenv("BIPHOTON_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 0) raise(kConfig, "BIPHOTON_THREADS must be a non-negative integer");
        threads = static_cast<int>(v);
      }
    }
    std::vector<double> ts(t_count), gs(gamma_count);
    check(bp_linspace(t_min, t_max, t_count, ts.data()), "t_hat axis");
    check(bp_linspace(gamma_min, gamma_max, gamma_count, gs.data()), "gamma_hat axis");
    bp_sweep_request req{ts.data(), ts.size(), gs.data(), gs.size(), num.numerics(), num.source(),
                         static_cast<unsigned>(threads)};
    bp_efficiency_map* raw = nullptr;
    check(bp_sweep(&req, &raw), "sweep");
    Handle<bp_efficiency_map, decltype(&bp_efficiency_map_free)> map(raw, bp_efficiency_map_free);
    check(bp_efficiency_map_write_csv(map.get(), csv.c_str()), "writing CSV");

    OwnedString s;
    check(bp_efficiency_map_summary_json(map.get(), &s.p), "summary");
    Json j = Json::parse(s.p);
    // Thread count does not affect results; keep it out of the echo so
    // summaries compare equal across machines.
    Json config = cmd.echo();
    config.erase("threads");
    j["config"] = config;
    emit(j, summary);

    std::size_t failures = 0;
    check(bp_efficiency_map_shape(map.get(), nullptr, nullptr, &failures), "summary");
    if (failures > 0) std::cerr << "warning: " << failures << " sweep cell(s) failed; see summary\n";
    return kOk;
  }
};

// ---- spectrum

struct SpectrumCmd {
  Command cmd;
  double pump_fwhm_ghz = 0.0, filter_fwhm_ghz = 0.0, filter_center_ghz = 0.0;
  std::string pump_convention = "intensity", filter_convention = "amplitude";
  double freq_min_ghz = -10.0, freq_max_ghz = 10.0;
  std::size_t freq_points = 4001;
  std::string csv, output;

  explicit SpectrumCmd(CLI::App& app) : cmd(app, "spectrum", "Marginal signal spectrum of the heralded photon") {
    cmd.add("pump_fwhm_ghz", pump_fwhm_ghz, "Pump bandwidth FWHM in GHz", true);
    cmd.add("pump_convention", pump_convention, "Pump FWHM refers to intensity or amplitude")
        ->check(CLI::IsMember({"intensity", "amplitude"}));
    cmd.add("filter_fwhm_ghz", filter_fwhm_ghz, "Idler filter FWHM in GHz", true);
    cmd.add("filter_convention", filter_convention, "Filter FWHM refers to amplitude or intensity transmission")
        ->check(CLI::IsMember({"intensity", "amplitude"}));
    cmd.add("filter_center_ghz", filter_center_ghz, "Filter centre detuning in GHz");
    cmd.add("freq_min_ghz", freq_min_ghz, "Lower edge of the output frequency grid");
    cmd.add("freq_max_ghz", freq_max_ghz, "Upper edge of the output frequency grid");
    cmd.add("freq_points", freq_points, "Points on the output frequency grid");
    cmd.add("csv", csv, "Spectrum curve CSV path (optional)");
    cmd.add("output", output, "Output JSON path (default stdout)");
  }

  int run() {
    cmd.resolve();
    if (pump_convention != "intensity" && pump_convention != "amplitude")
      raise(kConfig, "pump_convention must be intensity or amplitude");
    if (filter_convention != "intensity" && filter_convention != "amplitude")
      raise(kConfig, "filter_convention must be intensity or amplitude");
    // Gaussian amplitude FWHM is sqrt(2) times the intensity FWHM.
    const double pump = pump_convention == "intensity" ? pump_fwhm_ghz : pump_fwhm_ghz / std::sqrt(2.0);
    const double filter = filter_convention == "amplitude" ? filter_fwhm_ghz : filter_fwhm_ghz * std::sqrt(2.0);

    const bp_grid grid{freq_points, freq_min_ghz, freq_max_ghz};
    bp_spectrum* raw = nullptr;
    check(bp_marginal_spectrum(pump, filter, filter_center_ghz, &grid, &raw), "spectrum");
    Handle<bp_spectrum, decltype(&bp_spectrum_free)> spec(raw, bp_spectrum_free);
    double fwhm = 0.0, closed = 0.0;
    check(bp_spectrum_fwhm(spec.get(), &fwhm), "spectrum");
    check(bp_marginal_fwhm_closed_form(pump, filter, &closed), "spectrum");
    if (!csv.empty()) check(bp_spectrum_write_csv(spec.get(), csv.c_str()), "writing CSV");

    Json j;
    j["fwhm_GHz"] = number(fwhm);
    j["closed_form_fwhm_GHz"] = number(closed);
    j["pump_intensity_fwhm_GHz"] = number(pump);
    j["filter_amplitude_fwhm_GHz"] = number(filter);
    j["config"] = cmd.echo();
    emit(j, output);
    return kOk;
  }
};

// ---- analyze

bp_count_record pooled(const std::vector<bp_count_record>& rs) {
  // Counts add; pooled rates are total counts over total integration time.
  bp_count_record p{};
  double tau = 0.0;
  for (const auto& r : rs) {
    const double t = r.integration_time_s;
    tau += t;
    p.pump_power_mw += r.pump_power_mw * t;
    p.c_T += r.c_T * t;
    p.c_H += r.c_H * t;
    p.c_V += r.c_V * t;
    p.c_H_given_T += r.c_H_given_T * t;
    p.c_V_given_T += r.c_V_given_T * t;
    p.c_HV_given_T += r.c_HV_given_T * t;
    p.acc_s_given_T += r.acc_s_given_T * t;
  }
  for (double* f : {&p.pump_power_mw, &p.c_T, &p.c_H, &p.c_V, &p.c_H_given_T, &p.c_V_given_T, &p.c_HV_given_T,
                    &p.acc_s_given_T})
    *f /= tau;
  p.integration_time_s = tau;
  return p;
}

Json measurement_or_error(bp_status s, const bp_measurement& m, const char* name) {
  Json j;
  if (s == BP_OK) {
    j[name] = number(m.value);
    j[std::string(name) + "_err"] = number(m.error);
  } else {
    j[name] = nullptr;
    j[std::string(name) + "_err"] = nullptr;
    j[std::string(name) + "_error"] = bp_last_error();
  }
  return j;
}

struct AnalyzeCmd {
  Command cmd;
  std::string input;
  double transmission = -1.0, transmission_err = 0.0;
  double detector_efficiency = -1.0, detector_efficiency_err = 0.0;
  std::string fit_channels = "c_T,net_s_given_T,c_HV_given_T";
  std::string output;

  explicit AnalyzeCmd(CLI::App& app) : cmd(app, "analyze", "Heralding efficiency, g2 and rate fits from counts") {
    cmd.add("input", input, "Counts CSV", true);
    cmd.add("transmission", transmission, "Signal path transmission T_s", true);
    cmd.add("transmission_err", transmission_err, "Uncertainty of T_s");
    cmd.add("detector_efficiency", detector_efficiency, "Signal detector efficiency", true);
    cmd.add("detector_efficiency_err", detector_efficiency_err, "Uncertainty of the detector efficiency");
    cmd.add("fit_channels", fit_channels, "Comma-separated rate channels fitted against pump power");
    cmd.add("output", output, "Output JSON path (default stdout)");
  }

  int run() {
    cmd.resolve();
    bp_counts_table* raw = nullptr;
    check(bp_counts_load_csv(input.c_str(), &raw), "reading counts");
    Handle<bp_counts_table, decltype(&bp_counts_free)> table(raw, bp_counts_free);

    Json skipped = Json::array();
    for (std::size_t i = 0; i < bp_counts_issue_count(table.get()); ++i) {
      std::size_t line = 0;
      const char* msg = nullptr;
      check(bp_counts_issue(table.get(), i, &line, &msg), "reading counts");
      std::cerr << input << ":" << line << ": skipped row: " << msg << "\n";
      skipped.push_back({{"line", line}, {"message", msg}});
    }
    Json warnings = Json::array();
    for (std::size_t i = 0; i < bp_counts_warning_count(table.get()); ++i) {
      const char* w = bp_counts_warning(table.get(), i);
      std::cerr << input << ": warning: " << w << "\n";
      warnings.push_back(w);
    }
    const std::size_t n = bp_counts_size(table.get());
    if (n == 0) raise(kIo, "no valid rows in '" + input + "'");

    const bp_optical_path path{transmission, transmission_err, detector_efficiency, detector_efficiency_err};
    std::vector<bp_count_record> records(n);
    Json points = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
      check(bp_counts_record(table.get(), i, &records[i]), "reading counts");
      points.push_back(analyze_one(records[i], path));
    }

    Json j;
    j["points"] = points;
    j["aggregate"] = analyze_one(pooled(records), path);
    j["fits"] = fits(table.get());
    j["skipped_rows"] = skipped;
    j["warnings"] = warnings;
    j["config"] = cmd.echo();
    emit(j, output);
    return kOk;
  }

  Json analyze_one(const bp_count_record& r, const bp_optical_path& path) {
    Json j;
    j["pump_power_mW"] = number(r.pump_power_mw);
    j["integration_time_s"] = number(r.integration_time_s);
    bp_net_coincidences net;
    check(bp_subtract_accidentals(&r, &net), "accidental subtraction");
    j["net_s_given_T"] = number(net.rate);
    j["net_s_given_T_err"] = number(net.error);
    j["net_floored"] = net.floored != 0;
    bp_measurement m{};
    const bp_status se = bp_heralding_efficiency(&r, &path, &m);
    if (se == BP_ERR_PARAMETER || se == BP_ERR_INVALID_ARGUMENT) check(se, "heralding efficiency");
    j.update(measurement_or_error(se, m, "eta_her"));
    const bp_status sg = bp_heralded_g2(&r, &m);
    j.update(measurement_or_error(sg, m, "g2"));
    return j;
  }

  Json fits(const bp_counts_table* table) {
    Json out;
    std::stringstream ss(fit_channels);
    std::string name;
    const std::size_t n = bp_counts_size(table);
    while (std::getline(ss, name, ',')) {
      if (name.empty()) continue;
      bp_linear_fit f;
      std::vector<double> res(n);
      const bp_status s = bp_linear_rate_fit(table, name.c_str(), &f, res.data(), res.size());
      if (s == BP_ERR_PARAMETER) check(s, "fit channel");
      Json j;
      if (s == BP_OK) {
        j["slope"] = number(f.slope);
        j["slope_err"] = number(f.slope_err);
        j["intercept"] = number(f.intercept);
        j["intercept_err"] = number(f.intercept_err);
        Json r = Json::array();
        for (double x : res) r.push_back(number(x));
        j["residuals"] = r;
      } else {
        j["error"] = bp_last_error();
      }
      out[name] = j;
    }
    return out;
  }
};

// ---- fit-spectrum

struct FitSpectrumCmd {
  Command cmd;
  std::string input;
  double filter_fwhm_ghz = 0.0, filter_center_ghz = 0.0;
  std::string filter_convention = "amplitude";
  std::string filter_line = "intensity";
  std::string output;

  explicit FitSpectrumCmd(CLI::App& app)
      : cmd(app, "fit-spectrum", "Photon bandwidth from a signal-filter detuning sweep") {
    cmd.add("input", input, "Sweep CSV with detuning_GHz, normalized_coincidences", true);
    cmd.add("filter_fwhm_ghz", filter_fwhm_ghz, "Scanned signal filter FWHM in GHz", true);
    cmd.add("filter_convention", filter_convention, "Filter FWHM refers to amplitude or intensity transmission")
        ->check(CLI::IsMember({"intensity", "amplitude"}));
    cmd.add("filter_center_ghz", filter_center_ghz, "Filter centre offset in GHz");
    cmd.add("filter_line", filter_line, "Line shape used in the convolution model: intensity or amplitude")
        ->check(CLI::IsMember({"intensity", "amplitude"}));
    cmd.add("output", output, "Output JSON path (default stdout)");
  }

  int run() {
    cmd.resolve();
    if (filter_line != "intensity" && filter_line != "amplitude")
      raise(kConfig, "filter_line must be intensity or amplitude");
    const double amp_fwhm = filter_convention == "amplitude" ? filter_fwhm_ghz : filter_fwhm_ghz * std::sqrt(2.0);
    bp_filter filter{0.0, filter_center_ghz};
    check(bp_parameter_from_fwhm(BP_FWHM_FILTER_AMPLITUDE_BANDWIDTH, amp_fwhm, &filter.gamma), "filter width");

    bp_sweep_points* raw = nullptr;
    check(bp_sweep_points_load_csv(input.c_str(), &raw), "reading sweep");
    Handle<bp_sweep_points, decltype(&bp_sweep_points_free)> pts(raw, bp_sweep_points_free);
    Json skipped = Json::array();
    for (std::size_t i = 0; i < bp_sweep_points_issue_count(pts.get()); ++i) {
      std::size_t line = 0;
      const char* msg = nullptr;
      check(bp_sweep_points_issue(pts.get(), i, &line, &msg), "reading sweep");
      std::cerr << input << ":" << line << ": skipped row: " << msg << "\n";
      skipped.push_back({{"line", line}, {"message", msg}});
    }

    const std::size_t n = bp_sweep_points_size(pts.get());
    std::vector<double> res(n);
    bp_spectral_fit f{};
    const bp_status s =
        bp_fit_hsp_bandwidth(pts.get(), &filter, filter_line == "intensity" ? BP_FILTER_LINE_INTENSITY
                                                                             : BP_FILTER_LINE_AMPLITUDE,
                             &f, res.data(), res.size());
    if (s != BP_OK && s != BP_ERR_NOT_CONVERGED) check(s, "spectral fit");

    Json j;
    j["delta_t_ns"] = number(f.delta_t_ns);
    j["delta_t_err_ns"] = number(f.delta_t_err_ns);
    j["delta_nu_GHz"] = number(f.delta_nu_ghz);
    j["delta_nu_err_GHz"] = number(f.delta_nu_err_ghz);
    j["centre_GHz"] = number(f.centre_ghz);
    j["centre_err_GHz"] = number(f.centre_err_ghz);
    j["scale"] = number(f.scale);
    j["scale_err"] = number(f.scale_err);
    j["rss"] = number(f.rss);
    j["iterations"] = f.iterations;
    j["converged"] = f.converged != 0;
    j["below_resolution"] = f.below_resolution != 0;
    j["resolution_bound_GHz"] = number(f.resolution_bound_ghz);
    Json r = Json::array();
    for (double x : res) r.push_back(number(x));
    j["residuals"] = r;
    j["skipped_rows"] = skipped;
    j["config"] = cmd.echo();
    emit(j, output);
    if (f.below_resolution)
      std::cerr << "warning: fitted bandwidth is below the resolution bound of " << f.resolution_bound_ghz
                << " GHz\n";
    if (s == BP_ERR_NOT_CONVERGED) check(s, "spectral fit");
    return kOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded single-photon source design and analysis"};
  app.set_version_flag("--version", bp_version());
  app.require_subcommand(1);

  EfficiencyCmd efficiency(app);
  SweepCmd sweep(app);
  SpectrumCmd spectrum(app);
  AnalyzeCmd analyze(app);
  FitSpectrumCmd fit(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (efficiency.cmd.app()->parsed()) return efficiency.run();
    if (sweep.cmd.app()->parsed()) return sweep.run();
    if (spectrum.cmd.app()->parsed()) return spectrum.run();
    if (analyze.cmd.app()->parsed()) return analyze.run();
    if (fit.cmd.app()->parsed()) return fit.run();
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kConfig;
}
