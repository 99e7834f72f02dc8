#include "biphoton/counting.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

#include "biphoton/error.hpp"
#include "csv.hpp"

namespace biphoton {

namespace {

bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

double counts(double rate, double tau) { return rate * tau; }

// Poisson error of a rate; zero observed counts are given one count of spread.
double rate_error(double rate, double tau) { return std::sqrt(std::max(counts(rate, tau), 1.0)) / tau; }

struct ChannelName {
  RateChannel channel;
  const char* name;
};

constexpr std::array<ChannelName, 10> kChannels{{
    {RateChannel::c_T, "c_T"},
    {RateChannel::c_H, "c_H"},
    {RateChannel::c_V, "c_V"},
    {RateChannel::c_H_plus_V, "c_H_plus_V"},
    {RateChannel::c_H_given_T, "c_H_given_T"},
    {RateChannel::c_V_given_T, "c_V_given_T"},
    {RateChannel::c_s_given_T, "c_s_given_T"},
    {RateChannel::c_HV_given_T, "c_HV_given_T"},
    {RateChannel::acc_s_given_T, "acc_s_given_T"},
    {RateChannel::net_s_given_T, "net_s_given_T"},
}};

}  // namespace

void CountRecord::validate() const {
  const std::array<double, 8> v{pump_power_mw, c_T, c_H, c_V, c_H_given_T, c_V_given_T, c_HV_given_T, acc_s_given_T};
  for (double x : v)
    if (!non_negative(x)) fail(ErrorCode::parameter, "count rates and pump power must be finite and >= 0");
  if (!(integration_time_s > 0.0) || !std::isfinite(integration_time_s))
    fail(ErrorCode::parameter, "integration time must be > 0");
  if (c_HV_given_T > std::min(c_H_given_T, c_V_given_T))
    fail(ErrorCode::parameter, "triple coincidences exceed a double coincidence rate");
}

void OpticalPath::validate() const {
  auto unit = [](double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; };
  if (!unit(transmission)) fail(ErrorCode::parameter, "transmission must lie in (0, 1]");
  if (!unit(detector_efficiency)) fail(ErrorCode::parameter, "detector efficiency must lie in (0, 1]");
  if (!non_negative(transmission_err) || !non_negative(detector_efficiency_err))
    fail(ErrorCode::parameter, "uncertainties must be >= 0");
}

NetCoincidences subtract_accidentals(const CountRecord& r) {
  r.validate();
  NetCoincidences out;
  const double total = r.c_s_given_T();
  out.precondition_violated = r.acc_s_given_T > total;
  const double diff = total - r.acc_s_given_T;
  out.floored = diff < 0.0;
  out.rate = std::max(diff, 0.0);
  const double tau = r.integration_time_s;
  out.error = std::sqrt(std::max(counts(total + r.acc_s_given_T, tau), 1.0)) / tau;
  return out;
}

Measurement heralding_efficiency(const CountRecord& r, const OpticalPath& path) {
  r.validate();
  path.validate();
  if (!(r.c_T > 0.0)) fail(ErrorCode::undefined, "heralding efficiency needs a nonzero trigger rate");
  const NetCoincidences net = subtract_accidentals(r);
  const double denom = r.c_T * path.transmission * path.detector_efficiency;
  Measurement m;
  m.value = net.rate / denom;
  const double rel_ct = rate_error(r.c_T, r.integration_time_s) / r.c_T;
  const double rel_t = path.transmission_err / path.transmission;
  const double rel_d = path.detector_efficiency_err / path.detector_efficiency;
  const double from_net = net.error / denom;
  m.error = std::sqrt(from_net * from_net + m.value * m.value * (rel_ct * rel_ct + rel_t * rel_t + rel_d * rel_d));
  return m;
}

Measurement heralded_g2(const CountRecord& r) {
  r.validate();
  if (!(r.c_H_given_T > 0.0) || !(r.c_V_given_T > 0.0))
    fail(ErrorCode::undefined, "g2 undefined: a double coincidence rate is zero");
  const double tau = r.integration_time_s;
  const double scale = r.c_T / (r.c_H_given_T * r.c_V_given_T);
  Measurement m;
  m.value = r.c_HV_given_T * scale;
  double rel2 = 0.0;
  for (double rate : {r.c_T, r.c_H_given_T, r.c_V_given_T}) {
    const double e = rate_error(rate, tau) / rate;
    if (rate > 0.0) rel2 += e * e;
  }
  const double from_triples = rate_error(r.c_HV_given_T, tau) * scale;
  m.error = std::sqrt(from_triples * from_triples + m.value * m.value * rel2);
  return m;
}

RateChannel parse_channel(const std::string& name) {
  for (const auto& c : kChannels)
    if (name == c.name) return c.channel;
  fail(ErrorCode::parameter, "unknown rate channel '" + name + "'");
}

const char* to_string(RateChannel channel) noexcept {
  for (const auto& c : kChannels)
    if (c.channel == channel) return c.name;
  return "unknown";
}

double channel_rate(const CountRecord& r, RateChannel channel) {
  switch (channel) {
    case RateChannel::c_T: return r.c_T;
    case RateChannel::c_H: return r.c_H;
    case RateChannel::c_V: return r.c_V;
    case RateChannel::c_H_plus_V: return r.c_H + r.c_V;
    case RateChannel::c_H_given_T: return r.c_H_given_T;
    case RateChannel::c_V_given_T: return r.c_V_given_T;
    case RateChannel::c_s_given_T: return r.c_s_given_T();
    case RateChannel::c_HV_given_T: return r.c_HV_given_T;
    case RateChannel::acc_s_given_T: return r.acc_s_given_T;
    case RateChannel::net_s_given_T: return subtract_accidentals(r).rate;
  }
  fail(ErrorCode::parameter, "unknown rate channel");
}

LinearFit linear_rate_fit(const std::vector<CountRecord>& records, RateChannel channel) {
  const std::size_t n = records.size();
  if (n < 3) fail(ErrorCode::precondition, "linear fit needs at least 3 records");
  double mx = 0.0, my = 0.0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    records[i].validate();
    x[i] = records[i].pump_power_mw;
    y[i] = channel_rate(records[i], channel);
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 1e-300)) fail(ErrorCode::precondition, "linear fit is rank deficient: all pump powers equal");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += fit.residuals[i] * fit.residuals[i];
  }
  const double s2 = rss / static_cast<double>(n - 2);
  fit.slope_err = std::sqrt(s2 / sxx);
  fit.intercept_err = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  return fit;
}

CountsTable read_counts_csv(std::istream& is) {
  const auto lines = csv::read_lines(is);
  if (lines.empty()) fail(ErrorCode::parse, "counts CSV is empty");

  static const std::array<const char*, 7> required{"pump_power_mW", "c_T", "c_H", "c_V",
                                                   "c_H_given_T", "c_V_given_T", "acc_s_given_T"};
  std::map<std::string, std::size_t, std::less<>> col;
  const auto header = csv::split(lines.front().text);
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(std::string(header[i]), i);
  for (const char* name : required)
    if (!col.contains(name)) fail(ErrorCode::parse, std::string("counts CSV header lacks column '") + name + "'");

  CountsTable table;
  const bool has_triples = col.contains("c_HV_given_T");
  const bool has_tau = col.contains("integration_time_s");
  if (!has_triples) table.warnings.emplace_back("column c_HV_given_T missing; triple coincidences set to 0");

  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto fields = csv::split(line.text);
    if (fields.size() != header.size()) {
      table.issues.push_back({line.number, "expected " + std::to_string(header.size()) + " fields, got " +
                                               std::to_string(fields.size())});
      continue;
    }
    auto get = [&](const char* name) -> std::optional<double> { return csv::to_double(fields[col.at(name)]); };
    CountRecord r;
    std::optional<double> v[9] = {get("pump_power_mW"), get("c_T"), get("c_H"), get("c_V"),
                                  get("c_H_given_T"), get("c_V_given_T"),
                                  has_triples ? get("c_HV_given_T") : std::optional<double>(0.0),
                                  get("acc_s_given_T"),
                                  has_tau ? get("integration_time_s") : std::optional<double>(1.0)};
    bool ok = true;
    for (const auto& o : v) ok = ok && o.has_value();
    if (!ok) {
      table.issues.push_back({line.number, "non-numeric field"});
      continue;
    }
    r.pump_power_mw = *v[0];
    r.c_T = *v[1];
    r.c_H = *v[2];
    r.c_V = *v[3];
    r.c_H_given_T = *v[4];
    r.c_V_given_T = *v[5];
    r.c_HV_given_T = *v[6];
    r.acc_s_given_T = *v[7];
    r.integration_time_s = *v[8];
    try {
      r.validate();
    } catch (const Error& e) {
      table.issues.push_back({line.number, e.what()});
      continue;
    }
    table.records.push_back(r);
  }
  return table;
}

CountsTable read_counts_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open counts file '" + path + "'");
  return read_counts_csv(in);
}

Measurement mode_match_ratio(const Measurement& hsp, const Measurement& coh) {
  if (!(coh.value != 0.0) || !std::isfinite(coh.value))
    fail(ErrorCode::undefined, "mode-match ratio needs a nonzero coherent-state efficiency");
  Measurement m;
  m.value = hsp.value / coh.value;
  const double a = hsp.error / coh.value;
  const double b = m.value * coh.error / coh.value;
  m.error = std::sqrt(a * a + b * b);
  return m;
}

}  // namespace biphoton
