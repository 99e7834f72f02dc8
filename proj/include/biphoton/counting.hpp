#pragma once

// Photon-counting analysis: accidental subtraction, heralding efficiency,
// heralded g2 and linear rate fits versus pump power.
//
// Rates are counts per second. Poisson errors need the number of counts, so
// every record carries the integration time its rates were accumulated over.

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace biphoton {

struct Measurement {
  double value = 0.0;
  double error = 0.0;
};

struct CountRecord {
  double pump_power_mw = 0.0;
  double c_T = 0.0;           // idler triggers after temporal filtering
  double c_H = 0.0;
  double c_V = 0.0;
  double c_H_given_T = 0.0;
  double c_V_given_T = 0.0;
  double c_HV_given_T = 0.0;  // triple coincidences
  double acc_s_given_T = 0.0; // shifted-bin accidental estimate
  double integration_time_s = 1.0;

  /// Throws ErrorCode::parameter on negative or non-finite rates, or when
  /// triples exceed either double coincidence rate.
  void validate() const;
  double c_s_given_T() const { return c_H_given_T + c_V_given_T; }
};

struct OpticalPath {
  double transmission = 0.1;  // T_s, memory input to signal detectors
  double transmission_err = 0.0;
  double detector_efficiency = 0.5;
  double detector_efficiency_err = 0.0;

  void validate() const;
};

struct NetCoincidences {
  double rate = 0.0;
  double error = 0.0;
  bool floored = false;               // raw difference was negative
  bool precondition_violated = false; // accidentals exceed total coincidences
};

/// (c_H|T + c_V|T) - accidentals, floored at zero.
NetCoincidences subtract_accidentals(const CountRecord& record);

/// (c_s|T - acc) / (c_T * T_s * eta_det) with first-order error propagation
/// of the Poisson counting errors and the path uncertainties.
Measurement heralding_efficiency(const CountRecord& record, const OpticalPath& path);

/// c_HV|T * c_T / (c_H|T * c_V|T). Throws ErrorCode::undefined when either
/// double coincidence rate is zero.
Measurement heralded_g2(const CountRecord& record);

enum class RateChannel {
  c_T,
  c_H,
  c_V,
  c_H_plus_V,
  c_H_given_T,
  c_V_given_T,
  c_s_given_T,
  c_HV_given_T,
  acc_s_given_T,
  net_s_given_T,
};

/// Parses names such as "c_T" or "net_s_given_T"; throws ErrorCode::parameter.
RateChannel parse_channel(const std::string& name);
const char* to_string(RateChannel channel) noexcept;
double channel_rate(const CountRecord& record, RateChannel channel);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double intercept_err = 0.0;
  std::vector<double> residuals;  // observed - fitted, in record order
};

/// Ordinary least squares of a rate channel against pump power. Needs at
/// least three records and two distinct pump powers.
LinearFit linear_rate_fit(const std::vector<CountRecord>& records, RateChannel channel);

struct RowIssue {
  std::size_t line = 0;  // 1-based line in the input
  std::string message;
};

struct CountsTable {
  std::vector<CountRecord> records;
  std::vector<RowIssue> issues;       // rows that were skipped
  std::vector<std::string> warnings;  // e.g. defaulted columns
};

/// CSV with header
///   pump_power_mW, c_T, c_H, c_V, c_H_given_T, c_V_given_T, c_HV_given_T, acc_s_given_T
/// in any column order; integration_time_s is optional (default 1 s) and a
/// missing c_HV_given_T column defaults to zero with a warning. Malformed rows
/// are reported and skipped. Throws ErrorCode::parse if the header is missing
/// required columns or the input is empty.
CountsTable read_counts_csv(std::istream& is);
CountsTable read_counts_csv_file(const std::string& path);

/// eta_HSP / eta_coh with propagated uncertainty.
Measurement mode_match_ratio(const Measurement& eta_hsp, const Measurement& eta_coh);

}  // namespace biphoton
