#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lcris::metrics {

// One simulated slot. The CSV schema below is the external contract.
struct MetricRow {
  int run = 0;
  int slot = 0;
  double angle_deg = 0.0;
  double p_r_dbw = 0.0;
  double snr_db = 0.0;
  double t_c_ms = 0.0;
  double t_k_ms = 0.0;
  double rate_mbps = 0.0;
  std::string controller;
};

inline constexpr const char* kCsvHeader =
    "run,slot,angle_deg,p_r_dbw,snr_db,t_c_ms,t_k_ms,rate_mbps,controller";

// Doubles are printed with max_digits10 so a re-parse is lossless.
std::string to_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> parse_csv(std::istream& in);
std::vector<MetricRow> parse_csv_string(const std::string& text);

// Long-format per-angle aggregate table: one row per (angle, metric).
struct AngleAggregate {
  double angle_deg = 0.0;
  std::string controller;
  double mean_p_r_dbw = 0.0;
  double mean_snr_db = 0.0;
  double mean_t_c_ms = 0.0;
  double mean_t_k_ms = 0.0;
  double mean_rate_mbps = 0.0;
  long count = 0;
};

std::string aggregates_to_csv(const std::vector<AngleAggregate>& aggs);

}  // namespace lcris::metrics
