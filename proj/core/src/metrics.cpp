#include "lcris/metrics.hpp"

#include <charconv>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lcris::metrics {

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general,
                                 std::numeric_limits<double>::max_digits10);
  out.append(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{}) throw std::runtime_error("bad CSV number: " + s);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string to_csv(const std::vector<MetricRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.run);
    out += ',';
    out += std::to_string(r.slot);
    out += ',';
    append_double(out, r.angle_deg);
    out += ',';
    append_double(out, r.p_r_dbw);
    out += ',';
    append_double(out, r.snr_db);
    out += ',';
    append_double(out, r.t_c_ms);
    out += ',';
    append_double(out, r.t_k_ms);
    out += ',';
    append_double(out, r.rate_mbps);
    out += ',';
    out += r.controller;
    out += '\n';
  }
  return out;
}

std::vector<MetricRow> parse_csv(std::istream& in) {
  std::vector<MetricRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      if (line != kCsvHeader) throw std::runtime_error("unexpected CSV header: " + line);
      first = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 9) throw std::runtime_error("bad CSV row: " + line);
    MetricRow r;
    r.run = std::stoi(f[0]);
    r.slot = std::stoi(f[1]);
    r.angle_deg = parse_double(f[2]);
    r.p_r_dbw = parse_double(f[3]);
    r.snr_db = parse_double(f[4]);
    r.t_c_ms = parse_double(f[5]);
    r.t_k_ms = parse_double(f[6]);
    r.rate_mbps = parse_double(f[7]);
    r.controller = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricRow> parse_csv_string(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::string aggregates_to_csv(const std::vector<AngleAggregate>& aggs) {
  std::string out =
      "angle_deg,controller,mean_p_r_dbw,mean_snr_db,mean_t_c_ms,mean_t_k_ms,"
      "mean_rate_mbps,count\n";
  for (const auto& a : aggs) {
    append_double(out, a.angle_deg);
    out += ',';
    out += a.controller;
    out += ',';
    append_double(out, a.mean_p_r_dbw);
    out += ',';
    append_double(out, a.mean_snr_db);
    out += ',';
    append_double(out, a.mean_t_c_ms);
    out += ',';
    append_double(out, a.mean_t_k_ms);
    out += ',';
    append_double(out, a.mean_rate_mbps);
    out += ',';
    out += std::to_string(a.count);
    out += '\n';
  }
  return out;
}

}  // namespace lcris::metrics
