#pragma once

#include "lcris/config.hpp"
#include "lcris/metrics.hpp"

namespace lcris::harness {

// Worker pool width: LCRIS_THREADS caps it, hardware concurrency otherwise.
int worker_count(int tasks);

struct EvalResult {
  std::vector<metrics::MetricRow> rows;
  std::vector<metrics::AngleAggregate> aggregates;
};

// Runs `controller` in {optimal, realistic, ddpg} over all seeds (one
// episode of cfg.eval_steps slots per seed, parallel across seeds) and
// aggregates per waypoint arrival.
EvalResult run_eval(const ExperimentConfig& cfg, const std::string& controller,
                    const std::vector<uint64_t>& seeds);

// Per-waypoint aggregates: "arrival" is the slot minimizing the distance to
// the waypoint within each ping-pong pass; means are over arrival slots of
// all passes and runs.
std::vector<metrics::AngleAggregate> aggregate_rows(
    const ExperimentConfig& cfg, const std::vector<metrics::MetricRow>& rows);

// Long-format comparison table from a sweep over speed or (beta1, beta2).
struct SweepRow {
  std::string axis;
  std::string value;
  std::string controller;
  std::string metric;
  double mean = 0.0;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::string& axis);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Writes metrics.csv, aggregates.csv and manifest.txt to out_dir;
// format "plotdata" additionally writes per-metric angle series.
void emit_outputs(const ExperimentConfig& cfg, const EvalResult& result,
                  const std::string& out_dir, const std::string& format);

}  // namespace lcris::harness
