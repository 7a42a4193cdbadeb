#include "lcris/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "lcris/baselines.hpp"

namespace lcris::harness {

namespace fs = std::filesystem;

int worker_count(int tasks) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* cap = std::getenv("LCRIS_THREADS")) {
    const int v = std::atoi(cap);
    if (v > 0) n = v;
  }
  return std::max(1, std::min(n, tasks));
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("fmt_double failed");
  return std::string(buf, p);
}

metrics::MetricRow make_row(const scene::Snapshot& snap,
                            const Eigen::VectorXd& element_phases,
                            const lc::SlotTiming& timing,
                            const channel::ArraySpec& spec,
                            const env::LinkBudget& budget, const std::string& tag,
                            int run) {
  const std::complex<double> h_eff =
      channel::effective_channel(snap.h_ar, snap.h_ru, element_phases, spec);
  const std::complex<double> h_au = snap.h_au.h[0];
  const double snr_lin = channel::snr(h_au, h_eff, budget.pt_w, budget.noise_w);

  metrics::MetricRow row;
  row.run = run;
  row.slot = snap.slot;
  row.angle_deg = snap.angle_label_deg;
  row.p_r_dbw =
      linear_to_db(std::max(budget.pt_w * std::norm(h_au + h_eff), 1e-300));
  row.snr_db = linear_to_db(std::max(snr_lin, 1e-30));
  row.t_c_ms = timing.config_time * 1e3;
  row.t_k_ms = timing.serving_time * 1e3;
  row.rate_mbps = lc::effective_rate(snr_lin, timing, budget.bandwidth_hz) / 1e6;
  row.controller = tag;
  return row;
}

std::vector<metrics::MetricRow> run_baseline_episode(const ExperimentConfig& cfg,
                                                     const std::string& controller,
                                                     uint64_t seed) {
  scene::SceneConfig sc = cfg.scene;
  sc.slot_duration = cfg.slot_ms * 1e-3;
  const channel::ArraySpec spec = cfg.array_spec();
  const env::LinkBudget budget = cfg.budget();
  scene::SnapshotStream stream(sc, spec, cfg.channel, cfg.eval_steps, seed);

  // Same panel initialization as the learning environment so the Realistic
  // baseline and the agent start from identical LC states per seed.
  lc::PanelState panel;
  panel.phases.resize(spec.ny);
  panel.omega_max = cfg.omega_max;
  panel.tau = cfg.tau;
  panel.slot_duration = sc.slot_duration;
  Rng init_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> phase(lc::kPhaseEpsilon,
                                               cfg.omega_max - lc::kPhaseEpsilon);
  for (int n = 0; n < panel.columns(); ++n) panel.phases[n] = phase(init_rng);

  const int run = static_cast<int>(seed);
  std::vector<metrics::MetricRow> rows;
  rows.reserve(cfg.eval_steps);
  while (!stream.done()) {
    const scene::Snapshot snap = stream.next();
    baselines::ControlDecision d =
        controller == "optimal"
            ? baselines::optimal_controller(snap, spec, sc.slot_duration,
                                            cfg.optimal_per_element)
            : baselines::realistic_controller(snap, panel, spec);
    rows.push_back(
        make_row(snap, d.element_phases, d.timing, spec, budget, controller, run));
  }
  return rows;
}

std::vector<metrics::MetricRow> run_policy_episode(const ExperimentConfig& cfg,
                                                   const agent::DdpgAgent& agent,
                                                   uint64_t seed) {
  env::RisEnv env = cfg.make_env(cfg.eval_steps);
  Eigen::VectorXd s = env.reset(seed);
  const int run = static_cast<int>(seed);
  std::vector<metrics::MetricRow> rows;
  rows.reserve(cfg.eval_steps);
  for (int i = 0; i < cfg.eval_steps; ++i) {
    env::StepResult res = env.step(agent.act(s));
    res.row.run = run;
    rows.push_back(std::move(res.row));
    if (res.done) break;
    s = res.state;
  }
  return rows;
}

// Runs fn(i) for i in [0, n) on a small worker pool; first exception wins.
void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = worker_count(n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(n);
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<metrics::AngleAggregate> aggregate_rows(
    const ExperimentConfig& cfg, const std::vector<metrics::MetricRow>& rows) {
  scene::SceneConfig sc = cfg.scene;
  sc.slot_duration = cfg.slot_ms * 1e-3;
  const scene::Trajectory traj = scene::build_trajectory(sc, cfg.eval_steps);

  // Arrival slot = the slot closest to the labelled waypoint within each
  // ping-pong pass; only those slots enter the per-angle means.
  std::map<double, Eigen::Vector3d> waypoint_of;
  for (size_t k = 0; k < sc.waypoint_angles_deg.size(); ++k)
    waypoint_of[sc.waypoint_angles_deg[k]] = sc.waypoint(static_cast<int>(k));

  std::map<std::pair<int, double>, std::pair<int, double>> best;  // (pass,label)->(slot,dist)
  for (size_t i = 0; i < traj.positions.size(); ++i) {
    const double label = traj.angle_label_deg[i];
    const double dist = (traj.positions[i] - waypoint_of.at(label)).norm();
    auto [it, inserted] =
        best.try_emplace({traj.pass_index[i], label}, static_cast<int>(i), dist);
    if (!inserted && dist < it->second.second)
      it->second = {static_cast<int>(i), dist};
  }
  std::map<int, double> arrival;  // slot -> angle label
  for (const auto& [key, val] : best) arrival[val.first] = key.second;

  struct Acc {
    double p_r = 0, snr = 0, tc = 0, tk = 0, rate = 0;
    long n = 0;
  };
  std::map<std::pair<std::string, double>, Acc> groups;
  for (const auto& r : rows) {
    auto it = arrival.find(r.slot);
    if (it == arrival.end()) continue;
    Acc& a = groups[{r.controller, it->second}];
    a.p_r += r.p_r_dbw;
    a.snr += r.snr_db;
    a.tc += r.t_c_ms;
    a.tk += r.t_k_ms;
    a.rate += r.rate_mbps;
    ++a.n;
  }

  std::vector<metrics::AngleAggregate> out;
  out.reserve(groups.size());
  for (const auto& [key, a] : groups) {
    metrics::AngleAggregate g;
    g.controller = key.first;
    g.angle_deg = key.second;
    g.mean_p_r_dbw = a.p_r / a.n;
    g.mean_snr_db = a.snr / a.n;
    g.mean_t_c_ms = a.tc / a.n;
    g.mean_t_k_ms = a.tk / a.n;
    g.mean_rate_mbps = a.rate / a.n;
    g.count = a.n;
    out.push_back(std::move(g));
  }
  return out;
}

EvalResult run_eval(const ExperimentConfig& cfg, const std::string& controller,
                    const std::vector<uint64_t>& seeds) {
  if (controller != "optimal" && controller != "realistic" && controller != "ddpg")
    throw ConfigError("unknown controller: " + controller);
  if (seeds.empty()) throw ConfigError("run_eval: no seeds");

  std::unique_ptr<agent::DdpgAgent> agent;
  if (controller == "ddpg") {
    if (cfg.checkpoint.empty())
      throw ConfigError("run.checkpoint is required to evaluate the ddpg controller");
    agent = std::move(agent::load_checkpoint(cfg.checkpoint).agent);
  }

  std::vector<uint64_t> ordered = seeds;
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  std::vector<std::vector<metrics::MetricRow>> per_seed(ordered.size());
  parallel_for(static_cast<int>(ordered.size()), [&](int i) {
    per_seed[i] = controller == "ddpg"
                      ? run_policy_episode(cfg, *agent, ordered[i])
                      : run_baseline_episode(cfg, controller, ordered[i]);
  });

  EvalResult result;
  for (auto& chunk : per_seed)
    result.rows.insert(result.rows.end(), std::make_move_iterator(chunk.begin()),
                       std::make_move_iterator(chunk.end()));
  result.aggregates = aggregate_rows(cfg, result.rows);
  return result;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::string& axis) {
  std::vector<std::pair<std::string, ExperimentConfig>> points;
  if (axis == "speed") {
    for (double v : cfg.sweep_speeds) {
      ExperimentConfig c = cfg;
      c.scene.speed = v;
      points.emplace_back(fmt_double(v), std::move(c));
    }
  } else if (axis == "beta") {
    for (const auto& [b1, b2] : cfg.sweep_betas) {
      ExperimentConfig c = cfg;
      c.reward.beta1 = b1;
      c.reward.beta2 = b2;
      points.emplace_back(fmt_double(b1) + ":" + fmt_double(b2), std::move(c));
    }
  } else {
    throw ConfigError("sweep axis must be 'speed' or 'beta'");
  }

  std::vector<std::string> controllers{"optimal", "realistic"};
  if (!cfg.checkpoint.empty()) controllers.push_back("ddpg");

  const char* metric_names[] = {"p_r_dbw", "snr_db", "t_c_ms", "t_k_ms", "rate_mbps"};
  std::vector<SweepRow> table;
  for (const auto& [value, point] : points) {
    for (const auto& ctrl : controllers) {
      const EvalResult res = run_eval(point, ctrl, point.seeds);
      double sums[5] = {};
      for (const auto& r : res.rows) {
        sums[0] += r.p_r_dbw;
        sums[1] += r.snr_db;
        sums[2] += r.t_c_ms;
        sums[3] += r.t_k_ms;
        sums[4] += r.rate_mbps;
      }
      const double n = static_cast<double>(res.rows.size());
      for (int m = 0; m < 5; ++m)
        table.push_back({axis, value, ctrl, metric_names[m], sums[m] / n});
    }
  }
  return table;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "axis,value,controller,metric,mean\n";
  for (const auto& r : rows) {
    out += r.axis;
    out += ',';
    out += r.value;
    out += ',';
    out += r.controller;
    out += ',';
    out += r.metric;
    out += ',';
    out += fmt_double(r.mean);
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace

void emit_outputs(const ExperimentConfig& cfg, const EvalResult& result,
                  const std::string& out_dir, const std::string& format) {
  if (format != "csv" && format != "plotdata")
    throw ConfigError("format must be 'csv' or 'plotdata'");
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  std::vector<metrics::MetricRow> rows = result.rows;
  std::stable_sort(rows.begin(), rows.end(),
                   [](const metrics::MetricRow& a, const metrics::MetricRow& b) {
                     return std::tie(a.controller, a.run, a.slot) <
                            std::tie(b.controller, b.run, b.slot);
                   });
  write_file(dir / "metrics.csv", metrics::to_csv(rows));
  write_file(dir / "aggregates.csv", metrics::aggregates_to_csv(result.aggregates));

  std::map<std::string, long> runs_per_controller;
  std::map<std::string, std::map<int, bool>> seen;
  for (const auto& r : rows) seen[r.controller][r.run] = true;
  std::string manifest = "config_hash " + cfg.hash() + "\n";
  manifest += "rows " + std::to_string(rows.size()) + "\n";
  for (const auto& [ctrl, runs] : seen)
    manifest += "controller " + ctrl + " runs " + std::to_string(runs.size()) + "\n";
  write_file(dir / "manifest.txt", manifest);

  if (format == "plotdata") {
    struct Pick {
      const char* name;
      double metrics::AngleAggregate::* field;
    };
    const Pick picks[] = {
        {"p_r_dbw", &metrics::AngleAggregate::mean_p_r_dbw},
        {"snr_db", &metrics::AngleAggregate::mean_snr_db},
        {"t_c_ms", &metrics::AngleAggregate::mean_t_c_ms},
        {"t_k_ms", &metrics::AngleAggregate::mean_t_k_ms},
        {"rate_mbps", &metrics::AngleAggregate::mean_rate_mbps},
    };
    for (const auto& pick : picks) {
      std::string text = "angle_deg,controller,value\n";
      for (const auto& g : result.aggregates) {
        text += fmt_double(g.angle_deg);
        text += ',';
        text += g.controller;
        text += ',';
        text += fmt_double(g.*pick.field);
        text += '\n';
      }
      write_file(dir / (std::string("plot_") + pick.name + ".csv"), text);
    }
  }
}

}  // namespace lcris::harness
