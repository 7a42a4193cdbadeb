#include "lcris/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace lcris::harness {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const int i = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': bad boolean '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v)) out.push_back(to_int(key, item));
  return out;
}

// "A..B" inclusive range, or a comma list.
std::vector<uint64_t> to_seeds(const std::string& key, const std::string& v) {
  const auto dots = v.find("..");
  std::vector<uint64_t> out;
  if (dots != std::string::npos) {
    const long a = to_int(key, trim(v.substr(0, dots)));
    const long b = to_int(key, trim(v.substr(dots + 2)));
    if (a < 0 || b < a) throw ConfigError("config key '" + key + "': bad seed range");
    for (long s = a; s <= b; ++s) out.push_back(static_cast<uint64_t>(s));
    return out;
  }
  for (const auto& item : split_list(v)) {
    const int s = to_int(key, item);
    if (s < 0) throw ConfigError("config key '" + key + "': negative seed");
    out.push_back(static_cast<uint64_t>(s));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty seed list");
  return out;
}

// "b1:b2,b1:b2"
std::vector<std::pair<double, double>> to_beta_pairs(const std::string& key,
                                                     const std::string& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split_list(v)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config key '" + key + "': expected b1:b2 pairs");
    out.emplace_back(to_double(key, trim(item.substr(0, colon))),
                     to_double(key, trim(item.substr(colon + 1))));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general,
                                 std::numeric_limits<double>::max_digits10);
  return std::string(buf, res.ptr);
}

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

std::string fmt(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string fmt_seeds(const std::vector<uint64_t>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string fmt_betas(const std::vector<std::pair<double, double>>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i].first) + ':' + fmt(v[i].second);
  }
  return out;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  seeds.reserve(350);
  for (uint64_t s = 0; s < 350; ++s) seeds.push_back(s);
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"scene.room",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const auto d = to_doubles(k, v);
         if (d.size() != 3) throw ConfigError(k + ": expected 3 values");
         c.scene.room = {d[0], d[1], d[2]};
       }},
      {"scene.ap",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const auto d = to_doubles(k, v);
         if (d.size() != 3) throw ConfigError(k + ": expected 3 values");
         c.scene.ap_pos = {d[0], d[1], d[2]};
       }},
      {"scene.ris",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const auto d = to_doubles(k, v);
         if (d.size() != 3) throw ConfigError(k + ": expected 3 values");
         c.scene.ris_pos = {d[0], d[1], d[2]};
       }},
      {"scene.node_height",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.scene.node_height = to_double(k, v);
       }},
      {"scene.waypoint_angles_deg",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.scene.waypoint_angles_deg = to_doubles(k, v);
       }},
      {"scene.waypoint_radius_m",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.scene.waypoint_radius = to_double(k, v);
       }},
      {"scene.speed_mps",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.scene.speed = to_double(k, v);
       }},
      {"channel.wavelength_m",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.wavelength = to_double(k, v);
       }},
      {"channel.spacing_factor",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.spacing_factor = to_double(k, v);
       }},
      {"channel.columns",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.columns = to_int(k, v);
       }},
      {"channel.rows",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.rows = to_int(k, v);
       }},
      {"channel.pt_dbw",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pt_dbw = to_double(k, v);
       }},
      {"channel.noise_dbw",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.noise_dbw = to_double(k, v);
       }},
      {"channel.bandwidth_hz",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.bandwidth_hz = to_double(k, v);
       }},
      {"channel.k_au",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.channel.k_au = to_double(k, v);
       }},
      {"channel.k_ar",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.channel.k_ar = to_double(k, v);
       }},
      {"channel.k_ru",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.channel.k_ru = to_double(k, v);
       }},
      {"channel.sigma2_nlos",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.channel.sigma2_nlos = to_double(k, v);
       }},
      {"channel.sigma2_nlos_au",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.channel.sigma2_nlos_au = to_double(k, v);
       }},
      {"channel.nlos_corr",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.channel.nlos_corr = to_double(k, v);
       }},
      {"lc.tau_fall_s",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.tau.fall = to_double(k, v);
       }},
      {"lc.tau_rise_s",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.tau.rise = to_double(k, v);
       }},
      {"lc.omega_max",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.omega_max = to_double(k, v);
       }},
      {"lc.slot_ms",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.slot_ms = to_double(k, v);
       }},
      {"reward.beta1",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.reward.beta1 = to_double(k, v);
       }},
      {"reward.beta2",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.reward.beta2 = to_double(k, v);
       }},
      {"reward.snr_scale",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "db")
           c.reward.snr_scale = env::SnrScale::Db;
         else if (v == "linear")
           c.reward.snr_scale = env::SnrScale::Linear;
         else
           throw ConfigError(k + ": expected db|linear");
       }},
      {"reward.time_scale",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "ms")
           c.reward.time_scale = env::TimeScale::Ms;
         else if (v == "s")
           c.reward.time_scale = env::TimeScale::S;
         else
           throw ConfigError(k + ": expected ms|s");
       }},
      {"env.reduced_state",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.env_opts.reduced_state = to_bool(k, v);
       }},
      {"agent.actor_lr",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.actor_lr = to_double(k, v);
       }},
      {"agent.critic_lr",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.critic_lr = to_double(k, v);
       }},
      {"agent.target_rate",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.target_rate = to_double(k, v);
       }},
      {"agent.discount",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.discount = to_double(k, v);
       }},
      {"agent.buffer_capacity",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.buffer_capacity = to_int(k, v);
       }},
      {"agent.batch",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.batch = to_int(k, v);
       }},
      {"agent.episodes",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.episodes = to_int(k, v);
       }},
      {"agent.steps_per_episode",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.steps_per_episode = to_int(k, v);
       }},
      {"agent.hidden",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.hidden = to_ints(k, v);
       }},
      {"agent.noise_start",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.noise_start = to_double(k, v);
       }},
      {"agent.noise_end",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.noise_end = to_double(k, v);
       }},
      {"agent.noise_decay_fraction",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.noise_decay_fraction = to_double(k, v);
       }},
      {"agent.warmup_batches",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ddpg.warmup_batches = to_int(k, v);
       }},
      {"run.seeds",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.seeds = to_seeds(k, v);
       }},
      {"run.eval_steps",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.eval_steps = to_int(k, v);
       }},
      {"run.out_dir",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.out_dir = v;
       }},
      {"run.optimal_per_element",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.optimal_per_element = to_bool(k, v);
       }},
      {"run.checkpoint",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.checkpoint = v;
       }},
      {"sweep.speeds",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sweep_speeds = to_doubles(k, v);
       }},
      {"sweep.betas",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sweep_betas = to_beta_pairs(k, v);
       }},
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("unknown config key '" + key + "' (line " +
                        std::to_string(lineno) + ")");
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

channel::ArraySpec ExperimentConfig::array_spec() const {
  channel::ArraySpec spec;
  spec.ny = columns;
  spec.nz = rows;
  spec.lambda = wavelength;
  spec.dy = spacing_factor * wavelength;
  spec.dz = spacing_factor * wavelength;
  return spec;
}

env::LinkBudget ExperimentConfig::budget() const {
  env::LinkBudget b;
  b.pt_w = db_to_linear(pt_dbw);
  b.noise_w = db_to_linear(noise_dbw);
  b.bandwidth_hz = bandwidth_hz;
  return b;
}

env::RisEnv ExperimentConfig::make_env(int episode_steps) const {
  scene::SceneConfig sc = scene;
  sc.slot_duration = slot_ms * 1e-3;
  return env::RisEnv(sc, array_spec(), channel, tau, omega_max, budget(), reward,
                     env_opts, episode_steps);
}

void ExperimentConfig::validate() const {
  scene::SceneConfig sc = scene;
  sc.slot_duration = slot_ms * 1e-3;
  sc.validate();
  array_spec().validate();
  channel.validate();
  budget().validate();
  tau.validate();
  reward.validate();
  ddpg.validate();
  if (!(omega_max > 2 * lc::kPhaseEpsilon)) throw ConfigError("omega_max too small");
  if (eval_steps <= 0) throw ConfigError("run.eval_steps must be > 0");
  if (seeds.empty()) throw ConfigError("run.seeds must not be empty");
  if (sweep_speeds.empty()) throw ConfigError("sweep.speeds must not be empty");
  if (sweep_betas.empty()) throw ConfigError("sweep.betas must not be empty");
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["scene.room"] = fmt(std::vector<double>{scene.room.x(), scene.room.y(), scene.room.z()});
  kv["scene.ap"] = fmt(std::vector<double>{scene.ap_pos.x(), scene.ap_pos.y(), scene.ap_pos.z()});
  kv["scene.ris"] = fmt(std::vector<double>{scene.ris_pos.x(), scene.ris_pos.y(), scene.ris_pos.z()});
  kv["scene.node_height"] = fmt(scene.node_height);
  kv["scene.waypoint_angles_deg"] = fmt(scene.waypoint_angles_deg);
  kv["scene.waypoint_radius_m"] = fmt(scene.waypoint_radius);
  kv["scene.speed_mps"] = fmt(scene.speed);
  kv["channel.wavelength_m"] = fmt(wavelength);
  kv["channel.spacing_factor"] = fmt(spacing_factor);
  kv["channel.columns"] = std::to_string(columns);
  kv["channel.rows"] = std::to_string(rows);
  kv["channel.pt_dbw"] = fmt(pt_dbw);
  kv["channel.noise_dbw"] = fmt(noise_dbw);
  kv["channel.bandwidth_hz"] = fmt(bandwidth_hz);
  kv["channel.k_au"] = fmt(channel.k_au);
  kv["channel.k_ar"] = fmt(channel.k_ar);
  kv["channel.k_ru"] = fmt(channel.k_ru);
  kv["channel.sigma2_nlos"] = fmt(channel.sigma2_nlos);
  kv["channel.sigma2_nlos_au"] = fmt(channel.sigma2_nlos_au);
  kv["channel.nlos_corr"] = fmt(channel.nlos_corr);
  kv["lc.tau_fall_s"] = fmt(tau.fall);
  kv["lc.tau_rise_s"] = fmt(tau.rise);
  kv["lc.omega_max"] = fmt(omega_max);
  kv["lc.slot_ms"] = fmt(slot_ms);
  kv["reward.beta1"] = fmt(reward.beta1);
  kv["reward.beta2"] = fmt(reward.beta2);
  kv["reward.snr_scale"] = reward.snr_scale == env::SnrScale::Db ? "db" : "linear";
  kv["reward.time_scale"] = reward.time_scale == env::TimeScale::Ms ? "ms" : "s";
  kv["env.reduced_state"] = env_opts.reduced_state ? "true" : "false";
  kv["agent.actor_lr"] = fmt(ddpg.actor_lr);
  kv["agent.critic_lr"] = fmt(ddpg.critic_lr);
  kv["agent.target_rate"] = fmt(ddpg.target_rate);
  kv["agent.discount"] = fmt(ddpg.discount);
  kv["agent.buffer_capacity"] = std::to_string(ddpg.buffer_capacity);
  kv["agent.batch"] = std::to_string(ddpg.batch);
  kv["agent.episodes"] = std::to_string(ddpg.episodes);
  kv["agent.steps_per_episode"] = std::to_string(ddpg.steps_per_episode);
  kv["agent.hidden"] = fmt(ddpg.hidden);
  kv["agent.noise_start"] = fmt(ddpg.noise_start);
  kv["agent.noise_end"] = fmt(ddpg.noise_end);
  kv["agent.noise_decay_fraction"] = fmt(ddpg.noise_decay_fraction);
  kv["agent.warmup_batches"] = std::to_string(ddpg.warmup_batches);
  kv["run.seeds"] = fmt_seeds(seeds);
  kv["run.eval_steps"] = std::to_string(eval_steps);
  kv["run.out_dir"] = out_dir;
  kv["run.optimal_per_element"] = optimal_per_element ? "true" : "false";
  kv["run.checkpoint"] = checkpoint;
  kv["sweep.speeds"] = fmt(sweep_speeds);
  kv["sweep.betas"] = fmt_betas(sweep_betas);

  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::string ExperimentConfig::hash() const {
  // FNV-1a 64.
  uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lcris::harness
