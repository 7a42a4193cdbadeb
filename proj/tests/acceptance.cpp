// End-to-end acceptance checks. Each numbered check prints one PASS/FAIL
// line; the binary exits non-zero if any fail. Training-based checks use
// deliberately small budgets, so their hyperparameters differ from the
// reference defaults; the asserted tolerances do not.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lcris/baselines.hpp"
#include "lcris/ddpg.hpp"
#include "lcris/harness.hpp"

using namespace lcris;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << name;
  if (!detail.empty()) std::cout << " [" << detail << "]";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- 1: closed-form config time vs the relaxation trajectory ---------------

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const lc::LcTimeConstants tau;
  Rng rng(1);
  std::uniform_real_distribution<double> phase(lc::kPhaseEpsilon,
                                               kTwoPi - lc::kPhaseEpsilon);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double w0 = phase(rng), wd = phase(rng);
    const double t = lc::element_config_time(w0, wd, kTwoPi, tau);
    const double at[] = {t};
    const Eigen::VectorXd traj = lc::transition_trajectory(w0, wd, tau, kTwoPi, at);
    worst = std::max(worst, std::abs(traj[0] - wd));
  }
  const double secs = seconds_since(t0);
  char detail[128];
  std::snprintf(detail, sizeof detail, "max err %.3g rad, %.2f s", worst, secs);
  report(1, "closed-form transition time matches the trajectory",
         worst < 1e-9 && secs < 5.0, detail);
}

// --- 2: co-phasing beats an exhaustive quantized search --------------------

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2);

  // exhaustive 16-level search over 4 elements
  channel::ArraySpec small;
  small.ny = 4;
  small.nz = 1;
  bool exhaustive_ok = true;
  for (int draw = 0; draw < 1000 && exhaustive_ok; ++draw) {
    channel::LinkChannel au, ar, ru;
    au.h = channel::sample_nlos(1, 1.0, rng);
    ar.h = channel::sample_nlos(4, 1.0, rng);
    ru.h = channel::sample_nlos(4, 1.0, rng);

    const Eigen::VectorXd w = env::optimal_phases(au, ar, ru);
    const double best =
        std::abs(au.h[0] + channel::effective_channel(ar, ru, w, small));

    // per-element contributions at each of the 16 phase levels
    std::complex<double> lut[4][16];
    for (int n = 0; n < 4; ++n)
      for (int q = 0; q < 16; ++q)
        lut[n][q] = ar.h[n] * ru.h[n] * std::polar(1.0, q * kTwoPi / 16.0);
    const double e = channel::eta(small);
    for (int code = 0; code < 65536; ++code) {
      const std::complex<double> sum = lut[0][code & 15] + lut[1][(code >> 4) & 15] +
                                       lut[2][(code >> 8) & 15] +
                                       lut[3][(code >> 12) & 15];
      if (std::abs(au.h[0] + e * sum) > best * (1.0 + 1e-12)) {
        exhaustive_ok = false;
        break;
      }
    }
  }

  // amplitude-sum identity at full panel size
  channel::ArraySpec full;
  channel::LinkChannel au, ar, ru;
  au.h = channel::sample_nlos(1, 1.0, rng);
  ar.h = channel::sample_nlos(full.size(), 1.0, rng);
  ru.h = channel::sample_nlos(full.size(), 1.0, rng);
  const Eigen::VectorXd w = env::optimal_phases(au, ar, ru);
  double amp = 0.0;
  for (int n = 0; n < full.size(); ++n) amp += std::abs(ar.h[n]) * std::abs(ru.h[n]);
  const double want = std::abs(au.h[0]) + channel::eta(full) * amp;
  const double got = std::abs(au.h[0] + channel::effective_channel(ar, ru, w, full));
  const bool identity_ok = std::abs(got - want) / want < 1e-9;

  const double secs = seconds_since(t0);
  char detail[128];
  std::snprintf(detail, sizeof detail, "identity rel err %.3g, %.2f s",
                std::abs(got - want) / want, secs);
  report(2, "co-phasing is optimal under exhaustive quantized search",
         exhaustive_ok && identity_ok && secs < 30.0, detail);
}

// --- 3: analytic gradients vs central finite differences -------------------

double fd_worst_mlp(agent::Mlp& net, const Eigen::MatrixXd& x,
                    const Eigen::MatrixXd& wout) {
  agent::Mlp::Cache cache;
  net.forward(x, cache);
  auto grads = net.zero_grads();
  net.backward(wout, cache, grads);

  const double h = 1e-6;
  double worst = 0.0;
  auto loss = [&] { return net.forward(x).cwiseProduct(wout).sum(); };
  for (size_t l = 0; l < net.layers().size(); ++l) {
    for (Eigen::Index i = 0; i < net.layers()[l].w.size(); ++i) {
      double& p = net.layers()[l].w(i);
      const double keep = p;
      p = keep + h;
      const double up = loss();
      p = keep - h;
      const double dn = loss();
      p = keep;
      const double num = (up - dn) / (2 * h);
      worst = std::max(worst,
                       std::abs(grads[l].w(i) - num) / std::max(1.0, std::abs(num)));
    }
  }
  return worst;
}

void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(3);
  double worst = 0.0;

  // critic regression loss: L = sum_b (q_b - y_b)^2
  agent::Critic critic(8, 3, {32, 32}, rng);
  const Eigen::MatrixXd s = Eigen::MatrixXd::Random(8, 6);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 6);
  const Eigen::VectorXd y = Eigen::VectorXd::Random(6);
  {
    agent::Critic::Cache cache;
    const Eigen::VectorXd q = critic.forward(s, a, cache);
    agent::Critic::Grads grads = critic.zero_grads();
    critic.backward(2.0 * (q - y), cache, grads);

    const double h = 1e-6;
    auto loss = [&] { return (critic.forward(s, a) - y).squaredNorm(); };
    auto check_net = [&](agent::Mlp& net, const std::vector<agent::LayerGrad>& g) {
      for (size_t l = 0; l < net.layers().size(); ++l)
        for (Eigen::Index i = 0; i < net.layers()[l].w.size(); ++i) {
          double& p = net.layers()[l].w(i);
          const double keep = p;
          p = keep + h;
          const double up = loss();
          p = keep - h;
          const double dn = loss();
          p = keep;
          const double num = (up - dn) / (2 * h);
          worst = std::max(worst,
                           std::abs(g[l].w(i) - num) / std::max(1.0, std::abs(num)));
        }
    };
    check_net(critic.trunk(), grads.trunk);
    check_net(critic.head(), grads.head);
  }

  // actor objective through a frozen critic: J = mean_b Q(s_b, mu(s_b))
  agent::Mlp actor({8, 32, 32, 3},
                   {agent::Activation::ReLU, agent::Activation::ReLU,
                    agent::Activation::Tanh},
                   rng, 1e-1);
  {
    const int b = 6;
    agent::Mlp::Cache acache;
    agent::Critic::Cache ccache;
    const Eigen::MatrixXd mu = actor.forward(s, acache);
    critic.forward(s, mu, ccache);
    agent::Critic::Grads cgrads = critic.zero_grads();
    const Eigen::MatrixXd da =
        critic.backward(Eigen::VectorXd::Constant(b, 1.0 / b), ccache, cgrads);
    auto agrads = actor.zero_grads();
    actor.backward(da, acache, agrads);

    const double h = 1e-6;
    auto objective = [&] { return critic.forward(s, actor.forward(s)).mean(); };
    for (size_t l = 0; l < actor.layers().size(); ++l)
      for (Eigen::Index i = 0; i < actor.layers()[l].w.size(); ++i) {
        double& p = actor.layers()[l].w(i);
        const double keep = p;
        p = keep + h;
        const double up = objective();
        p = keep - h;
        const double dn = objective();
        p = keep;
        const double num = (up - dn) / (2 * h);
        worst = std::max(worst, std::abs(agrads[l].w(i) - num) /
                                    std::max(1.0, std::abs(num)));
      }
  }

  // a plain deep net for completeness
  agent::Mlp net({5, 32, 32, 32, 2},
                 {agent::Activation::ReLU, agent::Activation::Tanh,
                  agent::Activation::ReLU, agent::Activation::Identity},
                 rng);
  worst = std::max(worst, fd_worst_mlp(net, Eigen::MatrixXd::Random(5, 4),
                                       Eigen::MatrixXd::Random(2, 4)));

  const double secs = seconds_since(t0);
  char detail[128];
  std::snprintf(detail, sizeof detail, "max rel err %.3g, %.2f s", worst, secs);
  report(3, "analytic gradients match finite differences", worst < 1e-5 && secs < 60.0,
         detail);
}

// --- 4: actor convergence on a quadratic bowl ------------------------------

void criterion_4() {
  Rng rng(4);
  const int sdim = 6, adim = 4, batch = 16;
  agent::Mlp actor({sdim, 32, 32, adim},
                   {agent::Activation::ReLU, agent::Activation::ReLU,
                    agent::Activation::Tanh},
                   rng, 1e-3);
  agent::Adam opt(actor);

  Eigen::VectorXd target(adim);
  target << 0.3, -0.5, 0.7, -0.1;
  const Eigen::MatrixXd s = Eigen::MatrixXd::Random(sdim, batch);

  double worst = 1e9;
  int updates = 0;
  for (; updates < 5000; ++updates) {
    agent::Mlp::Cache cache;
    const Eigen::MatrixXd a = actor.forward(s, cache);
    // Q = -||a - a*||^2, ascent direction dQ/da = -2 (a - a*)
    const Eigen::MatrixXd dq_da = -2.0 * (a.colwise() - target);
    auto grads = actor.zero_grads();
    actor.backward(-dq_da / batch, cache, grads);  // minimize -Q
    opt.step(actor, grads, 1e-3);

    worst = (actor.forward(s).colwise() - target).cwiseAbs().maxCoeff();
    if (worst < 1e-2) break;
  }
  char detail[128];
  std::snprintf(detail, sizeof detail, "%d updates, max |a - a*| %.3g", updates + 1,
                worst);
  report(4, "actor converges on a quadratic critic", worst < 1e-2, detail);
}

// --- 5: learning beats 90% of the per-slot optimum when nothing moves ------

harness::ExperimentConfig desk_training_config() {
  harness::ExperimentConfig cfg;
  cfg.env_opts.reduced_state = true;
  cfg.ddpg.hidden = {64, 64};
  cfg.ddpg.actor_lr = 1e-3;
  cfg.ddpg.critic_lr = 1e-3;
  cfg.ddpg.target_rate = 0.05;
  // The per-slot reward depends only on the current state and action, so a
  // near-myopic discount turns the problem into a learnable contextual bandit
  // at these small budgets.
  cfg.ddpg.discount = 0.05;
  cfg.ddpg.batch = 64;
  cfg.ddpg.buffer_capacity = 50000;
  cfg.ddpg.warmup_batches = 2;
  return cfg;
}

void criterion_5() {
  harness::ExperimentConfig cfg = desk_training_config();
  // Small panel (action dim 3) and a strongly LoS geometry keep the task
  // learnable within the reduced budget.
  cfg.columns = 3;
  cfg.rows = 40;
  cfg.scene.waypoint_angles_deg = {5.0};
  cfg.channel.sigma2_nlos_au = 0.0;  // RIS-only link
  cfg.channel.k_ar = 1e4;
  cfg.channel.k_ru = 1e4;
  cfg.reward.beta1 = 1.0;
  cfg.reward.beta2 = 0.0;
  cfg.ddpg.episodes = 10;
  cfg.ddpg.steps_per_episode = 4000;

  env::RisEnv env = cfg.make_env(cfg.ddpg.steps_per_episode);
  agent::DdpgAgent ag(env.state_dim(), env.action_dim(), cfg.ddpg, 5);
  agent::ReplayBuffer buf(static_cast<size_t>(cfg.ddpg.buffer_capacity));
  agent::train(env, ag, buf, 100);

  // frozen policy on a fresh episode vs the per-slot optimum on the same draws
  const uint64_t eval_seed = 12345;
  const int eval_slots = 100;
  env::RisEnv eval_env = cfg.make_env(eval_slots);
  Eigen::VectorXd s = eval_env.reset(eval_seed);
  double policy_snr = 0.0;
  for (int i = 0; i < eval_slots; ++i) {
    const env::StepResult r = eval_env.step(ag.act(s));
    policy_snr += db_to_linear(r.row.snr_db);
    s = r.state;
  }

  scene::SceneConfig sc = cfg.scene;
  sc.slot_duration = cfg.slot_ms * 1e-3;
  scene::SnapshotStream stream(sc, cfg.array_spec(), cfg.channel, eval_slots,
                               eval_seed);
  const env::LinkBudget budget = cfg.budget();
  double opt_snr = 0.0;
  while (!stream.done()) {
    const scene::Snapshot snap = stream.next();
    const baselines::ControlDecision d =
        baselines::optimal_controller(snap, cfg.array_spec(), sc.slot_duration);
    const std::complex<double> h_eff = channel::effective_channel(
        snap.h_ar, snap.h_ru, d.element_phases, cfg.array_spec());
    opt_snr += channel::snr(snap.h_au.h[0], h_eff, budget.pt_w, budget.noise_w);
  }

  const double ratio = policy_snr / opt_snr;
  char detail[64];
  std::snprintf(detail, sizeof detail, "snr ratio %.4f", ratio);
  report(5, "stationary-scene policy reaches 90% of the optimum", ratio >= 0.90,
         detail);
}

// --- 6: serving-time band of the relaxation-limited baseline ---------------

void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  harness::ExperimentConfig cfg;
  cfg.eval_steps = 200;
  // Blocked direct path and slowly varying diffuse scatter: the per-slot
  // column targets then drift with the user's geometry instead of jumping,
  // which is the regime where relaxation-limited tuning partially completes.
  cfg.channel.sigma2_nlos_au = 0.0;
  cfg.channel.nlos_corr = 0.99;
  std::vector<uint64_t> seeds(350);
  for (size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;

  const harness::EvalResult res = harness::run_eval(cfg, "realistic", seeds);
  double tk = 0.0;
  for (const auto& r : res.rows) tk += r.t_k_ms;
  tk /= static_cast<double>(res.rows.size());

  const double secs = seconds_since(t0);
  char detail[64];
  std::snprintf(detail, sizeof detail, "mean t_k %.3f ms, %.1f s", tk, secs);
  report(6, "relaxation-limited serving time sits in [1.9, 3.9] ms",
         tk >= 1.9 && tk <= 3.9 && secs < 600.0, detail);
}

// --- 7 + 8: reward-weight trade-off and speed degradation ------------------

struct TrainedOutcome {
  double mean_tk_ms = 0.0;
  double mean_snr_db = 0.0;
};

harness::ExperimentConfig tradeoff_config(double beta1, double beta2) {
  harness::ExperimentConfig cfg = desk_training_config();
  cfg.columns = 4;
  cfg.rows = 30;
  cfg.channel.sigma2_nlos_au = 1e-6;  // RIS-dominated link budget
  cfg.reward.beta1 = beta1;
  cfg.reward.beta2 = beta2;
  cfg.scene.speed = 1.5;
  cfg.ddpg.episodes = 10;
  cfg.ddpg.steps_per_episode = 3000;
  return cfg;
}

agent::DdpgAgent train_tradeoff_agent(const harness::ExperimentConfig& cfg) {
  env::RisEnv env = cfg.make_env(cfg.ddpg.steps_per_episode);
  agent::DdpgAgent ag(env.state_dim(), env.action_dim(), cfg.ddpg, 21);
  agent::ReplayBuffer buf(static_cast<size_t>(cfg.ddpg.buffer_capacity));
  agent::train(env, ag, buf, 100);
  return ag;
}

TrainedOutcome eval_agent(const harness::ExperimentConfig& cfg,
                          agent::DdpgAgent& ag, double speed) {
  harness::ExperimentConfig ecfg = cfg;
  ecfg.scene.speed = speed;
  TrainedOutcome out;
  int slots = 0;
  for (uint64_t seed : {9000ull, 9001ull, 9002ull}) {
    const int eval_slots = 600;
    env::RisEnv eval_env = ecfg.make_env(eval_slots);
    Eigen::VectorXd s = eval_env.reset(seed);
    for (int i = 0; i < eval_slots; ++i) {
      const env::StepResult r = eval_env.step(ag.act(s));
      out.mean_tk_ms += r.row.t_k_ms;
      out.mean_snr_db += r.row.snr_db;
      s = r.state;
      ++slots;
    }
  }
  out.mean_tk_ms /= slots;
  out.mean_snr_db /= slots;
  return out;
}

void criteria_7_8() {
  const harness::ExperimentConfig serve_cfg = tradeoff_config(0.2, 0.8);
  const harness::ExperimentConfig snr_cfg = tradeoff_config(0.8, 0.2);
  agent::DdpgAgent serve_agent = train_tradeoff_agent(serve_cfg);
  agent::DdpgAgent snr_agent = train_tradeoff_agent(snr_cfg);

  const TrainedOutcome serve = eval_agent(serve_cfg, serve_agent, 1.5);
  const TrainedOutcome snr = eval_agent(snr_cfg, snr_agent, 1.5);

  char d7[128];
  std::snprintf(d7, sizeof d7, "t_k %.2f vs %.2f ms, snr %.2f vs %.2f dB",
                serve.mean_tk_ms, snr.mean_tk_ms, snr.mean_snr_db,
                serve.mean_snr_db);
  report(7, "serving-weighted agents serve longer, snr-weighted agents hear better",
         serve.mean_tk_ms > snr.mean_tk_ms && snr.mean_snr_db > serve.mean_snr_db,
         d7);

  // One serving-weighted policy trained at 1.5 m/s and evaluated frozen at both
  // speeds: staler CSI per slot should cost SNR. A close orbit with slowly
  // varying scatter makes the geometric staleness effect dominate the noise in
  // what the small-budget policy happened to learn.
  harness::ExperimentConfig speed_cfg = tradeoff_config(0.2, 0.8);
  speed_cfg.scene.waypoint_radius = 1.0;
  speed_cfg.channel.nlos_corr = 0.99;
  agent::DdpgAgent speed_agent = train_tradeoff_agent(speed_cfg);
  const TrainedOutcome slow = eval_agent(speed_cfg, speed_agent, 1.5);
  const TrainedOutcome fast = eval_agent(speed_cfg, speed_agent, 3.0);
  char d8[96];
  std::snprintf(d8, sizeof d8, "snr %.2f dB at 1.5 m/s vs %.2f dB at 3 m/s",
                slow.mean_snr_db, fast.mean_snr_db);
  report(8, "faster users degrade snr", slow.mean_snr_db - fast.mean_snr_db > 0.0,
         d8);
}

// --- 9: rate formula exactness for the instantaneous controller ------------

void criterion_9() {
  harness::ExperimentConfig cfg;
  cfg.eval_steps = 200;
  const harness::EvalResult res = harness::run_eval(cfg, "optimal", {0, 1, 2});

  double worst = 0.0;
  for (const auto& r : res.rows) {
    const double snr_lin = db_to_linear(r.snr_db);
    const double want = cfg.bandwidth_hz * std::log2(1.0 + snr_lin) / 1e6;
    worst = std::max(worst, std::abs(r.rate_mbps - want) / want);
    worst = std::max(worst, std::abs(r.t_k_ms - cfg.slot_ms) / cfg.slot_ms);
  }
  char detail[64];
  std::snprintf(detail, sizeof detail, "max rel err %.3g", worst);
  report(9, "full-slot rate equals the Shannon rate", worst < 1e-9, detail);
}

// --- 10: byte-identical repeated evaluations --------------------------------

void criterion_10() {
  harness::ExperimentConfig cfg;
  cfg.columns = 8;
  cfg.rows = 4;
  cfg.eval_steps = 120;
  cfg.seeds = {0, 1, 2, 3};

  auto emit = [&](const char* name) {
    const harness::EvalResult res = harness::run_eval(cfg, "realistic", cfg.seeds);
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    harness::emit_outputs(cfg, res, dir.string(), "csv");
    std::ifstream in(dir / "metrics.csv", std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    fs::remove_all(dir);
    return buf.str();
  };

  setenv("LCRIS_THREADS", "3", 1);
  const std::string a = emit("lcris_acc_a");
  setenv("LCRIS_THREADS", "1", 1);
  const std::string b = emit("lcris_acc_b");
  unsetenv("LCRIS_THREADS");

  report(10, "repeated evaluations are byte-identical", !a.empty() && a == b);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criteria_7_8();
  criterion_9();
  criterion_10();

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(g_failures) + " CRITERIA FAILED")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
