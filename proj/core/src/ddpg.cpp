#include "lcris/ddpg.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace lcris::agent {

void DdpgConfig::validate() const {
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("learning rates must be > 0");
  if (!(discount > 0.0) || discount > 1.0) throw ConfigError("discount must be in (0, 1]");
  if (target_rate < 0.0 || target_rate > 1.0) throw ConfigError("target_rate must be in [0, 1]");
  if (batch <= 0 || buffer_capacity < batch) throw ConfigError("buffer capacity must be >= batch");
  if (episodes < 0 || steps_per_episode <= 0) throw ConfigError("bad episode configuration");
  if (hidden.empty()) throw ConfigError("agent needs at least one hidden layer");
  if (noise_start < 0.0 || noise_end < 0.0 || noise_decay_fraction < 0.0 ||
      noise_decay_fraction > 1.0)
    throw ConfigError("bad exploration noise configuration");
  if (warmup_batches < 1) throw ConfigError("warmup_batches must be >= 1");
}

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
  data_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(int batch, Rng& rng) const {
  if (batch <= 0 || static_cast<size_t>(batch) > size())
    throw std::invalid_argument("ReplayBuffer::sample: bad batch size");
  // Floyd's algorithm: uniform without replacement within the batch.
  std::unordered_set<size_t> chosen;
  std::vector<const Transition*> out;
  out.reserve(static_cast<size_t>(batch));
  const size_t n = size();
  for (size_t i = n - static_cast<size_t>(batch); i < n; ++i) {
    std::uniform_int_distribution<size_t> d(0, i);
    size_t j = d(rng);
    if (chosen.count(j) != 0) j = i;
    chosen.insert(j);
    out.push_back(&data_[j]);
  }
  return out;
}

DdpgAgent::DdpgAgent(int state_dim, int action_dim, DdpgConfig cfg, uint64_t seed)
    : cfg_(std::move(cfg)), state_dim_(state_dim), action_dim_(action_dim) {
  cfg_.validate();
  rng_.seed(seed);
  std::vector<int> dims{state_dim};
  std::vector<Activation> acts;
  for (int h : cfg_.hidden) {
    dims.push_back(h);
    acts.push_back(Activation::ReLU);
  }
  dims.push_back(action_dim);
  acts.push_back(Activation::Tanh);
  actor_ = Mlp(dims, acts, rng_, 1e-3);
  critic_ = Critic(state_dim, action_dim, cfg_.hidden, rng_);
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = Adam(actor_);
  critic_trunk_opt_ = Adam(critic_.trunk());
  critic_head_opt_ = Adam(critic_.head());
}

Eigen::VectorXd DdpgAgent::act(const Eigen::VectorXd& s) const {
  if (s.size() != state_dim_) throw std::invalid_argument("act: state dim mismatch");
  return actor_.forward(s);
}

Eigen::VectorXd DdpgAgent::act_noisy(const Eigen::VectorXd& s, double sigma) {
  Eigen::VectorXd a = act(s);
  std::normal_distribution<double> n(0.0, sigma);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    a[i] = std::clamp(a[i] + n(rng_), -1.0, 1.0);
  return a;
}

Eigen::VectorXd DdpgAgent::random_action() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd a(action_dim_);
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = u(rng_);
  return a;
}

double DdpgAgent::noise_sigma(long global_step, long total_steps) const {
  const double decay_steps = cfg_.noise_decay_fraction * static_cast<double>(total_steps);
  if (decay_steps <= 0.0) return cfg_.noise_end;
  const double f = std::min(1.0, static_cast<double>(global_step) / decay_steps);
  return cfg_.noise_start + f * (cfg_.noise_end - cfg_.noise_start);
}

namespace {

struct BatchMatrices {
  Eigen::MatrixXd s, a, s2;
  Eigen::VectorXd r, not_done;
};

BatchMatrices gather(const std::vector<const Transition*>& batch) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  BatchMatrices m;
  m.s.resize(batch[0]->s.size(), b);
  m.a.resize(batch[0]->a.size(), b);
  m.s2.resize(batch[0]->s2.size(), b);
  m.r.resize(b);
  m.not_done.resize(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    m.s.col(i) = batch[static_cast<size_t>(i)]->s;
    m.a.col(i) = batch[static_cast<size_t>(i)]->a;
    m.s2.col(i) = batch[static_cast<size_t>(i)]->s2;
    m.r[i] = batch[static_cast<size_t>(i)]->r;
    m.not_done[i] = batch[static_cast<size_t>(i)]->done ? 0.0 : 1.0;
  }
  return m;
}

}  // namespace

double DdpgAgent::critic_update(const std::vector<const Transition*>& batch) {
  if (batch.empty()) throw std::invalid_argument("critic_update: empty batch");
  const BatchMatrices m = gather(batch);
  const auto b = static_cast<double>(batch.size());

  const Eigen::MatrixXd a2 = target_actor_.forward(m.s2);
  const Eigen::VectorXd q2 = target_critic_.forward(m.s2, a2);
  const Eigen::VectorXd y = m.r + cfg_.discount * m.not_done.cwiseProduct(q2);

  Critic::Cache cache;
  const Eigen::VectorXd q = critic_.forward(m.s, m.a, cache);
  const Eigen::VectorXd diff = q - y;
  const double loss = diff.squaredNorm() / b;

  Critic::Grads grads = critic_.zero_grads();
  critic_.backward((2.0 / b) * diff, cache, grads);
  critic_trunk_opt_.step(critic_.trunk(), grads.trunk, cfg_.critic_lr);
  critic_head_opt_.step(critic_.head(), grads.head, cfg_.critic_lr);
  return loss;
}

double DdpgAgent::actor_update(const std::vector<const Transition*>& batch) {
  if (batch.empty()) throw std::invalid_argument("actor_update: empty batch");
  const BatchMatrices m = gather(batch);
  const auto b = static_cast<double>(batch.size());

  Mlp::Cache actor_cache;
  const Eigen::MatrixXd a = actor_.forward(m.s, actor_cache);
  Critic::Cache critic_cache;
  const Eigen::VectorXd q = critic_.forward(m.s, a, critic_cache);
  const double objective = q.mean();

  // Ascent on mean Q through the frozen critic; critic grads are discarded.
  Critic::Grads scratch = critic_.zero_grads();
  const Eigen::MatrixXd da = critic_.backward(
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(batch.size()), -1.0 / b),
      critic_cache, scratch);
  std::vector<LayerGrad> grads = actor_.zero_grads();
  actor_.backward(da, actor_cache, grads);
  actor_opt_.step(actor_, grads, cfg_.actor_lr);
  return objective;
}

void DdpgAgent::soft_update_targets() {
  soft_update(target_actor_, actor_, cfg_.target_rate);
  soft_update(target_critic_, critic_, cfg_.target_rate);
}

TrainResult train(env::RisEnv& env, DdpgAgent& agent, ReplayBuffer& buffer,
                  uint64_t seed, long start_episode,
                  const std::function<void(int, double)>& on_episode) {
  const DdpgConfig& cfg = agent.config();
  const long total_steps = static_cast<long>(cfg.episodes) * cfg.steps_per_episode;
  const size_t warmup =
      static_cast<size_t>(cfg.warmup_batches) * static_cast<size_t>(cfg.batch);
  TrainResult res;
  for (int ep = static_cast<int>(start_episode); ep < cfg.episodes; ++ep) {
    Eigen::VectorXd s = env.reset(seed + static_cast<uint64_t>(ep));
    double ep_reward = 0.0;
    for (int step = 0; step < cfg.steps_per_episode; ++step) {
      const long gstep = static_cast<long>(ep) * cfg.steps_per_episode + step;
      const Eigen::VectorXd a =
          buffer.size() < warmup
              ? agent.random_action()
              : agent.act_noisy(s, agent.noise_sigma(gstep, total_steps));
      env::StepResult sr = env.step(a);
      buffer.push({s, a, sr.reward, sr.state, sr.done});
      ep_reward += sr.reward;
      s = sr.state;
      if (buffer.size() >= warmup) {
        const auto batch = buffer.sample(cfg.batch, agent.rng());
        agent.critic_update(batch);
        agent.actor_update(batch);
        agent.soft_update_targets();
      }
      ++res.total_steps;
      if (sr.done) break;
    }
    res.episode_rewards.push_back(ep_reward);
    if (on_episode) on_episode(ep, ep_reward);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Checkpoint container: versioned binary, shape headers per tensor.

namespace {

constexpr char kMagic[] = "LCRISCKPT1";

void put_i64(std::ostream& out, int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
int64_t get_i64(std::istream& in) {
  int64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
double get_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  put_i64(out, m.rows());
  put_i64(out, m.cols());
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double)) * m.size());
}
Eigen::MatrixXd get_matrix(std::istream& in) {
  const int64_t rows = get_i64(in), cols = get_i64(in);
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double)) * m.size());
  return m;
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
  put_i64(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double)) * v.size());
}
Eigen::VectorXd get_vector(std::istream& in) {
  const int64_t n = get_i64(in);
  Eigen::VectorXd v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double)) * v.size());
  return v;
}

void put_mlp(std::ostream& out, const Mlp& net) {
  put_i64(out, static_cast<int64_t>(net.layers().size()));
  for (const auto& layer : net.layers()) {
    put_i64(out, static_cast<int64_t>(layer.act));
    put_matrix(out, layer.w);
    put_vector(out, layer.b);
  }
}
void get_mlp(std::istream& in, Mlp& net) {
  const auto count = static_cast<size_t>(get_i64(in));
  if (count != net.layers().size())
    throw std::runtime_error("checkpoint: layer count mismatch");
  for (auto& layer : net.layers()) {
    layer.act = static_cast<Activation>(get_i64(in));
    layer.w = get_matrix(in);
    layer.b = get_vector(in);
  }
}

void put_grads(std::ostream& out, const std::vector<LayerGrad>& grads) {
  put_i64(out, static_cast<int64_t>(grads.size()));
  for (const auto& g : grads) {
    put_matrix(out, g.w);
    put_vector(out, g.b);
  }
}
void get_grads(std::istream& in, std::vector<LayerGrad>& grads) {
  const auto count = static_cast<size_t>(get_i64(in));
  if (count != grads.size()) throw std::runtime_error("checkpoint: moment count mismatch");
  for (auto& g : grads) {
    g.w = get_matrix(in);
    g.b = get_vector(in);
  }
}

void put_adam(std::ostream& out, Adam& opt) {
  put_i64(out, opt.t());
  put_grads(out, opt.m());
  put_grads(out, opt.v());
}
void get_adam(std::istream& in, Adam& opt) {
  opt.set_t(get_i64(in));
  get_grads(in, opt.m());
  get_grads(in, opt.v());
}

}  // namespace

void DdpgAgent::save(std::ostream& out, const ReplayBuffer* buffer, long episode) const {
  out << kMagic << '\n';
  std::ostringstream rng_state;
  rng_state << rng_;
  out << rng_state.str() << '\n';

  put_f64(out, cfg_.actor_lr);
  put_f64(out, cfg_.critic_lr);
  put_f64(out, cfg_.target_rate);
  put_f64(out, cfg_.discount);
  put_i64(out, cfg_.buffer_capacity);
  put_i64(out, cfg_.batch);
  put_i64(out, cfg_.episodes);
  put_i64(out, cfg_.steps_per_episode);
  put_i64(out, static_cast<int64_t>(cfg_.hidden.size()));
  for (int h : cfg_.hidden) put_i64(out, h);
  put_f64(out, cfg_.noise_start);
  put_f64(out, cfg_.noise_end);
  put_f64(out, cfg_.noise_decay_fraction);
  put_i64(out, cfg_.warmup_batches);

  put_i64(out, state_dim_);
  put_i64(out, action_dim_);
  put_i64(out, episode);

  put_mlp(out, actor_);
  put_mlp(out, target_actor_);
  put_mlp(out, critic_.trunk());
  put_mlp(out, critic_.head());
  put_mlp(out, target_critic_.trunk());
  put_mlp(out, target_critic_.head());

  auto& self = const_cast<DdpgAgent&>(*this);
  put_adam(out, self.actor_opt_);
  put_adam(out, self.critic_trunk_opt_);
  put_adam(out, self.critic_head_opt_);

  put_i64(out, buffer != nullptr ? 1 : 0);
  if (buffer != nullptr) {
    put_i64(out, static_cast<int64_t>(buffer->capacity()));
    put_i64(out, static_cast<int64_t>(buffer->size()));
    put_i64(out, static_cast<int64_t>(buffer->cursor()));
    for (size_t i = 0; i < buffer->size(); ++i) {
      const Transition& t = buffer->at(i);
      put_vector(out, t.s);
      put_vector(out, t.a);
      put_f64(out, t.r);
      put_vector(out, t.s2);
      put_i64(out, t.done ? 1 : 0);
    }
  }
}

DdpgAgent::Loaded DdpgAgent::load(std::istream& in) {
  std::string magic;
  std::getline(in, magic);
  if (magic != kMagic) throw std::runtime_error("not a checkpoint file");
  std::string rng_state;
  std::getline(in, rng_state);

  DdpgConfig cfg;
  cfg.actor_lr = get_f64(in);
  cfg.critic_lr = get_f64(in);
  cfg.target_rate = get_f64(in);
  cfg.discount = get_f64(in);
  cfg.buffer_capacity = static_cast<int>(get_i64(in));
  cfg.batch = static_cast<int>(get_i64(in));
  cfg.episodes = static_cast<int>(get_i64(in));
  cfg.steps_per_episode = static_cast<int>(get_i64(in));
  cfg.hidden.resize(static_cast<size_t>(get_i64(in)));
  for (auto& h : cfg.hidden) h = static_cast<int>(get_i64(in));
  cfg.noise_start = get_f64(in);
  cfg.noise_end = get_f64(in);
  cfg.noise_decay_fraction = get_f64(in);
  cfg.warmup_batches = static_cast<int>(get_i64(in));

  const int state_dim = static_cast<int>(get_i64(in));
  const int action_dim = static_cast<int>(get_i64(in));
  const long episode = get_i64(in);

  Loaded out;
  out.episode = episode;
  out.agent = std::make_unique<DdpgAgent>(state_dim, action_dim, cfg, 0);
  DdpgAgent& a = *out.agent;
  std::istringstream rng_in(rng_state);
  rng_in >> a.rng_;

  get_mlp(in, a.actor_);
  get_mlp(in, a.target_actor_);
  get_mlp(in, a.critic_.trunk());
  get_mlp(in, a.critic_.head());
  get_mlp(in, a.target_critic_.trunk());
  get_mlp(in, a.target_critic_.head());
  get_adam(in, a.actor_opt_);
  get_adam(in, a.critic_trunk_opt_);
  get_adam(in, a.critic_head_opt_);

  if (get_i64(in) == 1) {
    const auto capacity = static_cast<size_t>(get_i64(in));
    const auto size = static_cast<size_t>(get_i64(in));
    const auto cursor = static_cast<size_t>(get_i64(in));
    out.buffer = std::make_unique<ReplayBuffer>(capacity);
    std::vector<Transition> data(size);
    for (auto& t : data) {
      t.s = get_vector(in);
      t.a = get_vector(in);
      t.r = get_f64(in);
      t.s2 = get_vector(in);
      t.done = get_i64(in) == 1;
    }
    out.buffer->restore(std::move(data), cursor);
  }
  if (!in) throw std::runtime_error("truncated checkpoint");
  return out;
}

void save_checkpoint(const std::string& path, const DdpgAgent& agent,
                     const ReplayBuffer* buffer, long episode) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  agent.save(out, buffer, episode);
}

DdpgAgent::Loaded load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  return DdpgAgent::load(in);
}

}  // namespace lcris::agent
