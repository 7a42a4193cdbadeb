#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "lcris/env.hpp"
#include "lcris/mlp.hpp"

namespace lcris::agent {

struct DdpgConfig {
  double actor_lr = 8.8452e-5;
  double critic_lr = 1.3876e-5;
  double target_rate = 0.0938;  // soft-update rate for both target nets
  double discount = 0.9947;
  int buffer_capacity = 100000;
  int batch = 256;
  int episodes = 350;
  int steps_per_episode = 19328;
  std::vector<int> hidden{256, 256};
  double noise_start = 0.3;
  double noise_end = 0.05;
  double noise_decay_fraction = 0.5;  // of total training steps
  int warmup_batches = 10;            // warm-up transitions = warmup_batches * batch

  void validate() const;
};

struct Transition {
  Eigen::VectorXd s;
  Eigen::VectorXd a;
  double r = 0.0;
  Eigen::VectorXd s2;
  bool done = false;
};

// FIFO ring buffer with uniform without-replacement batch sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);

  void push(Transition t);
  size_t size() const { return data_.size(); }
  size_t capacity() const { return capacity_; }
  size_t cursor() const { return cursor_; }
  const Transition& at(size_t i) const { return data_[i]; }

  std::vector<const Transition*> sample(int batch, Rng& rng) const;

  // Checkpoint restore: replaces contents and the FIFO cursor.
  void restore(std::vector<Transition> data, size_t cursor) {
    if (data.size() > capacity_) throw std::invalid_argument("restore: over capacity");
    data_ = std::move(data);
    cursor_ = cursor;
  }

 private:
  size_t capacity_;
  size_t cursor_ = 0;
  std::vector<Transition> data_;
};

class DdpgAgent {
 public:
  DdpgAgent(int state_dim, int action_dim, DdpgConfig cfg, uint64_t seed);

  // Deterministic policy output in [-1, 1]^action_dim.
  Eigen::VectorXd act(const Eigen::VectorXd& s) const;
  Eigen::VectorXd act_noisy(const Eigen::VectorXd& s, double sigma);
  Eigen::VectorXd random_action();

  double critic_update(const std::vector<const Transition*>& batch);
  double actor_update(const std::vector<const Transition*>& batch);
  void soft_update_targets();
  double noise_sigma(long global_step, long total_steps) const;

  const DdpgConfig& config() const { return cfg_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  Mlp& actor() { return actor_; }
  Critic& critic() { return critic_; }
  Mlp& target_actor() { return target_actor_; }
  Critic& target_critic() { return target_critic_; }
  Rng& rng() { return rng_; }

  void save(std::ostream& out, const ReplayBuffer* buffer, long episode) const;
  struct Loaded {
    std::unique_ptr<DdpgAgent> agent;
    std::unique_ptr<ReplayBuffer> buffer;  // null if the file has none
    long episode = 0;
  };
  static Loaded load(std::istream& in);

 private:
  DdpgConfig cfg_;
  int state_dim_ = 0, action_dim_ = 0;
  Mlp actor_, target_actor_;
  Critic critic_, target_critic_;
  Adam actor_opt_, critic_trunk_opt_, critic_head_opt_;
  Rng rng_;
};

struct TrainResult {
  std::vector<double> episode_rewards;
  long total_steps = 0;
};

// Runs cfg.episodes episodes on `env`. Episode e resets the env with
// seed + e. Deterministic for a fixed (agent seed, env config, seed).
TrainResult train(env::RisEnv& env, DdpgAgent& agent, ReplayBuffer& buffer,
                  uint64_t seed, long start_episode = 0,
                  const std::function<void(int, double)>& on_episode = {});

void save_checkpoint(const std::string& path, const DdpgAgent& agent,
                     const ReplayBuffer* buffer, long episode);
DdpgAgent::Loaded load_checkpoint(const std::string& path);

}  // namespace lcris::agent
