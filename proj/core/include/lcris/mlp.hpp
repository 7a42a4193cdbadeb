#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lcris/common.hpp"

namespace lcris::agent {

enum class Activation { ReLU, Tanh, Identity };

struct Layer {
  Eigen::MatrixXd w;  // out x in
  Eigen::VectorXd b;
  Activation act = Activation::Identity;
};

struct LayerGrad {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

// Dense net over column-batched inputs (dim x batch). Backward returns the
// input gradient so nets can be chained (actor through critic).
class Mlp {
 public:
  struct Cache {
    std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
    std::vector<Eigen::MatrixXd> post;  // post[0] = input, post[i] = layer i output
  };

  Mlp() = default;
  // dims = {in, h1, ..., out}; acts has dims.size() - 1 entries.
  // final_scale > 0 shrinks the last layer's init (near-zero start).
  Mlp(const std::vector<int>& dims, const std::vector<Activation>& acts, Rng& rng,
      double final_scale = 0.0);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache) const;
  // dy: gradient wrt the output, same shape. Fills grads (summed over the
  // batch) and returns the gradient wrt the input.
  Eigen::MatrixXd backward(const Eigen::MatrixXd& dy, const Cache& cache,
                           std::vector<LayerGrad>& grads) const;

  std::vector<LayerGrad> zero_grads() const;
  int input_dim() const { return static_cast<int>(layers_.front().w.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().w.rows()); }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

 private:
  std::vector<Layer> layers_;
};

// target <- (1 - rate) * target + rate * online, elementwise.
void soft_update(Mlp& target, const Mlp& online, double rate);

// Per-parameter adaptive step from first/second moment estimates.
class Adam {
 public:
  Adam() = default;
  explicit Adam(const Mlp& net);
  void step(Mlp& net, const std::vector<LayerGrad>& grads, double lr);

  long t() const { return t_; }
  std::vector<LayerGrad>& m() { return m_; }
  std::vector<LayerGrad>& v() { return v_; }
  void set_t(long t) { t_ = t; }

 private:
  std::vector<LayerGrad> m_, v_;
  long t_ = 0;
};

// Q(s, a) with the action joined in at the first hidden layer.
class Critic {
 public:
  struct Cache {
    Mlp::Cache trunk, head;
  };
  struct Grads {
    std::vector<LayerGrad> trunk, head;
  };

  Critic() = default;
  Critic(int state_dim, int action_dim, const std::vector<int>& hidden, Rng& rng);

  Eigen::VectorXd forward(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a) const;
  Eigen::VectorXd forward(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a,
                          Cache& cache) const;
  // dq: per-sample gradient wrt Q. Returns the gradient wrt the action.
  Eigen::MatrixXd backward(const Eigen::VectorXd& dq, const Cache& cache,
                           Grads& grads) const;

  Grads zero_grads() const { return {trunk_.zero_grads(), head_.zero_grads()}; }
  Mlp& trunk() { return trunk_; }
  Mlp& head() { return head_; }
  const Mlp& trunk() const { return trunk_; }
  const Mlp& head() const { return head_; }
  int action_dim() const { return action_dim_; }

 private:
  Mlp trunk_;  // state -> first hidden
  Mlp head_;   // [hidden; action] -> ... -> 1
  int action_dim_ = 0;
};

void soft_update(Critic& target, const Critic& online, double rate);

}  // namespace lcris::agent
