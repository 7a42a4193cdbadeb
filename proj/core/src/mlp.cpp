#include "lcris/mlp.hpp"

#include <cmath>

namespace lcris::agent {

namespace {

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
  switch (act) {
    case Activation::ReLU: return z.cwiseMax(0.0);
    case Activation::Tanh: return z.array().tanh().matrix();
    case Activation::Identity: return z;
  }
  return z;
}

// Derivative expressed through the cached post-activation output.
Eigen::MatrixXd activation_grad(const Eigen::MatrixXd& post, Activation act) {
  switch (act) {
    case Activation::ReLU:
      return (post.array() > 0.0).cast<double>().matrix();
    case Activation::Tanh:
      return (1.0 - post.array().square()).matrix();
    case Activation::Identity:
      return Eigen::MatrixXd::Ones(post.rows(), post.cols());
  }
  return Eigen::MatrixXd::Ones(post.rows(), post.cols());
}

}  // namespace

Mlp::Mlp(const std::vector<int>& dims, const std::vector<Activation>& acts, Rng& rng,
         double final_scale) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw std::invalid_argument("Mlp: inconsistent layer configuration");
  layers_.resize(dims.size() - 1);
  for (size_t l = 0; l < layers_.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(in));
    if (final_scale > 0.0 && l == layers_.size() - 1) scale = final_scale;
    std::uniform_real_distribution<double> u(-scale, scale);
    layers_[l].w.resize(out, in);
    layers_[l].b.resize(out);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) layers_[l].w(r, c) = u(rng);
    }
    for (int r = 0; r < out; ++r) layers_[l].b[r] = u(rng);
    layers_[l].act = acts[l];
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd h = x;
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = (layer.w * h).colwise() + layer.b;
    h = apply_activation(z, layer.act);
  }
  return h;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache& cache) const {
  cache.pre.clear();
  cache.post.clear();
  cache.post.push_back(x);
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = (layer.w * cache.post.back()).colwise() + layer.b;
    cache.pre.push_back(z);
    cache.post.push_back(apply_activation(z, layer.act));
  }
  return cache.post.back();
}

Eigen::MatrixXd Mlp::backward(const Eigen::MatrixXd& dy, const Cache& cache,
                              std::vector<LayerGrad>& grads) const {
  if (grads.size() != layers_.size())
    throw std::invalid_argument("Mlp::backward: grad buffer size mismatch");
  Eigen::MatrixXd d = dy;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const Eigen::MatrixXd dz =
        d.cwiseProduct(activation_grad(cache.post[static_cast<size_t>(l) + 1],
                                       layers_[static_cast<size_t>(l)].act));
    grads[static_cast<size_t>(l)].w = dz * cache.post[static_cast<size_t>(l)].transpose();
    grads[static_cast<size_t>(l)].b = dz.rowwise().sum();
    d = layers_[static_cast<size_t>(l)].w.transpose() * dz;
  }
  return d;
}

std::vector<LayerGrad> Mlp::zero_grads() const {
  std::vector<LayerGrad> g(layers_.size());
  for (size_t l = 0; l < layers_.size(); ++l) {
    g[l].w = Eigen::MatrixXd::Zero(layers_[l].w.rows(), layers_[l].w.cols());
    g[l].b = Eigen::VectorXd::Zero(layers_[l].b.size());
  }
  return g;
}

void soft_update(Mlp& target, const Mlp& online, double rate) {
  if (target.layers().size() != online.layers().size())
    throw std::invalid_argument("soft_update: layer count mismatch");
  for (size_t l = 0; l < target.layers().size(); ++l) {
    auto& t = target.layers()[l];
    const auto& o = online.layers()[l];
    if (t.w.rows() != o.w.rows() || t.w.cols() != o.w.cols())
      throw std::invalid_argument("soft_update: shape mismatch");
    t.w = (1.0 - rate) * t.w + rate * o.w;
    t.b = (1.0 - rate) * t.b + rate * o.b;
  }
}

Adam::Adam(const Mlp& net) : m_(net.zero_grads()), v_(net.zero_grads()) {}

void Adam::step(Mlp& net, const std::vector<LayerGrad>& grads, double lr) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (size_t l = 0; l < grads.size(); ++l) {
    auto& layer = net.layers()[l];
    m_[l].w = kBeta1 * m_[l].w + (1.0 - kBeta1) * grads[l].w;
    m_[l].b = kBeta1 * m_[l].b + (1.0 - kBeta1) * grads[l].b;
    v_[l].w = kBeta2 * v_[l].w + (1.0 - kBeta2) * grads[l].w.cwiseProduct(grads[l].w);
    v_[l].b = kBeta2 * v_[l].b + (1.0 - kBeta2) * grads[l].b.cwiseProduct(grads[l].b);
    layer.w.array() -=
        lr * (m_[l].w / c1).array() / ((v_[l].w / c2).array().sqrt() + kEps);
    layer.b.array() -=
        lr * (m_[l].b / c1).array() / ((v_[l].b / c2).array().sqrt() + kEps);
  }
}

Critic::Critic(int state_dim, int action_dim, const std::vector<int>& hidden, Rng& rng)
    : action_dim_(action_dim) {
  if (hidden.empty()) throw std::invalid_argument("Critic: needs >= 1 hidden layer");
  trunk_ = Mlp({state_dim, hidden[0]}, {Activation::ReLU}, rng);
  std::vector<int> head_dims{hidden[0] + action_dim};
  std::vector<Activation> head_acts;
  for (size_t i = 1; i < hidden.size(); ++i) {
    head_dims.push_back(hidden[i]);
    head_acts.push_back(Activation::ReLU);
  }
  head_dims.push_back(1);
  head_acts.push_back(Activation::Identity);
  head_ = Mlp(head_dims, head_acts, rng);
}

Eigen::VectorXd Critic::forward(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a) const {
  Cache cache;
  return forward(s, a, cache);
}

Eigen::VectorXd Critic::forward(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a,
                                Cache& cache) const {
  if (s.cols() != a.cols()) throw std::invalid_argument("Critic: batch size mismatch");
  const Eigen::MatrixXd h = trunk_.forward(s, cache.trunk);
  Eigen::MatrixXd joint(h.rows() + a.rows(), h.cols());
  joint.topRows(h.rows()) = h;
  joint.bottomRows(a.rows()) = a;
  return head_.forward(joint, cache.head).row(0).transpose();
}

Eigen::MatrixXd Critic::backward(const Eigen::VectorXd& dq, const Cache& cache,
                                 Grads& grads) const {
  const Eigen::MatrixXd dy = dq.transpose();
  if (grads.trunk.size() != trunk_.layers().size()) grads = zero_grads();
  const Eigen::MatrixXd djoint = head_.backward(dy, cache.head, grads.head);
  const auto hidden_rows = djoint.rows() - action_dim_;
  trunk_.backward(djoint.topRows(hidden_rows), cache.trunk, grads.trunk);
  return djoint.bottomRows(action_dim_);
}

void soft_update(Critic& target, const Critic& online, double rate) {
  soft_update(target.trunk(), online.trunk(), rate);
  soft_update(target.head(), online.head(), rate);
}

}  // namespace lcris::agent
