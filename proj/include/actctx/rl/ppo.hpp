#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "actctx/rl/network.hpp"

namespace actctx::rl {

struct PpoHyper {
  double clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  bool normalize_advantages = true;
};

template <typename Scalar>
struct PpoBatch {
  using Matrix = typename ActorCritic<Scalar>::Matrix;
  using Vector = typename ActorCritic<Scalar>::Vector;
  Matrix obs;  // obs x batch
  std::vector<int> actions;
  Vector old_log_prob;
  Vector advantages;
  Vector returns;

  Eigen::Index size() const { return obs.cols(); }
};

struct PpoStats {
  double loss = 0;
  double policy_loss = 0;
  double value_loss = 0;
  double entropy = 0;
  double clip_fraction = 0;
  double approx_kl = 0;
};

/// Clipped-surrogate objective (minimized):
///   -mean(min(r A, clip(r, 1-c, 1+c) A)) + vc * 0.5 * mean((V - R)^2) - ec * mean(H)
/// with r = exp(log pi(a|s) - log pi_old(a|s)). When `grad` is given the
/// exact parameter gradient is accumulated into it.
template <typename Scalar>
PpoStats ppo_loss(const ActorCritic<Scalar>& net, const PpoBatch<Scalar>& batch, const PpoHyper& hp,
                  typename ActorCritic<Scalar>::Vector* grad = nullptr) {
  using Matrix = typename ActorCritic<Scalar>::Matrix;
  using RowVector = typename ActorCritic<Scalar>::RowVector;
  using Vector = typename ActorCritic<Scalar>::Vector;
  const Eigen::Index m = batch.size();
  if (m == 0) throw std::invalid_argument("ppo_loss: empty batch");

  typename ActorCritic<Scalar>::Cache cache;
  net.forward(batch.obs, cache);
  const Matrix logp = log_softmax(cache.logits);
  const Matrix prob = logp.array().exp();

  Vector adv = batch.advantages;
  if (hp.normalize_advantages && m > 1) {
    const Scalar mean = adv.mean();
    const Scalar sd = std::sqrt((adv.array() - mean).square().sum() / Scalar(m - 1));
    adv = (adv.array() - mean) / (sd + Scalar(1e-8));
  }

  const Scalar clip = static_cast<Scalar>(hp.clip);
  const Scalar inv_m = Scalar(1) / static_cast<Scalar>(m);
  Matrix d_logits = Matrix::Zero(logp.rows(), m);
  RowVector d_value(m);
  PpoStats st;
  for (Eigen::Index i = 0; i < m; ++i) {
    const int a = batch.actions[static_cast<std::size_t>(i)];
    const Scalar lp = logp(a, i);
    const Scalar log_ratio = lp - batch.old_log_prob[i];
    const Scalar ratio = std::exp(log_ratio);
    const Scalar unclipped = ratio * adv[i];
    const Scalar clipped = std::clamp(ratio, Scalar(1) - clip, Scalar(1) + clip) * adv[i];
    st.policy_loss -= static_cast<double>(std::min(unclipped, clipped));
    // The min picks the clipped branch exactly when the ratio has left the
    // trust region in the direction the advantage favours.
    const bool clipped_active = (adv[i] >= 0 && ratio > Scalar(1) + clip) ||
                                (adv[i] < 0 && ratio < Scalar(1) - clip);
    if (clipped_active) st.clip_fraction += 1;
    st.approx_kl += static_cast<double>((ratio - Scalar(1)) - log_ratio);

    const Scalar entropy = -(prob.col(i).array() * logp.col(i).array()).sum();
    st.entropy += static_cast<double>(entropy);
    const Scalar err = cache.value[i] - batch.returns[i];
    st.value_loss += 0.5 * static_cast<double>(err * err);

    if (grad) {
      // d(-surrogate)/d logp_a, then through log-softmax.
      const Scalar g_lp = clipped_active ? Scalar(0) : -unclipped * inv_m;
      d_logits.col(i) = -g_lp * prob.col(i);
      d_logits(a, i) += g_lp;
      // d(-ec H)/d logits_j = ec p_j (log p_j + H)
      const Scalar ec = static_cast<Scalar>(hp.entropy_coef) * inv_m;
      d_logits.col(i).array() += ec * prob.col(i).array() * (logp.col(i).array() + entropy);
      d_value[i] = static_cast<Scalar>(hp.value_coef) * err * inv_m;
    }
  }
  const double dm = static_cast<double>(m);
  st.policy_loss /= dm;
  st.value_loss /= dm;
  st.entropy /= dm;
  st.clip_fraction /= dm;
  st.approx_kl /= dm;
  st.loss = st.policy_loss + hp.value_coef * st.value_loss - hp.entropy_coef * st.entropy;
  if (grad) net.backward(cache, d_logits, d_value, *grad);
  return st;
}

/// Generalized advantage estimation over one environment's contiguous
/// segment. `next_value[t]` is the value of the state after step t (zero at a
/// goal, the bootstrap at a truncation); `episode_end[t]` stops the trace.
template <typename Scalar>
void compute_gae(std::span<const Scalar> rewards, std::span<const Scalar> values,
                 std::span<const Scalar> next_value, std::span<const std::uint8_t> episode_end,
                 Scalar gamma, Scalar lambda, std::span<Scalar> advantages, std::span<Scalar> returns) {
  Scalar running = 0;
  for (std::size_t k = rewards.size(); k-- > 0;) {
    if (episode_end[k]) running = 0;
    const Scalar delta = rewards[k] + gamma * next_value[k] - values[k];
    running = delta + gamma * lambda * running;
    advantages[k] = running;
    returns[k] = running + values[k];
  }
}

/// Adam with bias correction over a flat parameter vector.
template <typename Scalar>
class Adam {
 public:
  using Vector = typename ActorCritic<Scalar>::Vector;

  Adam() = default;
  Adam(Eigen::Index n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-5)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(Vector::Zero(n)), v_(Vector::Zero(n)) {}

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  long steps() const { return t_; }

  void step(Eigen::Ref<Vector> params, const Vector& grad) {
    ++t_;
    const Scalar b1 = static_cast<Scalar>(beta1_), b2 = static_cast<Scalar>(beta2_);
    m_ = b1 * m_ + (Scalar(1) - b1) * grad;
    v_ = b2 * v_ + (Scalar(1) - b2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const Scalar step = static_cast<Scalar>(lr_ * std::sqrt(c2) / c1);
    params.array() -= step * m_.array() / (v_.array().sqrt() + static_cast<Scalar>(eps_));
  }

 private:
  double lr_ = 2.5e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-5;
  Vector m_, v_;
  long t_ = 0;
};

/// Scales `grad` so its Euclidean norm is at most `max_norm`; returns the
/// norm before clipping.
template <typename Scalar>
double clip_grad_norm(Eigen::Ref<typename ActorCritic<Scalar>::Vector> grad, double max_norm) {
  const double norm = static_cast<double>(grad.norm());
  if (max_norm > 0 && norm > max_norm) grad *= static_cast<Scalar>(max_norm / (norm + 1e-6));
  return norm;
}

}  // namespace actctx::rl
