#pragma once

#include <array>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/QR>

#include "actctx/core.hpp"
#include "actctx/rng.hpp"

namespace actctx::rl {

struct NetShape {
  int obs = 0;
  int hidden1 = 64;
  int hidden2 = 64;
  int actions = 0;

  /// Flat parameter count.
  int size() const {
    return hidden1 * obs + hidden1 + hidden2 * hidden1 + hidden2 + actions * hidden2 + actions +
           hidden2 + 1;
  }
  bool operator==(const NetShape&) const = default;
};

/// Shared-trunk actor-critic MLP over a flat parameter vector:
///   h1 = tanh(W1 x + b1), h2 = tanh(W2 h1 + b2),
///   logits = Wp h2 + bp, value = wv h2 + bv.
/// Batches are stored column-wise (one sample per column).
template <typename Scalar>
class ActorCritic {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using MatMap = Eigen::Map<Matrix>;
  using ConstMatMap = Eigen::Map<const Matrix>;
  using VecMap = Eigen::Map<Vector>;
  using ConstVecMap = Eigen::Map<const Vector>;

  /// Activations kept for the backward pass.
  struct Cache {
    Matrix x, h1, h2, logits;
    RowVector value;
  };

  ActorCritic() = default;
  explicit ActorCritic(NetShape shape) : shape_(shape), params_(Vector::Zero(shape.size())) {}

  const NetShape& shape() const { return shape_; }
  const Vector& params() const { return params_; }
  Vector& params() { return params_; }

  /// Orthogonal weights (gain sqrt 2 in the trunk, 0.01 for the policy head,
  /// 1 for the value head) and zero biases.
  void initialize(std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x1417));
    params_.setZero();
    orthogonal(w1(), std::sqrt(Scalar(2)), rng);
    orthogonal(w2(), std::sqrt(Scalar(2)), rng);
    orthogonal(wp(), Scalar(0.01), rng);
    orthogonal(wv(), Scalar(1), rng);
  }

  void forward(const Eigen::Ref<const Matrix>& x, Cache& c) const {
    c.x = x;
    c.h1 = ((w1() * x).colwise() + b1()).array().tanh();
    c.h2 = ((w2() * c.h1).colwise() + b2()).array().tanh();
    c.logits = (wp() * c.h2).colwise() + bp();
    c.value = (wv() * c.h2).array() + bv();
  }

  /// Accumulates the parameter gradient for upstream gradients on logits
  /// (actions x batch) and values (1 x batch) into `grad`.
  void backward(const Cache& c, const Eigen::Ref<const Matrix>& d_logits,
                const Eigen::Ref<const RowVector>& d_value, Eigen::Ref<Vector> grad) const {
    const NetShape& s = shape_;
    Layout L(s);
    MatMap g_w1(grad.data() + L.w1, s.hidden1, s.obs);
    VecMap g_b1(grad.data() + L.b1, s.hidden1);
    MatMap g_w2(grad.data() + L.w2, s.hidden2, s.hidden1);
    VecMap g_b2(grad.data() + L.b2, s.hidden2);
    MatMap g_wp(grad.data() + L.wp, s.actions, s.hidden2);
    VecMap g_bp(grad.data() + L.bp, s.actions);
    MatMap g_wv(grad.data() + L.wv, 1, s.hidden2);

    g_wp.noalias() += d_logits * c.h2.transpose();
    g_bp += d_logits.rowwise().sum();
    g_wv.noalias() += d_value * c.h2.transpose();
    grad[L.bv] += d_value.sum();

    Matrix d_h2 = wp().transpose() * d_logits;
    d_h2.noalias() += wv().transpose() * d_value;
    d_h2.array() *= Scalar(1) - c.h2.array().square();
    g_w2.noalias() += d_h2 * c.h1.transpose();
    g_b2 += d_h2.rowwise().sum();

    Matrix d_h1 = w2().transpose() * d_h2;
    d_h1.array() *= Scalar(1) - c.h1.array().square();
    g_w1.noalias() += d_h1 * c.x.transpose();
    g_b1 += d_h1.rowwise().sum();
  }

  template <typename Other>
  ActorCritic<Other> cast() const {
    ActorCritic<Other> out(shape_);
    out.params() = params_.template cast<Other>();
    return out;
  }

 private:
  struct Layout {
    int w1, b1, w2, b2, wp, bp, wv, bv;
    explicit Layout(const NetShape& s) {
      w1 = 0;
      b1 = w1 + s.hidden1 * s.obs;
      w2 = b1 + s.hidden1;
      b2 = w2 + s.hidden2 * s.hidden1;
      wp = b2 + s.hidden2;
      bp = wp + s.actions * s.hidden2;
      wv = bp + s.actions;
      bv = wv + s.hidden2;
    }
  };

  static void orthogonal(MatMap m, Scalar gain, Rng& rng) {
    const Eigen::Index r = m.rows(), c = m.cols();
    const Eigen::Index big = std::max(r, c), small = std::min(r, c);
    Eigen::MatrixXd a(big, small);
    for (Eigen::Index j = 0; j < small; ++j)
      for (Eigen::Index i = 0; i < big; ++i) a(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
    // Sign fix so the factorization is unique.
    const Eigen::VectorXd d = qr.matrixQR().diagonal();
    for (Eigen::Index j = 0; j < small; ++j) {
      if (d[j] < 0) q.col(j) *= -1.0;
    }
    if (r >= c) {
      m = (gain * q.cast<Scalar>()).eval();
    } else {
      m = (gain * q.transpose().cast<Scalar>()).eval();
    }
  }

  ConstMatMap w1() const { return {params_.data() + Layout(shape_).w1, shape_.hidden1, shape_.obs}; }
  ConstVecMap b1() const { return {params_.data() + Layout(shape_).b1, shape_.hidden1}; }
  ConstMatMap w2() const { return {params_.data() + Layout(shape_).w2, shape_.hidden2, shape_.hidden1}; }
  ConstVecMap b2() const { return {params_.data() + Layout(shape_).b2, shape_.hidden2}; }
  ConstMatMap wp() const { return {params_.data() + Layout(shape_).wp, shape_.actions, shape_.hidden2}; }
  ConstVecMap bp() const { return {params_.data() + Layout(shape_).bp, shape_.actions}; }
  ConstMatMap wv() const { return {params_.data() + Layout(shape_).wv, 1, shape_.hidden2}; }
  Scalar bv() const { return params_[Layout(shape_).bv]; }
  MatMap w1() { return {params_.data() + Layout(shape_).w1, shape_.hidden1, shape_.obs}; }
  MatMap w2() { return {params_.data() + Layout(shape_).w2, shape_.hidden2, shape_.hidden1}; }
  MatMap wp() { return {params_.data() + Layout(shape_).wp, shape_.actions, shape_.hidden2}; }
  MatMap wv() { return {params_.data() + Layout(shape_).wv, 1, shape_.hidden2}; }

  NetShape shape_;
  Vector params_;
};

/// Column-wise log-softmax.
template <typename Derived>
auto log_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = logits;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const Scalar m = out.col(j).maxCoeff();
    const Scalar lse = m + std::log((out.col(j).array() - m).exp().sum());
    out.col(j).array() -= lse;
  }
  return out;
}

}  // namespace actctx::rl
