#include "actctx/sim/observation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace actctx::sim {

namespace {
constexpr int kBaseClassFeatures = 8;
constexpr double kOffsetScale = 3.0;  // meters mapped to 1.0
}  // namespace

ObservationEncoder::ObservationEncoder(const KitchenCatalog& catalog, int num_actions,
                                       int window_radius)
    : n_classes_(catalog.size()), n_actions_(num_actions), radius_(window_radius) {
  receptacle_slot_.assign(static_cast<std::size_t>(n_classes_), -1);
  int slot = 0;
  for (ClassId c : catalog.receptacles()) receptacle_slot_[c] = slot++;
  per_class_ = kBaseClassFeatures + slot;
  const int side = 2 * radius_ + 1;
  window_offset_ = n_classes_ + 6;
  class_offset_ = window_offset_ + side * side * (1 + n_classes_);
  feedback_offset_ = class_offset_ + n_classes_ * per_class_;
  dim_ = feedback_offset_ + 2 * n_actions_ + 1;
}

void ObservationEncoder::encode(const WorldState& state, const ActionFeedback& feedback,
                                Eigen::Ref<Eigen::VectorXf> out) const {
  out.setZero();
  if (state.held) out(state.object(*state.held).cls) = 1.0f;

  const Grid& g = state.grid;
  const AgentPose& pose = state.agent;
  out(n_classes_ + 0) = g.width > 1 ? static_cast<float>(pose.cell.x) / (g.width - 1) : 0.0f;
  out(n_classes_ + 1) = g.height > 1 ? static_cast<float>(pose.cell.y) / (g.height - 1) : 0.0f;
  out(n_classes_ + 2 + static_cast<int>(pose.heading)) = 1.0f;

  const Cell fwd = heading_step(pose.heading);
  const Cell right = heading_step(turned_right(pose.heading));
  const int side = 2 * radius_ + 1;
  const int channels = 1 + n_classes_;
  // Window cell (f, r): f forward steps, r steps to the right.
  const auto window_index = [&](Cell c) -> int {
    const int dx = c.x - pose.cell.x;
    const int dy = c.y - pose.cell.y;
    const int f = dx * fwd.x + dy * fwd.y;
    const int r = dx * right.x + dy * right.y;
    if (std::abs(f) > radius_ || std::abs(r) > radius_) return -1;
    return (radius_ - f) * side + (r + radius_);
  };
  for (int f = -radius_; f <= radius_; ++f) {
    for (int r = -radius_; r <= radius_; ++r) {
      const Cell c{pose.cell.x + f * fwd.x + r * right.x, pose.cell.y + f * fwd.y + r * right.y};
      const int w = (radius_ - f) * side + (r + radius_);
      if (g.is_blocked(c)) out(window_offset_ + w * channels) = 1.0f;
    }
  }

  const Vec2 origin = cell_center(pose.cell);
  const Vec2 fwd_v(fwd.x, fwd.y);
  const Vec2 right_v(right.x, right.y);
  std::vector<const ObjectInstance*> nearest(static_cast<std::size_t>(n_classes_), nullptr);
  std::vector<double> nearest_dist(static_cast<std::size_t>(n_classes_),
                                   std::numeric_limits<double>::infinity());
  for (const auto& o : state.objects) {
    if (!state.visible(o)) continue;
    const int w = window_index(o.cell);
    if (w >= 0) out(window_offset_ + w * channels + 1 + o.cls) = 1.0f;
    const double d = (o.position - origin).norm();
    if (d < nearest_dist[o.cls]) {
      nearest_dist[o.cls] = d;
      nearest[o.cls] = &o;
    }
  }
  for (ClassId c = 0; c < n_classes_; ++c) {
    const ObjectInstance* o = nearest[c];
    if (!o) continue;
    auto block = out.segment(class_offset_ + c * per_class_, per_class_);
    const Vec2 offset = o->position - origin;
    block(0) = 1.0f;
    block(1) = static_cast<float>(std::clamp(offset.dot(fwd_v) / kOffsetScale, -1.0, 1.0));
    block(2) = static_cast<float>(std::clamp(offset.dot(right_v) / kOffsetScale, -1.0, 1.0));
    block(3) = static_cast<float>(std::min(nearest_dist[c] / kOffsetScale, 1.0));
    block(4) = state.in_reach(*o, pose) ? 1.0f : 0.0f;
    block(5) = o->open ? 1.0f : 0.0f;
    block(6) = o->toggled_on ? 1.0f : 0.0f;
    block(7) = o->sliced ? 1.0f : 0.0f;
    if (o->contained_in) {
      const int slot = receptacle_slot_[state.object(*o->contained_in).cls];
      if (slot >= 0) block(kBaseClassFeatures + slot) = 1.0f;
    }
  }

  if (feedback.action >= 0 && feedback.action < n_actions_) {
    out(feedback_offset_ + feedback.action) = 1.0f;
  }
  out(feedback_offset_ + n_actions_) = feedback.success ? 1.0f : 0.0f;
  const int history = feedback_offset_ + n_actions_ + 1;
  for (std::size_t a = 0; a < feedback.done.size() && a < static_cast<std::size_t>(n_actions_); ++a) {
    if (feedback.done[a]) out(history + static_cast<int>(a)) = 1.0f;
  }
}

Eigen::VectorXf ObservationEncoder::operator()(const WorldState& state,
                                               const ActionFeedback& feedback) const {
  Eigen::VectorXf v(dim_);
  encode(state, feedback, v);
  return v;
}

}  // namespace actctx::sim
