#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "actctx/sim/world.hpp"

namespace actctx::sim {

/// Previous action and whether it succeeded, plus which interactions have
/// already succeeded this episode; part of the agent's proprioception rather
/// than the world. The history stands in for a recurrent state.
struct ActionFeedback {
  int action = -1;
  bool success = false;
  std::vector<std::uint8_t> done;  // per action index, empty until the first success

  void record(int action_index, bool succeeded, bool interaction) {
    action = action_index;
    success = succeeded;
    if (succeeded && interaction) {
      if (done.size() <= static_cast<std::size_t>(action_index)) done.resize(static_cast<std::size_t>(action_index) + 1, 0);
      done[static_cast<std::size_t>(action_index)] = 1;
    }
  }
};

/// Symbolic observation vector. Blocks, in order:
///   held        one-hot over classes (all zero when empty-handed)
///   pose        x, y normalized to [0,1], heading one-hot
///   window      egocentric (2r+1)^2 cells x (occupancy + class presence)
///   per class   nearest visible instance: present, forward and lateral
///               offset, distance, reachable, open, on, sliced, and a one-hot
///               of its container among receptacle classes
///   feedback    previous action one-hot, previous success
///   history     interactions that already succeeded this episode
class ObservationEncoder {
 public:
  ObservationEncoder(const KitchenCatalog& catalog, int num_actions, int window_radius = 2);

  int dim() const { return dim_; }
  int window_radius() const { return radius_; }
  int per_class_width() const { return per_class_; }
  int window_offset() const { return window_offset_; }
  int class_block_offset() const { return class_offset_; }

  void encode(const WorldState& state, const ActionFeedback& feedback,
              Eigen::Ref<Eigen::VectorXf> out) const;
  Eigen::VectorXf operator()(const WorldState& state, const ActionFeedback& feedback = {}) const;

 private:
  int n_classes_;
  int n_actions_;
  int radius_;
  int per_class_;
  int window_offset_;
  int class_offset_;
  int feedback_offset_;
  int dim_;
  std::vector<int> receptacle_slot_;  // class -> slot or -1
};

}  // namespace actctx::sim
