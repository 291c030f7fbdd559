#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "actctx/rng.hpp"
#include "actctx/sim/task.hpp"

namespace actctx::sim {

using TargetPredicate = std::function<bool(const ObjectInstance&)>;

/// Shortest navigation plan (breadth-first over cell and heading) ending in
/// a pose from which `action` selects an instance accepted by `pred`. The
/// returned sequence holds navigation action indices only; empty when the
/// current pose already works. nullopt when no pose works.
std::optional<std::vector<int>> plan_interaction(const WorldState& state, const ActionSpace& space,
                                                 int action, const TargetPredicate& pred);

/// Hand-written task script. Replans from the current state on every call,
/// so it tolerates any starting configuration the generator emits.
class ScriptedOracle {
 public:
  ScriptedOracle(const ActionSpace& space, TaskSpec task) : space_(&space), task_(std::move(task)) {}

  /// Next action index, or nullopt when the goal holds or no progress is
  /// possible.
  std::optional<int> act(const WorldState& state) const;

 private:
  struct Step {
    int action;
    std::size_t cost;
  };
  static std::optional<int> action_of(std::optional<Step> st) {
    return st ? std::optional<int>(st->action) : std::nullopt;
  }
  std::optional<Step> seek(const WorldState& s, Verb verb, ClassId cls, const TargetPredicate& pred) const;
  std::optional<int> reveal(const WorldState& s, const std::vector<ClassId>& classes,
                            const TargetPredicate& want) const;
  std::optional<int> acquire(const WorldState& s, const TargetPredicate& want,
                             const std::vector<ClassId>& classes) const;
  std::optional<int> put_into(const WorldState& s, const std::vector<ClassId>& classes,
                              const TargetPredicate& pred) const;
  std::optional<int> drop_held(const WorldState& s) const;

  const ActionSpace* space_;
  TaskSpec task_;
};

/// Uniform random action selection, for baselines.
class RandomController {
 public:
  RandomController(const ActionSpace& space, std::uint64_t seed) : n_(space.size()), rng_(seed) {}
  int act() { return rng_.below(n_); }

 private:
  int n_;
  Rng rng_;
};

struct ScriptResult {
  bool success = false;
  int steps = 0;
};

/// Runs the oracle on a world until the goal, a stall, or `horizon` steps.
ScriptResult run_oracle(WorldState world, const ActionSpace& space, const TaskSpec& task, int horizon);

}  // namespace actctx::sim
