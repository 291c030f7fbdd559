#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>

#include "actctx/prior/compatibility.hpp"
#include "actctx/reward/aco_memory.hpp"
#include "actctx/sim/world.hpp"

namespace actctx {

/// Successful interactions per (verb, target class) within one episode.
class InteractionCounter {
 public:
  int count(sim::Verb verb, ClassId target) const;
  void increment(sim::Verb verb, ClassId target) { ++counts_[{verb, target}]; }
  void reset() { counts_.clear(); }
  const std::map<std::pair<sim::Verb, ClassId>, int>& counts() const { return counts_; }

 private:
  std::map<std::pair<sim::Verb, ClassId>, int> counts_;
};

/// Auxiliary reward for interacting with `target_instance` (class
/// `target_class`): the compatibility mass of the objects remembered near it
/// plus the held object (null when empty-handed), divided by the largest
/// score any object gives the target class. Zero for navigation verbs, for a
/// (verb, class) pair already counted, and for targets with no prior mass.
double activity_reward(const AcoMemory& memory, sim::Verb verb, ClassId target_class,
                       std::optional<InstanceId> target_instance,
                       std::optional<ClassId> held_class,
                       std::optional<InstanceId> held_instance,
                       const InteractionCounter& counter, const CompatibilityTable& table);

inline double total_reward(double task_r, double aco_r, double lambda_phi) {
  return task_r + lambda_phi * aco_r;
}

/// Per-episode state for the auxiliary reward: memory plus counter.
class ActivityRewarder {
 public:
  ActivityRewarder(const CompatibilityTable& table, double epsilon = kDefaultEpsilon);

  void reset();
  /// Consumes the event of the step that produced `after`. Memory updates
  /// first, then the reward is computed and the counter advanced.
  double on_step(const InteractionEvent& event, const sim::WorldState& after);

  const AcoMemory& memory() const { return memory_; }
  const InteractionCounter& counter() const { return counter_; }

 private:
  const CompatibilityTable* table_;
  AcoMemory memory_;
  InteractionCounter counter_;
  std::vector<PlacedAnchor> anchors_;
};

inline constexpr double kCoverageBonus = 1.0;

/// Bonus for every object class that is visible and in reach for the first
/// time this episode. `visited` is updated in place.
double coverage_reward(const sim::WorldState& state, std::set<ClassId>& visited);

}  // namespace actctx
