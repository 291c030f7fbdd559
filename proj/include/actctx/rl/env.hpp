#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "actctx/reward/activity_reward.hpp"
#include "actctx/rl/policy.hpp"
#include "actctx/sim/episode.hpp"

namespace actctx::rl {

enum class RewardMode { vanilla, aco, uniform, nav_coverage, aco_plus_nav };

std::string reward_mode_name(RewardMode mode);
RewardMode reward_mode_from_name(const std::string& name);
/// Modes whose auxiliary term reads a compatibility table.
bool uses_table(RewardMode mode);

/// Auxiliary reward for one rollout. Holds the per-episode memory, counter
/// and visited classes the mode needs; the table is shared read-only.
class RewardComposer {
 public:
  RewardComposer(RewardMode mode, const CompatibilityTable* table, double epsilon = kDefaultEpsilon);

  void reset(const sim::WorldState& start);
  /// Unweighted auxiliary reward of the step that produced `after`.
  double auxiliary(const InteractionEvent& event, const sim::WorldState& after);
  RewardMode mode() const { return mode_; }

 private:
  RewardMode mode_;
  std::optional<ActivityRewarder> activity_;
  std::set<ClassId> visited_;
};

struct StepOutcome {
  double task_reward = 0;
  double aux_reward = 0;
  bool goal = false;       // terminal: goal reached
  bool truncated = false;  // horizon exhausted without the goal
  InteractionEvent event;
};

/// One episode in flight together with its reward composer.
class EnvRunner {
 public:
  EnvRunner(const sim::ActionSpace& space, RewardMode mode, const CompatibilityTable* table,
            double epsilon = kDefaultEpsilon);

  void reset(const sim::EpisodeConfig& config, const sim::LayoutSet& layouts);
  StepOutcome step(int action);

  const sim::WorldState& world() const { return world_; }
  const sim::ActionFeedback& feedback() const { return feedback_; }
  const sim::TaskSpec& task() const { return task_; }
  int steps() const { return steps_; }
  int horizon() const { return horizon_; }

 private:
  const sim::ActionSpace* space_;
  RewardComposer composer_;
  sim::WorldState world_;
  sim::TaskSpec task_{};
  sim::ActionFeedback feedback_;
  int steps_ = 0;
  int horizon_ = sim::kDefaultHorizon;
};

struct TrajectoryStep {
  Eigen::VectorXf obs;
  int action = 0;
  float log_prob = 0;
  float value = 0;
  double task_reward = 0;
  double aux_reward = 0;
  bool done = false;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  bool success = false;

  double task_return() const;
  double aux_return() const;
  /// Sum of task + lambda * aux over the trajectory.
  double shaped_return(double lambda_phi) const;
};

struct RolloutOptions {
  RewardMode mode = RewardMode::vanilla;
  const CompatibilityTable* table = nullptr;
  double lambda_phi = 1.0;
  double epsilon = kDefaultEpsilon;
  bool greedy = false;
  std::uint64_t seed = 0;
};

/// Runs one episode under the network policy, sampling actions unless
/// `greedy`. Terminates at the goal or the episode horizon.
Trajectory rollout(const Policy& policy, const sim::EpisodeConfig& episode,
                   const sim::LayoutSet& layouts, const sim::ActionSpace& space,
                   const RolloutOptions& options);

}  // namespace actctx::rl
