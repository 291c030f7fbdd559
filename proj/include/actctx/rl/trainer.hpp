#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "actctx/rl/env.hpp"
#include "actctx/rl/evaluate.hpp"
#include "actctx/rl/ppo.hpp"

namespace actctx::rl {

struct TrainConfig {
  sim::TaskId task = sim::TaskId::clean;
  RewardMode mode = RewardMode::vanilla;
  double lambda_phi = 1.0;
  double epsilon = kDefaultEpsilon;
  int horizon = sim::kDefaultHorizon;
  long total_steps = 200000;
  int num_envs = 8;
  int rollout_length = 128;
  double learning_rate = 2.5e-4;
  PpoHyper ppo;
  int epochs = 4;
  int minibatches = 2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double max_grad_norm = 0.5;
  int hidden = 64;
  int window_radius = 2;
  long eval_interval = 25000;
  ActionSelection eval_selection = ActionSelection::sampled;
  std::uint64_t seed = 1;
  /// Worker threads stepping environments; results do not depend on it.
  int threads = 1;

  void validate() const;
  /// Canonical text form; its digest is the config fingerprint.
  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
  std::string fingerprint() const;
};

struct CurvePoint {
  long step = 0;
  double success_rate = 0;
};

struct UpdateDiagnostics {
  long step = 0;
  PpoStats stats;
  double grad_norm = 0;
  double mean_task_reward = 0;
  double mean_aux_reward = 0;
  int episodes_finished = 0;
  int goals = 0;
};

struct TrainResult {
  Policy policy;
  std::vector<CurvePoint> curve;
  std::vector<UpdateDiagnostics> history;
};

/// Everything train() reads besides the config.
struct TrainInputs {
  sim::CatalogPtr catalog;
  std::vector<sim::Layout> train_layouts;
  /// Held-out evaluation episodes and the layouts they refer to.
  std::vector<sim::EpisodeConfig> eval_episodes;
  sim::LayoutSet eval_layouts;
  /// Needed by the aco and aco_plus_nav modes; uniform builds its own.
  const CompatibilityTable* table = nullptr;
  /// Called after each evaluation with the policy at that point.
  std::function<void(long step, const Policy&, const EvalResult&)> on_eval;
  std::function<void(const UpdateDiagnostics&)> on_update;
};

/// PPO over `num_envs` synchronous environments. Fresh training episodes
/// are drawn from the training layouts. The held-out set is evaluated every
/// `eval_interval` steps from step 0 through the final step, with
/// `eval_selection` picking actions.
/// Bit-reproducible for a fixed config on one build.
TrainResult train(const TrainConfig& config, const TrainInputs& inputs);

}  // namespace actctx::rl
