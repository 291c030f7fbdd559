#include "actctx/rl/env.hpp"

#include <array>

#include "actctx/prior/baseline_priors.hpp"

namespace actctx::rl {

namespace {
constexpr std::array<const char*, 5> kModeNames{"vanilla", "aco", "uniform", "nav_coverage", "aco_plus_nav"};
}

std::string reward_mode_name(RewardMode mode) { return kModeNames[static_cast<std::size_t>(mode)]; }

RewardMode reward_mode_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kModeNames.size(); ++i) {
    if (name == kModeNames[i]) return static_cast<RewardMode>(i);
  }
  throw ValidationError("unknown reward mode '" + name + "'");
}

bool uses_table(RewardMode mode) {
  return mode == RewardMode::aco || mode == RewardMode::uniform || mode == RewardMode::aco_plus_nav;
}

RewardComposer::RewardComposer(RewardMode mode, const CompatibilityTable* table, double epsilon)
    : mode_(mode) {
  if (uses_table(mode)) {
    if (!table) throw ValidationError("reward mode " + reward_mode_name(mode) + " needs a compatibility table");
    activity_.emplace(*table, epsilon);
  }
}

void RewardComposer::reset(const sim::WorldState& start) {
  if (activity_) activity_->reset();
  visited_.clear();
  // Whatever is in view at spawn earns nothing.
  if (mode_ == RewardMode::nav_coverage || mode_ == RewardMode::aco_plus_nav) {
    coverage_reward(start, visited_);
  }
}

double RewardComposer::auxiliary(const InteractionEvent& event, const sim::WorldState& after) {
  switch (mode_) {
    case RewardMode::vanilla:
      return 0.0;
    case RewardMode::aco:
    case RewardMode::uniform:
      return activity_->on_step(event, after);
    case RewardMode::nav_coverage:
      return coverage_reward(after, visited_);
    case RewardMode::aco_plus_nav: {
      const double a = activity_->on_step(event, after);
      return 0.5 * a + 0.5 * coverage_reward(after, visited_);
    }
  }
  return 0.0;
}

EnvRunner::EnvRunner(const sim::ActionSpace& space, RewardMode mode, const CompatibilityTable* table,
                     double epsilon)
    : space_(&space), composer_(mode, table, epsilon) {}

void EnvRunner::reset(const sim::EpisodeConfig& config, const sim::LayoutSet& layouts) {
  world_ = sim::instantiate(config, layouts);
  task_ = sim::make_task(config.task, *world_.catalog);
  feedback_ = {};
  steps_ = 0;
  horizon_ = config.horizon;
  composer_.reset(world_);
}

StepOutcome EnvRunner::step(int action) {
  StepOutcome out;
  const sim::StepResult r = world_.apply(*space_, action);
  ++steps_;
  feedback_.record(action, r.success, !sim::is_navigation(space_->at(action).verb));
  out.event = r.event;
  out.aux_reward = composer_.auxiliary(r.event, world_);
  if (sim::check_goal(world_, task_)) {
    out.task_reward = sim::kGoalReward;
    out.goal = true;
  } else {
    out.task_reward = sim::kStepPenalty;
    out.truncated = steps_ >= horizon_;
  }
  return out;
}

double Trajectory::task_return() const {
  double s = 0;
  for (const auto& st : steps) s += st.task_reward;
  return s;
}

double Trajectory::aux_return() const {
  double s = 0;
  for (const auto& st : steps) s += st.aux_reward;
  return s;
}

double Trajectory::shaped_return(double lambda_phi) const {
  double s = 0;
  for (const auto& st : steps) s += total_reward(st.task_reward, st.aux_reward, lambda_phi);
  return s;
}

Trajectory rollout(const Policy& policy, const sim::EpisodeConfig& episode, const sim::LayoutSet& layouts,
                   const sim::ActionSpace& space, const RolloutOptions& options) {
  const sim::KitchenCatalog& cat = *layouts.at(episode.scene).catalog;
  require_compatible(policy, cat, space.size());
  const sim::ObservationEncoder enc(cat, space.size(), policy.window_radius);
  EnvRunner env(space, options.mode, options.table, options.epsilon);
  env.reset(episode, layouts);
  Rng rng(mix_seed(options.seed, 0x7011));
  Trajectory traj;
  ActorCritic<float>::Cache cache;
  Eigen::MatrixXf x(enc.dim(), 1);
  for (;;) {
    enc.encode(env.world(), env.feedback(), x.col(0));
    policy.net.forward(x, cache);
    const Eigen::MatrixXf logp = log_softmax(cache.logits);
    int a = argmax_column(logp.col(0));
    if (!options.greedy) a = sample_action(logp.col(0), rng);
    const StepOutcome o = env.step(a);
    TrajectoryStep st;
    st.obs = x.col(0);
    st.action = a;
    st.log_prob = logp(a, 0);
    st.value = cache.value[0];
    st.task_reward = o.task_reward;
    st.aux_reward = o.aux_reward;
    st.done = o.goal || o.truncated;
    traj.steps.push_back(std::move(st));
    if (o.goal) traj.success = true;
    if (o.goal || o.truncated) break;
  }
  return traj;
}

}  // namespace actctx::rl
