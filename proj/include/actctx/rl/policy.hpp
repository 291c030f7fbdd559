#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "actctx/rl/network.hpp"
#include "actctx/sim/observation.hpp"

namespace actctx::rl {

/// What drives the agent: a trained network, the scripted task oracle, or
/// uniform random actions.
enum class PolicyKind { network, scripted, random };

/// A deployable agent: network weights plus the encoder settings and
/// environment vocabulary they were trained against.
struct Policy {
  PolicyKind kind = PolicyKind::network;
  std::vector<std::string> vocabulary;
  int window_radius = 2;
  ActorCritic<float> net;
  /// Free-form reproducibility fingerprint carried into checkpoints.
  std::string fingerprint;
  std::string task;    // training task name, informational
  std::string method;  // reward mode name, informational
};

/// Checks the policy can drive worlds built from `catalog`; throws
/// ValidationError listing the differing class names otherwise.
void require_compatible(const Policy& policy, const sim::KitchenCatalog& catalog, int num_actions);

/// Index of the largest logit; ties resolve to the lowest index.
template <typename Derived>
int argmax_column(const Eigen::MatrixBase<Derived>& col) {
  Eigen::Index best = 0;
  col.maxCoeff(&best);
  return static_cast<int>(best);
}

/// Inverse-CDF draw from a column of log-probabilities.
int sample_action(const Eigen::Ref<const Eigen::VectorXf>& log_prob, Rng& rng);

/// Checkpoint JSON (schema "actctx.checkpoint/1").
void save_checkpoint(const std::filesystem::path& path, const Policy& policy);
Policy load_checkpoint(const std::filesystem::path& path);
std::string checkpoint_to_json(const Policy& policy);
Policy checkpoint_from_json(const std::string& text);

}  // namespace actctx::rl
