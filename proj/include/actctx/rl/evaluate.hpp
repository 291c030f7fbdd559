#pragma once

#include <span>
#include <string>
#include <vector>

#include "actctx/rl/policy.hpp"
#include "actctx/sim/episode.hpp"

namespace actctx::rl {

struct EpisodeRecord {
  int episode = 0;  // index into the evaluated set
  std::string scene;
  std::string task;
  bool success = false;
  int steps = 0;
  double difficulty = 0;  // meters

  bool operator==(const EpisodeRecord&) const = default;
};

struct EvalResult {
  double success_rate = 0;
  std::vector<EpisodeRecord> records;
  /// "index: reason" for episodes dropped because no eligible object exists.
  std::vector<std::string> excluded;
};

enum class ActionSelection {
  /// Argmax of the policy. A reactive policy can lock into repeating a
  /// failed action, since failure leaves its observation unchanged.
  greedy,
  /// Draw from the policy with a generator seeded by the episode seed, so
  /// every method sees the same random stream per episode.
  sampled,
};

struct EvalOptions {
  ActionSelection selection = ActionSelection::sampled;
  int batch = 64;  // worlds stepped in lockstep
};

/// Runs every episode to the goal or its horizon. The policy is only read.
EvalResult evaluate(const Policy& policy, std::span<const sim::EpisodeConfig> episodes,
                    const sim::LayoutSet& layouts, const sim::ActionSpace& space,
                    const EvalOptions& options = {});

std::string selection_name(ActionSelection s);
ActionSelection selection_from_name(const std::string& name);

/// Per-task success rates of a result, keyed by task name.
std::vector<std::pair<std::string, double>> success_by_task(const EvalResult& result);

struct DifficultyBin {
  double lo = 0;
  double hi = 0;
  int count = 0;
  int successes = 0;
  double success_rate() const { return count ? static_cast<double>(successes) / count : 0.0; }
};

struct DifficultyProfile {
  std::vector<DifficultyBin> bins;
  /// Set when fewer records than bins were available.
  bool flagged = false;
};

inline constexpr int kDifficultyBins = 8;

/// Sorts records by navigation difficulty (ties by episode index) and cuts
/// them into `bins` equal-count groups; bin b holds sorted positions
/// [floor(b n / k), floor((b + 1) n / k)).
DifficultyProfile difficulty_report(std::span<const EpisodeRecord> records, int bins = kDifficultyBins);

}  // namespace actctx::rl
