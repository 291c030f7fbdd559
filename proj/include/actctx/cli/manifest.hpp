#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "actctx/rl/env.hpp"
#include "actctx/sim/task.hpp"

namespace actctx::cli {

/// One named training sweep: every task crossed with every seed.
struct RunSpec {
  std::string name;
  rl::RewardMode mode = rl::RewardMode::vanilla;
  /// Compatibility table file; required by the aco modes, ignored otherwise.
  std::filesystem::path prior;
  std::vector<sim::TaskId> tasks;
  std::vector<std::filesystem::path> train_layouts;
  std::vector<std::filesystem::path> eval_layouts;
  std::vector<std::uint64_t> seeds;
  long total_steps = 200000;
  long eval_interval = 25000;
  int eval_episodes_per_layout = 32;
  std::uint64_t episode_seed = 99;
  /// Resolved output directory of the run.
  std::filesystem::path output;
  /// JSON object of extra TrainConfig keys (learning_rate, entropy_coef, ...).
  std::string config = "{}";
};

/// Schema "actctx.manifest/1". Relative paths resolve against the manifest's
/// directory; run outputs resolve against `output_root`, which the
/// ACTCTX_OUTPUT_ROOT environment variable overrides. Keys under "defaults"
/// apply to every run that does not set them.
struct ExperimentManifest {
  std::filesystem::path source;
  std::filesystem::path catalog;
  std::filesystem::path output_root;
  std::vector<RunSpec> runs;
  /// JSON text of the manifest with every path made absolute.
  std::string resolved;

  /// Throws ValidationError naming the known runs when absent.
  const RunSpec& run(const std::string& name) const;
};

/// Throws ParseError on malformed JSON and ValidationError on contract
/// violations such as duplicate run names or unknown modes.
ExperimentManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// Checks every file the run reads exists; throws ValidationError listing
/// the missing ones.
void require_artifacts(const ExperimentManifest& manifest, const RunSpec& run);

}  // namespace actctx::cli
