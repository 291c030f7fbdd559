#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "actctx/prior/activity_context.hpp"
#include "actctx/rl/evaluate.hpp"

namespace actctx::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitValidation = 3,
  kExitRuntime = 4,
};

/// Runs `body`, printing any exception to `err` and mapping it to an exit
/// code: ParseError, ValidationError, anything else.
int run_guarded(const std::function<void()>& body, std::ostream& err);

/// Text identifying the build that produced an artifact.
std::string build_id();

struct MakeSyntheticOptions {
  std::filesystem::path spec;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};

/// Writes detections.jsonl, ground_truth.csv, sequences.txt and
/// video_vocab.json into `out`.
void make_synthetic(const MakeSyntheticOptions& options, std::ostream& log);

struct ExtractPriorsOptions {
  std::filesystem::path detections;
  std::filesystem::path video_vocab;
  std::filesystem::path video_embeddings;
  /// Environment catalog or plain vocabulary file.
  std::filesystem::path env_vocab;
  std::filesystem::path env_embeddings;
  std::filesystem::path out;
  double similarity_threshold = 0.6;
  ExtractionOptions extraction;
  bool uniform = false;
  bool embed = false;
  /// Needs `layouts`; records are taken from `cooc_spawns` spawns per layout.
  bool cooc = false;
  std::vector<std::filesystem::path> layouts;
  int cooc_spawns = 16;
  /// Needs `sequences` (one clip per line over the video vocabulary).
  bool intseq = false;
  std::filesystem::path sequences;
};

/// Writes video_table.csv, aco.csv and mapping_report.json, plus
/// uniform.csv, embed.csv, cooc.csv and intseq.csv when requested.
void extract_priors(const ExtractPriorsOptions& options, std::ostream& log);

struct MakeEpisodesOptions {
  std::filesystem::path catalog;
  std::vector<std::filesystem::path> layouts;
  std::vector<std::string> tasks;
  int per_layout = 32;
  std::uint64_t seed = 99;
  int horizon = 256;
  std::filesystem::path out;
};

void make_episodes(const MakeEpisodesOptions& options, std::ostream& log);

struct TrainCommandOptions {
  std::filesystem::path manifest;
  std::string run;
  bool force = false;
  /// Keeps finished jobs whose fingerprint matches instead of refusing.
  bool resume = false;
  /// Falls back to ACTCTX_THREADS, then 1.
  std::optional<int> threads;
  std::vector<std::string> argv;
};

/// Trains every (task, seed) of the run into `<output>/<task>/seed_<s>/`.
/// Inputs are checked before any training starts; an existing result
/// directory is only replaced with `force`.
void train_run(const TrainCommandOptions& options, std::ostream& log);

struct EvalCommandOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path episodes;
  std::filesystem::path catalog;
  std::vector<std::filesystem::path> layouts;
  rl::ActionSelection selection = rl::ActionSelection::sampled;
  /// Directory for records.csv and summary.csv; nothing written when empty.
  std::filesystem::path out;
};

rl::EvalResult eval_checkpoint(const EvalCommandOptions& options, std::ostream& log);

struct ReportOptions {
  std::vector<std::filesystem::path> runs;
  std::filesystem::path out;
};

/// Merges run directories into curves.csv, success_vs_step.csv,
/// difficulty.csv and comparison.csv. Runs evaluated on different episode
/// sets for the same task are rejected.
void report(const ReportOptions& options, std::ostream& log);

/// Layout files named directly or found as *.json inside directories,
/// directories expanded in name order.
std::vector<std::filesystem::path> expand_layout_paths(const std::vector<std::filesystem::path>& paths);

}  // namespace actctx::cli
