#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "actctx/prior/activity_context.hpp"

namespace actctx::synth {

/// One scripted activity: each listed object is in hand contact in a frame
/// with its own probability, independently of the others. Every pair of
/// simultaneously active objects is thereby emitted with the product of
/// their probabilities.
struct ActivitySpec {
  std::string name;
  std::vector<std::pair<std::string, double>> objects;
  /// Present in the scene but never touched; detected, never active.
  std::vector<std::string> bystanders;
  int clips = -1;  // overrides clips_per_activity when >= 0
};

/// Schema "actctx.synthetic/1":
///   {"vocabulary": [{"name", "movable"}], "activities": [{"name", "objects":
///    [{"class", "p"}], "bystanders": [...]}], "clips_per_activity",
///    "frames_per_clip", "noise"}
struct SyntheticCorpusSpec {
  Vocabulary vocabulary;
  std::vector<ActivitySpec> activities;
  int clips_per_activity = 4;
  int frames_per_clip = 30;
  /// Per active object and frame: chance the detector output is corrupted
  /// (missed detection, wrong label, or a spurious contact box).
  double noise = 0.0;

  /// Throws ValidationError on probabilities outside [0, 1], unknown classes
  /// or non-positive counts.
  void validate() const;
};

SyntheticCorpusSpec parse_synthetic_spec(const std::string& json_text);
SyntheticCorpusSpec load_synthetic_spec(const std::filesystem::path& path);

struct SyntheticCorpus {
  std::vector<VideoClip> clips;
  /// Activity contexts of the uncorrupted active sets, per clip and frame.
  std::vector<std::vector<ActivityContext>> true_contexts;
  /// Table implied by the uncorrupted active sets; extraction from a
  /// noise-free corpus reproduces it exactly.
  CompatibilityTable ground_truth;
  /// Per clip, the movable classes in the order they are first touched.
  std::vector<std::vector<ClassId>> interaction_sequences;
};

/// Deterministic given (spec, seed).
SyntheticCorpus generate_corpus(const SyntheticCorpusSpec& spec, std::uint64_t seed);

/// Line-delimited frames in the detection wire format.
void write_corpus(const std::filesystem::path& path, const SyntheticCorpus& corpus);
/// One clip per line: class names separated by spaces.
void write_sequences(const std::filesystem::path& path, const SyntheticCorpus& corpus,
                     const Vocabulary& vocab);
std::vector<std::vector<ClassId>> read_sequences(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace actctx::synth
