#include "actctx/prior/activity_context.hpp"

#include <algorithm>

namespace actctx {

ActivityContext frame_activity_context(const LabeledActiveSet& labeled, const Vocabulary& vocab,
                                       ContextOptions options) {
  std::set<ClassId> present;
  for (const auto& entry : labeled) present.insert(vocab.at(entry.label));

  ActivityContext context;
  const bool any_movable =
      std::any_of(present.begin(), present.end(), [&](ClassId c) { return vocab.movable(c); });
  if (!any_movable) {
    for (ClassId c : present) context.insert({vocab.null_id(), c});
    return context;
  }
  for (ClassId a : present) {
    if (!vocab.movable(a)) continue;
    for (ClassId b : present) {
      if (a == b) continue;
      if (options.strict_movable && !vocab.movable(b)) continue;
      context.insert({a, b});
    }
  }
  return context;
}

PairFractions clip_pair_fraction(std::span<const ActivityContext> clip_frames) {
  if (clip_frames.empty()) throw ValidationError("clip_pair_fraction: empty clip");
  std::map<ClassPair, int> counts;
  for (const auto& frame : clip_frames) {
    for (const auto& pair : frame) ++counts[pair];
  }
  PairFractions out;
  const double length = static_cast<double>(clip_frames.size());
  for (const auto& [pair, count] : counts) out.emplace(pair, count / length);
  return out;
}

CompatibilityTable aggregate_compatibility(std::span<const PairFractions> clips,
                                           const Vocabulary& vocab) {
  CompatibilityTable table(vocab);
  Eigen::MatrixXd& scores = table.mutable_scores();
  for (const auto& clip : clips) {
    for (const auto& [pair, fraction] : clip) {
      if (pair.object == pair.aco) continue;
      scores(pair.object, pair.aco) += fraction;
    }
  }
  table.normalize_rows();
  return table;
}

CompatibilityTable extract_compatibility(std::span<const VideoClip> clips, const Vocabulary& vocab,
                                         const ExtractionOptions& options) {
  std::vector<PairFractions> per_clip;
  per_clip.reserve(clips.size());
  for (const auto& clip : clips) {
    if (clip.frames.empty()) continue;
    std::vector<ActivityContext> contexts;
    contexts.reserve(clip.frames.size());
    for (const auto& frame : clip.frames) {
      contexts.push_back(frame_activity_context(
          transfer_labels(frame, options.iou_threshold, options.confidence_threshold), vocab,
          options.context));
    }
    per_clip.push_back(clip_pair_fraction(contexts));
  }
  return aggregate_compatibility(per_clip, vocab);
}

}  // namespace actctx
