#pragma once

#include <compare>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "actctx/prior/compatibility.hpp"
#include "actctx/prior/detection.hpp"

namespace actctx {

/// Ordered (object, activity-context object) pair.
struct ClassPair {
  ClassId object = 0;
  ClassId aco = 0;
  auto operator<=>(const ClassPair&) const = default;
};

using ActivityContext = std::set<ClassPair>;

struct ContextOptions {
  /// Require both pair elements to be movable instead of only the first.
  bool strict_movable = false;
};

/// Pairs of distinct classes active in one frame whose first element is
/// movable. A frame holding only fixed classes yields (null, c) for each.
/// Throws ValidationError on labels outside `vocab`.
ActivityContext frame_activity_context(const LabeledActiveSet& labeled, const Vocabulary& vocab,
                                       ContextOptions options = {});

/// Fraction of the clip's frames containing each pair. Pairs never observed
/// are absent. Throws ValidationError on an empty clip.
using PairFractions = std::map<ClassPair, double>;
PairFractions clip_pair_fraction(std::span<const ActivityContext> clip_frames);

/// phi(i, j) = sum_v S_v(i, j) / sum_v sum_{k != i} S_v(i, k). Rows without
/// observed mass stay zero.
CompatibilityTable aggregate_compatibility(std::span<const PairFractions> clips,
                                           const Vocabulary& vocab);

struct ExtractionOptions {
  double iou_threshold = 0.5;
  double confidence_threshold = 0.5;
  ContextOptions context;
};

/// Full path from raw detection clips to a table over the video vocabulary.
/// Clips with no frames are skipped.
CompatibilityTable extract_compatibility(std::span<const VideoClip> clips, const Vocabulary& vocab,
                                         const ExtractionOptions& options = {});

}  // namespace actctx
