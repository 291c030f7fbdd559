#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "actctx/core.hpp"

namespace actctx {

/// Axis-aligned pixel box (x1, y1) top-left, (x2, y2) bottom-right.
struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double area() const { return (x2 - x1) * (y2 - y1); }
  bool valid() const { return x2 > x1 && y2 > y1; }
  bool operator==(const Box&) const = default;
};

double intersection_over_union(const Box& a, const Box& b);

struct InstanceDetection {
  Box box;
  std::string label;
  double confidence = 0;
};

/// One frame: class-agnostic hand-contact boxes plus labeled detections.
struct DetectionFrame {
  std::string video_id;
  int frame_index = 0;
  std::vector<Box> active_boxes;
  std::vector<InstanceDetection> instances;
};

/// Frames of one clip ordered by frame index.
struct VideoClip {
  std::string video_id;
  std::vector<DetectionFrame> frames;
};

struct DetectionCorpus {
  std::vector<VideoClip> clips;  // in order of first appearance
  std::size_t malformed_lines = 0;
  std::vector<std::string> warnings;
};

/// Line-delimited JSON, one frame per line:
/// {"video_id": str, "frame_index": int,
///  "active_boxes": [[x1,y1,x2,y2], ...],
///  "instances": [{"box": [x1,y1,x2,y2], "class": str, "confidence": float}, ...]}
/// Blank lines are ignored. Lines that fail to decode or violate box/confidence
/// invariants are skipped and counted.
DetectionCorpus parse_detection_corpus(std::istream& in);
/// Throws std::runtime_error when the file cannot be opened.
DetectionCorpus parse_detection_corpus(const std::filesystem::path& path);

std::string to_json_line(const DetectionFrame& frame);

struct LabeledBox {
  Box box;
  std::string label;
  bool operator==(const LabeledBox&) const = default;
};
using LabeledActiveSet = std::vector<LabeledBox>;

/// Each active box takes the label of its best-overlapping confident instance
/// (IoU strictly above `iou_threshold`, confidence at least
/// `confidence_threshold`). Ties on IoU go to higher confidence, then to the
/// lexicographically smaller label. Unmatched active boxes are dropped.
LabeledActiveSet transfer_labels(const DetectionFrame& frame, double iou_threshold = 0.5,
                                 double confidence_threshold = 0.5);

}  // namespace actctx
