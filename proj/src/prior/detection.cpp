#include "actctx/prior/detection.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace actctx {

double intersection_over_union(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

namespace {

Box box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("box must be an array of 4 numbers");
  Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!b.valid()) throw ValidationError("box with non-positive area");
  return b;
}

nlohmann::ordered_json box_to_json(const Box& b) { return nlohmann::ordered_json::array({b.x1, b.y1, b.x2, b.y2}); }

DetectionFrame frame_from_json(const nlohmann::json& j) {
  DetectionFrame f;
  f.video_id = j.at("video_id").get<std::string>();
  f.frame_index = j.at("frame_index").get<int>();
  if (f.frame_index < 0) throw ValidationError("negative frame_index");
  for (const auto& b : j.at("active_boxes")) f.active_boxes.push_back(box_from_json(b));
  for (const auto& inst : j.at("instances")) {
    InstanceDetection d;
    d.box = box_from_json(inst.at("box"));
    d.label = inst.at("class").get<std::string>();
    d.confidence = inst.at("confidence").get<double>();
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw ValidationError("confidence outside [0,1]");
    }
    f.instances.push_back(std::move(d));
  }
  return f;
}

}  // namespace

DetectionCorpus parse_detection_corpus(std::istream& in) {
  DetectionCorpus corpus;
  std::map<std::string, std::size_t> clip_index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      DetectionFrame frame = frame_from_json(nlohmann::json::parse(line));
      auto [it, inserted] = clip_index.emplace(frame.video_id, corpus.clips.size());
      if (inserted) corpus.clips.push_back(VideoClip{frame.video_id, {}});
      corpus.clips[it->second].frames.push_back(std::move(frame));
    } catch (const std::exception& e) {
      ++corpus.malformed_lines;
      corpus.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (auto& clip : corpus.clips) {
    std::stable_sort(clip.frames.begin(), clip.frames.end(),
                     [](const DetectionFrame& a, const DetectionFrame& b) {
                       return a.frame_index < b.frame_index;
                     });
  }
  return corpus;
}

DetectionCorpus parse_detection_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open detection corpus " + path.string());
  return parse_detection_corpus(in);
}

std::string to_json_line(const DetectionFrame& frame) {
  nlohmann::ordered_json j;
  j["video_id"] = frame.video_id;
  j["frame_index"] = frame.frame_index;
  j["active_boxes"] = nlohmann::json::array();
  for (const auto& b : frame.active_boxes) j["active_boxes"].push_back(box_to_json(b));
  j["instances"] = nlohmann::json::array();
  for (const auto& d : frame.instances) {
    nlohmann::ordered_json inst;
    inst["box"] = box_to_json(d.box);
    inst["class"] = d.label;
    inst["confidence"] = d.confidence;
    j["instances"].push_back(std::move(inst));
  }
  return j.dump();
}

LabeledActiveSet transfer_labels(const DetectionFrame& frame, double iou_threshold,
                                 double confidence_threshold) {
  LabeledActiveSet out;
  for (const Box& active : frame.active_boxes) {
    const InstanceDetection* best = nullptr;
    double best_iou = 0;
    for (const auto& inst : frame.instances) {
      if (inst.confidence < confidence_threshold) continue;
      const double overlap = intersection_over_union(active, inst.box);
      if (overlap <= iou_threshold) continue;
      const bool better =
          best == nullptr || overlap > best_iou ||
          (overlap == best_iou && (inst.confidence > best->confidence ||
                                   (inst.confidence == best->confidence && inst.label < best->label)));
      if (better) {
        best = &inst;
        best_iou = overlap;
      }
    }
    if (best == nullptr) continue;
    LabeledBox labeled{active, best->label};
    if (std::find(out.begin(), out.end(), labeled) == out.end()) out.push_back(std::move(labeled));
  }
  return out;
}

}  // namespace actctx
