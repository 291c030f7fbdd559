#include "actctx/synth/synthetic.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "actctx/rng.hpp"

namespace actctx::synth {

void SyntheticCorpusSpec::validate() const {
  if (clips_per_activity < 1) throw ValidationError("synthetic spec: clips_per_activity must be >= 1");
  if (frames_per_clip < 1) throw ValidationError("synthetic spec: frames_per_clip must be >= 1");
  if (!(noise >= 0 && noise <= 1)) throw ValidationError("synthetic spec: noise must lie in [0, 1]");
  if (activities.empty()) throw ValidationError("synthetic spec: no activities");
  for (const auto& a : activities) {
    for (const auto& [name, p] : a.objects) {
      vocabulary.at(name);
      if (!(p >= 0 && p <= 1)) {
        throw ValidationError("synthetic spec: probability of " + name + " in " + a.name + " outside [0, 1]");
      }
    }
    for (const auto& name : a.bystanders) vocabulary.at(name);
    // Each class gets one slot of the frame grid.
    if (a.objects.size() + a.bystanders.size() > 11) {
      throw ValidationError("synthetic spec: activity " + a.name + " lists more than 11 objects");
    }
  }
}

SyntheticCorpusSpec parse_synthetic_spec(const std::string& text) {
  SyntheticCorpusSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("schema", std::string("actctx.synthetic/1")) != "actctx.synthetic/1") {
      throw ParseError("synthetic spec: unsupported schema");
    }
    std::vector<std::string> names;
    std::vector<bool> movable;
    for (const auto& c : j.at("vocabulary")) {
      names.push_back(c.at("name").get<std::string>());
      movable.push_back(c.at("movable").get<bool>());
    }
    spec.vocabulary = Vocabulary(std::move(names), std::move(movable));
    for (const auto& a : j.at("activities")) {
      ActivitySpec act;
      act.name = a.at("name").get<std::string>();
      for (const auto& o : a.at("objects")) {
        act.objects.emplace_back(o.at("class").get<std::string>(), o.at("p").get<double>());
      }
      act.bystanders = a.value("bystanders", std::vector<std::string>{});
      act.clips = a.value("clips", -1);
      spec.activities.push_back(std::move(act));
    }
    spec.clips_per_activity = j.value("clips_per_activity", spec.clips_per_activity);
    spec.frames_per_clip = j.value("frames_per_clip", spec.frames_per_clip);
    spec.noise = j.value("noise", spec.noise);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("synthetic spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SyntheticCorpusSpec load_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open synthetic spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_synthetic_spec(ss.str());
}

namespace {

constexpr double kSlot = 160.0;  // frame is a 4 x 3 grid of 160 px slots
constexpr int kSlotCols = 4;

Box slot_box(int slot, Rng& rng) {
  const double x0 = (slot % kSlotCols) * kSlot, y0 = (slot / kSlotCols) * kSlot;
  const double w = rng.uniform(60, 120), h = rng.uniform(60, 120);
  const double x = x0 + rng.uniform(5, kSlot - 5 - w), y = y0 + rng.uniform(5, kSlot - 5 - h);
  return {x, y, x + w, y + h};
}

/// Hand-contact box overlapping `b` with IoU well above 0.5.
Box contact_box(const Box& b, Rng& rng) {
  const double dx = 0.05 * (b.x2 - b.x1), dy = 0.05 * (b.y2 - b.y1);
  return {b.x1 + rng.uniform(-dx, dx), b.y1 + rng.uniform(-dy, dy), b.x2 + rng.uniform(-dx, dx),
          b.y2 + rng.uniform(-dy, dy)};
}

}  // namespace

SyntheticCorpus generate_corpus(const SyntheticCorpusSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Vocabulary& vocab = spec.vocabulary;
  Rng rng(mix_seed(seed, 0xc0ff));
  SyntheticCorpus out;
  std::vector<PairFractions> fractions;
  int clip_counter = 0;
  for (const auto& act : spec.activities) {
    const int clips = act.clips >= 0 ? act.clips : spec.clips_per_activity;
    for (int c = 0; c < clips; ++c) {
      VideoClip clip;
      clip.video_id = "syn" + std::to_string(clip_counter++) + "_" + act.name;
      std::vector<ActivityContext> truth;
      std::vector<ClassId> sequence;
      for (int f = 0; f < spec.frames_per_clip; ++f) {
        DetectionFrame frame;
        frame.video_id = clip.video_id;
        frame.frame_index = f;
        LabeledActiveSet clean;
        int slot = 0;
        std::vector<std::pair<Box, std::string>> idle;  // detected, not touched
        for (const auto& [name, p] : act.objects) {
          const Box b = slot_box(slot++, rng);
          const bool active = rng.bernoulli(p);
          if (!active) {
            idle.emplace_back(b, name);
            frame.instances.push_back({b, name, rng.uniform(0.6, 1.0)});
            continue;
          }
          clean.push_back({b, name});
          const ClassId id = vocab.at(name);
          if (vocab.movable(id) && std::find(sequence.begin(), sequence.end(), id) == sequence.end()) {
            sequence.push_back(id);
          }
          InstanceDetection det{b, name, rng.uniform(0.6, 1.0)};
          frame.active_boxes.push_back(contact_box(b, rng));
          if (spec.noise > 0 && rng.bernoulli(spec.noise)) {
            switch (rng.below(3)) {
              case 0:  // missed: low confidence
                det.confidence = rng.uniform(0.05, 0.45);
                break;
              case 1:  // confused with another class
                det.label = vocab.name(rng.below(vocab.size()));
                break;
              default:  // spurious contact on something else in view
                frame.active_boxes.push_back(contact_box(slot_box(11, rng), rng));
                frame.instances.push_back({frame.active_boxes.back(), vocab.name(rng.below(vocab.size())),
                                           rng.uniform(0.6, 1.0)});
                break;
            }
          }
          frame.instances.push_back(det);
        }
        for (const auto& name : act.bystanders) {
          frame.instances.push_back({slot_box(slot++, rng), name, rng.uniform(0.6, 1.0)});
        }
        truth.push_back(frame_activity_context(clean, vocab));
        clip.frames.push_back(std::move(frame));
      }
      fractions.push_back(clip_pair_fraction(truth));
      out.true_contexts.push_back(std::move(truth));
      out.interaction_sequences.push_back(std::move(sequence));
      out.clips.push_back(std::move(clip));
    }
  }
  out.ground_truth = aggregate_compatibility(fractions, vocab);
  return out;
}

void write_corpus(const std::filesystem::path& path, const SyntheticCorpus& corpus) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& clip : corpus.clips) {
    for (const auto& f : clip.frames) out << to_json_line(f) << '\n';
  }
}

void write_sequences(const std::filesystem::path& path, const SyntheticCorpus& corpus, const Vocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& seq : corpus.interaction_sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) out << (i ? " " : "") << vocab.name(seq[i]);
    out << '\n';
  }
}

std::vector<std::vector<ClassId>> read_sequences(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sequence file " + path.string());
  std::vector<std::vector<ClassId>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<ClassId> seq;
    for (std::string name; ss >> name;) seq.push_back(vocab.at(name));
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace actctx::synth
