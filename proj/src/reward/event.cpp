#include "actctx/reward/event.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace actctx {

std::string event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::put: return "put";
    case EventKind::take: return "take";
    case EventKind::interact: return "interact";
    case EventKind::navigate: return "navigate";
  }
  return "?";
}

void write_event_log_header(std::ostream& out) {
  out << "step\tkind\tverb\theld_class\theld_instance\ttarget_class\ttarget_instance\t"
         "subject_class\tsubject_instance\tx\ty\tsuccess\n";
}

namespace {

template <typename T, typename F>
std::string opt_str(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : std::string("-");
}

}  // namespace

void write_event_log_line(std::ostream& out, int step, const InteractionEvent& e,
                          const Vocabulary& vocab) {
  const auto cls = [&](ClassId c) { return vocab.name(c); };
  const auto inst = [](InstanceId i) { return std::to_string(to_index(i)); };
  std::ostringstream line;
  line << std::setprecision(17);
  line << step << '\t' << event_kind_name(e.kind) << '\t' << sim::verb_name(e.verb) << '\t'
       << opt_str(e.held_class, cls) << '\t' << opt_str(e.held_instance, inst) << '\t'
       << (e.target_class >= 0 ? vocab.name(e.target_class) : std::string("-")) << '\t'
       << opt_str(e.target_instance, inst) << '\t' << opt_str(e.subject_class, cls) << '\t'
       << opt_str(e.subject_instance, inst) << '\t' << e.position.x() << '\t' << e.position.y()
       << '\t' << (e.success ? 1 : 0) << '\n';
  out << line.str();
}

std::vector<InteractionEvent> read_event_log(std::istream& in, const Vocabulary& vocab) {
  std::vector<InteractionEvent> events;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) f.push_back(cell);
    if (f.size() != 12) throw ParseError("event log: expected 12 fields");
    InteractionEvent e;
    if (f[1] == "put") e.kind = EventKind::put;
    else if (f[1] == "take") e.kind = EventKind::take;
    else if (f[1] == "interact") e.kind = EventKind::interact;
    else if (f[1] == "navigate") e.kind = EventKind::navigate;
    else throw ParseError("event log: bad kind " + f[1]);
    auto verb = sim::verb_from_name(f[2]);
    if (!verb) throw ParseError("event log: bad verb " + f[2]);
    e.verb = *verb;
    const auto cls = [&](const std::string& s) -> std::optional<ClassId> {
      if (s == "-") return std::nullopt;
      return vocab.at(s);
    };
    const auto inst = [](const std::string& s) -> std::optional<InstanceId> {
      if (s == "-") return std::nullopt;
      return InstanceId{std::stoi(s)};
    };
    e.held_class = cls(f[3]);
    e.held_instance = inst(f[4]);
    e.target_class = f[5] == "-" ? -1 : vocab.at(f[5]);
    e.target_instance = inst(f[6]);
    e.subject_class = cls(f[7]);
    e.subject_instance = inst(f[8]);
    e.position = Vec2(std::stod(f[9]), std::stod(f[10]));
    e.success = f[11] == "1";
    events.push_back(e);
  }
  return events;
}

}  // namespace actctx
