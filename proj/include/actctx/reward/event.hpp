#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "actctx/core.hpp"
#include "actctx/prior/vocabulary.hpp"
#include "actctx/sim/action.hpp"

namespace actctx {

enum class EventKind : std::uint8_t { put, take, interact, navigate };

std::string event_kind_name(EventKind kind);

/// What one simulator step did.
///
/// For `put`, `subject` is the placed instance and `position` its final
/// position; for `take`, `subject` is the removed instance and `position`
/// where it was. `target` is the receptacle for put and the object acted on
/// otherwise.
struct InteractionEvent {
  EventKind kind = EventKind::navigate;
  sim::Verb verb = sim::Verb::move_forward;
  std::optional<ClassId> held_class;  // before the step
  std::optional<InstanceId> held_instance;
  ClassId target_class = -1;
  std::optional<InstanceId> target_instance;
  std::optional<ClassId> subject_class;
  std::optional<InstanceId> subject_instance;
  Vec2 position = Vec2::Zero();
  bool success = false;

  bool operator==(const InteractionEvent&) const = default;
};

/// Tab-separated event log, one event per line, fields in this order:
/// step, kind, verb, held_class, held_instance, target_class, target_instance,
/// subject_class, subject_instance, x, y, success. Absent values are "-".
void write_event_log_header(std::ostream& out);
void write_event_log_line(std::ostream& out, int step, const InteractionEvent& event,
                          const Vocabulary& vocab);
std::vector<InteractionEvent> read_event_log(std::istream& in, const Vocabulary& vocab);

}  // namespace actctx
