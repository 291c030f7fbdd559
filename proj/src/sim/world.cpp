#include "actctx/sim/world.hpp"

#include <cmath>
#include <limits>

namespace actctx::sim {

Cell heading_step(Heading h) {
  switch (h) {
    case Heading::north: return {0, -1};
    case Heading::east: return {1, 0};
    case Heading::south: return {0, 1};
    case Heading::west: return {-1, 0};
  }
  return {0, 0};
}

Heading turned_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }
Heading turned_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }

Vec2 cell_center(Cell c) { return Vec2((c.x + 0.5) * kCellSize, (c.y + 0.5) * kCellSize); }

bool WorldState::visible(const ObjectInstance& o) const {
  if (held == o.id) return false;
  std::optional<InstanceId> up = o.contained_in;
  while (up) {
    const ObjectInstance& c = object(*up);
    if (held == c.id) return false;
    if (catalog->has(c.cls, Affordance::openable) && !c.open) return false;
    up = c.contained_in;
  }
  return true;
}

bool WorldState::in_reach(const ObjectInstance& o, const AgentPose& pose) const {
  const Vec2 offset = o.position - cell_center(pose.cell);
  if (offset.norm() >= kInteractionRange) return false;
  const Cell h = heading_step(pose.heading);
  return offset.x() * h.x + offset.y() * h.y >= 0.0;
}

bool WorldState::has_contents(InstanceId receptacle) const {
  for (const auto& o : objects) {
    if (o.contained_in == receptacle && held != o.id) return true;
  }
  return false;
}

bool WorldState::accepts(const ObjectInstance& receptacle, const ObjectInstance& item) const {
  const ClassInfo& info = catalog->info(receptacle.cls);
  if (!info.affordances.has(Affordance::receptacle)) return false;
  if (info.affordances.has(Affordance::openable) && !receptacle.open) return false;
  if (info.accepts && !catalog->has(item.cls, *info.accepts)) return false;
  // Movable receptacles (pots, pans) do not nest other receptacles.
  if (!is_fixed(receptacle) && catalog->has(item.cls, Affordance::receptacle)) return false;
  return true;
}

std::optional<InstanceId> WorldState::select_target(const Action& action,
                                                    const AgentPose& pose) const {
  if (is_navigation(action.verb) || action.target < 0) return std::nullopt;
  const ObjectInstance* held_obj = held ? &object(*held) : nullptr;
  switch (action.verb) {
    case Verb::take:
      if (held_obj) return std::nullopt;
      break;
    case Verb::put:
      if (!held_obj) return std::nullopt;
      break;
    case Verb::slice:
      if (!held_obj || !catalog->has(held_obj->cls, Affordance::cutter)) return std::nullopt;
      break;
    default:
      break;
  }
  const Vec2 origin = cell_center(pose.cell);
  std::optional<InstanceId> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& o : objects) {
    if (o.cls != action.target || !visible(o) || !in_reach(o, pose)) continue;
    bool ok = false;
    switch (action.verb) {
      case Verb::take:
        ok = !is_fixed(o) && !has_contents(o.id);
        break;
      case Verb::put:
        ok = accepts(o, *held_obj);
        break;
      case Verb::open:
        ok = catalog->has(o.cls, Affordance::openable) && !o.open;
        break;
      case Verb::close:
        ok = catalog->has(o.cls, Affordance::openable) && o.open;
        break;
      case Verb::toggle_on:
        ok = catalog->has(o.cls, Affordance::toggleable) && !o.toggled_on;
        break;
      case Verb::toggle_off:
        ok = catalog->has(o.cls, Affordance::toggleable) && o.toggled_on;
        break;
      case Verb::slice:
        ok = catalog->has(o.cls, Affordance::sliceable) && !o.sliced;
        break;
      default:
        break;
    }
    if (!ok) continue;
    const double d = (o.position - origin).norm();
    if (d < best_dist) {
      best_dist = d;
      best = o.id;
    }
  }
  return best;
}

StepResult WorldState::apply(const ActionSpace& space, int action_index) {
  if (action_index < 0 || action_index >= space.size()) {
    throw ValidationError("action index " + std::to_string(action_index) + " outside action space");
  }
  const Action action = space.at(action_index);
  StepResult result;
  InteractionEvent& e = result.event;
  e.verb = action.verb;
  e.target_class = action.target;
  if (held) {
    e.held_instance = held;
    e.held_class = object(*held).cls;
  }

  if (is_navigation(action.verb)) {
    e.kind = EventKind::navigate;
    if (action.verb == Verb::move_forward) {
      const Cell d = heading_step(agent.heading);
      const Cell next{agent.cell.x + d.x, agent.cell.y + d.y};
      if (!grid.is_blocked(next)) {
        agent.cell = next;
        result.success = true;
      }
    } else {
      agent.heading = action.verb == Verb::turn_left ? turned_left(agent.heading)
                                                     : turned_right(agent.heading);
      result.success = true;
    }
    e.position = cell_center(agent.cell);
    e.success = result.success;
    return result;
  }

  e.kind = action.verb == Verb::take  ? EventKind::take
           : action.verb == Verb::put ? EventKind::put
                                      : EventKind::interact;
  const auto target = select_target(action);
  if (target) {
    ObjectInstance& t = object(*target);
    e.target_instance = t.id;
    result.success = true;
    switch (action.verb) {
      case Verb::take:
        e.subject_instance = t.id;
        e.subject_class = t.cls;
        e.position = t.position;
        t.contained_in.reset();
        held = t.id;
        break;
      case Verb::put: {
        ObjectInstance& item = object(*held);
        Vec2 toward = cell_center(agent.cell) - t.position;
        const double len = toward.norm();
        if (len > 0) toward /= len;
        item.position = t.position + 0.1 * toward;
        item.cell = t.cell;
        item.contained_in = t.id;
        e.subject_instance = item.id;
        e.subject_class = item.cls;
        e.position = item.position;
        held.reset();
        break;
      }
      case Verb::open: t.open = true; break;
      case Verb::close: t.open = false; break;
      case Verb::toggle_on: t.toggled_on = true; break;
      case Verb::toggle_off: t.toggled_on = false; break;
      case Verb::slice: t.sliced = true; break;
      default: break;
    }
    if (action.verb != Verb::take && action.verb != Verb::put) e.position = t.position;
  } else {
    e.position = cell_center(agent.cell);
  }
  e.success = result.success;
  return result;
}

bool WorldState::operator==(const WorldState& other) const {
  return catalog == other.catalog && grid == other.grid && objects == other.objects &&
         agent == other.agent && held == other.held;
}

std::pair<WorldState, StepResult> step(const WorldState& state, const ActionSpace& space,
                                       int action_index) {
  WorldState next = state;
  StepResult r = next.apply(space, action_index);
  return {std::move(next), r};
}

std::vector<PlacedObject> placed_objects(const WorldState& state) {
  std::vector<PlacedObject> out;
  out.reserve(state.objects.size());
  for (const auto& o : state.objects) {
    if (state.held == o.id) continue;
    out.push_back({o.id, o.cls, o.position});
  }
  return out;
}

}  // namespace actctx::sim
