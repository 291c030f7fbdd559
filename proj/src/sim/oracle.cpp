#include "actctx/sim/oracle.hpp"

#include <algorithm>
#include <deque>

namespace actctx::sim {

std::optional<std::vector<int>> plan_interaction(const WorldState& state, const ActionSpace& space,
                                                 int action, const TargetPredicate& pred) {
  const Action& a = space.at(action);
  const auto works = [&](const AgentPose& pose) {
    const auto t = state.select_target(a, pose);
    return t && pred(state.object(*t));
  };
  if (works(state.agent)) return std::vector<int>{};

  const Grid& g = state.grid;
  const auto key = [&](const AgentPose& p) { return g.index(p.cell) * 4 + static_cast<std::size_t>(p.heading); };
  std::vector<int> parent(g.blocked.size() * 4, -2);
  std::vector<std::uint8_t> via(parent.size(), 0);
  std::deque<AgentPose> queue{state.agent};
  parent[key(state.agent)] = -1;
  const int fwd = space.require(Verb::move_forward);
  const int left = space.require(Verb::turn_left);
  const int right = space.require(Verb::turn_right);
  while (!queue.empty()) {
    const AgentPose p = queue.front();
    queue.pop_front();
    for (int nav : {fwd, left, right}) {
      AgentPose n = p;
      if (nav == fwd) {
        const Cell d = heading_step(p.heading);
        n.cell = {p.cell.x + d.x, p.cell.y + d.y};
        if (g.is_blocked(n.cell)) continue;
      } else {
        n.heading = nav == left ? turned_left(p.heading) : turned_right(p.heading);
      }
      const std::size_t k = key(n);
      if (parent[k] != -2) continue;
      parent[k] = static_cast<int>(key(p));
      via[k] = static_cast<std::uint8_t>(nav);
      if (works(n)) {
        std::vector<int> path;
        for (int cur = static_cast<int>(k); parent[cur] != -1; cur = parent[cur]) path.push_back(via[cur]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

std::optional<ScriptedOracle::Step> ScriptedOracle::seek(const WorldState& s, Verb verb, ClassId cls,
                                                         const TargetPredicate& pred) const {
  const auto idx = space_->index_of({verb, cls});
  if (!idx) return std::nullopt;
  const auto plan = plan_interaction(s, *space_, *idx, pred);
  if (!plan) return std::nullopt;
  if (plan->empty()) return Step{*idx, 0};
  return Step{plan->front(), plan->size()};
}

namespace {


bool in_class(const std::vector<ClassId>& classes, ClassId c) {
  return std::find(classes.begin(), classes.end(), c) != classes.end();
}

/// Outermost closed container hiding `o`, if any.
std::optional<InstanceId> closed_ancestor(const WorldState& s, const ObjectInstance& o) {
  std::optional<InstanceId> found;
  for (auto up = o.contained_in; up; up = s.object(*up).contained_in) {
    const ObjectInstance& c = s.object(*up);
    if (s.catalog->has(c.cls, Affordance::openable) && !c.open) found = c.id;
  }
  return found;
}

}  // namespace

std::optional<int> ScriptedOracle::reveal(const WorldState& s, const std::vector<ClassId>& classes,
                                          const TargetPredicate& want) const {
  std::optional<Step> best;
  for (const auto& o : s.objects) {
    if (!in_class(classes, o.cls) || !want(o)) continue;
    if (const auto door = closed_ancestor(s, o)) {
      const auto st = seek(s, Verb::open, s.object(*door).cls,
                           [id = *door](const ObjectInstance& t) { return t.id == id; });
      if (st && (!best || st->cost < best->cost)) best = st;
    }
  }
  return action_of(best);
}

std::optional<int> ScriptedOracle::acquire(const WorldState& s, const TargetPredicate& want,
                                           const std::vector<ClassId>& classes) const {
  if (s.held) return drop_held(s);
  std::optional<Step> best;
  const auto consider = [&](std::optional<Step> st) {
    if (st && (!best || st->cost < best->cost)) best = st;
  };
  for (ClassId c : classes) consider(seek(s, Verb::take, c, want));
  if (best) return best->action;
  // Wanted objects may sit behind closed doors.
  return reveal(s, classes, want);
}

std::optional<int> ScriptedOracle::put_into(const WorldState& s, const std::vector<ClassId>& classes,
                                            const TargetPredicate& pred) const {
  std::optional<Step> best;
  for (ClassId c : classes) {
    const auto st = seek(s, Verb::put, c, pred);
    if (st && (!best || st->cost < best->cost)) best = st;
  }
  if (best) return best->action;
  // Nothing accepts the object: open a closed openable receptacle first.
  for (ClassId c : classes) {
    if (!s.catalog->has(c, Affordance::openable)) continue;
    const auto st = seek(s, Verb::open, c, pred);
    if (st && (!best || st->cost < best->cost)) best = st;
  }
  if (best) return best->action;
  // Movable receptacles may be stored out of sight.
  return reveal(s, classes, pred);
}

std::optional<int> ScriptedOracle::drop_held(const WorldState& s) const {
  return put_into(s, {s.catalog->at("CounterTop")}, [](const ObjectInstance&) { return true; });
}

std::optional<int> ScriptedOracle::act(const WorldState& s) const {
  if (check_goal(s, task_)) return std::nullopt;
  const KitchenCatalog& cat = *s.catalog;
  const auto eligible = [&](const ObjectInstance& o) {
    return !s.is_fixed(o) && is_eligible(s, task_, o);
  };
  const auto in_goal = [&](const ObjectInstance& o) {
    return o.contained_in && in_class(task_.goal_receptacles, s.object(*o.contained_in).cls);
  };
  std::vector<ClassId> eligible_classes;
  for (ClassId c = 0; c < cat.size(); ++c) {
    if (cat.has(c, Affordance::movable) && cat.has(c, task_.eligible)) eligible_classes.push_back(c);
  }
  const auto any = [](const ObjectInstance&) { return true; };
  const ObjectInstance* held = s.held ? &s.object(*s.held) : nullptr;

  if (task_.id == TaskId::slice) {
    if (held && cat.has(held->cls, Affordance::cutter)) {
      std::optional<Step> best;
      for (ClassId c : eligible_classes) {
        const auto st = seek(s, Verb::slice, c, [&](const ObjectInstance& o) { return eligible(o); });
        if (st && (!best || st->cost < best->cost)) best = st;
      }
      if (best) return best->action;
      return reveal(s, eligible_classes, [&](const ObjectInstance& o) { return eligible(o); });
    }
    std::vector<ClassId> cutters;
    for (ClassId c = 0; c < cat.size(); ++c) {
      if (cat.has(c, Affordance::cutter)) cutters.push_back(c);
    }
    return acquire(s, any, cutters);
  }

  // Object already placed: finish the fixture step.
  for (const auto& o : s.objects) {
    if (!eligible(o) || !in_goal(o)) continue;
    if (task_.toggled_fixture) {
      return action_of(seek(s, Verb::toggle_on, *task_.toggled_fixture, any));
    }
    if (task_.receptacle_closed) {
      const InstanceId container = *o.contained_in;
      return action_of(seek(s, Verb::close, s.object(container).cls,
                            [container](const ObjectInstance& t) { return t.id == container; }));
    }
  }

  if (held && eligible(*held)) {
    return put_into(s, task_.goal_receptacles, any);
  }
  return acquire(s, [&](const ObjectInstance& o) { return eligible(o) && !in_goal(o); }, eligible_classes);
}

ScriptResult run_oracle(WorldState world, const ActionSpace& space, const TaskSpec& task, int horizon) {
  ScriptedOracle oracle(space, task);
  ScriptResult r;
  while (r.steps < horizon) {
    if (check_goal(world, task)) {
      r.success = true;
      return r;
    }
    const auto a = oracle.act(world);
    if (!a) return r;
    world.apply(space, *a);
    ++r.steps;
  }
  r.success = check_goal(world, task);
  return r;
}

}  // namespace actctx::sim
