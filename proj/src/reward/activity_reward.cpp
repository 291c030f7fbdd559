#include "actctx/reward/activity_reward.hpp"

namespace actctx {

int InteractionCounter::count(sim::Verb verb, ClassId target) const {
  const auto it = counts_.find({verb, target});
  return it == counts_.end() ? 0 : it->second;
}

double activity_reward(const AcoMemory& memory, sim::Verb verb, ClassId target_class,
                       std::optional<InstanceId> target_instance,
                       std::optional<ClassId> held_class,
                       std::optional<InstanceId> held_instance,
                       const InteractionCounter& counter, const CompatibilityTable& table) {
  if (sim::is_navigation(verb) || target_class < 0) return 0.0;
  if (counter.count(verb, target_class) > 0) return 0.0;
  const double z = table.max_over_objects(target_class);
  if (!(z > 0)) return 0.0;
  double sum = 0.0;
  bool held_seen = false;
  if (target_instance) {
    for (const auto& e : memory.at(*target_instance)) {
      sum += table(e.cls, target_class);
      if (held_instance && e.instance == *held_instance) held_seen = true;
    }
  }
  if (!held_seen) {
    const ClassId h = held_class ? *held_class : table.vocabulary().null_id();
    sum += table(h, target_class);
  }
  return sum / z;
}

ActivityRewarder::ActivityRewarder(const CompatibilityTable& table, double epsilon)
    : table_(&table), memory_(epsilon) {}

void ActivityRewarder::reset() {
  memory_.clear();
  counter_.reset();
}

double ActivityRewarder::on_step(const InteractionEvent& event, const sim::WorldState& after) {
  if (event.kind == EventKind::navigate || !event.success) return 0.0;
  if (event.kind == EventKind::put || event.kind == EventKind::take) {
    anchors_.clear();
    for (const auto& o : after.objects) {
      if (after.held != o.id) anchors_.push_back({o.id, o.position});
    }
    memory_.update(event, anchors_);
  }
  const double r = activity_reward(memory_, event.verb, event.target_class, event.target_instance,
                                   event.held_class, event.held_instance, counter_, *table_);
  counter_.increment(event.verb, event.target_class);
  return r;
}

double coverage_reward(const sim::WorldState& state, std::set<ClassId>& visited) {
  double r = 0.0;
  for (const auto& o : state.objects) {
    if (visited.contains(o.cls)) continue;
    if (!state.visible(o) || !state.in_reach(o, state.agent)) continue;
    visited.insert(o.cls);
    r += kCoverageBonus;
  }
  return r;
}

}  // namespace actctx
