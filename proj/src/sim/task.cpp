#include "actctx/sim/task.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace actctx::sim {

namespace {
constexpr std::array<const char*, 7> kTaskNames{"store", "heat", "cool", "clean",
                                                "slice", "prep", "trash"};

bool contains(const std::vector<ClassId>& v, ClassId c) {
  return std::find(v.begin(), v.end(), c) != v.end();
}
}  // namespace

std::string task_name(TaskId task) { return kTaskNames[static_cast<std::size_t>(task)]; }

TaskId task_from_name(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (lower == kTaskNames[i]) return static_cast<TaskId>(i);
  }
  throw ValidationError("unknown task '" + name + "'");
}

TaskSpec make_task(TaskId id, const KitchenCatalog& catalog) {
  TaskSpec t{id, Affordance::storable, {}, false, std::nullopt, {}};
  switch (id) {
    case TaskId::store:
      t.eligible = Affordance::storable;
      t.goal_receptacles = {catalog.at("Drawer")};
      t.receptacle_closed = true;
      t.required_fixtures = {catalog.at("Drawer")};
      break;
    case TaskId::heat:
      t.eligible = Affordance::heatable;
      t.goal_receptacles = {catalog.at("StoveBurner")};
      t.toggled_fixture = catalog.at("StoveKnob");
      t.required_fixtures = {catalog.at("StoveBurner"), catalog.at("StoveKnob")};
      break;
    case TaskId::cool:
      t.eligible = Affordance::coolable;
      t.goal_receptacles = {catalog.at("Fridge")};
      t.receptacle_closed = true;
      t.required_fixtures = {catalog.at("Fridge")};
      break;
    case TaskId::clean:
      t.eligible = Affordance::cleanable;
      t.goal_receptacles = {catalog.at("SinkBasin")};
      t.toggled_fixture = catalog.at("Faucet");
      t.required_fixtures = {catalog.at("SinkBasin"), catalog.at("Faucet")};
      break;
    case TaskId::slice:
      t.eligible = Affordance::sliceable;
      break;
    case TaskId::prep:
      t.eligible = Affordance::cookable;
      t.goal_receptacles = {catalog.at("Pot"), catalog.at("Pan")};
      break;
    case TaskId::trash:
      t.eligible = Affordance::trashable;
      t.goal_receptacles = {catalog.at("GarbageCan")};
      t.required_fixtures = {catalog.at("GarbageCan")};
      break;
  }
  return t;
}

bool precondition_holds(const WorldState& state, const TaskSpec& task, const ObjectInstance& o) {
  if (task.id == TaskId::slice) return !o.initially_sliced;
  if (!o.initial_container) return true;
  return !contains(task.goal_receptacles, state.object(*o.initial_container).cls);
}

bool is_eligible(const WorldState& state, const TaskSpec& task, const ObjectInstance& o) {
  return state.catalog->has(o.cls, task.eligible) && precondition_holds(state, task, o);
}

bool check_goal(const WorldState& state, const TaskSpec& task) {
  const KitchenCatalog& cat = *state.catalog;
  if (task.id == TaskId::slice) {
    if (!state.held || !cat.has(state.object(*state.held).cls, Affordance::cutter)) return false;
    return std::any_of(state.objects.begin(), state.objects.end(), [&](const ObjectInstance& o) {
      return o.sliced && is_eligible(state, task, o);
    });
  }
  if (task.toggled_fixture) {
    const bool on = std::any_of(state.objects.begin(), state.objects.end(), [&](const ObjectInstance& o) {
      return o.cls == *task.toggled_fixture && o.toggled_on;
    });
    if (!on) return false;
  }
  for (const auto& o : state.objects) {
    if (!o.contained_in || !is_eligible(state, task, o)) continue;
    const ObjectInstance& container = state.object(*o.contained_in);
    if (!contains(task.goal_receptacles, container.cls)) continue;
    if (task.receptacle_closed && container.open) continue;
    return true;
  }
  return false;
}

TaskRewardResult task_reward(const WorldState&, int, const WorldState& next, const TaskSpec& task) {
  if (check_goal(next, task)) return {kGoalReward, true};
  return {kStepPenalty, false};
}

}  // namespace actctx::sim
