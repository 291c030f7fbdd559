#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "actctx/sim/world.hpp"

namespace actctx::sim {

enum class TaskId : std::uint8_t { store, heat, cool, clean, slice, prep, trash };

inline constexpr std::array<TaskId, 7> kAllTasks{TaskId::store, TaskId::heat,  TaskId::cool,
                                                 TaskId::clean, TaskId::slice, TaskId::prep,
                                                 TaskId::trash};

std::string task_name(TaskId task);
/// Accepts "store" or "Store"; throws ValidationError otherwise.
TaskId task_from_name(const std::string& name);

/// Goal predicate of one task resolved against a catalog.
///
///   Store  inReceptacle(o, Drawer) and isClosed(that Drawer) and storable(o)
///   Heat   inReceptacle(o, StoveBurner) and isToggledOn(StoveKnob) and heatable(o)
///   Cool   inReceptacle(o, Fridge) and isClosed(that Fridge) and coolable(o)
///   Clean  inReceptacle(o, SinkBasin) and isToggledOn(Faucet) and cleanable(o)
///   Slice  isSliced(o) and isHolding(cutter) and sliceable(o)
///   Prep   inReceptacle(o, Pot or Pan) and cookable(o)
///   Trash  inReceptacle(o, GarbageCan) and trashable(o)
///
/// Objects must originally have been outside the goal receptacle class
/// (unsliced, for Slice).
struct TaskSpec {
  TaskId id;
  Affordance eligible;
  std::vector<ClassId> goal_receptacles;  // empty for Slice
  bool receptacle_closed = false;         // Store, Cool
  std::optional<ClassId> toggled_fixture; // Heat: StoveKnob, Clean: Faucet
  /// Classes that must be present in a layout for the task to be solvable.
  std::vector<ClassId> required_fixtures;
};

/// Throws ValidationError when the catalog lacks a class the task names.
TaskSpec make_task(TaskId id, const KitchenCatalog& catalog);

/// The eligible object satisfies the task's precondition: it was not spawned
/// in a goal receptacle (or was spawned unsliced, for Slice).
bool precondition_holds(const WorldState& state, const TaskSpec& task, const ObjectInstance& o);

bool is_eligible(const WorldState& state, const TaskSpec& task, const ObjectInstance& o);

bool check_goal(const WorldState& state, const TaskSpec& task);

inline constexpr double kGoalReward = 10.0;
inline constexpr double kStepPenalty = -0.01;

struct TaskRewardResult {
  double reward = kStepPenalty;
  bool done = false;
};

/// +10 and done when the successor satisfies the goal, otherwise -0.01.
TaskRewardResult task_reward(const WorldState& prev, int action, const WorldState& next,
                             const TaskSpec& task);

}  // namespace actctx::sim
