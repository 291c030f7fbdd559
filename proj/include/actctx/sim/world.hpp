#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "actctx/reward/event.hpp"
#include "actctx/sim/action.hpp"
#include "actctx/sim/catalog.hpp"

namespace actctx::sim {

inline constexpr double kCellSize = 0.25;          // meters per grid cell
inline constexpr double kInteractionRange = 1.5;   // meters

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

enum class Heading : std::uint8_t { north, east, south, west };

Cell heading_step(Heading h);
Heading turned_left(Heading h);
Heading turned_right(Heading h);
Vec2 cell_center(Cell c);

struct AgentPose {
  Cell cell;
  Heading heading = Heading::north;
  bool operator==(const AgentPose&) const = default;
};

struct Grid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> blocked;  // row-major, 1 = wall or fixture

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  bool is_blocked(Cell c) const { return !in_bounds(c) || blocked[index(c)] != 0; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y * width + c.x); }
  bool operator==(const Grid&) const = default;
};

struct ObjectInstance {
  InstanceId id{};
  ClassId cls = 0;
  Cell cell;       // grid cell the object sits on (its container's cell for movables)
  Vec2 position;   // meters; meaningless while held
  bool open = false;
  bool toggled_on = false;
  bool sliced = false;
  std::optional<InstanceId> contained_in;
  std::optional<InstanceId> initial_container;
  bool initially_sliced = false;

  bool operator==(const ObjectInstance&) const = default;
};

struct StepResult {
  InteractionEvent event;
  bool success = false;
};

/// Complete simulator state. Fixture instances come first in `objects`, and
/// `objects[i].id == InstanceId{i}`.
class WorldState {
 public:
  CatalogPtr catalog;
  Grid grid;
  std::vector<ObjectInstance> objects;
  AgentPose agent;
  std::optional<InstanceId> held;

  const ObjectInstance& object(InstanceId id) const { return objects.at(to_index(id)); }
  ObjectInstance& object(InstanceId id) { return objects.at(to_index(id)); }
  bool is_fixed(const ObjectInstance& o) const { return !catalog->has(o.cls, Affordance::movable); }

  /// Not held and not enclosed by a closed container anywhere up its chain.
  bool visible(const ObjectInstance& o) const;
  /// Within interaction range and in the half-plane the pose faces.
  bool in_reach(const ObjectInstance& o, const AgentPose& pose) const;
  bool has_contents(InstanceId receptacle) const;

  /// Instance the interaction would act on from `pose`, if the action can
  /// succeed there: the nearest visible in-reach instance of the target class
  /// satisfying the verb's preconditions.
  std::optional<InstanceId> select_target(const Action& action, const AgentPose& pose) const;
  std::optional<InstanceId> select_target(const Action& action) const {
    return select_target(action, agent);
  }

  /// Applies one action in place. Failed actions leave objects and held
  /// state untouched.
  StepResult apply(const ActionSpace& space, int action_index);

  bool operator==(const WorldState& other) const;

 private:
  bool accepts(const ObjectInstance& receptacle, const ObjectInstance& item) const;
};

/// Pure form of WorldState::apply.
std::pair<WorldState, StepResult> step(const WorldState& state, const ActionSpace& space,
                                       int action_index);

struct PlacedObject {
  InstanceId id;
  ClassId cls;
  Vec2 position;
};

/// Every instance that currently has a position (held objects excluded).
std::vector<PlacedObject> placed_objects(const WorldState& state);

}  // namespace actctx::sim
