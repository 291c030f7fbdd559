#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "actctx/sim/world.hpp"

namespace actctx::sim {

struct FixturePlacement {
  ClassId cls;
  Cell cell;
};

/// `count` instances of `cls`, each spawned inside a random instance of one of
/// the `containers` fixture classes present in the layout.
struct SpawnPool {
  ClassId cls;
  int count = 1;
  std::vector<ClassId> containers;
};

/// Scene description (schema "actctx.layout/1"):
///   {"schema": "actctx.layout/1", "name": str,
///    "grid": [str, ...],            // '#' wall, '.' floor, catalog glyphs for fixtures
///    "spawns": [{"class": str, "count": int, "in": [fixture class, ...]}, ...]}
struct Layout {
  std::string name;
  CatalogPtr catalog;
  Grid grid;
  std::vector<FixturePlacement> fixtures;  // row-major grid order
  std::vector<SpawnPool> spawns;

  bool has_class(ClassId cls) const;
};

Layout parse_layout(const std::string& json_text, CatalogPtr catalog);
Layout load_layout(const std::filesystem::path& path, CatalogPtr catalog);

/// A movable spawned in fixture instance `container` (fixture ids follow
/// `Layout::fixtures` order).
struct Placement {
  ClassId cls;
  InstanceId container;
  bool operator==(const Placement&) const = default;
};

/// Free cells connected to `start` through 4-neighbour moves.
std::vector<Cell> reachable_cells(const Grid& grid, Cell start);

/// Deterministic world from explicit placements and agent pose.
WorldState instantiate(const Layout& layout, std::span<const Placement> placements,
                       AgentPose agent);

struct SpawnSample {
  std::vector<Placement> placements;
  AgentPose agent;
};

/// Samples movable placements and an agent pose. Throws ValidationError when
/// a fixture cannot be reached from the main free region.
SpawnSample sample_spawn(const Layout& layout, std::uint64_t seed);

/// `instantiate(layout, sample_spawn(layout, seed))`.
WorldState build_world(const Layout& layout, std::uint64_t seed);

/// Static co-location records: for each spawn seed and each instance, the
/// set of classes within `radius` meters of it (its own class included).
std::vector<std::set<ClassId>> colocation_records(const Layout& layout,
                                                  std::span<const std::uint64_t> seeds,
                                                  double radius = 1.0);

}  // namespace actctx::sim
