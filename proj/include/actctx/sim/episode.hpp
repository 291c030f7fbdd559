#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actctx/sim/layout.hpp"
#include "actctx/sim/task.hpp"

namespace actctx::sim {

inline constexpr int kDefaultHorizon = 256;

/// Everything needed to reproduce one evaluation episode.
struct EpisodeConfig {
  std::string scene;
  std::uint64_t seed = 0;
  std::vector<Placement> placements;
  AgentPose agent;
  TaskId task = TaskId::clean;
  int horizon = kDefaultHorizon;

  bool operator==(const EpisodeConfig&) const = default;
};

/// Name -> layout lookup used when replaying episodes.
class LayoutSet {
 public:
  LayoutSet() = default;
  explicit LayoutSet(std::vector<Layout> layouts);

  const Layout& at(const std::string& name) const;
  const std::vector<Layout>& layouts() const { return layouts_; }
  bool empty() const { return layouts_.empty(); }

 private:
  std::vector<Layout> layouts_;
};

LayoutSet load_layouts(std::span<const std::filesystem::path> paths, CatalogPtr catalog);

WorldState instantiate(const EpisodeConfig& config, const LayoutSet& layouts);

struct GenerationReport {
  std::vector<std::string> skipped;  // "scene: reason"
};

/// One solvable configuration derived from `seed`, or nullopt when that
/// spawn already satisfies the goal or leaves a required object unreachable.
std::optional<EpisodeConfig> make_episode(const Layout& layout, TaskId task, std::uint64_t seed,
                                          int horizon = kDefaultHorizon);

/// `n_per_scene` solvable configurations per layout. Layouts where the task
/// cannot be posed are skipped and reported.
std::vector<EpisodeConfig> generate_episodes(std::span<const Layout> layouts, TaskId task,
                                             int n_per_scene, std::uint64_t seed,
                                             GenerationReport* report = nullptr,
                                             int horizon = kDefaultHorizon);

/// Why a task cannot be posed in a layout, or empty when it can.
std::string task_unsatisfiable_reason(const Layout& layout, TaskId task);

/// Ideal geodesic path length in meters from the agent through every object
/// group the task needs, visiting the nearest remaining group next.
/// +infinity when some group cannot be reached.
double navigation_difficulty(const WorldState& state, TaskId task);
double navigation_difficulty(const EpisodeConfig& config, const LayoutSet& layouts);

/// Shortest 4-neighbour path length in cells from `from` to a cell standing
/// next to or on `target`, plus the entering step; -1 when unreachable.
int grid_geodesic(const Grid& grid, Cell from, Cell target);

/// Episode set files: {"schema": "actctx.episodes/1", "episodes": [...]}.
void save_episodes(const std::filesystem::path& path, std::span<const EpisodeConfig> episodes,
                   const KitchenCatalog& catalog);
std::vector<EpisodeConfig> load_episodes(const std::filesystem::path& path,
                                         const KitchenCatalog& catalog);
std::string episodes_to_json(std::span<const EpisodeConfig> episodes, const KitchenCatalog& catalog);
std::vector<EpisodeConfig> episodes_from_json(const std::string& text, const KitchenCatalog& catalog);
/// Stable FNV-1a digest of the serialized set, hex encoded.
std::string episode_set_digest(std::span<const EpisodeConfig> episodes, const KitchenCatalog& catalog);

}  // namespace actctx::sim
