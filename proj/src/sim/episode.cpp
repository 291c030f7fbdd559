#include "actctx/sim/episode.hpp"

#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "actctx/rng.hpp"

namespace actctx::sim {

LayoutSet::LayoutSet(std::vector<Layout> layouts) : layouts_(std::move(layouts)) {}

const Layout& LayoutSet::at(const std::string& name) const {
  for (const auto& l : layouts_) {
    if (l.name == name) return l;
  }
  throw ValidationError("unknown scene '" + name + "'");
}

LayoutSet load_layouts(std::span<const std::filesystem::path> paths, CatalogPtr catalog) {
  std::vector<Layout> layouts;
  for (const auto& p : paths) layouts.push_back(load_layout(p, catalog));
  return LayoutSet(std::move(layouts));
}

WorldState instantiate(const EpisodeConfig& config, const LayoutSet& layouts) {
  return instantiate(layouts.at(config.scene), config.placements, config.agent);
}

namespace {

constexpr std::array<Heading, 4> kHeadings{Heading::north, Heading::east, Heading::south,
                                           Heading::west};

std::vector<int> bfs_distances(const Grid& grid, Cell start) {
  std::vector<int> dist(grid.blocked.size(), -1);
  if (grid.is_blocked(start)) return dist;
  std::deque<Cell> queue{start};
  dist[grid.index(start)] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (Heading h : kHeadings) {
      const Cell d = heading_step(h);
      const Cell n{c.x + d.x, c.y + d.y};
      if (grid.is_blocked(n) || dist[grid.index(n)] >= 0) continue;
      dist[grid.index(n)] = dist[grid.index(c)] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

struct Approach {
  int steps = -1;
  Cell stand;
};

Approach approach(const Grid& grid, const std::vector<int>& dist, Cell target) {
  Approach best;
  if (!grid.is_blocked(target) && dist[grid.index(target)] >= 0) {
    return {dist[grid.index(target)], target};
  }
  for (Heading h : kHeadings) {
    const Cell d = heading_step(h);
    const Cell n{target.x + d.x, target.y + d.y};
    if (grid.is_blocked(n) || dist[grid.index(n)] < 0) continue;
    const int steps = dist[grid.index(n)] + 1;
    if (best.steps < 0 || steps < best.steps) best = {steps, n};
  }
  return best;
}

/// Groups of instances; visiting any member of a group satisfies it.
std::vector<std::vector<InstanceId>> required_groups(const WorldState& state, TaskId task_id) {
  const KitchenCatalog& cat = *state.catalog;
  const TaskSpec task = make_task(task_id, cat);
  std::vector<std::vector<InstanceId>> groups;
  std::vector<InstanceId> eligible;
  for (const auto& o : state.objects) {
    if (!state.is_fixed(o) && is_eligible(state, task, o)) eligible.push_back(o.id);
  }
  groups.push_back(std::move(eligible));
  const auto of_classes = [&](std::vector<ClassId> classes) {
    std::vector<InstanceId> g;
    for (const auto& o : state.objects) {
      if (std::find(classes.begin(), classes.end(), o.cls) != classes.end()) g.push_back(o.id);
    }
    return g;
  };
  if (task_id == TaskId::slice) {
    std::vector<InstanceId> cutters;
    for (const auto& o : state.objects) {
      if (cat.has(o.cls, Affordance::cutter)) cutters.push_back(o.id);
    }
    groups.push_back(std::move(cutters));
  } else if (task_id == TaskId::prep) {
    groups.push_back(of_classes(task.goal_receptacles));
  }
  for (ClassId fixture : task.required_fixtures) groups.push_back(of_classes({fixture}));
  return groups;
}

}  // namespace

int grid_geodesic(const Grid& grid, Cell from, Cell target) {
  return approach(grid, bfs_distances(grid, from), target).steps;
}

double navigation_difficulty(const WorldState& state, TaskId task) {
  auto groups = required_groups(state, task);
  std::vector<bool> done(groups.size(), false);
  Cell current = state.agent.cell;
  int total = 0;
  for (std::size_t round = 0; round < groups.size(); ++round) {
    const auto dist = bfs_distances(state.grid, current);
    int best_group = -1;
    Approach best;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (done[g]) continue;
      for (InstanceId id : groups[g]) {
        const Approach a = approach(state.grid, dist, state.object(id).cell);
        if (a.steps >= 0 && (best.steps < 0 || a.steps < best.steps)) {
          best = a;
          best_group = static_cast<int>(g);
        }
      }
    }
    if (best_group < 0) return std::numeric_limits<double>::infinity();
    done[best_group] = true;
    total += best.steps;
    current = best.stand;
  }
  return total * kCellSize;
}

double navigation_difficulty(const EpisodeConfig& config, const LayoutSet& layouts) {
  return navigation_difficulty(instantiate(config, layouts), config.task);
}

std::string task_unsatisfiable_reason(const Layout& layout, TaskId task_id) {
  const KitchenCatalog& cat = *layout.catalog;
  TaskSpec task;
  try {
    task = make_task(task_id, cat);
  } catch (const ValidationError& e) {
    return e.what();
  }
  for (ClassId f : task.required_fixtures) {
    if (!layout.has_class(f)) return "missing " + cat.vocabulary().name(f);
  }
  bool eligible = false;
  bool cutter = false;
  bool vessel = false;
  for (const auto& s : layout.spawns) {
    if (s.count <= 0 || s.containers.empty()) continue;
    if (cat.has(s.cls, task.eligible)) eligible = true;
    if (cat.has(s.cls, Affordance::cutter)) cutter = true;
    if (std::find(task.goal_receptacles.begin(), task.goal_receptacles.end(), s.cls) !=
        task.goal_receptacles.end()) {
      vessel = true;
    }
  }
  if (!eligible) return "no " + affordance_name(task.eligible) + " object spawns";
  if (task_id == TaskId::slice && !cutter) return "no cutting tool spawns";
  if (task_id == TaskId::prep && !vessel) return "no pot or pan spawns";
  return {};
}

std::optional<EpisodeConfig> make_episode(const Layout& layout, TaskId task_id, std::uint64_t seed,
                                          int horizon) {
  const TaskSpec task = make_task(task_id, *layout.catalog);
  const SpawnSample sample = sample_spawn(layout, seed);
  const WorldState w = instantiate(layout, sample.placements, sample.agent);
  if (check_goal(w, task)) return std::nullopt;
  if (!std::isfinite(navigation_difficulty(w, task_id))) return std::nullopt;
  return EpisodeConfig{layout.name, seed, sample.placements, sample.agent, task_id, horizon};
}

std::vector<EpisodeConfig> generate_episodes(std::span<const Layout> layouts, TaskId task_id,
                                             int n_per_scene, std::uint64_t seed,
                                             GenerationReport* report, int horizon) {
  if (n_per_scene < 1) throw ValidationError("generate_episodes: n_per_scene must be >= 1");
  constexpr int kMaxAttempts = 200;
  std::vector<EpisodeConfig> out;
  for (std::size_t li = 0; li < layouts.size(); ++li) {
    const Layout& layout = layouts[li];
    if (auto reason = task_unsatisfiable_reason(layout, task_id); !reason.empty()) {
      if (report) report->skipped.push_back(layout.name + ": " + reason);
      continue;
    }
    int produced = 0;
    for (int i = 0; i < n_per_scene; ++i) {
      bool ok = false;
      for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
        const std::uint64_t s =
            mix_seed(seed, (static_cast<std::uint64_t>(li) << 40) ^
                               (static_cast<std::uint64_t>(i) << 16) ^ static_cast<std::uint64_t>(attempt) ^
                               (static_cast<std::uint64_t>(task_id) << 56));
        if (auto e = make_episode(layout, task_id, s, horizon)) {
          out.push_back(std::move(*e));
          ok = true;
        }
      }
      if (ok) ++produced;
    }
    if (produced < n_per_scene && report) {
      report->skipped.push_back(layout.name + ": only " + std::to_string(produced) + " of " +
                                std::to_string(n_per_scene) + " episodes solvable");
    }
  }
  return out;
}

namespace {

nlohmann::ordered_json episode_json(const EpisodeConfig& e, const KitchenCatalog& cat) {
  nlohmann::ordered_json j;
  j["scene"] = e.scene;
  j["seed"] = e.seed;
  j["task"] = task_name(e.task);
  j["horizon"] = e.horizon;
  j["agent"] = {{"x", e.agent.cell.x}, {"y", e.agent.cell.y}, {"heading", static_cast<int>(e.agent.heading)}};
  j["placements"] = nlohmann::ordered_json::array();
  for (const auto& p : e.placements) {
    j["placements"].push_back({{"class", cat.vocabulary().name(p.cls)}, {"container", to_index(p.container)}});
  }
  return j;
}

}  // namespace

std::string episodes_to_json(std::span<const EpisodeConfig> episodes, const KitchenCatalog& catalog) {
  nlohmann::ordered_json doc;
  doc["schema"] = "actctx.episodes/1";
  doc["episodes"] = nlohmann::ordered_json::array();
  for (const auto& e : episodes) doc["episodes"].push_back(episode_json(e, catalog));
  return doc.dump(1);
}

std::vector<EpisodeConfig> episodes_from_json(const std::string& text, const KitchenCatalog& catalog) {
  std::vector<EpisodeConfig> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("schema").get<std::string>() != "actctx.episodes/1") {
      throw ParseError("episodes: unsupported schema");
    }
    for (const auto& j : doc.at("episodes")) {
      EpisodeConfig e;
      e.scene = j.at("scene").get<std::string>();
      e.seed = j.at("seed").get<std::uint64_t>();
      e.task = task_from_name(j.at("task").get<std::string>());
      e.horizon = j.at("horizon").get<int>();
      e.agent.cell = {j.at("agent").at("x").get<int>(), j.at("agent").at("y").get<int>()};
      const int h = j.at("agent").at("heading").get<int>();
      if (h < 0 || h > 3) throw ParseError("episodes: bad heading");
      e.agent.heading = static_cast<Heading>(h);
      for (const auto& p : j.at("placements")) {
        e.placements.push_back({catalog.at(p.at("class").get<std::string>()),
                                InstanceId{p.at("container").get<std::int32_t>()}});
      }
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("episodes: ") + e.what());
  }
  return out;
}

void save_episodes(const std::filesystem::path& path, std::span<const EpisodeConfig> episodes,
                   const KitchenCatalog& catalog) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << episodes_to_json(episodes, catalog) << '\n';
}

std::vector<EpisodeConfig> load_episodes(const std::filesystem::path& path,
                                         const KitchenCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open episode set " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return episodes_from_json(ss.str(), catalog);
}

std::string episode_set_digest(std::span<const EpisodeConfig> episodes, const KitchenCatalog& catalog) {
  return fnv1a_hex(episodes_to_json(episodes, catalog));
}

}  // namespace actctx::sim
