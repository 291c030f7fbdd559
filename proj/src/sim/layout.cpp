#include "actctx/sim/layout.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "actctx/rng.hpp"

namespace actctx::sim {

bool Layout::has_class(ClassId cls) const {
  for (const auto& f : fixtures) {
    if (f.cls == cls) return true;
  }
  for (const auto& s : spawns) {
    if (s.cls == cls && s.count > 0) return true;
  }
  return false;
}

Layout parse_layout(const std::string& json_text, CatalogPtr catalog) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("layout: ") + e.what());
  }
  Layout layout;
  layout.catalog = catalog;
  try {
    if (doc.value("schema", std::string("actctx.layout/1")) != "actctx.layout/1") {
      throw ParseError("layout: unsupported schema " + doc.at("schema").get<std::string>());
    }
    layout.name = doc.at("name").get<std::string>();
    const auto rows = doc.at("grid").get<std::vector<std::string>>();
    if (rows.empty()) throw ValidationError("layout " + layout.name + ": empty grid");
    layout.grid.height = static_cast<int>(rows.size());
    layout.grid.width = static_cast<int>(rows.front().size());
    layout.grid.blocked.assign(static_cast<std::size_t>(layout.grid.width * layout.grid.height), 0);
    for (int y = 0; y < layout.grid.height; ++y) {
      if (static_cast<int>(rows[y].size()) != layout.grid.width) {
        throw ValidationError("layout " + layout.name + ": ragged grid row " + std::to_string(y));
      }
      for (int x = 0; x < layout.grid.width; ++x) {
        const char g = rows[y][x];
        const Cell c{x, y};
        if (g == '.') continue;
        layout.grid.blocked[layout.grid.index(c)] = 1;
        if (g == '#') continue;
        const auto cls = catalog->find_glyph(g);
        if (!cls) throw ValidationError(std::string("layout ") + layout.name + ": unknown glyph '" + g + "'");
        layout.fixtures.push_back({*cls, c});
      }
    }
    for (const auto& s : doc.value("spawns", nlohmann::json::array())) {
      SpawnPool pool;
      pool.cls = catalog->at(s.at("class").get<std::string>());
      if (!catalog->has(pool.cls, Affordance::movable)) {
        throw ValidationError("layout " + layout.name + ": spawn class is not movable");
      }
      pool.count = s.value("count", 1);
      for (const auto& c : s.at("in")) {
        const ClassId container = catalog->at(c.get<std::string>());
        if (!catalog->has(container, Affordance::receptacle) ||
            catalog->has(container, Affordance::movable)) {
          throw ValidationError("layout " + layout.name + ": spawn container must be a fixed receptacle");
        }
        pool.containers.push_back(container);
      }
      layout.spawns.push_back(std::move(pool));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("layout: " + std::string(e.what()));
  }
  return layout;
}

Layout load_layout(const std::filesystem::path& path, CatalogPtr catalog) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_layout(ss.str(), std::move(catalog));
}

std::vector<Cell> reachable_cells(const Grid& grid, Cell start) {
  std::vector<Cell> out;
  if (grid.is_blocked(start)) return out;
  std::vector<std::uint8_t> seen(grid.blocked.size(), 0);
  std::deque<Cell> queue{start};
  seen[grid.index(start)] = 1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    out.push_back(c);
    for (Heading h : {Heading::north, Heading::east, Heading::south, Heading::west}) {
      const Cell d = heading_step(h);
      const Cell n{c.x + d.x, c.y + d.y};
      if (grid.is_blocked(n) || seen[grid.index(n)]) continue;
      seen[grid.index(n)] = 1;
      queue.push_back(n);
    }
  }
  return out;
}

WorldState instantiate(const Layout& layout, std::span<const Placement> placements,
                       AgentPose agent) {
  WorldState w;
  w.catalog = layout.catalog;
  w.grid = layout.grid;
  w.agent = agent;
  if (w.grid.is_blocked(agent.cell)) throw ValidationError("agent spawn on a blocked cell");
  for (const auto& f : layout.fixtures) {
    ObjectInstance o;
    o.id = InstanceId{static_cast<std::int32_t>(w.objects.size())};
    o.cls = f.cls;
    o.cell = f.cell;
    o.position = cell_center(f.cell);
    w.objects.push_back(o);
  }
  const auto fixture_count = static_cast<std::int32_t>(w.objects.size());
  for (const auto& p : placements) {
    if (to_index(p.container) < 0 || to_index(p.container) >= fixture_count) {
      throw ValidationError("placement container is not a fixture of the layout");
    }
    const ObjectInstance& container = w.objects[to_index(p.container)];
    ObjectInstance o;
    o.id = InstanceId{static_cast<std::int32_t>(w.objects.size())};
    o.cls = p.cls;
    o.cell = container.cell;
    o.position = container.position;
    o.contained_in = container.id;
    o.initial_container = container.id;
    w.objects.push_back(o);
  }
  return w;
}

namespace {

/// Largest 4-connected free region; fixtures must border it.
std::vector<Cell> main_region(const Grid& grid) {
  std::vector<std::uint8_t> seen(grid.blocked.size(), 0);
  std::vector<Cell> best;
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      const Cell c{x, y};
      if (grid.is_blocked(c) || seen[grid.index(c)]) continue;
      auto region = reachable_cells(grid, c);
      for (const Cell& r : region) seen[grid.index(r)] = 1;
      if (region.size() > best.size()) best = std::move(region);
    }
  }
  return best;
}

}  // namespace

SpawnSample sample_spawn(const Layout& layout, std::uint64_t seed) {
  const auto region = main_region(layout.grid);
  if (region.empty()) throw ValidationError("layout " + layout.name + ": no free cells");
  std::vector<std::uint8_t> in_region(layout.grid.blocked.size(), 0);
  for (const Cell& c : region) in_region[layout.grid.index(c)] = 1;
  for (const auto& f : layout.fixtures) {
    bool touches = false;
    for (Heading h : {Heading::north, Heading::east, Heading::south, Heading::west}) {
      const Cell d = heading_step(h);
      const Cell n{f.cell.x + d.x, f.cell.y + d.y};
      if (layout.grid.in_bounds(n) && in_region[layout.grid.index(n)]) touches = true;
    }
    if (!touches) {
      throw ValidationError("layout " + layout.name + ": fixture " +
                            layout.catalog->vocabulary().name(f.cls) + " at (" +
                            std::to_string(f.cell.x) + "," + std::to_string(f.cell.y) +
                            ") is unreachable");
    }
  }

  Rng rng(mix_seed(seed, 0x5eed));
  SpawnSample sample;
  std::vector<int> load(layout.fixtures.size(), 0);
  for (const auto& pool : layout.spawns) {
    std::vector<int> candidates;
    for (std::size_t i = 0; i < layout.fixtures.size(); ++i) {
      if (std::find(pool.containers.begin(), pool.containers.end(), layout.fixtures[i].cls) !=
          pool.containers.end()) {
        candidates.push_back(static_cast<int>(i));
      }
    }
    if (candidates.empty()) continue;
    for (int k = 0; k < pool.count; ++k) {
      // Pick a container class first so rare receptacles are not swamped by
      // many countertop cells, then the least-loaded instance of that class.
      std::vector<ClassId> classes;
      for (int i : candidates) {
        if (std::find(classes.begin(), classes.end(), layout.fixtures[i].cls) == classes.end()) {
          classes.push_back(layout.fixtures[i].cls);
        }
      }
      const ClassId chosen_class = classes[rng.below(static_cast<int>(classes.size()))];
      std::vector<int> of_class;
      int min_load = 1 << 30;
      for (int i : candidates) {
        if (layout.fixtures[i].cls != chosen_class) continue;
        if (load[i] < min_load) {
          min_load = load[i];
          of_class.clear();
        }
        if (load[i] == min_load) of_class.push_back(i);
      }
      const int pick = of_class[rng.below(static_cast<int>(of_class.size()))];
      ++load[pick];
      sample.placements.push_back({pool.cls, InstanceId{pick}});
    }
  }
  sample.agent.cell = region[rng.below(static_cast<int>(region.size()))];
  sample.agent.heading = static_cast<Heading>(rng.below(4));
  return sample;
}

WorldState build_world(const Layout& layout, std::uint64_t seed) {
  const SpawnSample s = sample_spawn(layout, seed);
  return instantiate(layout, s.placements, s.agent);
}

std::vector<std::set<ClassId>> colocation_records(const Layout& layout,
                                                  std::span<const std::uint64_t> seeds, double radius) {
  std::vector<std::set<ClassId>> out;
  for (std::uint64_t seed : seeds) {
    const WorldState w = build_world(layout, seed);
    for (const auto& a : w.objects) {
      std::set<ClassId> record;
      for (const auto& b : w.objects) {
        if ((a.position - b.position).norm() < radius) record.insert(b.cls);
      }
      out.push_back(std::move(record));
    }
  }
  return out;
}

}  // namespace actctx::sim
