#include <doctest.h>

#include <algorithm>
#include <limits>

#include "actctx/rng.hpp"
#include "actctx/sim/oracle.hpp"
#include "actctx/sim/task.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace actctx;
using namespace actctx::sim;

namespace {

const KitchenCatalog& cat() { return *test::kitchen_catalog(); }
ClassId cls(const char* name) { return cat().at(name); }

WorldState staged_world() { return oracle::staged_world(); }
ObjectInstance& first(WorldState& w, const char* name) { return oracle::first_of(w, name); }

void put_in(ObjectInstance& item, const ObjectInstance& container) { item.contained_in = container.id; }

/// Floyd-Warshall over free cells, as an independent shortest-path oracle.
std::vector<int> all_pairs(const Grid& g) {
  const int n = g.width * g.height;
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<int> d(static_cast<std::size_t>(n * n), inf);
  const auto at = [&](int a, int b) -> int& { return d[static_cast<std::size_t>(a * n + b)]; };
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const int a = y * g.width + x;
      if (g.is_blocked({x, y})) continue;
      at(a, a) = 0;
      const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& o : nb) {
        const Cell c{x + o[0], y + o[1]};
        if (!g.is_blocked(c)) at(a, c.y * g.width + c.x) = 1;
      }
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) at(i, j) = std::min(at(i, j), at(i, k) + at(k, j));
    }
  }
  for (auto& v : d) {
    if (v >= inf) v = -1;
  }
  return d;
}

}  // namespace

TEST_CASE("goal predicates: Cool requires a closed fridge and an item from outside") {
  WorldState w = staged_world();
  const TaskSpec task = make_task(TaskId::cool, cat());
  CHECK_FALSE(check_goal(w, task));
  auto& apple = first(w, "Apple");
  auto& fridge = first(w, "Fridge");
  put_in(apple, fridge);
  fridge.open = false;
  CHECK(check_goal(w, task));
  fridge.open = true;
  CHECK_FALSE(check_goal(w, task));
  fridge.open = false;
  apple.initial_container = fridge.id;  // spawned inside: precondition fails
  CHECK_FALSE(check_goal(w, task));
  apple.contained_in.reset();
  auto& knife = first(w, "Knife");  // not coolable
  put_in(knife, fridge);
  CHECK_FALSE(check_goal(w, task));
}

TEST_CASE("goal predicates: Store requires a closed drawer and a storable item") {
  WorldState w = staged_world();
  const TaskSpec task = make_task(TaskId::store, cat());
  auto& drawer = first(w, "Drawer");
  auto& spoon = first(w, "Spoon");
  put_in(spoon, drawer);
  CHECK(check_goal(w, task));
  drawer.open = true;
  CHECK_FALSE(check_goal(w, task));
  drawer.open = false;
  spoon.initial_container = drawer.id;
  CHECK_FALSE(check_goal(w, task));
  put_in(first(w, "Apple"), drawer);
  CHECK_FALSE(check_goal(w, task));
}

TEST_CASE("goal predicates: Clean needs the sink and a running faucet") {
  WorldState w = staged_world();
  const TaskSpec task = make_task(TaskId::clean, cat());
  auto& mug = first(w, "Mug");
  put_in(mug, first(w, "SinkBasin"));
  CHECK_FALSE(check_goal(w, task));
  first(w, "Faucet").toggled_on = true;
  CHECK(check_goal(w, task));
  mug.initial_container = first(w, "SinkBasin").id;
  CHECK_FALSE(check_goal(w, task));
  put_in(first(w, "Apple"), first(w, "SinkBasin"));  // Apple is not cleanable
  CHECK_FALSE(check_goal(w, task));
}

TEST_CASE("goal predicates: Heat needs a burner and the knob on") {
  WorldState w = staged_world();
  const TaskSpec task = make_task(TaskId::heat, cat());
  auto& pot = first(w, "Pot");
  put_in(pot, first(w, "StoveBurner"));
  CHECK_FALSE(check_goal(w, task));
  first(w, "StoveKnob").toggled_on = true;
  CHECK(check_goal(w, task));
  pot.initial_container = first(w, "StoveBurner").id;
  CHECK_FALSE(check_goal(w, task));
}

TEST_CASE("goal predicates: Slice needs a sliced item while holding the cutter") {
  WorldState w = staged_world();
  const TaskSpec task = make_task(TaskId::slice, cat());
  auto& apple = first(w, "Apple");
  apple.sliced = true;
  CHECK_FALSE(check_goal(w, task));
  auto& knife = first(w, "Knife");
  knife.contained_in.reset();
  w.held = knife.id;
  CHECK(check_goal(w, task));
  apple.initially_sliced = true;
  CHECK_FALSE(check_goal(w, task));
  apple.initially_sliced = false;
  w.held = first(w, "Spoon").id;
  CHECK_FALSE(check_goal(w, task));
}

TEST_CASE("goal predicates: Prep accepts pot or pan; Trash the garbage can") {
  WorldState w = staged_world();
  const TaskSpec prep = make_task(TaskId::prep, cat());
  auto& tomato = first(w, "Tomato");
  put_in(tomato, first(w, "Pan"));
  CHECK(check_goal(w, prep));
  put_in(tomato, first(w, "Pot"));
  CHECK(check_goal(w, prep));
  tomato.initial_container = first(w, "Pot").id;
  CHECK_FALSE(check_goal(w, prep));
  put_in(first(w, "Knife"), first(w, "Pan"));  // not cookable
  CHECK_FALSE(check_goal(w, prep));

  const TaskSpec trash = make_task(TaskId::trash, cat());
  auto& bread = first(w, "Bread");
  put_in(bread, first(w, "GarbageCan"));
  CHECK(check_goal(w, trash));
  bread.initial_container = first(w, "GarbageCan").id;
  CHECK_FALSE(check_goal(w, trash));
}

TEST_CASE("task reward: +10 and done on the goal, step penalty otherwise") {
  WorldState w = staged_world();
  const TaskSpec task = make_task(TaskId::trash, cat());
  WorldState next = w;
  auto r = task_reward(w, 0, next, task);
  CHECK(r.reward == kStepPenalty);
  CHECK_FALSE(r.done);
  put_in(first(next, "Bread"), first(next, "GarbageCan"));
  r = task_reward(w, 0, next, task);
  CHECK(r.reward == kGoalReward);
  CHECK(r.done);
}

TEST_CASE("world mechanics: take, put, open and failure leave state consistent") {
  const ActionSpace space(cat());
  WorldState w = staged_world();
  // Nothing is held, so put always fails and changes nothing.
  const WorldState before = w;
  const auto failed = w.apply(space, space.require(Verb::put, cls("CounterTop")));
  CHECK_FALSE(failed.success);
  CHECK(w == before);
  // Walk the oracle plan to take the mug.
  const int take = space.require(Verb::take, cls("Mug"));
  const auto plan = plan_interaction(w, space, take, [](const ObjectInstance&) { return true; });
  REQUIRE(plan);
  for (int a : *plan) {
    CHECK(space.at(a).target < 0);
    w.apply(space, a);
  }
  const auto took = w.apply(space, take);
  REQUIRE(took.success);
  REQUIRE(w.held);
  CHECK(w.object(*w.held).cls == cls("Mug"));
  CHECK_FALSE(w.visible(w.object(*w.held)));
  CHECK(took.event.kind == EventKind::take);
  // A second take fails while the hand is full.
  CHECK_FALSE(w.apply(space, space.require(Verb::take, cls("Plate"))).success);
  const auto put = w.apply(space, space.require(Verb::put, cls("CounterTop")));
  CHECK(put.success);
  CHECK_FALSE(w.held);
}

TEST_CASE("scripted oracle solves every generated episode of every task") {
  const auto layouts = test::kitchen_layouts();
  const LayoutSet set(layouts);
  const ActionSpace space(cat());
  for (TaskId t : kAllTasks) {
    auto eps = generate_episodes(layouts, t, 8, 2024);
    REQUIRE(eps.size() >= 50);
    eps.resize(50);
    const TaskSpec task = make_task(t, cat());
    int ok = 0;
    for (const auto& e : eps) {
      const WorldState w = instantiate(e, set);
      CHECK_FALSE(check_goal(w, task));
      ok += run_oracle(w, space, task, e.horizon).success;
    }
    INFO(task_name(t));
    CHECK(ok == 50);
  }
}

TEST_CASE("grid geodesic matches an all-pairs shortest path oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    Grid g;
    g.width = 3 + rng.below(8);
    g.height = 3 + rng.below(8);
    g.blocked.assign(static_cast<std::size_t>(g.width * g.height), 0);
    for (auto& b : g.blocked) b = rng.bernoulli(0.3) ? 1 : 0;
    const auto d = all_pairs(g);
    const int n = g.width * g.height;
    for (int q = 0; q < 30; ++q) {
      const Cell from{rng.below(g.width), rng.below(g.height)};
      const Cell to{rng.below(g.width), rng.below(g.height)};
      int want = -1;
      const int fi = from.y * g.width + from.x;
      if (!g.is_blocked(from)) {
        const int ti = to.y * g.width + to.x;
        if (!g.is_blocked(to)) {
          want = d[static_cast<std::size_t>(fi * n + ti)];
        } else {
          const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
          for (const auto& o : nb) {
            const Cell c{to.x + o[0], to.y + o[1]};
            if (g.is_blocked(c)) continue;
            const int v = d[static_cast<std::size_t>(fi * n + c.y * g.width + c.x)];
            if (v >= 0 && (want < 0 || v + 1 < want)) want = v + 1;
          }
        }
      }
      CHECK(grid_geodesic(g, from, to) == want);
    }
  }
}

TEST_CASE("navigation difficulty on a corridor") {
  const std::string text = R"({"schema": "actctx.layout/1", "name": "corridor",
    "grid": ["#############", "#C.........R#", "#############"],
    "spawns": [{"class": "Apple", "count": 1, "in": ["CounterTop"]}]})";
  const Layout layout = parse_layout(text, test::kitchen_catalog());
  const std::vector<Placement> p = {{cls("Apple"), InstanceId{0}}};
  // Apple from x=2 (1 step onto the counter's neighbour plus entry), then
  // 9 cells to the fridge's neighbour plus entry: 10 cells = 2.5 m.
  const WorldState at_counter = instantiate(layout, p, AgentPose{{2, 1}, Heading::west});
  CHECK(navigation_difficulty(at_counter, TaskId::cool) == doctest::Approx(0.25 * (1 + 8 + 1)));
  const WorldState far = instantiate(layout, p, AgentPose{{10, 1}, Heading::west});
  // Fridge first (1), then back to the counter (8 + 1).
  CHECK(navigation_difficulty(far, TaskId::cool) == doctest::Approx(0.25 * 10));
  const WorldState mid = instantiate(layout, p, AgentPose{{6, 1}, Heading::west});
  CHECK(navigation_difficulty(mid, TaskId::cool) == doctest::Approx(0.25 * (5 + 9)));
  CHECK(std::isinf(navigation_difficulty(at_counter, TaskId::clean)));
  CHECK_FALSE(task_unsatisfiable_reason(layout, TaskId::clean).empty());
  CHECK(task_unsatisfiable_reason(layout, TaskId::cool).empty());
}

TEST_CASE("episode generation, worlds and episode files are seed-reproducible") {
  const auto layouts = test::kitchen_layouts();
  const auto a = generate_episodes(layouts, TaskId::clean, 6, 42);
  const auto b = generate_episodes(layouts, TaskId::clean, 6, 42);
  const auto c = generate_episodes(layouts, TaskId::clean, 6, 43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(build_world(layouts[2], 9) == build_world(layouts[2], 9));
  CHECK(episode_set_digest(a, cat()) == episode_set_digest(b, cat()));
  CHECK(episode_set_digest(a, cat()) != episode_set_digest(c, cat()));
  const auto back = episodes_from_json(episodes_to_json(a, cat()), cat());
  CHECK(back == a);
  const auto path = std::filesystem::temp_directory_path() / "actctx_test_eps.json";
  save_episodes(path, a, cat());
  CHECK(load_episodes(path, cat()) == a);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(episodes_from_json(R"({"schema": "other", "episodes": []})", cat()), ParseError);
  CHECK_THROWS_AS(generate_episodes(layouts, TaskId::clean, 0, 1), ValidationError);
}

TEST_CASE("co-location records list classes within the radius") {
  const auto layouts = test::kitchen_layouts();
  const std::vector<std::uint64_t> seeds = {1, 2};
  const auto recs = colocation_records(layouts[0], seeds, 1.0);
  std::size_t expected = 0;
  for (auto s : seeds) expected += build_world(layouts[0], s).objects.size();
  REQUIRE(recs.size() == expected);
  const WorldState w = build_world(layouts[0], 1);
  for (std::size_t i = 0; i < w.objects.size(); ++i) {
    std::set<ClassId> want;
    for (const auto& o : w.objects) {
      if ((o.position - w.objects[i].position).norm() < 1.0) want.insert(o.cls);
    }
    CHECK(recs[i] == want);
    CHECK(recs[i].count(w.objects[i].cls) == 1);
  }
}
