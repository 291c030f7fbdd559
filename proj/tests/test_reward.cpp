#include <doctest.h>

#include <map>
#include <sstream>

#include "actctx/reward/activity_reward.hpp"
#include "actctx/rl/env.hpp"
#include "actctx/rng.hpp"
#include "actctx/sim/layout.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace actctx;
using oracle::put_event;
using oracle::take_event;

namespace {

Vocabulary faucet_vocab() { return Vocabulary({"cup", "bottle", "faucet"}, {true, true, false}); }

}  // namespace

TEST_CASE("memory matches declarative log replay on random put/take sequences") {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const oracle::MemoryTrial r = oracle::memory_trial(rng, kDefaultEpsilon);
    REQUIRE(r.matches_replay);
    CHECK(r.epsilon_violations == 0);
    CHECK(r.after_take_violations == 0);
    CHECK(r.shrunk_on_put == 0);
    CHECK(r.empty_lists == 0);
  }
}

TEST_CASE("memory ignores failed and non-placement events") {
  AcoMemory mem;
  const std::vector<PlacedAnchor> anchors = {{InstanceId{0}, Vec2(0, 0)}};
  auto ev = put_event(1, 0, Vec2(0.1, 0));
  ev.success = false;
  mem.update(ev, anchors);
  CHECK(mem.total_entries() == 0);
  ev = put_event(1, 0, Vec2(0.1, 0));
  ev.kind = EventKind::interact;
  mem.update(ev, anchors);
  CHECK(mem.total_entries() == 0);
  mem.update(put_event(1, 0, Vec2(0.5, 0)), anchors);  // exactly epsilon away
  CHECK(mem.total_entries() == 0);
  mem.update(put_event(1, 0, Vec2(0.49, 0)), anchors);
  CHECK(mem.at(InstanceId{0}).size() == 1);
  const AcoMemory copy = update_memory(mem, take_event(1, 0, Vec2(0.49, 0)), anchors);
  CHECK(copy.total_entries() == 0);
  CHECK(mem.total_entries() == 1);
  CHECK_THROWS_AS(AcoMemory(0.0), ValidationError);
}

TEST_CASE("reward algebra: worked faucet example") {
  const Vocabulary v = faucet_vocab();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 3);
  s(0, 2) = 0.4;  // cup -> faucet
  s(1, 2) = 0.2;  // bottle -> faucet
  const CompatibilityTable table(v, s);
  AcoMemory mem;
  const InstanceId faucet{0}, cup{1}, bottle{2};
  const std::vector<PlacedAnchor> anchors = {{faucet, Vec2(0, 0)}, {cup, Vec2(0.1, 0)}, {bottle, Vec2(0, 0.1)}};
  mem.update(put_event(1, 0, Vec2(0.1, 0)), anchors);
  mem.update(put_event(2, 1, Vec2(0, 0.1)), anchors);
  REQUIRE(mem.at(faucet).size() == 2);
  InteractionCounter counter;
  const double r = activity_reward(mem, sim::Verb::toggle_on, 2, faucet, std::nullopt, std::nullopt, counter, table);
  CHECK(r == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(std::abs(r - (0.4 + 0.2) / 0.4) < 1e-15);
}

TEST_CASE("reward algebra: normalization, navigation, repeats, zero mass") {
  const Vocabulary v = faucet_vocab();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 3);
  s(0, 2) = 0.7;
  s(1, 2) = 0.3;
  s(3, 2) = 0.1;  // null -> faucet
  const CompatibilityTable table(v, s);
  const InstanceId faucet{0};
  AcoMemory mem;
  InteractionCounter counter;
  SUBCASE("a lone argmax held object gives exactly 1") {
    CHECK(activity_reward(mem, sim::Verb::toggle_on, 2, faucet, ClassId{0}, InstanceId{1}, counter, table) == 1.0);
  }
  SUBCASE("a lone argmax memory entry plus the empty hand") {
    mem.update(put_event(1, 0, Vec2(0.1, 0)), std::vector<PlacedAnchor>{{faucet, Vec2(0, 0)}});
    const double r = activity_reward(mem, sim::Verb::toggle_on, 2, faucet, std::nullopt, std::nullopt, counter, table);
    CHECK(r == doctest::Approx(1.0 + 0.1 / 0.7));
  }
  SUBCASE("held object already in memory counts once") {
    mem.update(put_event(1, 0, Vec2(0.1, 0)), std::vector<PlacedAnchor>{{faucet, Vec2(0, 0)}});
    CHECK(activity_reward(mem, sim::Verb::take, 2, faucet, ClassId{0}, InstanceId{1}, counter, table) == 1.0);
  }
  SUBCASE("navigation yields zero") {
    for (auto verb : {sim::Verb::move_forward, sim::Verb::turn_left, sim::Verb::turn_right}) {
      CHECK(activity_reward(mem, verb, 2, faucet, ClassId{0}, InstanceId{1}, counter, table) == 0.0);
    }
  }
  SUBCASE("repeated interaction yields zero") {
    counter.increment(sim::Verb::toggle_on, 2);
    CHECK(activity_reward(mem, sim::Verb::toggle_on, 2, faucet, ClassId{0}, InstanceId{1}, counter, table) == 0.0);
    CHECK(activity_reward(mem, sim::Verb::toggle_off, 2, faucet, ClassId{0}, InstanceId{1}, counter, table) == 1.0);
  }
  SUBCASE("target without prior mass yields zero") {
    CHECK(activity_reward(mem, sim::Verb::take, 0, InstanceId{1}, std::nullopt, std::nullopt, counter, table) == 0.0);
  }
  CHECK(total_reward(-0.01, 2.0, 0.5) == doctest::Approx(0.99));
}

TEST_CASE("reward is non-negative and fires at most once per (verb, class)") {
  Rng rng(4);
  const Vocabulary v({"a", "b", "c", "f"}, {true, true, true, false});
  Eigen::MatrixXd s(5, 4);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 4; ++c) s(r, c) = rng.uniform();
  }
  CompatibilityTable table(v, s);
  table.normalize_rows();
  AcoMemory mem;
  InteractionCounter counter;
  std::map<std::pair<sim::Verb, ClassId>, int> nonzero;
  for (int t = 0; t < 500; ++t) {
    const ClassId target = rng.below(4);
    const auto verb = static_cast<sim::Verb>(3 + rng.below(7));
    if (rng.bernoulli(0.3)) {
      mem.update(put_event(rng.below(4), rng.below(3), Vec2(rng.uniform(), 0)),
                 std::vector<PlacedAnchor>{{InstanceId{target}, Vec2(0.2, 0)}});
    }
    const double r = activity_reward(mem, verb, target, InstanceId{target}, std::nullopt, std::nullopt, counter, table);
    CHECK(r >= 0.0);
    if (r > 0) ++nonzero[{verb, target}];
    counter.increment(verb, target);
  }
  for (const auto& [key, n] : nonzero) CHECK(n <= 1);
}

TEST_CASE("rewarder on a live world: put mug in sink then run the faucet") {
  const auto cat = test::kitchen_catalog();
  const auto layouts = test::kitchen_layouts();
  const sim::ActionSpace space(*cat);
  const Vocabulary& v = cat->vocabulary();
  CompatibilityTable table(v);
  table.mutable_scores()(v.at("Mug"), v.at("SinkBasin")) = 0.5;
  table.mutable_scores()(v.at("Mug"), v.at("Faucet")) = 0.5;
  table.mutable_scores()(v.null_id(), v.at("Faucet")) = 1.0;
  // Drive the scripted oracle on Clean and follow its events.
  const auto eps = sim::generate_episodes(std::span(layouts).first(1), sim::TaskId::clean, 4, 3);
  REQUIRE_FALSE(eps.empty());
  rl::EnvRunner runner(space, rl::RewardMode::aco, &table);
  const sim::LayoutSet set(layouts);
  for (const auto& e : eps) {
    runner.reset(e, set);
    ActivityRewarder shadow(table);
    shadow.reset();
    double total = 0;
    for (int t = 0; t < 300; ++t) {
      const auto& w = runner.world();
      // Prefer the argmax script actions available to a simple policy: use
      // the oracle indirectly through the episode replay in test_sim.
      int action = -1;
      for (int a = space.navigation_size(); a < space.size(); ++a) {
        if (w.select_target(space.at(a))) {
          action = a;
          break;
        }
      }
      if (action < 0) action = t % 3 == 0 ? 1 : 0;
      sim::WorldState after = w;
      const auto step = after.apply(space, action);
      const double expect = shadow.on_step(step.event, after);
      const auto out = runner.step(action);
      CHECK(out.aux_reward == expect);
      CHECK(out.aux_reward >= 0);
      total += out.aux_reward;
      if (out.goal || out.truncated) break;
    }
    CHECK(total >= 0);
  }
}

TEST_CASE("coverage reward counts new visible in-reach classes once") {
  const auto layouts = test::kitchen_layouts();
  const sim::WorldState w = sim::build_world(layouts[0], 11);
  std::set<ClassId> visited;
  int expected = 0;
  std::set<ClassId> seen;
  for (const auto& o : w.objects) {
    if (w.visible(o) && w.in_reach(o, w.agent) && seen.insert(o.cls).second) ++expected;
  }
  CHECK(coverage_reward(w, visited) == expected * kCoverageBonus);
  CHECK(coverage_reward(w, visited) == 0.0);
  CHECK(static_cast<int>(visited.size()) == expected);
}

TEST_CASE("event log round trip") {
  const Vocabulary& v = test::kitchen_catalog()->vocabulary();
  auto ev = put_event(7, v.at("Mug"), Vec2(1.25, 0.5));
  ev.target_class = v.at("SinkBasin");
  ev.target_instance = InstanceId{3};
  ev.held_class = v.at("Mug");
  ev.held_instance = InstanceId{7};
  InteractionEvent nav;
  nav.success = true;
  std::stringstream io;
  write_event_log_header(io);
  write_event_log_line(io, 0, ev, v);
  write_event_log_line(io, 1, nav, v);
  const auto back = read_event_log(io, v);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == ev);
  CHECK(back[1] == nav);
}
