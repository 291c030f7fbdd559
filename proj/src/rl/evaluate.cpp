#include "actctx/rl/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

#include "actctx/sim/oracle.hpp"

namespace actctx::rl {

std::string selection_name(ActionSelection s) { return s == ActionSelection::greedy ? "greedy" : "sampled"; }

ActionSelection selection_from_name(const std::string& name) {
  if (name == "greedy") return ActionSelection::greedy;
  if (name == "sampled") return ActionSelection::sampled;
  throw ValidationError("unknown action selection '" + name + "'");
}

EvalResult evaluate(const Policy& policy, std::span<const sim::EpisodeConfig> episodes,
                    const sim::LayoutSet& layouts, const sim::ActionSpace& space,
                    const EvalOptions& options) {
  if (episodes.empty()) throw ValidationError("evaluate: empty episode set");
  const int batch = std::max(1, options.batch);
  const sim::KitchenCatalog& cat = *layouts.at(episodes.front().scene).catalog;
  require_compatible(policy, cat, space.size());

  EvalResult result;
  struct Live {
    int index;
    sim::WorldState world;
    sim::TaskSpec task;
    sim::ActionFeedback feedback;
    int steps = 0;
    int horizon = 0;
    bool done = false;
    bool success = false;
    std::uint64_t seed = 0;
  };
  std::vector<Live> live;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const auto& e = episodes[i];
    Live l{static_cast<int>(i), sim::instantiate(e, layouts), sim::make_task(e.task, cat), {}, 0, e.horizon};
    l.seed = e.seed;
    const double difficulty = sim::navigation_difficulty(l.world, e.task);
    if (!std::isfinite(difficulty)) {
      result.excluded.push_back(std::to_string(i) + ": no reachable eligible object");
      continue;
    }
    result.records.push_back({l.index, e.scene, sim::task_name(e.task), false, 0, difficulty});
    live.push_back(std::move(l));
  }
  if (live.empty()) throw ValidationError("evaluate: every episode was excluded");

  const auto finish = [&](std::vector<Live>& group, auto&& choose) {
    for (;;) {
      std::vector<Live*> active;
      for (auto& l : group) {
        if (l.done) continue;
        if (sim::check_goal(l.world, l.task)) {
          l.done = l.success = true;
        } else if (l.steps >= l.horizon) {
          l.done = true;
        } else {
          active.push_back(&l);
        }
      }
      if (active.empty()) return;
      std::vector<int> actions(active.size(), -1);
      choose(active, actions);
      for (std::size_t k = 0; k < active.size(); ++k) {
        Live& l = *active[k];
        if (actions[k] < 0) {  // scripted oracle has nothing left to do
          l.done = true;
          l.success = sim::check_goal(l.world, l.task);
          continue;
        }
        const sim::StepResult r = l.world.apply(space, actions[k]);
        l.feedback.record(actions[k], r.success, !sim::is_navigation(space.at(actions[k]).verb));
        ++l.steps;
      }
    }
  };

  for (std::size_t start = 0; start < live.size(); start += static_cast<std::size_t>(batch)) {
    const std::size_t end = std::min(live.size(), start + static_cast<std::size_t>(batch));
    std::vector<Live> group(std::make_move_iterator(live.begin() + static_cast<std::ptrdiff_t>(start)),
                            std::make_move_iterator(live.begin() + static_cast<std::ptrdiff_t>(end)));
    switch (policy.kind) {
      case PolicyKind::network: {
        const sim::ObservationEncoder enc(cat, space.size(), policy.window_radius);
        ActorCritic<float>::Cache cache;
        Eigen::MatrixXf x;
        std::vector<Rng> rngs;
        for (const auto& l : group) rngs.emplace_back(mix_seed(l.seed, 0x5a3e));
        finish(group, [&](std::vector<Live*>& active, std::vector<int>& actions) {
          x.resize(enc.dim(), static_cast<Eigen::Index>(active.size()));
          for (std::size_t k = 0; k < active.size(); ++k) {
            enc.encode(active[k]->world, active[k]->feedback, x.col(static_cast<Eigen::Index>(k)));
          }
          policy.net.forward(x, cache);
          if (options.selection == ActionSelection::greedy) {
            for (std::size_t k = 0; k < active.size(); ++k) {
              actions[k] = argmax_column(cache.logits.col(static_cast<Eigen::Index>(k)));
            }
            return;
          }
          const Eigen::MatrixXf logp = log_softmax(cache.logits);
          for (std::size_t k = 0; k < active.size(); ++k) {
            Rng& rng = rngs[static_cast<std::size_t>(active[k] - group.data())];
            actions[k] = sample_action(logp.col(static_cast<Eigen::Index>(k)), rng);
          }
        });
        break;
      }
      case PolicyKind::scripted: {
        finish(group, [&](std::vector<Live*>& active, std::vector<int>& actions) {
          for (std::size_t k = 0; k < active.size(); ++k) {
            const sim::ScriptedOracle oracle(space, active[k]->task);
            actions[k] = oracle.act(active[k]->world).value_or(-1);
          }
        });
        break;
      }
      case PolicyKind::random: {
        std::vector<Rng> rngs;
        for (const auto& l : group) rngs.emplace_back(mix_seed(l.seed, 0x4a4d));
        finish(group, [&](std::vector<Live*>& active, std::vector<int>& actions) {
          for (std::size_t k = 0; k < active.size(); ++k) {
            actions[k] = rngs[static_cast<std::size_t>(active[k] - group.data())].below(space.size());
          }
        });
        break;
      }
    }
    for (std::size_t g = 0; g < group.size(); ++g) {
      EpisodeRecord& rec = result.records[start + g];
      rec.success = group[g].success;
      rec.steps = group[g].steps;
    }
  }
  int successes = 0;
  for (const auto& r : result.records) successes += r.success;
  result.success_rate = static_cast<double>(successes) / static_cast<double>(result.records.size());
  return result;
}

std::vector<std::pair<std::string, double>> success_by_task(const EvalResult& result) {
  std::map<std::string, std::pair<int, int>> tally;
  for (const auto& r : result.records) {
    auto& t = tally[r.task];
    t.first += r.success;
    t.second += 1;
  }
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [task, t] : tally) out.emplace_back(task, static_cast<double>(t.first) / t.second);
  return out;
}

DifficultyProfile difficulty_report(std::span<const EpisodeRecord> records, int bins) {
  DifficultyProfile profile;
  if (records.empty()) {
    profile.flagged = true;
    return profile;
  }
  const int n = static_cast<int>(records.size());
  int k = bins;
  if (n < bins) {
    k = n;
    profile.flagged = true;
  }
  std::vector<int> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (records[a].difficulty != records[b].difficulty) return records[a].difficulty < records[b].difficulty;
    return records[a].episode < records[b].episode;
  });
  for (int b = 0; b < k; ++b) {
    const int lo = static_cast<int>(static_cast<long>(b) * n / k);
    const int hi = static_cast<int>(static_cast<long>(b + 1) * n / k);
    DifficultyBin bin;
    bin.lo = records[order[lo]].difficulty;
    bin.hi = records[order[hi - 1]].difficulty;
    for (int i = lo; i < hi; ++i) {
      ++bin.count;
      bin.successes += records[order[i]].success;
    }
    profile.bins.push_back(bin);
  }
  return profile;
}

}  // namespace actctx::rl
