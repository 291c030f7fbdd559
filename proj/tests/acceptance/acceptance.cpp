// Acceptance checks, one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,2,...] [--work DIR] [--fresh] [--threads N]
//
// Criteria 7 and 8 train the runs of data/manifests/acceptance.json into
// DIR/runs (about 18M environment steps) and reuse finished jobs on later
// invocations unless --fresh is given.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "actctx/cli/commands.hpp"
#include "actctx/prior/compatibility.hpp"
#include "actctx/prior/embedding.hpp"
#include "actctx/reward/activity_reward.hpp"
#include "actctx/rl/trainer.hpp"
#include "actctx/sim/oracle.hpp"
#include "actctx/sim/task.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace actctx;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x, int precision = 3) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome compatibility_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  double worst = 0, worst_row = 0;
  bool invariants = true;
  for (int corpus = 0; corpus < 25; ++corpus) {
    const oracle::RandomCorpus c = oracle::random_corpus(rng);
    const CompatibilityTable got = extract_compatibility(c.clips, c.vocab);
    worst = std::max(worst, (got.scores() - oracle::brute_force_phi(c.label_sets, c.vocab)).cwiseAbs().maxCoeff());
    invariants = invariants && got.check_invariants(1e-9).empty();
    for (int r = 0; r <= c.vocab.size(); ++r) {
      const double total = got.scores().row(r).sum();
      if (total != 0) worst_row = std::max(worst_row, std::abs(total - 1.0));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && worst_row <= 1e-9 && invariants && secs < 5.0,
          "25 corpora, max entry error " + num(worst) + ", max row-sum error " + num(worst_row) + ", " +
              num(secs, 2) + " s"};
}

CompatibilityTable random_table(const Vocabulary& v, Rng& rng) {
  CompatibilityTable t(v);
  for (int r = 0; r <= v.size(); ++r) {
    for (int c = 0; c < v.size(); ++c) t.mutable_scores()(r, c) = rng.uniform();
  }
  t.normalize_rows();
  return t;
}

Outcome mapping_algebra() {
  Rng rng(5);
  const Vocabulary v({"cup", "pan", "knife", "tap", "sink"}, {true, true, true, false, false});
  const CompatibilityTable t = random_table(v, rng);
  const auto n = static_cast<Eigen::Index>(v.size());
  const EmbeddingTable one_hot(v.names(), Eigen::MatrixXd::Identity(n, n));
  const bool identity_exact = map_vocabulary(t, one_hot, v, one_hot, 0.6).scores() == t.scores();

  // Each environment class has exactly one video neighbour at its own cosine.
  const Vocabulary video({"mug", "saucepan", "tap", "basin"}, {true, true, false, false});
  const Vocabulary env({"Cup", "Pot", "Faucet", "Sink"}, {true, true, false, false});
  const CompatibilityTable vt = random_table(video, rng);
  const double sims[4] = {0.95, 0.8, 0.7, 0.65};
  Eigen::MatrixXd ve = Eigen::MatrixXd::Zero(5, 4), ee = Eigen::MatrixXd::Zero(5, 4);
  for (int k = 0; k < 4; ++k) {
    ve(k, k) = 1;
    ee(k, k) = sims[k];
    ee(4, k) = std::sqrt(1 - sims[k] * sims[k]);
  }
  const CompatibilityTable mapped =
      map_vocabulary(vt, EmbeddingTable(video.names(), ve), env, EmbeddingTable(env.names(), ee), 0.6);
  double worst = 0;
  for (int m = 0; m <= env.size(); ++m) {
    if (!env.movable(m)) {
      worst = std::max(worst, mapped.scores().row(m).cwiseAbs().maxCoeff());
      continue;
    }
    const double sm = m == env.size() ? 1.0 : sims[m];
    double z = 0;
    for (int k = 0; k < env.size(); ++k) {
      if (k != m) z += sm * sims[k] * vt(m, k);
    }
    for (int k = 0; k < env.size(); ++k) {
      const double want = k == m ? 0.0 : sm * sims[k] * vt(m, k) / z;
      worst = std::max(worst, std::abs(mapped(m, k) - want));
    }
  }
  return {identity_exact && worst <= 1e-12, std::string("identity ") + (identity_exact ? "exact" : "differs") +
                                                ", single-neighbour max error " + num(worst)};
}

Outcome memory_replay() {
  Rng rng(77);
  int mismatches = 0, eps_bad = 0, after_take = 0, other = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const oracle::MemoryTrial r = oracle::memory_trial(rng, kDefaultEpsilon);
    mismatches += !r.matches_replay;
    eps_bad += r.epsilon_violations;
    after_take += r.after_take_violations;
    other += r.shrunk_on_put + r.empty_lists;
  }
  return {mismatches == 0 && eps_bad == 0 && after_take == 0 && other == 0,
          "1000 sequences, replay mismatches " + std::to_string(mismatches) + ", epsilon violations " +
              std::to_string(eps_bad) + ", taken-but-present " + std::to_string(after_take)};
}

Outcome reward_algebra() {
  const Vocabulary v({"cup", "bottle", "faucet"}, {true, true, false});
  const InstanceId faucet{0}, cup{1}, bottle{2};
  const std::vector<PlacedAnchor> anchors = {{faucet, Vec2(0, 0)}, {cup, Vec2(0.1, 0)}, {bottle, Vec2(0, 0.1)}};

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 3);
  s(0, 2) = 0.4;
  s(1, 2) = 0.2;
  const CompatibilityTable worked(v, s);
  AcoMemory mem;
  mem.update(oracle::put_event(1, 0, Vec2(0.1, 0)), anchors);
  mem.update(oracle::put_event(2, 1, Vec2(0, 0.1)), anchors);
  InteractionCounter counter;
  const double faucet_r =
      activity_reward(mem, sim::Verb::toggle_on, 2, faucet, std::nullopt, std::nullopt, counter, worked);

  s.setZero();
  s(0, 2) = 0.7;
  s(1, 2) = 0.3;
  const CompatibilityTable peaked(v, s);
  const AcoMemory empty;
  const double lone = activity_reward(empty, sim::Verb::toggle_on, 2, faucet, ClassId{0}, cup, counter, peaked);
  double nav = 0;
  for (auto verb : {sim::Verb::move_forward, sim::Verb::turn_left, sim::Verb::turn_right}) {
    nav = std::max(nav, activity_reward(mem, verb, 2, faucet, ClassId{0}, cup, counter, peaked));
  }
  InteractionCounter repeated;
  repeated.increment(sim::Verb::toggle_on, 2);
  const double again = activity_reward(mem, sim::Verb::toggle_on, 2, faucet, ClassId{0}, cup, repeated, peaked);

  const bool ok = std::abs(faucet_r - 1.5) < 1e-15 && lone == 1.0 && nav == 0.0 && again == 0.0;
  return {ok, "faucet example " + num(faucet_r, 17) + ", lone argmax " + num(lone, 17) + ", navigation " + num(nav) +
                  ", repeat " + num(again)};
}

/// Each task's goal in a staged world, then broken by marking the goal item
/// as having started in place.
bool predicate_suite(std::string& failed) {
  using sim::TaskId;
  const auto& cat = *test::kitchen_catalog();
  struct Case {
    TaskId task;
    const char* item;
    const char* receptacle;
    const char* toggle;
  };
  const Case cases[] = {{TaskId::store, "Spoon", "Drawer", nullptr},  {TaskId::heat, "Pot", "StoveBurner", "StoveKnob"},
                        {TaskId::cool, "Apple", "Fridge", nullptr},   {TaskId::clean, "Mug", "SinkBasin", "Faucet"},
                        {TaskId::prep, "Tomato", "Pan", nullptr},     {TaskId::trash, "Bread", "GarbageCan", nullptr}};
  for (const auto& c : cases) {
    sim::WorldState w = oracle::staged_world();
    const sim::TaskSpec task = sim::make_task(c.task, cat);
    bool ok = !sim::check_goal(w, task);
    auto& item = oracle::first_of(w, c.item);
    auto& rec = oracle::first_of(w, c.receptacle);
    item.contained_in = rec.id;
    rec.open = false;
    if (c.toggle) {
      ok = ok && !sim::check_goal(w, task);
      oracle::first_of(w, c.toggle).toggled_on = true;
    }
    ok = ok && sim::check_goal(w, task);
    item.initial_container = rec.id;
    ok = ok && !sim::check_goal(w, task);
    if (!ok) failed += std::string(" ") + sim::task_name(c.task);
  }
  sim::WorldState w = oracle::staged_world();
  const sim::TaskSpec slice = sim::make_task(TaskId::slice, cat);
  auto& apple = oracle::first_of(w, "Apple");
  auto& knife = oracle::first_of(w, "Knife");
  apple.sliced = true;
  bool ok = !sim::check_goal(w, slice);
  knife.contained_in.reset();
  w.held = knife.id;
  ok = ok && sim::check_goal(w, slice);
  apple.initially_sliced = true;
  ok = ok && !sim::check_goal(w, slice);
  if (!ok) failed += " slice";
  return failed.empty();
}

Outcome goal_predicates() {
  const auto layouts = test::kitchen_layouts();
  const sim::LayoutSet set(layouts);
  const auto& cat = *test::kitchen_catalog();
  const sim::ActionSpace space(cat);
  std::string counts;
  bool all = true;
  for (sim::TaskId t : sim::kAllTasks) {
    auto eps = sim::generate_episodes(layouts, t, 8, 2024);
    const bool enough = eps.size() >= 50;
    if (enough) eps.resize(50);
    const sim::TaskSpec task = sim::make_task(t, cat);
    int ok = 0;
    for (const auto& e : eps) {
      const sim::WorldState w = sim::instantiate(e, set);
      ok += !sim::check_goal(w, task) && sim::run_oracle(w, space, task, e.horizon).success;
    }
    all = all && enough && ok == 50;
    counts += std::string(counts.empty() ? "" : " ") + sim::task_name(t) + "=" + std::to_string(ok) + "/50";
  }
  std::string failed;
  const bool predicates = predicate_suite(failed);
  return {all && predicates, "oracle " + counts + "; predicates " + (predicates ? "ok" : "failed:" + failed)};
}

Outcome gradient_check() {
  Rng rng(3);
  rl::PpoHyper hp;
  hp.normalize_advantages = false;
  double worst = 0;
  oracle::GradNet tiny(rl::NetShape{1, 1, 1, 2});
  for (int trial = 0; trial < 20; ++trial) {
    for (Eigen::Index k = 0; k < tiny.params().size(); ++k) tiny.params()[k] = rng.normal();
    worst = std::max(worst, oracle::gradient_error(tiny, oracle::random_batch(tiny, 6, rng, 0.15), hp));
  }
  hp.normalize_advantages = true;
  oracle::GradNet wide(rl::NetShape{4, 3, 3, 3});
  wide.initialize(9);
  for (Eigen::Index k = 0; k < wide.params().size(); ++k) wide.params()[k] += 0.3 * rng.normal();
  for (int trial = 0; trial < 10; ++trial) {
    worst = std::max(worst, oracle::gradient_error(wide, oracle::random_batch(wide, 16, rng, 0.6), hp));
  }
  return {worst < 1e-4, "30 toy policies, worst relative error " + num(worst)};
}

Outcome determinism() {
  const auto layouts = test::kitchen_layouts();
  const auto& cat = *test::kitchen_catalog();
  const std::span<const sim::Layout> held_out = std::span(layouts).subspan(5);
  const auto e1 = sim::generate_episodes(held_out, sim::TaskId::cool, 6, 99);
  const auto e2 = sim::generate_episodes(held_out, sim::TaskId::cool, 6, 99);
  const auto e3 = sim::generate_episodes(held_out, sim::TaskId::cool, 6, 100);
  const bool episodes_ok = sim::episode_set_digest(e1, cat) == sim::episode_set_digest(e2, cat) &&
                           sim::episode_set_digest(e1, cat) != sim::episode_set_digest(e3, cat);

  rl::TrainInputs in;
  in.catalog = test::kitchen_catalog();
  in.train_layouts.assign(layouts.begin(), layouts.begin() + 5);
  in.eval_layouts = sim::LayoutSet(std::vector<sim::Layout>(held_out.begin(), held_out.end()));
  in.eval_episodes = e1;
  const CompatibilityTable table = read_table_csv(test::data_path("priors/aco.csv"));
  in.table = &table;
  rl::TrainConfig cfg;
  cfg.task = sim::TaskId::cool;
  cfg.mode = rl::RewardMode::aco;
  cfg.total_steps = 16384;
  cfg.eval_interval = 8192;
  const auto a = rl::train(cfg, in);
  const auto b = rl::train(cfg, in);
  bool train_ok = a.policy.net.params() == b.policy.net.params() && a.curve.size() == b.curve.size() &&
                  a.history.size() == b.history.size();
  for (std::size_t i = 0; train_ok && i < a.curve.size(); ++i) {
    train_ok = a.curve[i].step == b.curve[i].step && a.curve[i].success_rate == b.curve[i].success_rate;
  }
  for (std::size_t i = 0; train_ok && i < a.history.size(); ++i) {
    train_ok = a.history[i].stats.loss == b.history[i].stats.loss;
  }

  const sim::ActionSpace space(cat);
  bool eval_ok = true;
  for (auto sel : {rl::ActionSelection::greedy, rl::ActionSelection::sampled}) {
    rl::EvalOptions eo;
    eo.selection = sel;
    const auto r1 = rl::evaluate(a.policy, e1, in.eval_layouts, space, eo);
    const auto r2 = rl::evaluate(a.policy, e2, in.eval_layouts, space, eo);
    eval_ok = eval_ok && r1.records == r2.records;
  }
  return {episodes_ok && train_ok && eval_ok, std::string("episodes ") + (episodes_ok ? "reproducible" : "differ") +
                                                  ", training " + (train_ok ? "bit-identical" : "differs") +
                                                  ", evaluation " + (eval_ok ? "reproducible" : "differs")};
}

// ---------------------------------------------------------------------------
// Training criteria.

using Row = std::map<std::string, std::string>;

std::vector<Row> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    Row r;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) r[header[i]] = cells[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

struct Sweep {
  fs::path report;
  std::string error;
};

/// Trains (or resumes) the three acceptance runs and merges them.
Sweep run_sweep(const fs::path& work, bool fresh, int threads) {
  Sweep s;
  s.report = work / "report";
  try {
    const fs::path manifest = test::data_path("manifests/acceptance.json");
    setenv("ACTCTX_OUTPUT_ROOT", (work / "runs").c_str(), 1);
    const auto t0 = std::chrono::steady_clock::now();
    for (const char* run : {"vanilla", "aco", "uniform"}) {
      cli::TrainCommandOptions o;
      o.manifest = manifest;
      o.run = run;
      o.force = fresh;
      o.resume = !fresh;
      o.threads = threads;
      std::cerr << "training run " << run << " (" << num(seconds_since(t0), 4) << " s elapsed)\n";
      cli::train_run(o, std::cerr);
    }
    std::cerr << "training done after " << num(seconds_since(t0), 4) << " s\n";
    cli::ReportOptions r;
    r.runs = {work / "runs" / "vanilla", work / "runs" / "aco", work / "runs" / "uniform"};
    r.out = s.report;
    std::ostringstream log;
    cli::report(r, log);
  } catch (const std::exception& e) {
    s.error = e.what();
  }
  return s;
}

Outcome headline_ordering(const Sweep& sweep) {
  if (!sweep.error.empty()) return {false, "sweep failed: " + sweep.error};
  std::map<std::pair<std::string, std::string>, Row> cmp;  // (task, run)
  for (auto& row : read_csv(sweep.report / "comparison.csv")) cmp[{row["task"], row["run"]}] = row;
  bool ordering = true, accelerated = false;
  std::string detail;
  for (const char* task : {"clean", "cool"}) {
    const auto get = [&](const char* run, const char* col) { return std::stod(cmp.at({task, run}).at(col)); };
    const double aco = get("aco", "final_mean"), van = get("vanilla", "final_mean"), uni = get("uniform", "final_mean");
    const double aco_q = get("aco", "quarter_mean");
    const int seeds = std::stoi(cmp.at({task, "aco"}).at("seeds"));
    const bool ok = seeds >= 3 && aco >= 1.5 * van && aco >= uni;
    ordering = ordering && ok;
    accelerated = accelerated || aco_q >= van;
    detail += std::string(detail.empty() ? "" : "; ") + task + " aco " + num(aco) + " vanilla " + num(van) +
              " uniform " + num(uni) + " (aco/vanilla " + (van > 0 ? num(aco / van) : std::string("inf")) +
              ", aco@25% " + num(aco_q) + ")";
  }
  detail += std::string("; ordering ") + (ordering ? "holds" : "fails") + ", acceleration " +
            (accelerated ? "holds" : "fails");
  return {ordering && accelerated, detail};
}

Outcome difficulty_profile(const Sweep& sweep) {
  if (!sweep.error.empty()) return {false, "sweep failed: " + sweep.error};
  std::map<std::string, std::map<int, double>> rate;
  bool flagged = false;
  for (auto& row : read_csv(sweep.report / "difficulty.csv")) {
    rate[row["run"]][std::stoi(row["bin"])] = std::stod(row["success_rate"]);
    flagged = flagged || row["flagged"] == "1";
  }
  int nonneg = 0, bins = 0;
  std::string deltas;
  for (const auto& [bin, aco] : rate["aco"]) {
    const double delta = aco - rate["vanilla"].at(bin);
    nonneg += delta >= 0;
    ++bins;
    deltas += (deltas.empty() ? "" : " ") + num(delta, 2);
  }
  return {bins == 8 && nonneg >= 6 && !flagged,
          std::to_string(nonneg) + "/" + std::to_string(bins) + " bins with aco >= vanilla, deltas [" + deltas + "]"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  fs::path work = ACTCTX_ACCEPTANCE_WORK;
  bool fresh = false;
  int threads = 1;
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',')->check(CLI::Range(1, 9));
  app.add_option("--work", work, "Working directory for training runs")->capture_default_str();
  app.add_flag("--fresh", fresh, "Retrain instead of reusing finished runs");
  app.add_option("--threads", threads, "Environment worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());
  const auto wanted = [&](int k) { return selected.empty() || selected.contains(k); };

  std::optional<Sweep> sweep;
  const auto training = [&]() -> const Sweep& {
    if (!sweep) sweep = run_sweep(work, fresh, threads);
    return *sweep;
  };
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, compatibility_oracle},
      {2, mapping_algebra},
      {3, memory_replay},
      {4, reward_algebra},
      {5, goal_predicates},
      {6, gradient_check},
      {7, [&] { return headline_ordering(training()); }},
      {8, [&] { return difficulty_profile(training()); }},
      {9, determinism},
  };
  int failures = 0;
  for (const auto& [k, check] : criteria) {
    if (!wanted(k)) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
