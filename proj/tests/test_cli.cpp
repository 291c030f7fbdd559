#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "actctx/cli/commands.hpp"
#include "actctx/cli/manifest.hpp"
#include "actctx/prior/baseline_priors.hpp"
#include "actctx/rl/policy.hpp"
#include "actctx/sim/oracle.hpp"
#include "support.hpp"

using namespace actctx;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("actctx_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ACTCTX_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string layout(int i) { return test::data_path("layouts/kitchen_0" + std::to_string(i) + ".json").string(); }

/// A tiny-budget manifest over kitchen layouts 1-2 (train) and 7-8 (eval).
json manifest_doc(const fs::path& out_root) {
  json d;
  d["schema"] = "actctx.manifest/1";
  d["catalog"] = test::data_path("kitchen_vocab.json").string();
  d["output_root"] = out_root.string();
  d["defaults"] = {{"tasks", {"trash"}},
                   {"train_layouts", {layout(1), layout(2)}},
                   {"eval_layouts", {layout(7), layout(8)}},
                   {"seeds", {1}},
                   {"total_steps", 1024},
                   {"eval_interval", 512},
                   {"eval_episodes_per_layout", 3},
                   {"config", {{"num_envs", 2}, {"rollout_length", 64}, {"hidden", 8}}}};
  d["runs"] = json::array();
  return d;
}

fs::path write_manifest(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "manifest.json";
  spit(p, doc.dump(1));
  return p;
}

std::string train(const fs::path& manifest, const std::string& run, bool force = false, bool resume = false) {
  cli::TrainCommandOptions o;
  o.manifest = manifest;
  o.run = run;
  o.force = force;
  o.resume = resume;
  std::ostringstream log;
  cli::train_run(o, log);
  return log.str();
}

std::vector<std::string> body_lines(const fs::path& csv) {
  std::istringstream in(slurp(csv));
  std::vector<std::string> out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("exit codes distinguish usage, validation and runtime failures") {
  const fs::path dir = scratch("exit");
  CHECK(run_cli("--version") == cli::kExitOk);
  CHECK(run_cli("") == cli::kExitParse);
  CHECK(run_cli("train --run x") == cli::kExitParse);  // missing --manifest
  CHECK(run_cli("eval --selection best --checkpoint a --episodes b --layouts c") == cli::kExitParse);
  CHECK(run_cli("train --manifest " + (dir / "none.json").string() + " --run x") == cli::kExitValidation);
  spit(dir / "broken.json", "{ not json");
  CHECK(run_cli("train --manifest " + (dir / "broken.json").string() + " --run x") == cli::kExitParse);
  CHECK(run_cli("report --out " + (dir / "r").string() + " " + dir.string()) == cli::kExitValidation);
  CHECK(run_cli("make-episodes --layouts " + layout(1) + " --task trash --out /proc/actctx/eps.json") ==
        cli::kExitRuntime);

  std::ostringstream err;
  CHECK(cli::run_guarded([] { throw ParseError("p"); }, err) == cli::kExitParse);
  CHECK(cli::run_guarded([] { throw ValidationError("v"); }, err) == cli::kExitValidation);
  CHECK(cli::run_guarded([] { throw std::runtime_error("r"); }, err) == cli::kExitRuntime);
  CHECK(cli::run_guarded([] {}, err) == cli::kExitOk);
  CHECK(err.str().find('v') != std::string::npos);
}

TEST_CASE("make-synthetic and extract-priors produce a valid environment prior") {
  const fs::path dir = scratch("priors");
  json spec = json::parse(slurp(test::data_path("synthetic/kitchen_activities.json")));
  spec["clips_per_activity"] = 2;
  spit(dir / "spec.json", spec.dump());
  std::ostringstream log;
  cli::make_synthetic({dir / "spec.json", 3, dir / "syn"}, log);
  for (const char* f : {"detections.jsonl", "ground_truth.csv", "sequences.txt", "video_vocab.json", "command.json"}) {
    CHECK(fs::is_regular_file(dir / "syn" / f));
  }

  cli::ExtractPriorsOptions o;
  o.detections = dir / "syn" / "detections.jsonl";
  o.video_vocab = dir / "syn" / "video_vocab.json";
  o.video_embeddings = test::data_path("embeddings/video_vectors.txt");
  o.env_vocab = test::data_path("kitchen_vocab.json");
  o.env_embeddings = test::data_path("embeddings/env_vectors.txt");
  o.out = dir / "pri";
  o.uniform = o.embed = o.cooc = o.intseq = true;
  o.layouts = {test::data_path("layouts")};
  o.cooc_spawns = 2;
  o.sequences = dir / "syn" / "sequences.txt";
  cli::extract_priors(o, log);
  const Vocabulary& env = test::kitchen_catalog()->vocabulary();
  for (const char* f : {"aco.csv", "uniform.csv", "embed.csv", "cooc.csv", "intseq.csv", "video_table.csv"}) {
    INFO(f);
    const CompatibilityTable t = read_table_csv(dir / "pri" / f);
    CHECK(t.check_invariants().empty());
    if (std::string(f) != "video_table.csv") CHECK(t.vocabulary() == env);
  }
  CHECK(read_table_csv(dir / "pri" / "uniform.csv").scores() == uniform_prior(env).scores());
  const json rep = json::parse(slurp(dir / "pri" / "mapping_report.json"));
  CHECK(rep.at("missing_embedding").empty());
  CHECK(rep.at("malformed_lines") == 0);

  SUBCASE("bad inputs fail before any output") {
    cli::ExtractPriorsOptions bad = o;
    bad.out = dir / "bad";
    bad.similarity_threshold = 1.0;
    CHECK_THROWS_AS(cli::extract_priors(bad, log), ValidationError);
    bad = o;
    bad.out = dir / "bad";
    bad.detections = dir / "missing.jsonl";
    CHECK_THROWS_AS(cli::extract_priors(bad, log), ValidationError);
    bad = o;
    bad.out = dir / "bad";
    bad.layouts.clear();
    CHECK_THROWS_AS(cli::extract_priors(bad, log), ValidationError);
    CHECK_FALSE(fs::exists(dir / "bad"));
  }
}

TEST_CASE("manifest validation") {
  const fs::path dir = scratch("manifest");
  json d = manifest_doc(dir / "runs");
  d["runs"] = {{{"name", "a"}, {"mode", "vanilla"}}};
  CHECK_NOTHROW(cli::parse_manifest(d.dump(), dir));
  json bad = d;
  bad["runs"][0]["colour"] = "red";
  CHECK_THROWS_AS(cli::parse_manifest(bad.dump(), dir), ValidationError);
  bad = d;
  bad["runs"][0]["mode"] = "aco";  // no prior
  CHECK_THROWS_AS(cli::parse_manifest(bad.dump(), dir), ValidationError);
  bad = d;
  bad["runs"].push_back(d["runs"][0]);
  CHECK_THROWS_AS(cli::parse_manifest(bad.dump(), dir), ValidationError);
  bad = d;
  bad["runs"][0]["seeds"] = {1, 1};
  CHECK_THROWS_AS(cli::parse_manifest(bad.dump(), dir), ValidationError);
  bad = d;
  bad["runs"][0]["config"] = {{"seed", 4}};
  CHECK_THROWS_AS(cli::parse_manifest(bad.dump(), dir), ValidationError);
  const auto m = cli::parse_manifest(d.dump(), dir);
  CHECK_THROWS_WITH_AS(m.run("b"), doctest::Contains("known: a"), ValidationError);
  CHECK(m.run("a").output == (dir / "runs" / "a").lexically_normal());
}

TEST_CASE("train: sweep output, refusal to overwrite, early input checks") {
  const fs::path dir = scratch("train");
  json d = manifest_doc(dir / "runs");
  d["runs"] = {{{"name", "van"}, {"mode", "vanilla"}, {"seeds", {1, 2, 3}}},
               {{"name", "aco_missing"}, {"mode", "aco"}, {"prior", (dir / "nope.csv").string()}},
               {{"name", "bad_key"}, {"mode", "vanilla"}, {"config", {{"learning_rat", 0.1}}}}};
  const fs::path manifest = write_manifest(dir, d);
  train(manifest, "van");
  for (int s = 1; s <= 3; ++s) {
    const fs::path sd = dir / "runs" / "van" / "trash" / ("seed_" + std::to_string(s));
    INFO(sd);
    const auto curve = body_lines(sd / "curve.csv");
    REQUIRE(curve.size() == 3);  // steps 0, 512, 1024
    CHECK(curve.back().rfind("1024,trash,vanilla," + std::to_string(s) + ",", 0) == 0);
    for (const char* f : {"episodes.json", "config.json", "records.csv", "train_log.csv", "fingerprint.json",
                          "checkpoints/final.json", "checkpoints/step_512.json"}) {
      CHECK(fs::is_regular_file(sd / f));
    }
    const json fp = json::parse(slurp(sd / "fingerprint.json"));
    CHECK(fp.at("seed") == s);
    CHECK(fp.at("build_id") == cli::build_id());
    CHECK(rl::load_checkpoint(sd / "checkpoints" / "final.json").fingerprint == fp.at("fingerprint"));
  }
  const json snap = json::parse(slurp(dir / "runs" / "van" / "run.json"));
  CHECK(snap.at("seeds").size() == 3);

  CHECK_THROWS_WITH_AS(train(manifest, "van"), doctest::Contains("same fingerprint"), ValidationError);
  const std::string before = slurp(dir / "runs" / "van" / "trash" / "seed_1" / "fingerprint.json");
  CHECK_NOTHROW(train(manifest, "van", true));
  // Retraining with the same config reproduces the artifacts bit for bit.
  CHECK(slurp(dir / "runs" / "van" / "trash" / "seed_1" / "fingerprint.json") == before);
  // Resume keeps finished jobs untouched; a changed config is still refused.
  const auto stamp = fs::last_write_time(dir / "runs" / "van" / "trash" / "seed_1" / "records.csv");
  CHECK(train(manifest, "van", false, true).find("already done, skipped") != std::string::npos);
  CHECK(fs::last_write_time(dir / "runs" / "van" / "trash" / "seed_1" / "records.csv") == stamp);
  d["runs"][0]["config"] = {{"num_envs", 2}, {"rollout_length", 64}, {"hidden", 8}, {"learning_rate", 1e-3}};
  const fs::path changed = dir / "changed";
  fs::create_directories(changed);
  CHECK_THROWS_WITH_AS(train(write_manifest(changed, d), "van", false, true), doctest::Contains("different run"),
                       ValidationError);

  CHECK_THROWS_WITH_AS(train(manifest, "aco_missing"), doctest::Contains("nope.csv"), ValidationError);
  CHECK_FALSE(fs::exists(dir / "runs" / "aco_missing"));
  CHECK_THROWS_WITH_AS(train(manifest, "bad_key"), doctest::Contains("learning_rat"), ValidationError);
  CHECK_FALSE(fs::exists(dir / "runs" / "bad_key"));
}

TEST_CASE("eval: scripted checkpoint solves everything, random matches Monte Carlo") {
  const fs::path dir = scratch("eval");
  std::ostringstream log;
  cli::MakeEpisodesOptions me;
  me.catalog = test::data_path("kitchen_vocab.json");
  me.layouts = {layout(3), layout(4)};
  me.tasks = {"trash", "prep"};
  me.per_layout = 10;
  me.horizon = 128;
  me.out = dir / "eps.json";
  cli::make_episodes(me, log);
  const auto episodes = sim::load_episodes(me.out, *test::kitchen_catalog());
  REQUIRE(episodes.size() == 40);

  rl::Policy scripted;
  scripted.kind = rl::PolicyKind::scripted;
  rl::save_checkpoint(dir / "scripted.json", scripted);
  cli::EvalCommandOptions e;
  e.checkpoint = dir / "scripted.json";
  e.episodes = me.out;
  e.catalog = me.catalog;
  e.layouts = {layout(3), layout(4)};
  e.out = dir / "scripted_eval";
  CHECK(cli::eval_checkpoint(e, log).success_rate == 1.0);
  CHECK(body_lines(dir / "scripted_eval" / "summary.csv") ==
        std::vector<std::string>{"prep,20,1", "trash,20,1"});
  CHECK(body_lines(dir / "scripted_eval" / "records.csv").size() == 40);

  // Random policy on a larger set, so the binomial band is informative.
  me.layouts = {layout(1), layout(2), layout(3), layout(4)};
  me.tasks = {"trash"};
  me.per_layout = 40;
  me.horizon = 256;
  me.out = dir / "eps_random.json";
  cli::make_episodes(me, log);
  const auto rand_eps = sim::load_episodes(me.out, *test::kitchen_catalog());
  rl::Policy random;
  random.kind = rl::PolicyKind::random;
  rl::save_checkpoint(dir / "random.json", random);
  e.checkpoint = dir / "random.json";
  e.episodes = me.out;
  e.layouts = me.layouts;
  e.out.clear();
  const double got = cli::eval_checkpoint(e, log).success_rate;
  // Independent estimate: many fresh random controllers per episode.
  const sim::LayoutSet set(test::kitchen_layouts());
  const sim::ActionSpace space(*test::kitchen_catalog());
  int hits = 0, trials = 0;
  for (const auto& ep : rand_eps) {
    const sim::TaskSpec task = sim::make_task(ep.task, *test::kitchen_catalog());
    for (std::uint64_t r = 0; r < 10; ++r) {
      sim::WorldState w = sim::instantiate(ep, set);
      sim::RandomController rc(space, 1000 + r * 7919 + ep.seed);
      ++trials;
      for (int t = 0; t < ep.horizon; ++t) {
        w.apply(space, rc.act());
        if (sim::check_goal(w, task)) {
          ++hits;
          break;
        }
      }
    }
  }
  const double p = static_cast<double>(hits) / trials;
  const double sd = std::sqrt(p * (1 - p) / static_cast<double>(rand_eps.size()));
  MESSAGE("random policy: eval " << got << ", Monte Carlo " << p);
  CHECK(p > 0.02);
  CHECK(std::abs(got - p) <= 3 * sd);

  spit(dir / "empty.json", R"({"schema": "actctx.episodes/1", "episodes": []})");
  e.episodes = dir / "empty.json";
  CHECK_THROWS_AS(cli::eval_checkpoint(e, log), ValidationError);
}

TEST_CASE("report: passthrough, paired columns, difficulty bins, digest mismatch") {
  const fs::path dir = scratch("report");
  json d = manifest_doc(dir / "runs");
  d["runs"] = {{{"name", "van"}, {"mode", "vanilla"}, {"seeds", {1, 2}}, {"eval_interval", 384}},
               {{"name", "uni"}, {"mode", "uniform"}, {"seeds", {1, 2}}},
               {{"name", "other"}, {"mode", "vanilla"}, {"episode_seed", 5}}};
  const fs::path manifest = write_manifest(dir, d);
  for (const char* r : {"van", "uni", "other"}) train(manifest, r);
  std::ostringstream log;

  cli::report({{dir / "runs" / "van"}, dir / "single"}, log);
  std::vector<std::string> curves;
  for (int s : {1, 2}) {
    for (auto& l : body_lines(dir / "runs" / "van" / "trash" / ("seed_" + std::to_string(s)) / "curve.csv")) {
      curves.push_back(l);
    }
  }
  CHECK(body_lines(dir / "single" / "success_vs_step.csv") == curves);

  cli::report({{dir / "runs" / "van", dir / "runs" / "uni"}, dir / "pair"}, log);
  const std::string paired = slurp(dir / "pair" / "success_vs_step_paired.csv");
  CHECK(paired.rfind("task,step,van,uni\n", 0) == 0);
  // van evaluates at 0, 384, 768, 1024 and uni at 0, 512, 1024.
  CHECK(body_lines(dir / "pair" / "success_vs_step_paired.csv").size() == 5);

  std::vector<rl::EpisodeRecord> pooled;
  for (int s : {1, 2}) {
    std::istringstream in(slurp(dir / "runs" / "uni" / "trash" / ("seed_" + std::to_string(s)) / "records.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> c;
      std::stringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) c.push_back(cell);
      rl::EpisodeRecord r;
      r.episode = std::stoi(c.at(0));
      r.scene = c.at(1);
      r.task = c.at(2);
      r.success = c.at(3) == "1";
      r.steps = std::stoi(c.at(4));
      r.difficulty = std::stod(c.at(5));
      pooled.push_back(r);
    }
  }
  const auto profile = rl::difficulty_report(pooled);
  std::vector<std::string> want_bins;
  for (std::size_t b = 0; b < profile.bins.size(); ++b) {
    want_bins.push_back(std::to_string(profile.bins[b].count) + "," + std::to_string(profile.bins[b].successes));
  }
  std::vector<std::string> got_bins;
  for (const auto& l : body_lines(dir / "pair" / "difficulty.csv")) {
    if (l.rfind("uni,", 0) != 0) continue;
    std::vector<std::string> c;
    std::stringstream ls(l);
    for (std::string cell; std::getline(ls, cell, ',');) c.push_back(cell);
    got_bins.push_back(c.at(5) + "," + c.at(6));
  }
  CHECK(got_bins == want_bins);

  const auto cmp = body_lines(dir / "pair" / "comparison.csv");
  REQUIRE(cmp.size() == 2);
  CHECK(cmp[0].rfind("trash,van,vanilla,2,", 0) == 0);
  // The quarter column reads the evaluation nearest step 256, here 384.
  double quarter = 0;
  for (const auto& l : curves) {
    if (l.rfind("384,", 0) == 0) quarter += std::stod(l.substr(l.rfind(',') + 1)) / 2;
  }
  const std::string tail = cmp[0].substr(cmp[0].rfind(',', cmp[0].rfind(',') - 1) + 1);
  CHECK(tail.rfind("256,", 0) == 0);
  CHECK(std::stod(tail.substr(4)) == doctest::Approx(quarter).epsilon(1e-9));

  CHECK_THROWS_WITH_AS(cli::report({{dir / "runs" / "van", dir / "runs" / "other"}, dir / "bad"}, log),
                       doctest::Contains("episode sets differ"), ValidationError);
}
