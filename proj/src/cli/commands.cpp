#include "actctx/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actctx/cli/manifest.hpp"
#include "actctx/core.hpp"
#include "actctx/prior/baseline_priors.hpp"
#include "actctx/prior/detection.hpp"
#include "actctx/prior/embedding.hpp"
#include "actctx/rl/trainer.hpp"
#include "actctx/sim/episode.hpp"
#include "actctx/synth/synthetic.hpp"

#ifndef ACTCTX_BUILD_ID
#define ACTCTX_BUILD_ID "unknown"
#endif

namespace actctx::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string file_digest(const fs::path& path) { return fnv1a_hex(read_file(path)); }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void require_input(const fs::path& path, const std::string& flag) {
  if (path.empty()) throw ValidationError(flag + " is required");
  if (!fs::is_regular_file(path)) throw ValidationError(flag + ": no such file " + path.string());
}

fs::path make_output_dir(const fs::path& dir) {
  if (dir.empty()) throw ValidationError("--out is required");
  fs::create_directories(dir);
  return dir;
}

/// Snapshot of how an output directory was produced.
void write_command_snapshot(const fs::path& dir, const std::string& verb, ordered_json args) {
  ordered_json j;
  j["verb"] = verb;
  j["build_id"] = build_id();
  j["args"] = std::move(args);
  write_file(dir / "command.json", j.dump(1) + "\n");
}

ordered_json paths_json(const std::vector<fs::path>& paths) {
  ordered_json a = ordered_json::array();
  for (const auto& p : paths) a.push_back(fs::absolute(p).string());
  return a;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

/// Rows of a CSV file as header-keyed maps.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty csv");
  const auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw ParseError(path.string() + ": ragged row '" + line + "'");
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string write_records_csv(const std::vector<rl::EpisodeRecord>& records) {
  std::ostringstream os;
  os << "episode,scene,task,success,steps,difficulty\n";
  for (const auto& r : records) {
    os << r.episode << ',' << r.scene << ',' << r.task << ',' << (r.success ? 1 : 0) << ',' << r.steps
       << ',' << fmt(r.difficulty) << '\n';
  }
  return os.str();
}

std::vector<rl::EpisodeRecord> read_records_csv(const fs::path& path) {
  std::vector<rl::EpisodeRecord> out;
  try {
    for (const auto& row : read_csv(path)) {
      rl::EpisodeRecord r;
      r.episode = std::stoi(row.at("episode"));
      r.scene = row.at("scene");
      r.task = row.at("task");
      r.success = row.at("success") == "1";
      r.steps = std::stoi(row.at("steps"));
      r.difficulty = std::stod(row.at("difficulty"));
      out.push_back(std::move(r));
    }
  } catch (const std::logic_error& e) {
    throw ParseError(path.string() + ": bad records file (" + e.what() + ")");
  }
  return out;
}

void write_vocab_json(const fs::path& path, const Vocabulary& vocab) {
  ordered_json classes = ordered_json::array();
  for (ClassId c = 0; c < vocab.size(); ++c) {
    classes.push_back(ordered_json{{"name", vocab.name(c)}, {"movable", vocab.movable(c)}});
  }
  write_file(path, ordered_json{{"classes", classes}}.dump(1) + "\n");
}

int env_threads(const std::optional<int>& explicit_threads) {
  if (explicit_threads) return *explicit_threads;
  if (const char* env = std::getenv("ACTCTX_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0) throw ValidationError(std::string("ACTCTX_THREADS: bad value '") + env + "'");
    return static_cast<int>(v);
  }
  return 1;
}

std::vector<sim::Layout> load_layout_files(const std::vector<fs::path>& paths, const sim::CatalogPtr& catalog) {
  std::vector<sim::Layout> out;
  std::set<std::string> names;
  for (const auto& p : paths) {
    out.push_back(sim::load_layout(p, catalog));
    if (!names.insert(out.back().name).second) {
      throw ValidationError("duplicate layout name " + out.back().name);
    }
  }
  return out;
}

}  // namespace

std::string build_id() { return ACTCTX_BUILD_ID; }

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return kExitOk;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::vector<fs::path> expand_layout_paths(const std::vector<fs::path>& paths) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      out.push_back(p);
    } else {
      throw ValidationError("no such layout file or directory: " + p.string());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void make_synthetic(const MakeSyntheticOptions& o, std::ostream& log) {
  require_input(o.spec, "--spec");
  const auto spec = synth::load_synthetic_spec(o.spec);
  const fs::path dir = make_output_dir(o.out);
  const auto corpus = synth::generate_corpus(spec, o.seed);
  synth::write_corpus(dir / "detections.jsonl", corpus);
  write_table_csv(corpus.ground_truth, dir / "ground_truth.csv");
  synth::write_sequences(dir / "sequences.txt", corpus, spec.vocabulary);
  write_vocab_json(dir / "video_vocab.json", spec.vocabulary);
  std::size_t frames = 0;
  for (const auto& c : corpus.clips) frames += c.frames.size();
  write_command_snapshot(dir, "make-synthetic",
                         {{"spec", fs::absolute(o.spec).string()},
                          {"spec_digest", file_digest(o.spec)},
                          {"seed", o.seed}});
  log << "wrote " << corpus.clips.size() << " clips (" << frames << " frames) to " << dir.string() << '\n';
}

// ---------------------------------------------------------------------------

void extract_priors(const ExtractPriorsOptions& o, std::ostream& log) {
  require_input(o.detections, "--detections");
  require_input(o.video_vocab, "--video-vocab");
  require_input(o.video_embeddings, "--video-embeddings");
  require_input(o.env_vocab, "--env-vocab");
  require_input(o.env_embeddings, "--env-embeddings");
  if (o.cooc && o.layouts.empty()) throw ValidationError("--cooc needs --layouts");
  if (o.intseq) require_input(o.sequences, "--sequences");
  if (!(o.similarity_threshold > 0 && o.similarity_threshold < 1)) {
    throw ValidationError("--threshold must lie in (0, 1)");
  }

  const Vocabulary video_vocab = load_vocabulary(o.video_vocab);
  const Vocabulary env_vocab = load_vocabulary(o.env_vocab);
  env_vocab.require_environment_shape();
  const EmbeddingTable video_emb = read_embeddings(o.video_embeddings);
  const EmbeddingTable env_emb = read_embeddings(o.env_embeddings);
  if (video_emb.size() && env_emb.size() && video_emb.dim() != env_emb.dim()) {
    throw ValidationError("embedding dimensions differ: video " + std::to_string(video_emb.dim()) + ", env " +
                          std::to_string(env_emb.dim()));
  }
  const DetectionCorpus corpus = parse_detection_corpus(o.detections);
  if (corpus.malformed_lines) log << "skipped " << corpus.malformed_lines << " malformed detection lines\n";
  for (const auto& w : corpus.warnings) log << "warning: " << w << '\n';

  const fs::path dir = make_output_dir(o.out);
  const CompatibilityTable video_table = extract_compatibility(corpus.clips, video_vocab, o.extraction);
  write_table_csv(video_table, dir / "video_table.csv");

  MappingReport report;
  const CompatibilityTable aco =
      map_vocabulary(video_table, video_emb, env_vocab, env_emb, o.similarity_threshold, &report);
  write_table_csv(aco, dir / "aco.csv");

  ordered_json rep;
  rep["missing_embedding"] = report.missing_embedding;
  rep["no_neighbors"] = report.no_neighbors;
  ordered_json neighbors = ordered_json::object();
  for (ClassId m = 0; m < env_vocab.size(); ++m) {
    const std::string& name = env_vocab.name(m);
    if (!env_emb.contains(name)) continue;
    const Eigen::VectorXd v = env_emb.vector(name);
    std::vector<std::pair<double, std::string>> hits;
    for (ClassId i = 0; i < video_vocab.size(); ++i) {
      const std::string& vn = video_vocab.name(i);
      if (!video_emb.contains(vn)) continue;
      const double s = v.dot(video_emb.vector(vn));
      if (s >= o.similarity_threshold) hits.emplace_back(s, vn);
    }
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    ordered_json list = ordered_json::array();
    for (const auto& [s, vn] : hits) list.push_back(ordered_json{{"class", vn}, {"similarity", s}});
    neighbors[name] = list;
  }
  rep["neighbors"] = neighbors;
  rep["clips"] = corpus.clips.size();
  rep["malformed_lines"] = corpus.malformed_lines;
  write_file(dir / "mapping_report.json", rep.dump(1) + "\n");
  for (const auto& m : report.missing_embedding) log << "missing embedding: " << m << " (zero row)\n";
  for (const auto& m : report.no_neighbors) log << "no neighbours above threshold: " << m << '\n';

  if (o.uniform) write_table_csv(uniform_prior(env_vocab), dir / "uniform.csv");
  if (o.embed) write_table_csv(embed_prior(env_vocab, env_emb), dir / "embed.csv");
  if (o.cooc) {
    const sim::CatalogPtr catalog = sim::load_catalog(o.env_vocab);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(0, o.cooc_spawns)));
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
    std::vector<std::set<ClassId>> records;
    for (const auto& layout : load_layout_files(expand_layout_paths(o.layouts), catalog)) {
      auto r = sim::colocation_records(layout, seeds);
      records.insert(records.end(), r.begin(), r.end());
    }
    write_table_csv(cooc_prior(records, catalog->vocabulary()), dir / "cooc.csv");
  }
  if (o.intseq) {
    const auto sequences = synth::read_sequences(o.sequences, video_vocab);
    const CompatibilityTable video_seq = intseq_prior(sequences, video_vocab);
    write_table_csv(map_vocabulary(video_seq, video_emb, env_vocab, env_emb, o.similarity_threshold),
                    dir / "intseq.csv");
  }

  ordered_json args;
  args["detections"] = fs::absolute(o.detections).string();
  args["detections_digest"] = file_digest(o.detections);
  args["video_vocab"] = fs::absolute(o.video_vocab).string();
  args["video_embeddings"] = fs::absolute(o.video_embeddings).string();
  args["env_vocab"] = fs::absolute(o.env_vocab).string();
  args["env_embeddings"] = fs::absolute(o.env_embeddings).string();
  args["threshold"] = o.similarity_threshold;
  args["iou"] = o.extraction.iou_threshold;
  args["confidence"] = o.extraction.confidence_threshold;
  args["strict_movable"] = o.extraction.context.strict_movable;
  args["uniform"] = o.uniform;
  args["embed"] = o.embed;
  args["cooc"] = o.cooc;
  args["layouts"] = paths_json(o.layouts);
  args["cooc_spawns"] = o.cooc_spawns;
  args["intseq"] = o.intseq;
  args["sequences"] = o.sequences.empty() ? "" : fs::absolute(o.sequences).string();
  write_command_snapshot(dir, "extract-priors", args);
  log << "wrote priors to " << dir.string() << '\n';
}

// ---------------------------------------------------------------------------

void make_episodes(const MakeEpisodesOptions& o, std::ostream& log) {
  require_input(o.catalog, "--catalog");
  if (o.tasks.empty()) throw ValidationError("--task is required");
  if (o.out.empty()) throw ValidationError("--out is required");
  if (o.per_layout <= 0 || o.horizon <= 0) throw ValidationError("--per-layout and --horizon must be positive");
  const sim::CatalogPtr catalog = sim::load_catalog(o.catalog);
  const auto layouts = load_layout_files(expand_layout_paths(o.layouts), catalog);
  if (layouts.empty()) throw ValidationError("--layouts names no layout files");
  std::vector<sim::EpisodeConfig> all;
  for (const auto& t : o.tasks) {
    sim::GenerationReport rep;
    auto eps = sim::generate_episodes(layouts, sim::task_from_name(t), o.per_layout, o.seed, &rep, o.horizon);
    for (const auto& s : rep.skipped) log << "skipped " << s << '\n';
    all.insert(all.end(), eps.begin(), eps.end());
  }
  if (all.empty()) throw ValidationError("no solvable episodes could be generated");
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  sim::save_episodes(o.out, all, *catalog);
  log << "wrote " << all.size() << " episodes (digest " << sim::episode_set_digest(all, *catalog) << ") to "
      << o.out.string() << '\n';
}

// ---------------------------------------------------------------------------

namespace {

std::string curve_csv(const std::vector<rl::CurvePoint>& curve, const std::string& task, const std::string& method,
                      std::uint64_t seed) {
  std::ostringstream os;
  os << "step,task,method,seed,success_rate\n";
  for (const auto& p : curve) os << p.step << ',' << task << ',' << method << ',' << seed << ',' << fmt(p.success_rate) << '\n';
  return os.str();
}

rl::TrainConfig run_config(const RunSpec& run, sim::TaskId task, std::uint64_t seed, int threads) {
  json base = json::parse(rl::TrainConfig().to_json());
  const json extra = json::parse(run.config);
  for (const auto& [key, _] : extra.items()) {
    if (!base.contains(key)) throw ValidationError("run '" + run.name + "': unknown config key '" + key + "'");
  }
  base.update(extra);
  base["task"] = sim::task_name(task);
  base["mode"] = rl::reward_mode_name(run.mode);
  base["seed"] = seed;
  base["total_steps"] = run.total_steps;
  base["eval_interval"] = run.eval_interval;
  rl::TrainConfig cfg = rl::TrainConfig::from_json(base.dump());
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

struct PreparedJob {
  sim::TaskId task;
  std::uint64_t seed;
  rl::TrainConfig config;
  fs::path dir;
};

}  // namespace

void train_run(const TrainCommandOptions& o, std::ostream& log) {
  require_input(o.manifest, "--manifest");
  const ExperimentManifest manifest = load_manifest(o.manifest);
  const RunSpec& run = manifest.run(o.run);
  const int threads = env_threads(o.threads);
  if (threads <= 0) throw ValidationError("--threads must be positive");

  // Everything that can fail cheaply is checked before the first update.
  require_artifacts(manifest, run);
  const sim::CatalogPtr catalog = sim::load_catalog(manifest.catalog);
  const auto train_layouts = load_layout_files(run.train_layouts, catalog);
  const auto eval_layout_list = load_layout_files(run.eval_layouts, catalog);
  CompatibilityTable table;
  const bool needs_prior = rl::uses_table(run.mode) && run.mode != rl::RewardMode::uniform;
  std::string prior_digest;
  if (needs_prior) {
    table = read_table_csv(run.prior);
    if (!(table.vocabulary() == catalog->vocabulary())) {
      throw ValidationError("prior " + run.prior.string() + " is not over the environment vocabulary");
    }
    if (auto bad = table.check_invariants(); !bad.empty()) throw ValidationError("prior: " + bad);
    prior_digest = file_digest(run.prior);
  }
  std::string layouts_digest;
  for (const auto& p : run.train_layouts) layouts_digest += file_digest(p);
  for (const auto& p : run.eval_layouts) layouts_digest += file_digest(p);
  layouts_digest = fnv1a_hex(layouts_digest);

  std::vector<PreparedJob> jobs;
  for (sim::TaskId task : run.tasks) {
    for (std::uint64_t seed : run.seeds) {
      PreparedJob job{task, seed, run_config(run, task, seed, threads),
                      run.output / sim::task_name(task) / ("seed_" + std::to_string(seed))};
      if (fs::exists(job.dir / "fingerprint.json") && !o.force) {
        const json old = json::parse(read_file(job.dir / "fingerprint.json"));
        const bool same = old.value("config_hash", "") == job.config.fingerprint() &&
                          old.value("build_id", "") == build_id();
        if (o.resume && same && old.value("prior_digest", "") == prior_digest &&
            old.value("layouts_digest", "") == layouts_digest) {
          log << run.name << ' ' << sim::task_name(task) << " seed " << seed << " already done, skipped\n";
          continue;
        }
        throw ValidationError(job.dir.string() + " already holds a " + (same ? "run with the same fingerprint" : "different run") +
                              "; pass --force to overwrite");
      }
      jobs.push_back(std::move(job));
    }
  }

  fs::create_directories(run.output);
  {
    ordered_json snap;
    snap["run"] = run.name;
    snap["manifest"] = manifest.source.string();
    snap["resolved_manifest"] = ordered_json::parse(manifest.resolved);
    snap["mode"] = rl::reward_mode_name(run.mode);
    ordered_json tasks = ordered_json::array();
    for (auto t : run.tasks) tasks.push_back(sim::task_name(t));
    snap["tasks"] = tasks;
    snap["seeds"] = run.seeds;
    snap["total_steps"] = run.total_steps;
    snap["argv"] = o.argv;
    snap["build_id"] = build_id();
    write_file(run.output / "run.json", snap.dump(1) + "\n");
  }

  const sim::LayoutSet eval_layouts(eval_layout_list);
  for (auto& job : jobs) {
    const std::string task_name = sim::task_name(job.task);
    sim::GenerationReport gen;
    const auto episodes = sim::generate_episodes(eval_layout_list, job.task, run.eval_episodes_per_layout,
                                                 run.episode_seed, &gen, job.config.horizon);
    if (episodes.empty()) throw ValidationError("task " + task_name + " cannot be posed in any eval layout");
    const std::string episodes_digest = sim::episode_set_digest(episodes, *catalog);

    if (fs::exists(job.dir)) fs::remove_all(job.dir);
    fs::create_directories(job.dir / "checkpoints");
    sim::save_episodes(job.dir / "episodes.json", episodes, *catalog);
    write_file(job.dir / "config.json", json::parse(job.config.to_json()).dump(1) + "\n");

    ordered_json fp;
    fp["config_hash"] = job.config.fingerprint();
    fp["seed"] = job.seed;
    fp["build_id"] = build_id();
    fp["run"] = run.name;
    fp["task"] = task_name;
    fp["method"] = rl::reward_mode_name(run.mode);
    fp["prior"] = needs_prior ? run.prior.string() : "";
    fp["prior_digest"] = prior_digest;
    fp["layouts_digest"] = layouts_digest;
    fp["episodes_digest"] = episodes_digest;
    fp["eval_episodes"] = episodes.size();
    const std::string fingerprint = fnv1a_hex(fp.dump());

    rl::TrainInputs in;
    in.catalog = catalog;
    in.train_layouts = train_layouts;
    in.eval_episodes = episodes;
    in.eval_layouts = eval_layouts;
    in.table = needs_prior ? &table : nullptr;
    in.on_eval = [&](long step, const rl::Policy& policy, const rl::EvalResult& r) {
      rl::Policy p = policy;
      p.fingerprint = fingerprint;
      save_checkpoint(job.dir / "checkpoints" / ("step_" + std::to_string(step) + ".json"), p);
      log << run.name << ' ' << task_name << " seed " << job.seed << " step " << step << " success "
          << std::fixed << std::setprecision(3) << r.success_rate << std::defaultfloat << std::endl;
    };
    std::ostringstream train_log;
    train_log << "step,loss,policy_loss,value_loss,entropy,clip_fraction,approx_kl,grad_norm,"
                 "mean_task_reward,mean_aux_reward,episodes_finished,goals\n";
    in.on_update = [&](const rl::UpdateDiagnostics& d) {
      train_log << d.step << ',' << fmt(d.stats.loss) << ',' << fmt(d.stats.policy_loss) << ','
                << fmt(d.stats.value_loss) << ',' << fmt(d.stats.entropy) << ',' << fmt(d.stats.clip_fraction)
                << ',' << fmt(d.stats.approx_kl) << ',' << fmt(d.grad_norm) << ',' << fmt(d.mean_task_reward)
                << ',' << fmt(d.mean_aux_reward) << ',' << d.episodes_finished << ',' << d.goals << '\n';
    };

    rl::TrainResult result = rl::train(job.config, in);
    result.policy.fingerprint = fingerprint;
    save_checkpoint(job.dir / "checkpoints" / "final.json", result.policy);

    const sim::ActionSpace space(*catalog);
    rl::EvalOptions eo;
    eo.selection = job.config.eval_selection;
    const rl::EvalResult final_eval = rl::evaluate(result.policy, episodes, eval_layouts, space, eo);

    write_file(job.dir / "curve.csv", curve_csv(result.curve, task_name, rl::reward_mode_name(run.mode), job.seed));
    write_file(job.dir / "records.csv", write_records_csv(final_eval.records));
    write_file(job.dir / "train_log.csv", train_log.str());
    fp["fingerprint"] = fingerprint;
    fp["final_checkpoint_digest"] = file_digest(job.dir / "checkpoints" / "final.json");
    fp["final_success_rate"] = final_eval.success_rate;
    write_file(job.dir / "fingerprint.json", fp.dump(1) + "\n");
  }
}

// ---------------------------------------------------------------------------

rl::EvalResult eval_checkpoint(const EvalCommandOptions& o, std::ostream& log) {
  require_input(o.checkpoint, "--checkpoint");
  require_input(o.episodes, "--episodes");
  require_input(o.catalog, "--catalog");
  const sim::CatalogPtr catalog = sim::load_catalog(o.catalog);
  const rl::Policy policy = rl::load_checkpoint(o.checkpoint);
  const sim::ActionSpace space(*catalog);
  rl::require_compatible(policy, *catalog, space.size());
  const auto episodes = sim::load_episodes(o.episodes, *catalog);
  if (episodes.empty()) throw ValidationError("episode set " + o.episodes.string() + " is empty");
  const sim::LayoutSet layouts(load_layout_files(expand_layout_paths(o.layouts), catalog));
  rl::EvalOptions eo;
  eo.selection = o.selection;
  const rl::EvalResult result = rl::evaluate(policy, episodes, layouts, space, eo);

  std::ostringstream summary;
  summary << "task,episodes,success_rate\n";
  std::map<std::string, int> counts;
  for (const auto& r : result.records) ++counts[r.task];
  for (const auto& [task, rate] : rl::success_by_task(result)) {
    summary << task << ',' << counts[task] << ',' << fmt(rate) << '\n';
  }
  log << "task        episodes  success\n";
  for (const auto& [task, rate] : rl::success_by_task(result)) {
    log << std::left << std::setw(12) << task << std::setw(10) << counts[task] << std::fixed << std::setprecision(1)
        << 100.0 * rate << "%\n"
        << std::defaultfloat;
  }
  for (const auto& e : result.excluded) log << "excluded " << e << '\n';
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(o.out / "records.csv", write_records_csv(result.records));
    write_file(o.out / "summary.csv", summary.str());
    write_command_snapshot(o.out, "eval",
                           {{"checkpoint", fs::absolute(o.checkpoint).string()},
                            {"checkpoint_digest", file_digest(o.checkpoint)},
                            {"episodes", fs::absolute(o.episodes).string()},
                            {"episodes_digest", file_digest(o.episodes)},
                            {"catalog", fs::absolute(o.catalog).string()},
                            {"layouts", paths_json(o.layouts)},
                            {"selection", rl::selection_name(o.selection)}});
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<rl::CurvePoint> curve;
  std::vector<rl::EpisodeRecord> records;
  std::string episodes_digest;
  long total_steps = 0;
};

struct RunResult {
  std::string name;
  std::string method;
  fs::path dir;
  std::vector<std::string> curve_lines;  // curve.csv bodies in seed order
  std::map<std::string, std::vector<SeedResult>> by_task;
};

RunResult load_run(const fs::path& dir) {
  if (!fs::is_regular_file(dir / "run.json")) throw ValidationError(dir.string() + " is not a run directory (no run.json)");
  const json snap = json::parse(read_file(dir / "run.json"));
  RunResult r;
  r.dir = dir;
  r.name = snap.at("run").get<std::string>();
  r.method = snap.at("mode").get<std::string>();
  for (const auto& t : snap.at("tasks")) {
    const std::string task = t.get<std::string>();
    for (const auto& s : snap.at("seeds")) {
      const std::uint64_t seed = s.get<std::uint64_t>();
      const fs::path sd = dir / task / ("seed_" + std::to_string(seed));
      if (!fs::is_regular_file(sd / "fingerprint.json")) {
        throw ValidationError("run " + r.name + " is incomplete: " + sd.string());
      }
      const json fp = json::parse(read_file(sd / "fingerprint.json"));
      SeedResult res;
      res.seed = seed;
      res.episodes_digest = fp.at("episodes_digest").get<std::string>();
      res.records = read_records_csv(sd / "records.csv");
      res.total_steps = json::parse(read_file(sd / "config.json")).at("total_steps").get<long>();
      std::istringstream in(read_file(sd / "curve.csv"));
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        r.curve_lines.push_back(line);
        const auto cells = split(line);
        res.curve.push_back({std::stol(cells.at(0)), std::stod(cells.at(4))});
      }
      r.by_task[task].push_back(std::move(res));
    }
  }
  return r;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Success at the evaluation closest to `step`, the earlier one on ties.
/// Evaluations land on update boundaries, so rarely exactly on `step`.
double success_at(const std::vector<rl::CurvePoint>& curve, long step) {
  double out = 0;
  long best = -1;
  for (const auto& p : curve) {
    const long gap = std::labs(p.step - step);
    if (best < 0 || gap < best) {
      best = gap;
      out = p.success_rate;
    }
  }
  return out;
}

}  // namespace

void report(const ReportOptions& o, std::ostream& log) {
  if (o.runs.empty()) throw ValidationError("report needs at least one run directory");
  std::vector<RunResult> runs;
  std::set<std::string> names;
  for (const auto& d : o.runs) {
    runs.push_back(load_run(d));
    if (!names.insert(runs.back().name).second) throw ValidationError("run " + runs.back().name + " given twice");
  }

  // Every seed of every run must have seen the same episodes per task.
  std::map<std::string, std::pair<std::string, std::string>> digest;  // task -> (digest, where)
  for (const auto& r : runs) {
    for (const auto& [task, seeds] : r.by_task) {
      for (const auto& s : seeds) {
        const std::string where = r.name + "/" + task + "/seed_" + std::to_string(s.seed);
        auto [it, fresh] = digest.emplace(task, std::make_pair(s.episodes_digest, where));
        if (!fresh && it->second.first != s.episodes_digest) {
          throw ValidationError("episode sets differ for task " + task + ": " + it->second.second + " vs " + where);
        }
      }
    }
  }

  const fs::path dir = make_output_dir(o.out);

  std::ostringstream curves;
  curves << "step,task,method,seed,success_rate\n";
  for (const auto& r : runs) {
    for (const auto& line : r.curve_lines) curves << line << '\n';
  }
  write_file(dir / "success_vs_step.csv", curves.str());

  // Seed-averaged curves side by side, one column per run.
  std::ostringstream paired;
  paired << "task,step";
  for (const auto& r : runs) paired << ',' << r.name;
  paired << '\n';
  std::set<std::string> tasks;
  for (const auto& r : runs) {
    for (const auto& [t, _] : r.by_task) tasks.insert(t);
  }
  for (const auto& task : tasks) {
    std::set<long> steps;
    for (const auto& r : runs) {
      if (auto it = r.by_task.find(task); it != r.by_task.end()) {
        for (const auto& s : it->second) {
          for (const auto& p : s.curve) steps.insert(p.step);
        }
      }
    }
    for (long step : steps) {
      paired << task << ',' << step;
      for (const auto& r : runs) {
        paired << ',';
        auto it = r.by_task.find(task);
        if (it == r.by_task.end()) continue;
        std::vector<double> vals;
        for (const auto& s : it->second) {
          for (const auto& p : s.curve) {
            if (p.step == step) vals.push_back(p.success_rate);
          }
        }
        if (!vals.empty()) paired << fmt(mean(vals));
      }
      paired << '\n';
    }
  }
  write_file(dir / "success_vs_step_paired.csv", paired.str());

  // Difficulty profile over all final records of a run, tasks in name order.
  std::ostringstream diff;
  diff << "run,method,bin,lo,hi,count,successes,success_rate,flagged\n";
  for (const auto& r : runs) {
    std::vector<rl::EpisodeRecord> pooled;
    for (const auto& [task, seeds] : r.by_task) {
      for (const auto& s : seeds) pooled.insert(pooled.end(), s.records.begin(), s.records.end());
    }
    const auto profile = rl::difficulty_report(pooled);
    for (std::size_t b = 0; b < profile.bins.size(); ++b) {
      const auto& bin = profile.bins[b];
      diff << r.name << ',' << r.method << ',' << b << ',' << fmt(bin.lo) << ',' << fmt(bin.hi) << ','
           << bin.count << ',' << bin.successes << ',' << fmt(bin.success_rate()) << ','
           << (profile.flagged ? 1 : 0) << '\n';
    }
  }
  write_file(dir / "difficulty.csv", diff.str());

  std::ostringstream cmp;
  cmp << "task,run,method,seeds,final_mean,final_std,quarter_step,quarter_mean\n";
  for (const auto& task : tasks) {
    for (const auto& r : runs) {
      auto it = r.by_task.find(task);
      if (it == r.by_task.end()) continue;
      std::vector<double> finals, quarters;
      long quarter_step = 0;
      for (const auto& s : it->second) {
        int ok = 0;
        for (const auto& rec : s.records) ok += rec.success;
        finals.push_back(s.records.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(s.records.size()));
        quarter_step = s.total_steps / 4;
        quarters.push_back(success_at(s.curve, quarter_step));
      }
      cmp << task << ',' << r.name << ',' << r.method << ',' << it->second.size() << ',' << fmt(mean(finals)) << ','
          << fmt(stddev(finals)) << ',' << quarter_step << ',' << fmt(mean(quarters)) << '\n';
    }
  }
  write_file(dir / "comparison.csv", cmp.str());

  ordered_json args;
  args["runs"] = paths_json(o.runs);
  write_command_snapshot(dir, "report", args);
  log << "report for " << runs.size() << " runs written to " << dir.string() << '\n';
}

}  // namespace actctx::cli
