// actctx command-line front end.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "actctx/cli/commands.hpp"

namespace {

namespace fs = std::filesystem;
using namespace actctx;

#ifndef ACTCTX_DEFAULT_CATALOG
#define ACTCTX_DEFAULT_CATALOG "data/kitchen_vocab.json"
#endif

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Activity-context reward pipeline: priors, training, evaluation, reports."};
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::build_id());

  cli::MakeSyntheticOptions synth;
  auto* c_synth = app.add_subcommand("make-synthetic", "Generate a synthetic detection corpus and its ground truth");
  c_synth->add_option("--spec", synth.spec, "Synthetic corpus spec (JSON)")->required();
  c_synth->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  c_synth->add_option("--out", synth.out, "Output directory")->required();

  cli::ExtractPriorsOptions ex;
  auto* c_ex = app.add_subcommand("extract-priors", "Build compatibility tables from detections");
  c_ex->add_option("--detections", ex.detections, "Detection corpus (JSON lines)")->required();
  c_ex->add_option("--video-vocab", ex.video_vocab, "Video vocabulary (JSON)")->required();
  c_ex->add_option("--video-embeddings", ex.video_embeddings, "Word vectors for video classes")->required();
  c_ex->add_option("--env-vocab", ex.env_vocab, "Environment catalog or vocabulary (JSON)")
      ->default_val(std::string(ACTCTX_DEFAULT_CATALOG));
  c_ex->add_option("--env-embeddings", ex.env_embeddings, "Word vectors for environment classes")->required();
  c_ex->add_option("--out", ex.out, "Output directory")->required();
  c_ex->add_option("--threshold", ex.similarity_threshold, "Cosine threshold for embedding neighbours")
      ->capture_default_str();
  c_ex->add_option("--iou", ex.extraction.iou_threshold, "IoU threshold for label transfer")->capture_default_str();
  c_ex->add_option("--confidence", ex.extraction.confidence_threshold, "Minimum detection confidence")
      ->capture_default_str();
  c_ex->add_flag("--strict-movable", ex.extraction.context.strict_movable, "Require both pair elements to be movable");
  c_ex->add_flag("--uniform", ex.uniform, "Also write the uniform ablation table");
  c_ex->add_flag("--embed", ex.embed, "Also write the embedding-similarity ablation table");
  c_ex->add_flag("--cooc", ex.cooc, "Also write the static co-location ablation table (needs --layouts)");
  c_ex->add_option("--layouts", ex.layouts, "Layout files or directories for --cooc");
  c_ex->add_option("--cooc-spawns", ex.cooc_spawns, "Spawns sampled per layout for --cooc")->capture_default_str();
  c_ex->add_flag("--intseq", ex.intseq, "Also write the interaction-sequence ablation table (needs --sequences)");
  c_ex->add_option("--sequences", ex.sequences, "Interaction sequences for --intseq");

  cli::MakeEpisodesOptions me;
  me.catalog = ACTCTX_DEFAULT_CATALOG;
  auto* c_me = app.add_subcommand("make-episodes", "Generate a solvable evaluation episode set");
  c_me->add_option("--catalog", me.catalog, "Environment catalog")->capture_default_str();
  c_me->add_option("--layouts", me.layouts, "Layout files or directories")->required();
  c_me->add_option("--task", me.tasks, "Task name (repeatable)")->required();
  c_me->add_option("--per-layout", me.per_layout, "Episodes per layout")->capture_default_str();
  c_me->add_option("--seed", me.seed, "Generation seed")->capture_default_str();
  c_me->add_option("--horizon", me.horizon, "Step limit per episode")->capture_default_str();
  c_me->add_option("--out", me.out, "Output episode file")->required();

  cli::TrainCommandOptions tr;
  int threads = 0;
  auto* c_tr = app.add_subcommand("train", "Run one manifest entry (every task and seed)");
  c_tr->add_option("--manifest", tr.manifest, "Experiment manifest")->required();
  c_tr->add_option("--run", tr.run, "Run name inside the manifest")->required();
  auto* force = c_tr->add_flag("--force", tr.force, "Overwrite existing results");
  c_tr->add_flag("--resume", tr.resume, "Skip jobs already finished with the same fingerprint")->excludes(force);
  c_tr->add_option("--threads", threads, "Environment worker threads (default: ACTCTX_THREADS or 1)");

  cli::EvalCommandOptions ev;
  ev.catalog = ACTCTX_DEFAULT_CATALOG;
  std::string selection = "sampled";
  auto* c_ev = app.add_subcommand("eval", "Evaluate a checkpoint on an episode set");
  c_ev->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  c_ev->add_option("--episodes", ev.episodes, "Episode set file")->required();
  c_ev->add_option("--layouts", ev.layouts, "Layout files or directories")->required();
  c_ev->add_option("--catalog", ev.catalog, "Environment catalog")->capture_default_str();
  c_ev->add_option("--selection", selection, "greedy or sampled")
      ->check(CLI::IsMember({"greedy", "sampled"}))
      ->capture_default_str();
  c_ev->add_option("--out", ev.out, "Directory for records.csv and summary.csv");

  cli::ReportOptions rp;
  auto* c_rp = app.add_subcommand("report", "Merge run directories into comparison tables");
  c_rp->add_option("runs", rp.runs, "Run output directories")->required();
  c_rp->add_option("--out", rp.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitParse;
  }

  std::ostream& log = std::cout;
  std::ostream& err = std::cerr;
  if (c_synth->parsed()) return cli::run_guarded([&] { cli::make_synthetic(synth, log); }, err);
  if (c_ex->parsed()) return cli::run_guarded([&] { cli::extract_priors(ex, log); }, err);
  if (c_me->parsed()) return cli::run_guarded([&] { cli::make_episodes(me, log); }, err);
  if (c_tr->parsed()) {
    if (threads > 0) tr.threads = threads;
    tr.argv.assign(argv, argv + argc);
    return cli::run_guarded([&] { cli::train_run(tr, log); }, err);
  }
  if (c_ev->parsed()) {
    return cli::run_guarded(
        [&] {
          ev.selection = rl::selection_from_name(selection);
          cli::eval_checkpoint(ev, log);
        },
        err);
  }
  if (c_rp->parsed()) return cli::run_guarded([&] { cli::report(rp, log); }, err);
  return cli::kExitParse;
}
