#include "actctx/cli/manifest.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actctx/core.hpp"

namespace actctx::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSchema = "actctx.manifest/1";

const std::set<std::string> kRunKeys = {
    "name",          "mode",          "prior",         "tasks",
    "train_layouts", "eval_layouts",  "seeds",         "total_steps",
    "eval_interval", "eval_episodes_per_layout",     "episode_seed",
    "output",        "config"};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

std::vector<fs::path> path_list(const json& j, const fs::path& base, const std::string& what) {
  std::vector<fs::path> out;
  if (!j.is_array()) throw ValidationError("manifest: " + what + " must be a list of paths");
  for (const auto& p : j) out.push_back(resolve(base, p.get<std::string>()));
  return out;
}

RunSpec parse_run(const json& j, const fs::path& base, const fs::path& output_root) {
  for (const auto& [key, _] : j.items()) {
    if (!kRunKeys.contains(key)) throw ValidationError("manifest: unknown run key '" + key + "'");
  }
  RunSpec r;
  if (!j.contains("name")) throw ValidationError("manifest: run without a name");
  r.name = j.at("name").get<std::string>();
  if (r.name.empty()) throw ValidationError("manifest: empty run name");
  const std::string where = "manifest run '" + r.name + "': ";
  if (!j.contains("mode")) throw ValidationError(where + "missing mode");
  r.mode = rl::reward_mode_from_name(j.at("mode").get<std::string>());
  if (j.contains("prior") && !j.at("prior").is_null()) r.prior = resolve(base, j.at("prior").get<std::string>());
  if (rl::uses_table(r.mode) && r.mode != rl::RewardMode::uniform && r.prior.empty()) {
    throw ValidationError(where + "mode " + rl::reward_mode_name(r.mode) + " needs a prior file");
  }
  for (const auto& t : j.value("tasks", json::array())) r.tasks.push_back(sim::task_from_name(t.get<std::string>()));
  if (r.tasks.empty()) throw ValidationError(where + "no tasks");
  r.train_layouts = path_list(j.value("train_layouts", json::array()), base, "train_layouts");
  r.eval_layouts = path_list(j.value("eval_layouts", json::array()), base, "eval_layouts");
  if (r.train_layouts.empty() || r.eval_layouts.empty()) throw ValidationError(where + "train and eval layouts are required");
  for (const auto& s : j.value("seeds", json::array())) r.seeds.push_back(s.get<std::uint64_t>());
  if (r.seeds.empty()) throw ValidationError(where + "no seeds");
  if (std::set<std::uint64_t>(r.seeds.begin(), r.seeds.end()).size() != r.seeds.size()) {
    throw ValidationError(where + "duplicate seeds");
  }
  r.total_steps = j.value("total_steps", r.total_steps);
  r.eval_interval = j.value("eval_interval", r.eval_interval);
  r.eval_episodes_per_layout = j.value("eval_episodes_per_layout", r.eval_episodes_per_layout);
  r.episode_seed = j.value("episode_seed", r.episode_seed);
  if (r.total_steps < 0 || r.eval_interval <= 0 || r.eval_episodes_per_layout <= 0) {
    throw ValidationError(where + "budgets must be positive");
  }
  r.output = resolve(output_root, j.value("output", r.name));
  const json cfg = j.value("config", json::object());
  if (!cfg.is_object()) throw ValidationError(where + "config must be an object");
  for (const char* owned : {"task", "mode", "seed", "total_steps", "eval_interval"}) {
    if (cfg.contains(owned)) throw ValidationError(where + "config may not set '" + owned + "'");
  }
  r.config = cfg.dump();
  return r;
}

}  // namespace

const RunSpec& ExperimentManifest::run(const std::string& name) const {
  std::string known;
  for (const auto& r : runs) {
    if (r.name == name) return r;
    known += (known.empty() ? "" : ", ") + r.name;
  }
  throw ValidationError("manifest: no run named '" + name + "' (known: " + known + ")");
}

ExperimentManifest parse_manifest(const std::string& text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("schema", "") != kSchema) {
      throw ValidationError(std::string("manifest: expected schema ") + kSchema);
    }
    const fs::path base = fs::absolute(base_dir);
    ExperimentManifest m;
    if (!doc.contains("catalog")) throw ValidationError("manifest: missing catalog");
    m.catalog = resolve(base, doc.at("catalog").get<std::string>());
    if (const char* env = std::getenv("ACTCTX_OUTPUT_ROOT"); env && *env) {
      m.output_root = fs::absolute(env).lexically_normal();
    } else {
      m.output_root = resolve(base, doc.value("output_root", "runs"));
    }
    const json defaults = doc.value("defaults", json::object());
    std::set<std::string> names;
    json resolved_runs = json::array();
    for (const auto& raw : doc.value("runs", json::array())) {
      json merged = defaults;
      merged.update(raw);
      RunSpec r = parse_run(merged, base, m.output_root);
      if (!names.insert(r.name).second) throw ValidationError("manifest: duplicate run name '" + r.name + "'");
      json jr = merged;
      jr["prior"] = r.prior.empty() ? json(nullptr) : json(r.prior.string());
      jr["train_layouts"] = json::array();
      for (const auto& p : r.train_layouts) jr["train_layouts"].push_back(p.string());
      jr["eval_layouts"] = json::array();
      for (const auto& p : r.eval_layouts) jr["eval_layouts"].push_back(p.string());
      jr["output"] = r.output.string();
      resolved_runs.push_back(jr);
      m.runs.push_back(std::move(r));
    }
    if (m.runs.empty()) throw ValidationError("manifest: no runs");
    json res = {{"schema", kSchema},
                {"catalog", m.catalog.string()},
                {"output_root", m.output_root.string()},
                {"runs", resolved_runs}};
    m.resolved = res.dump(1);
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
}

ExperimentManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentManifest m = parse_manifest(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
  m.source = fs::absolute(path);
  return m;
}

void require_artifacts(const ExperimentManifest& manifest, const RunSpec& run) {
  std::vector<fs::path> needed = {manifest.catalog};
  if (!run.prior.empty() && rl::uses_table(run.mode) && run.mode != rl::RewardMode::uniform) {
    needed.push_back(run.prior);
  }
  needed.insert(needed.end(), run.train_layouts.begin(), run.train_layouts.end());
  needed.insert(needed.end(), run.eval_layouts.begin(), run.eval_layouts.end());
  std::string missing;
  for (const auto& p : needed) {
    if (!fs::is_regular_file(p)) missing += "\n  " + p.string();
  }
  if (!missing.empty()) throw ValidationError("run '" + run.name + "': missing input files:" + missing);
}

}  // namespace actctx::cli
