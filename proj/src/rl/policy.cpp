#include "actctx/rl/policy.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace actctx::rl {

namespace {
const char* kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::network: return "network";
    case PolicyKind::scripted: return "scripted";
    case PolicyKind::random: return "random";
  }
  return "network";
}
}  // namespace

int sample_action(const Eigen::Ref<const Eigen::VectorXf>& log_prob, Rng& rng) {
  double u = rng.uniform();
  for (Eigen::Index k = 0; k < log_prob.size(); ++k) {
    u -= std::exp(static_cast<double>(log_prob[k]));
    if (u < 0) return static_cast<int>(k);
  }
  return static_cast<int>(log_prob.size()) - 1;
}

void require_compatible(const Policy& policy, const sim::KitchenCatalog& catalog, int num_actions) {
  if (policy.kind != PolicyKind::network && policy.vocabulary.empty()) return;
  const Vocabulary& v = catalog.vocabulary();
  std::vector<std::string> env_names;
  for (ClassId c = 0; c < v.size(); ++c) env_names.push_back(v.name(c));
  if (env_names != policy.vocabulary) {
    std::string diff;
    for (const auto& n : policy.vocabulary) {
      if (std::find(env_names.begin(), env_names.end(), n) == env_names.end()) diff += " -" + n;
    }
    for (const auto& n : env_names) {
      if (std::find(policy.vocabulary.begin(), policy.vocabulary.end(), n) == policy.vocabulary.end()) {
        diff += " +" + n;
      }
    }
    if (diff.empty()) diff = " (same classes, different order)";
    throw ValidationError("vocabulary mismatch between checkpoint and world:" + diff);
  }
  if (policy.kind == PolicyKind::network) {
    const sim::ObservationEncoder enc(catalog, num_actions, policy.window_radius);
    if (policy.net.shape().obs != enc.dim() || policy.net.shape().actions != num_actions) {
      throw ValidationError("checkpoint network shape does not match the environment");
    }
  }
}

std::string checkpoint_to_json(const Policy& p) {
  nlohmann::ordered_json j;
  j["schema"] = "actctx.checkpoint/1";
  j["kind"] = kind_name(p.kind);
  j["fingerprint"] = p.fingerprint;
  j["task"] = p.task;
  j["method"] = p.method;
  j["vocabulary"] = p.vocabulary;
  j["window_radius"] = p.window_radius;
  const NetShape& s = p.net.shape();
  j["shape"] = {{"obs", s.obs}, {"hidden1", s.hidden1}, {"hidden2", s.hidden2}, {"actions", s.actions}};
  // Floats print with enough digits to round-trip exactly.
  std::vector<float> w(p.net.params().data(), p.net.params().data() + p.net.params().size());
  j["params"] = w;
  return j.dump();
}

Policy checkpoint_from_json(const std::string& text) {
  Policy p;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema").get<std::string>() != "actctx.checkpoint/1") {
      throw ParseError("checkpoint: unsupported schema");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "network") p.kind = PolicyKind::network;
    else if (kind == "scripted") p.kind = PolicyKind::scripted;
    else if (kind == "random") p.kind = PolicyKind::random;
    else throw ParseError("checkpoint: unknown kind " + kind);
    p.fingerprint = j.value("fingerprint", "");
    p.task = j.value("task", "");
    p.method = j.value("method", "");
    p.vocabulary = j.value("vocabulary", std::vector<std::string>{});
    p.window_radius = j.value("window_radius", 2);
    if (p.kind == PolicyKind::network) {
      const auto& s = j.at("shape");
      NetShape shape{s.at("obs").get<int>(), s.at("hidden1").get<int>(), s.at("hidden2").get<int>(),
                     s.at("actions").get<int>()};
      const auto w = j.at("params").get<std::vector<float>>();
      if (static_cast<int>(w.size()) != shape.size()) throw ParseError("checkpoint: parameter count mismatch");
      p.net = ActorCritic<float>(shape);
      for (std::size_t i = 0; i < w.size(); ++i) p.net.params()[static_cast<Eigen::Index>(i)] = w[i];
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const Policy& policy) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << checkpoint_to_json(policy) << '\n';
}

Policy load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace actctx::rl
