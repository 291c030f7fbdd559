#include "actctx/rl/trainer.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "actctx/prior/baseline_priors.hpp"

namespace actctx::rl {

void TrainConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("train config: ") + what);
  };
  require(lambda_phi >= 0, "lambda_phi must be >= 0");
  require(epsilon > 0, "epsilon must be positive");
  require(horizon > 0, "horizon must be positive");
  require(total_steps >= 0, "total_steps must be >= 0");
  require(num_envs > 0, "num_envs must be positive");
  require(rollout_length > 0, "rollout_length must be positive");
  require(learning_rate > 0, "learning_rate must be positive");
  require(ppo.clip > 0, "clip must be positive");
  require(ppo.value_coef > 0, "value_coef must be positive");
  require(ppo.entropy_coef >= 0, "entropy_coef must be >= 0");
  require(epochs > 0, "epochs must be positive");
  require(minibatches > 0 && minibatches <= num_envs * rollout_length, "minibatches out of range");
  require(gamma > 0 && gamma <= 1, "gamma must lie in (0, 1]");
  require(gae_lambda >= 0 && gae_lambda <= 1, "gae_lambda must lie in [0, 1]");
  require(max_grad_norm > 0, "max_grad_norm must be positive");
  require(hidden > 0, "hidden must be positive");
  require(window_radius >= 0, "window_radius must be >= 0");
  require(eval_interval > 0, "eval_interval must be positive");
  require(threads > 0, "threads must be positive");
}

std::string TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = sim::task_name(task);
  j["mode"] = reward_mode_name(mode);
  j["lambda_phi"] = lambda_phi;
  j["epsilon"] = epsilon;
  j["horizon"] = horizon;
  j["total_steps"] = total_steps;
  j["num_envs"] = num_envs;
  j["rollout_length"] = rollout_length;
  j["learning_rate"] = learning_rate;
  j["clip"] = ppo.clip;
  j["value_coef"] = ppo.value_coef;
  j["entropy_coef"] = ppo.entropy_coef;
  j["normalize_advantages"] = ppo.normalize_advantages;
  j["epochs"] = epochs;
  j["minibatches"] = minibatches;
  j["gamma"] = gamma;
  j["gae_lambda"] = gae_lambda;
  j["max_grad_norm"] = max_grad_norm;
  j["hidden"] = hidden;
  j["window_radius"] = window_radius;
  j["eval_interval"] = eval_interval;
  j["eval_selection"] = selection_name(eval_selection);
  j["seed"] = seed;
  return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  TrainConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("task")) c.task = sim::task_from_name(j["task"].get<std::string>());
    if (j.contains("mode")) c.mode = reward_mode_from_name(j["mode"].get<std::string>());
    c.lambda_phi = j.value("lambda_phi", c.lambda_phi);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.horizon = j.value("horizon", c.horizon);
    c.total_steps = j.value("total_steps", c.total_steps);
    c.num_envs = j.value("num_envs", c.num_envs);
    c.rollout_length = j.value("rollout_length", c.rollout_length);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.ppo.clip = j.value("clip", c.ppo.clip);
    c.ppo.value_coef = j.value("value_coef", c.ppo.value_coef);
    c.ppo.entropy_coef = j.value("entropy_coef", c.ppo.entropy_coef);
    c.ppo.normalize_advantages = j.value("normalize_advantages", c.ppo.normalize_advantages);
    c.epochs = j.value("epochs", c.epochs);
    c.minibatches = j.value("minibatches", c.minibatches);
    c.gamma = j.value("gamma", c.gamma);
    c.gae_lambda = j.value("gae_lambda", c.gae_lambda);
    c.max_grad_norm = j.value("max_grad_norm", c.max_grad_norm);
    c.hidden = j.value("hidden", c.hidden);
    c.window_radius = j.value("window_radius", c.window_radius);
    c.eval_interval = j.value("eval_interval", c.eval_interval);
    c.seed = j.value("seed", c.seed);
    if (j.contains("eval_selection")) c.eval_selection = selection_from_name(j["eval_selection"].get<std::string>());
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("train config: ") + e.what());
  }
  return c;
}

std::string TrainConfig::fingerprint() const { return fnv1a_hex(to_json()); }

namespace {

/// Runs fn(0..n-1) over `threads` workers with a fixed static split.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int t = std::min(threads, n);
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w * n / t; i < (w + 1) * n / t; ++i) fn(i);
    });
  }
}

class EpisodeSource {
 public:
  EpisodeSource(const std::vector<sim::Layout>& layouts, sim::TaskId task, int horizon, std::uint64_t seed)
      : layouts_(&layouts), task_(task), horizon_(horizon), rng_(seed) {
    if (layouts.empty()) throw ValidationError("train: no training layouts");
    for (const auto& l : layouts) {
      if (sim::task_unsatisfiable_reason(l, task).empty()) usable_.push_back(&l);
    }
    if (usable_.empty()) throw ValidationError("train: task cannot be posed in any training layout");
  }

  sim::EpisodeConfig next() {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const sim::Layout& l = *usable_[static_cast<std::size_t>(rng_.below(static_cast<int>(usable_.size())))];
      if (auto e = sim::make_episode(l, task_, rng_.next(), horizon_)) return *e;
    }
    throw std::runtime_error("train: could not sample a solvable training episode");
  }

 private:
  const std::vector<sim::Layout>* layouts_;
  std::vector<const sim::Layout*> usable_;
  sim::TaskId task_;
  int horizon_;
  Rng rng_;
};

}  // namespace

TrainResult train(const TrainConfig& cfg, const TrainInputs& in) {
  cfg.validate();
  if (!in.catalog) throw ValidationError("train: missing catalog");
  const sim::KitchenCatalog& cat = *in.catalog;
  const sim::ActionSpace space(cat);
  const sim::ObservationEncoder enc(cat, space.size(), cfg.window_radius);

  CompatibilityTable uniform_table;
  const CompatibilityTable* table = in.table;
  if (cfg.mode == RewardMode::uniform) {
    uniform_table = uniform_prior(cat.vocabulary());
    table = &uniform_table;
  } else if (!uses_table(cfg.mode)) {
    table = nullptr;
  } else if (!table) {
    throw ValidationError("train: reward mode " + reward_mode_name(cfg.mode) + " needs a compatibility table");
  }
  if (table && !(table->vocabulary() == cat.vocabulary())) {
    throw ValidationError("train: compatibility table vocabulary differs from the environment");
  }

  TrainResult result;
  Policy& policy = result.policy;
  policy.kind = PolicyKind::network;
  for (ClassId c = 0; c < cat.size(); ++c) policy.vocabulary.push_back(cat.vocabulary().name(c));
  policy.window_radius = cfg.window_radius;
  policy.net = ActorCritic<float>({enc.dim(), cfg.hidden, cfg.hidden, space.size()});
  policy.net.initialize(cfg.seed);
  policy.fingerprint = cfg.fingerprint();
  policy.task = sim::task_name(cfg.task);
  policy.method = reward_mode_name(cfg.mode);

  const auto run_eval = [&](long step) {
    if (in.eval_episodes.empty()) return;
    const EvalResult r = evaluate(policy, in.eval_episodes, in.eval_layouts, space, {cfg.eval_selection});
    result.curve.push_back({step, r.success_rate});
    if (in.on_eval) in.on_eval(step, policy, r);
  };
  run_eval(0);
  if (cfg.total_steps == 0) return result;

  const int n_env = cfg.num_envs;
  std::vector<sim::Layout> train_layouts = in.train_layouts;
  const sim::LayoutSet train_set(train_layouts);
  EpisodeSource source(train_layouts, cfg.task, cfg.horizon, mix_seed(cfg.seed, 0xe915));
  std::vector<EnvRunner> envs;
  std::vector<Rng> action_rng;
  for (int e = 0; e < n_env; ++e) {
    envs.emplace_back(space, cfg.mode, table, cfg.epsilon);
    envs.back().reset(source.next(), train_set);
    action_rng.emplace_back(mix_seed(cfg.seed, 0xac00 + static_cast<std::uint64_t>(e)));
  }
  Rng shuffle_rng(mix_seed(cfg.seed, 0x5bff));
  Adam<float> opt(policy.net.params().size(), cfg.learning_rate);

  const int dim = enc.dim();
  const int max_batch = n_env * cfg.rollout_length;
  Eigen::MatrixXf obs(dim, max_batch);
  std::vector<int> actions(static_cast<std::size_t>(max_batch));
  Eigen::VectorXf logp_old(max_batch), values(max_batch), rewards(max_batch), next_value(max_batch);
  Eigen::VectorXf advantages(max_batch), returns(max_batch);
  std::vector<std::uint8_t> ended(static_cast<std::size_t>(max_batch));
  std::vector<StepOutcome> outcomes(static_cast<std::size_t>(n_env));
  ActorCritic<float>::Cache cache;
  Eigen::MatrixXf step_obs(dim, n_env);

  long step = 0;
  long next_eval = cfg.eval_interval;
  while (step < cfg.total_steps) {
    const long remaining = cfg.total_steps - step;
    const int length = static_cast<int>(std::min<long>(cfg.rollout_length, (remaining + n_env - 1) / n_env));
    const int batch = length * n_env;
    UpdateDiagnostics diag;
    double task_sum = 0, aux_sum = 0;

    for (int t = 0; t < length; ++t) {
      parallel_for(n_env, cfg.threads, [&](int e) {
        enc.encode(envs[e].world(), envs[e].feedback(), step_obs.col(e));
      });
      policy.net.forward(step_obs, cache);
      const Eigen::MatrixXf logp = log_softmax(cache.logits);
      const int base = t * n_env;
      obs.middleCols(base, n_env) = step_obs;
      for (int e = 0; e < n_env; ++e) {
        const int a = sample_action(logp.col(e), action_rng[static_cast<std::size_t>(e)]);
        actions[static_cast<std::size_t>(base + e)] = a;
        logp_old[base + e] = logp(a, e);
        values[base + e] = cache.value[e];
      }
      parallel_for(n_env, cfg.threads, [&](int e) {
        outcomes[static_cast<std::size_t>(e)] = envs[e].step(actions[static_cast<std::size_t>(base + e)]);
      });

      // Bootstrap values for episodes cut by the horizon.
      std::vector<int> cut;
      for (int e = 0; e < n_env; ++e) {
        const StepOutcome& o = outcomes[static_cast<std::size_t>(e)];
        const int k = base + e;
        rewards[k] = static_cast<float>(total_reward(o.task_reward, o.aux_reward, cfg.lambda_phi));
        task_sum += o.task_reward;
        aux_sum += o.aux_reward;
        ended[static_cast<std::size_t>(k)] = o.goal || o.truncated;
        next_value[k] = 0;
        if (o.truncated) cut.push_back(e);
        if (o.goal || o.truncated) {
          ++diag.episodes_finished;
          diag.goals += o.goal;
        }
      }
      if (!cut.empty()) {
        Eigen::MatrixXf cut_obs(dim, static_cast<Eigen::Index>(cut.size()));
        for (std::size_t i = 0; i < cut.size(); ++i) {
          enc.encode(envs[cut[i]].world(), envs[cut[i]].feedback(), cut_obs.col(static_cast<Eigen::Index>(i)));
        }
        ActorCritic<float>::Cache cut_cache;
        policy.net.forward(cut_obs, cut_cache);
        for (std::size_t i = 0; i < cut.size(); ++i) {
          next_value[base + cut[i]] = cut_cache.value[static_cast<Eigen::Index>(i)];
        }
      }
      for (int e = 0; e < n_env; ++e) {
        if (ended[static_cast<std::size_t>(base + e)]) envs[e].reset(source.next(), train_set);
      }
    }

    // Values of the states following each step.
    parallel_for(n_env, cfg.threads, [&](int e) {
      enc.encode(envs[e].world(), envs[e].feedback(), step_obs.col(e));
    });
    policy.net.forward(step_obs, cache);
    for (int t = 0; t < length; ++t) {
      for (int e = 0; e < n_env; ++e) {
        const int k = t * n_env + e;
        if (ended[static_cast<std::size_t>(k)]) continue;
        next_value[k] = t + 1 < length ? values[k + n_env] : cache.value[e];
      }
    }
    {
      std::vector<float> r(length), v(length), nv(length), adv(length), ret(length);
      std::vector<std::uint8_t> end(length);
      for (int e = 0; e < n_env; ++e) {
        for (int t = 0; t < length; ++t) {
          const int k = t * n_env + e;
          r[t] = rewards[k];
          v[t] = values[k];
          nv[t] = next_value[k];
          end[t] = ended[static_cast<std::size_t>(k)];
        }
        compute_gae<float>(r, v, nv, end, static_cast<float>(cfg.gamma), static_cast<float>(cfg.gae_lambda),
                           adv, ret);
        for (int t = 0; t < length; ++t) {
          advantages[t * n_env + e] = adv[t];
          returns[t * n_env + e] = ret[t];
        }
      }
    }

    std::vector<int> order(static_cast<std::size_t>(batch));
    for (int i = 0; i < batch; ++i) order[static_cast<std::size_t>(i)] = i;
    const int mb_count = std::min(cfg.minibatches, batch);
    ActorCritic<float>::Vector grad(policy.net.params().size());
    PpoBatch<float> mb;
    PpoStats last{};
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (int i = batch - 1; i > 0; --i) {
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(shuffle_rng.below(i + 1))]);
      }
      for (int m = 0; m < mb_count; ++m) {
        const int lo = m * batch / mb_count, hi = (m + 1) * batch / mb_count;
        const int size = hi - lo;
        mb.obs.resize(dim, size);
        mb.actions.resize(static_cast<std::size_t>(size));
        mb.old_log_prob.resize(size);
        mb.advantages.resize(size);
        mb.returns.resize(size);
        for (int i = 0; i < size; ++i) {
          const int k = order[static_cast<std::size_t>(lo + i)];
          mb.obs.col(i) = obs.col(k);
          mb.actions[static_cast<std::size_t>(i)] = actions[static_cast<std::size_t>(k)];
          mb.old_log_prob[i] = logp_old[k];
          mb.advantages[i] = advantages[k];
          mb.returns[i] = returns[k];
        }
        grad.setZero();
        last = ppo_loss(policy.net, mb, cfg.ppo, &grad);
        if (!grad.allFinite() || !std::isfinite(last.loss)) {
          std::ostringstream msg;
          msg << "train: non-finite gradient at step " << step << " (loss " << last.loss << ", policy "
              << last.policy_loss << ", value " << last.value_loss << ", entropy " << last.entropy << ")";
          throw std::runtime_error(msg.str());
        }
        diag.grad_norm = clip_grad_norm<float>(grad, cfg.max_grad_norm);
        opt.step(policy.net.params(), grad);
      }
    }

    step += batch;
    diag.step = step;
    diag.stats = last;
    diag.mean_task_reward = task_sum / batch;
    diag.mean_aux_reward = aux_sum / batch;
    result.history.push_back(diag);
    if (in.on_update) in.on_update(diag);
    if (step >= next_eval || step >= cfg.total_steps) {
      run_eval(step);
      while (next_eval <= step) next_eval += cfg.eval_interval;
    }
  }
  return result;
}

}  // namespace actctx::rl
