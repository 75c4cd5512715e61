// Desk-scale multi-agent TD trainer: independent per-agent updates with the
// team reward split equally, or VDN-style updates driven by the joint TD
// error on the summed value. One shared table across agents.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "skirmish/env/environment.hpp"
#include "skirmish/learn/featurize.hpp"
#include "skirmish/learn/model.hpp"
#include "skirmish/learn/qtable.hpp"

namespace skirmish::learn {

struct LearnerConfig {
    double alpha = 0.15;
    double gamma = 0.97;
    double epsilon_start = 1.0;
    double epsilon_end = 0.03;
    int64_t epsilon_decay_steps = 160000;
    int64_t total_steps = 200000;
    FeatureSpec features;
    bool use_vdn = false;
    int64_t eval_interval = 20000;
    int eval_episodes = 32;  // evaluation protocol default
    int64_t feature_space_limit = 2000000;  // entries guard for tabular feasibility
};

inline void validate(const LearnerConfig& c) {
    if (c.alpha <= 0.0 || c.alpha > 1.0) throw ConfigError("alpha must be in (0, 1]");
    if (c.gamma < 0.0 || c.gamma >= 1.0) throw ConfigError("gamma must be in [0, 1)");
    for (double e : {c.epsilon_start, c.epsilon_end}) {
        if (e < 0.0 || e > 1.0) throw ConfigError("epsilon must be in [0, 1]");
    }
    if (c.total_steps <= 0 || c.eval_interval <= 0) {
        throw ConfigError("total_steps and eval_interval must be positive");
    }
}

struct CurvePoint {
    int64_t env_steps = 0;
    double win_rate = 0.0;
};

using LearningCurve = std::vector<CurvePoint>;

// One sampled (per-agent values, joint) pair from greedy evaluation, kept so
// the additive-value bookkeeping can be checked exactly.
struct ValueLogEntry {
    std::vector<double> per_agent;
    double joint = 0.0;
};

struct TrainResult {
    QModel model;
    LearningCurve curve;  // raw eval win rates, in env-step order
    std::vector<ValueLogEntry> value_log;
};

namespace detail {

inline double epsilon_at(const LearnerConfig& c, int64_t step) {
    if (step >= c.epsilon_decay_steps) return c.epsilon_end;
    double t = static_cast<double>(step) / static_cast<double>(c.epsilon_decay_steps);
    return c.epsilon_start + (c.epsilon_end - c.epsilon_start) * t;
}

// Greedy rollouts against the training environment configuration.
inline double evaluate_greedy(const env::EnvConfig& cfg, const combat::StatTable& table,
                              const QModel& model, uint64_t seed_base, int episodes,
                              std::vector<ValueLogEntry>* value_log) {
    env::Environment envr(cfg, table);
    int wins = 0;
    for (int ep = 0; ep < episodes; ++ep) {
        uint64_t s = seed_base;
        uint64_t ep_seed = splitmix64(s) ^ static_cast<uint64_t>(ep);
        envr.reset(ep_seed);
        bool won = false;
        while (envr.active()) {
            std::vector<int> actions;
            std::vector<double> values;
            for (int i = 0; i < envr.n_agents(1); ++i) {
                auto obs = envr.observation(1, i);
                auto mask = envr.mask(1, i);
                int f = featurize(obs, envr.layout(), 1, model.features);
                int a = model.table.argmax_legal(f, mask);
                actions.push_back(a);
                values.push_back(model.table.get(f, a));
            }
            if (value_log && value_log->size() < 64) {
                value_log->push_back({values, vdn_joint_value(values)});
            }
            won = envr.step(actions).info.won_p1;
        }
        wins += won ? 1 : 0;
    }
    return static_cast<double>(wins) / episodes;
}

}  // namespace detail

inline TrainResult train(const env::EnvConfig& env_cfg, const combat::StatTable& table,
                         const LearnerConfig& cfg, uint64_t seed) {
    validate(cfg);
    if (env_cfg.mode != env::Mode::DecisionTree) {
        throw ConfigError("training drives player 1 against a scripted opponent");
    }

    env::Environment envr(env_cfg, table);
    const int n_agents = envr.n_agents(1);
    const int n_actions = envr.layout().mask_len(1);
    int64_t space = static_cast<int64_t>(cfg.features.feature_count()) * n_actions;
    if (space > cfg.feature_space_limit) {
        throw ConfigError("feature space " + std::to_string(space) +
                          " exceeds the tabular limit " +
                          std::to_string(cfg.feature_space_limit));
    }

    TrainResult result;
    result.model.scenario_name = env_cfg.scenario.name;
    result.model.n_actions = n_actions;
    result.model.obs_len = envr.layout().obs_len(1);
    result.model.features = cfg.features;
    result.model.gamma = cfg.gamma;
    result.model.use_vdn = cfg.use_vdn;
    result.model.table = QTable(n_actions);
    {
        nlohmann::json fingerprint = {
            {"scenario", combat::to_json(env_cfg.scenario)},
            {"alpha", cfg.alpha},
            {"gamma", cfg.gamma},
            {"eps", {cfg.epsilon_start, cfg.epsilon_end, cfg.epsilon_decay_steps}},
            {"total_steps", cfg.total_steps},
            {"bins", {cfg.features.dist_bins, cfg.features.hp_bins}},
            {"use_vdn", cfg.use_vdn},
            {"seed", seed}};
        result.model.config_hash = hex64(fnv1a64(fingerprint.dump()));
    }
    QTable& q = result.model.table;

    Pcg32 explore_rng = Pcg32::derive(seed, 0x4558504cull /* explore */);
    int64_t env_steps = 0;
    uint64_t episode_index = 0;
    int64_t next_eval = 0;

    std::vector<int> features(n_agents);
    std::vector<int> actions(n_agents);
    std::vector<env::ActionMask> masks(n_agents);

    auto run_eval_point = [&]() {
        std::vector<ValueLogEntry>* log_sink =
            (cfg.use_vdn && result.value_log.empty()) ? &result.value_log : nullptr;
        double rate = detail::evaluate_greedy(env_cfg, table, result.model,
                                              seed ^ 0xE5A1ull, cfg.eval_episodes, log_sink);
        result.curve.push_back({env_steps, rate});
    };

    while (env_steps < cfg.total_steps) {
        uint64_t s = seed;
        uint64_t ep_seed = splitmix64(s) + episode_index;
        ++episode_index;
        envr.reset(ep_seed);

        for (int i = 0; i < n_agents; ++i) {
            auto obs = envr.observation(1, i);
            masks[i] = envr.mask(1, i);
            features[i] = featurize(obs, envr.layout(), 1, cfg.features);
        }

        while (envr.active() && env_steps < cfg.total_steps) {
            if (env_steps >= next_eval) {
                run_eval_point();
                next_eval += cfg.eval_interval;
            }
            double epsilon = detail::epsilon_at(cfg, env_steps);
            for (int i = 0; i < n_agents; ++i) {
                actions[i] = epsilon_greedy(q, features[i], masks[i], epsilon, explore_rng);
            }
            auto step = envr.step(actions);
            ++env_steps;

            std::vector<int> next_features(n_agents);
            std::vector<env::ActionMask> next_masks(n_agents);
            for (int i = 0; i < n_agents; ++i) {
                next_features[i] = featurize(envr.observation(1, i), envr.layout(), 1,
                                             cfg.features);
                next_masks[i] = envr.mask(1, i);
            }

            if (cfg.use_vdn) {
                // Joint TD error on the summed value; every participating
                // entry moves by the same alpha * delta.
                double q_sum = 0.0;
                double next_sum = 0.0;
                std::vector<int> participants;
                for (int i = 0; i < n_agents; ++i) {
                    if (features[i] == 0) continue;  // dead at decision time
                    participants.push_back(i);
                    q_sum += q.get(features[i], actions[i]);
                    if (!step.terminated) next_sum += q.max_legal(next_features[i], next_masks[i]);
                }
                double target = step.reward_p1 + cfg.gamma * next_sum;
                double delta = target - q_sum;
                for (int i : participants) {
                    q.add(features[i], actions[i], cfg.alpha * delta);
                }
            } else {
                double share = step.reward_p1 / n_agents;
                for (int i = 0; i < n_agents; ++i) {
                    if (features[i] == 0) continue;
                    Transition t{features[i], actions[i], share, next_features[i],
                                 step.terminated, next_masks[i]};
                    td_update(q, t, cfg.alpha, cfg.gamma);
                }
            }

            features = next_features;
            masks = next_masks;
        }
    }
    run_eval_point();  // final point at total_steps
    return result;
}

}  // namespace skirmish::learn
