// Experiment runner: (scenario x policy x opponent) cells evaluated with the
// standard protocol of 32 episodes per seed across 5 seeds, smoothing 0.6.
// Seeds may run on worker threads; every episode seed is fixed up front, so
// results are independent of scheduling and completion order.
#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "skirmish/env/config.hpp"
#include "skirmish/eval/episode.hpp"
#include "skirmish/eval/report.hpp"

namespace skirmish::eval {

struct PolicySpec {
    std::string kind = "script";  // script | model | selfplay
    nlohmann::json script;        // script reference (script/selfplay player 1)
    nlohmann::json script_p2;     // selfplay player 2
    std::string model_path;

    static PolicySpec from_json(const nlohmann::json& j) {
        PolicySpec spec;
        if (j.is_string()) {
            spec.kind = "script";
            spec.script = j;
            return spec;
        }
        spec.kind = j.value("kind", "script");
        if (spec.kind == "script") {
            spec.script = j.at("script");
        } else if (spec.kind == "model") {
            spec.model_path = j.at("path").get<std::string>();
        } else if (spec.kind == "selfplay") {
            spec.script = j.at("p1");
            spec.script_p2 = j.at("p2");
        } else {
            throw ConfigError("unknown policy kind '" + spec.kind + "'");
        }
        return spec;
    }
};

struct ExperimentConfig {
    std::vector<nlohmann::json> scenarios;  // names, paths, or inline objects
    PolicySpec policy;
    nlohmann::json opponent;  // mixture reference (ignored for selfplay)
    int n_eval_episodes = 32;
    int n_seeds = 5;
    double smoothing = 0.6;
    uint64_t base_seed = 0;
    int n_workers = 1;
    std::string results_dir = "results";
};

inline std::string default_results_dir() {
    if (const char* env = std::getenv("SKIRMISH_RESULTS_DIR")) return env;
    return "results";
}

inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (!j.contains("scenarios") || !j["scenarios"].is_array() || j["scenarios"].empty()) {
        throw ConfigError("experiment: missing 'scenarios' array");
    }
    for (const auto& s : j["scenarios"]) cfg.scenarios.push_back(s);
    cfg.policy = PolicySpec::from_json(j.at("policy"));
    if (cfg.policy.kind != "selfplay") {
        if (!j.contains("opponent")) throw ConfigError("experiment: missing 'opponent'");
        cfg.opponent = j["opponent"];
    }
    cfg.n_eval_episodes = j.value("n_eval_episodes", 32);
    cfg.n_seeds = j.value("n_seeds", 5);
    cfg.smoothing = j.value("smoothing", 0.6);
    cfg.base_seed = j.value("base_seed", 0ull);
    cfg.n_workers = j.value("n_workers", 1);
    cfg.results_dir = j.value("results_dir", default_results_dir());
    if (cfg.n_eval_episodes <= 0 || cfg.n_seeds <= 0) {
        throw ConfigError("experiment: episode and seed counts must be positive");
    }
    return cfg;
}

inline ExperimentConfig load_experiment(const std::string& path) {
    return experiment_from_json(combat::detail::parse_file(path));
}

namespace detail {

inline std::unique_ptr<Policy> make_policy(const PolicySpec& spec, bool p2_side = false) {
    if (spec.kind == "model") {
        return std::make_unique<ModelPolicy>(learn::load_model(spec.model_path));
    }
    const nlohmann::json& ref = (spec.kind == "selfplay" && p2_side) ? spec.script_p2
                                                                     : spec.script;
    return std::make_unique<ScriptPolicy>(env::resolve_script(ref));
}

inline uint64_t episode_seed(uint64_t base, int seed_index, int episode_index) {
    uint64_t s = base ^ (0x5eedull + seed_index);
    uint64_t mixed = splitmix64(s);
    return mixed + static_cast<uint64_t>(episode_index);
}

}  // namespace detail

// Evaluates one (scenario, policy, opponent) cell: n_seeds independent seed
// groups of episodes_per_seed episodes each.
inline CellResult run_cell(const nlohmann::json& scenario_ref, const PolicySpec& policy_spec,
                           const nlohmann::json& opponent_ref, const combat::StatTable& table,
                           int n_seeds, int episodes_per_seed, uint64_t base_seed,
                           int n_workers = 1) {
    env::EnvConfig proto;
    proto.scenario = env::resolve_scenario(scenario_ref, table);
    if (policy_spec.kind == "selfplay") {
        proto.mode = env::Mode::SelfPlay;
    } else {
        proto.mode = env::Mode::DecisionTree;
        proto.opponent_mixture = env::mixture_from_json(opponent_ref);
    }

    CellResult cell;
    cell.task = proto.scenario.name;
    cell.episodes_per_seed = episodes_per_seed;
    {
        auto p = detail::make_policy(policy_spec);
        cell.policy_name = p->name();
    }
    cell.opponent_name =
        policy_spec.kind == "selfplay"
            ? "selfplay"
            : (opponent_ref.is_string() ? opponent_ref.get<std::string>() : "mixture");

    std::vector<std::vector<EpisodeResult>> per_seed(n_seeds);
    std::mutex next_mutex;
    int next_seed = 0;
    auto worker = [&]() {
        // Policies and environments are per-thread; only the work index is shared.
        auto p1 = detail::make_policy(policy_spec);
        std::unique_ptr<Policy> p2;
        if (policy_spec.kind == "selfplay") p2 = detail::make_policy(policy_spec, true);
        env::Environment envr(proto, table);
        while (true) {
            int seed_index;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next_seed >= n_seeds) return;
                seed_index = next_seed++;
            }
            std::vector<EpisodeResult> results;
            results.reserve(episodes_per_seed);
            for (int ep = 0; ep < episodes_per_seed; ++ep) {
                uint64_t s = detail::episode_seed(base_seed, seed_index, ep);
                results.push_back(run_episode(envr, *p1, p2.get(), s));
            }
            per_seed[seed_index] = std::move(results);
        }
    };

    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    for (int s = 0; s < n_seeds; ++s) {
        double wins = 0.0;
        for (const auto& ep : per_seed[s]) {
            wins += win_value(ep);
            cell.episodes.push_back(ep);
        }
        cell.per_seed_means.push_back(wins / episodes_per_seed);
    }
    finalize_cell(cell);
    return cell;
}

inline WinRateReport run_eval(const ExperimentConfig& cfg, const combat::StatTable& table) {
    WinRateReport report;
    report.smoothing = cfg.smoothing;
    for (const auto& scenario_ref : cfg.scenarios) {
        report.cells.push_back(run_cell(scenario_ref, cfg.policy, cfg.opponent, table,
                                        cfg.n_seeds, cfg.n_eval_episodes, cfg.base_seed,
                                        cfg.n_workers));
    }
    return report;
}

// Black-box protocol: evaluate a frozen model against opponent specs it never
// trained on. Near-zero rates need resolution, so cells default to 256
// episodes (more than the in-training protocol's 32).
inline WinRateReport blackbox_eval(const learn::QModel& model,
                                   const nlohmann::json& train_opponent,
                                   const std::vector<nlohmann::json>& test_opponents,
                                   const combat::StatTable& table,
                                   const nlohmann::json& scenario_ref = {},
                                   int episodes_per_cell = 256, uint64_t base_seed = 0,
                                   int n_workers = 1) {
    nlohmann::json scenario = scenario_ref.is_null() ? nlohmann::json(model.scenario_name)
                                                     : scenario_ref;
    {
        // Shape guard up front, against the resolved scenario.
        auto sc = env::resolve_scenario(scenario, table);
        auto ctx = combat::make_context(sc, table);
        learn::check_shape(model, env::make_layout(ctx));
    }
    PolicySpec spec;
    spec.kind = "model";

    WinRateReport report;
    auto eval_against = [&](const nlohmann::json& opponent, const std::string& label) {
        env::EnvConfig proto;
        proto.scenario = env::resolve_scenario(scenario, table);
        proto.mode = env::Mode::DecisionTree;
        proto.opponent_mixture = env::mixture_from_json(opponent);

        CellResult cell;
        cell.task = proto.scenario.name;
        cell.policy_name = "model:" + model.scenario_name;
        cell.opponent_name = label;
        cell.episodes_per_seed = episodes_per_cell;

        ModelPolicy policy(model);
        env::Environment envr(proto, table);
        double wins = 0.0;
        for (int ep = 0; ep < episodes_per_cell; ++ep) {
            uint64_t s = detail::episode_seed(base_seed, 0, ep);
            auto result = run_episode(envr, policy, nullptr, s);
            wins += win_value(result);
            cell.episodes.push_back(result);
        }
        cell.per_seed_means.push_back(wins / episodes_per_cell);
        finalize_cell(cell);
        report.cells.push_back(std::move(cell));
    };

    auto label_of = [](const nlohmann::json& ref, const std::string& fallback) {
        return ref.is_string() ? ref.get<std::string>() : fallback;
    };
    eval_against(train_opponent, "train:" + label_of(train_opponent, "mixture"));
    for (const auto& opp : test_opponents) {
        eval_against(opp, "test:" + label_of(opp, "mixture"));
    }
    (void)n_workers;
    return report;
}

}  // namespace skirmish::eval
