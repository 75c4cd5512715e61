// Environment configuration: scenario + opponent mixture + reward constants.
// Loadable from a JSON file; scripts resolve builtin names first, then paths.
#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "skirmish/combat/data.hpp"
#include "skirmish/core/error.hpp"
#include "skirmish/script/builtins.hpp"
#include "skirmish/script/interpreter.hpp"

namespace skirmish::env {

enum class Mode { DecisionTree, SelfPlay };

struct EnvConfig {
    combat::ScenarioConfig scenario;
    Mode mode = Mode::DecisionTree;  // the default mode
    script::MixturePolicy opponent_mixture;  // decision_tree mode only
    double reward_scale = 0.0;  // <= 0: derive the defaults below at construction
    double kill_bonus = 0.0;
    double win_bonus = 0.0;
    uint64_t seed = 0;
};

// Default reward constants: the maximum undiscounted episode return (all
// enemy hp+shield, a kill bonus of 10 per enemy, 200 for the win) normalizes
// to 20, the usual micromanagement-benchmark convention.
inline void apply_default_rewards(EnvConfig& cfg, const combat::BattleContext& ctx) {
    double enemy_pool = 0.0;
    for (int idx : ctx.team2_archetypes) {
        enemy_pool += ctx.archetypes[idx].max_hp.to_double() +
                      ctx.archetypes[idx].max_shield.to_double();
    }
    double n_enemies = static_cast<double>(ctx.team2_archetypes.size());
    double scale = 20.0 / (enemy_pool + 10.0 * n_enemies + 200.0);
    if (cfg.reward_scale <= 0.0) cfg.reward_scale = scale;
    if (cfg.kill_bonus <= 0.0) cfg.kill_bonus = 10.0 * cfg.reward_scale;
    if (cfg.win_bonus <= 0.0) cfg.win_bonus = 200.0 * cfg.reward_scale;
}

inline std::string data_dir() {
    if (const char* env = std::getenv("SKIRMISH_DATA_DIR")) return env;
#ifdef SKIRMISH_DATA_DIR_DEFAULT
    return SKIRMISH_DATA_DIR_DEFAULT;
#else
    return "data";
#endif
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Builtin name, inline {"name","text"} object, or a path to a .dsl file.
inline script::DecisionTree resolve_script(const nlohmann::json& ref) {
    if (ref.is_object()) {
        if (!ref.contains("text")) throw ConfigError("inline script needs a 'text' field");
        return script::parse_script(
            {ref["text"].get<std::string>(), ref.value("name", "inline")});
    }
    if (!ref.is_string()) throw ConfigError("script reference must be a name, path, or object");
    std::string name = ref.get<std::string>();
    if (script::is_builtin_script(name)) return script::builtin_script(name);
    std::string path = name;
    if (name.find('/') == std::string::npos && name.find(".dsl") == std::string::npos) {
        path = data_dir() + "/scripts/" + name + ".dsl";
    }
    return script::parse_script({read_text_file(path), name});
}

inline script::MixturePolicy mixture_from_json(const nlohmann::json& j) {
    script::MixturePolicy mixture;
    if (j.is_string() || (j.is_object() && j.contains("text"))) {
        mixture.entries.push_back({resolve_script(j), 1.0});
        return mixture;
    }
    if (!j.is_object() || !j.contains("scripts") || !j["scripts"].is_array()) {
        throw ConfigError("opponent must be a script reference or {scripts: [...]}");
    }
    const auto& scripts = j["scripts"];
    bool any_weight = false;
    for (const auto& entry : scripts) {
        double w = -1.0;
        nlohmann::json ref = entry;
        if (entry.is_object() && entry.contains("script")) {
            ref = entry["script"];
            if (entry.contains("weight")) {
                w = entry["weight"].get<double>();
                any_weight = true;
            }
        }
        mixture.entries.push_back({resolve_script(ref), w});
    }
    if (!any_weight) {
        // Equal probabilities are the default configuration.
        for (auto& e : mixture.entries) e.weight = 1.0 / mixture.entries.size();
    } else {
        for (auto& e : mixture.entries) {
            if (e.weight < 0.0) throw ConfigError("mixture mixes weighted and unweighted entries");
        }
    }
    mixture.resample_per_step = j.value("resample_per_step", false);
    script::validate(mixture);
    return mixture;
}

// Scenario field: inline object, bare name under <data>/scenarios/, or path.
inline combat::ScenarioConfig resolve_scenario(const nlohmann::json& ref,
                                               const combat::StatTable& table) {
    if (ref.is_object()) {
        combat::ScenarioConfig sc = combat::scenario_from_json(ref);
        combat::validate(sc, table);
        return sc;
    }
    if (!ref.is_string()) throw ConfigError("scenario must be a name, path, or object");
    std::string name = ref.get<std::string>();
    std::string path = name;
    if (name.find('/') == std::string::npos && name.find(".json") == std::string::npos) {
        path = data_dir() + "/scenarios/" + name + ".json";
    }
    return combat::load_scenario_config(path, table);
}

inline EnvConfig env_config_from_json(const nlohmann::json& j, const combat::StatTable& table) {
    EnvConfig cfg;
    if (!j.contains("scenario")) throw ConfigError("env config: missing 'scenario'");
    cfg.scenario = resolve_scenario(j["scenario"], table);
    std::string mode = j.value("mode", "decision_tree");
    if (mode == "decision_tree") {
        cfg.mode = Mode::DecisionTree;
    } else if (mode == "self_play") {
        cfg.mode = Mode::SelfPlay;
    } else {
        throw ConfigError("env config: unknown mode '" + mode + "'");
    }
    if (cfg.mode == Mode::DecisionTree) {
        if (!j.contains("opponent")) throw ConfigError("decision_tree mode needs 'opponent'");
        cfg.opponent_mixture = mixture_from_json(j["opponent"]);
    }
    cfg.reward_scale = j.value("reward_scale", 0.0);
    cfg.kill_bonus = j.value("kill_bonus", 0.0);
    cfg.win_bonus = j.value("win_bonus", 0.0);
    cfg.seed = j.value("seed", 0ull);
    return cfg;
}

inline EnvConfig load_env_config(const std::string& path, const combat::StatTable& table) {
    return env_config_from_json(combat::detail::parse_file(path), table);
}

inline combat::StatTable load_default_stat_table() {
    return combat::load_stat_table(data_dir() + "/units.json");
}

}  // namespace skirmish::env
