// Built-in opponent strategies, shipped as DSL source and parsed on demand.
// Reserved names resolve here before any file lookup.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "skirmish/core/error.hpp"
#include "skirmish/script/parser.hpp"

namespace skirmish::script {

// default_team1_attack reproduces the classic map-script bug: units walk to
// the enemy spawn point, hold there, and never fire a shot.
inline const std::map<std::string, std::string>& builtin_sources() {
    static const std::map<std::string, std::string> sources = {
        {"default_team1_attack", "fallback: move_toward_enemy_spawn;\n"},
        {"hate_attack", "fallback: attack_highest_hate;\n"},
        {"attack_nearest", "fallback: attack_nearest;\n"},
        {"attack_weakest", "fallback: attack_weakest;\n"},
        {"focus_fire", "fallback: attack_focus;\n"},
        {"kite",
         "when cooldown_ready and enemies_in_range >= 1: attack_nearest;\n"
         "fallback: move_away_from_nearest_enemy;\n"},
    };
    return sources;
}

inline const std::map<std::string, DecisionTree>& builtin_scripts() {
    static const std::map<std::string, DecisionTree> parsed = [] {
        std::map<std::string, DecisionTree> out;
        for (const auto& [name, text] : builtin_sources()) {
            out.emplace(name, parse_script({text, name}));
        }
        return out;
    }();
    return parsed;
}

inline const DecisionTree& builtin_script(const std::string& name) {
    const auto& lib = builtin_scripts();
    auto it = lib.find(name);
    if (it == lib.end()) throw ConfigError("unknown builtin script '" + name + "'");
    return it->second;
}

inline bool is_builtin_script(const std::string& name) {
    return builtin_scripts().count(name) > 0;
}

}  // namespace skirmish::script
