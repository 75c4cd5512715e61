// Loaders for the two structured data files: the unit stat table and
// scenario definitions. Schemas are documented in docs/file_formats.md.
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skirmish/combat/types.hpp"
#include "skirmish/core/error.hpp"

namespace skirmish::combat {

using StatTable = std::map<std::string, UnitArchetype>;

namespace detail {

inline Fixed json_fixed(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw ConfigError(std::string("missing or non-numeric field '") + key + "'");
    }
    return Fixed::from_double(j[key].get<double>());
}

inline int json_int(const nlohmann::json& j, const char* key, int fallback = INT32_MIN) {
    if (!j.contains(key)) {
        if (fallback != INT32_MIN) return fallback;
        throw ConfigError(std::string("missing field '") + key + "'");
    }
    return j[key].get<int>();
}

inline nlohmann::json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace detail

inline void validate(const UnitArchetype& a) {
    auto bad = [&](const std::string& why) {
        throw ConfigError("archetype '" + a.name + "': " + why);
    };
    if (a.name.empty()) bad("empty name");
    if (a.max_hp.raw <= 0) bad("max_hp must be positive");
    if (a.max_shield.raw < 0 || a.armor.raw < 0 || a.damage.raw < 0 ||
        a.attack_range.raw < 0 || a.sight_range.raw < 0 || a.cooldown_steps < 0 ||
        a.move_speed.raw < 0 || a.shield_regen_rate.raw < 0 || a.shield_regen_delay < 0) {
        bad("all numeric fields must be non-negative");
    }
    if (a.move_speed.raw == 0 && a.attack_range.raw == 0) {
        bad("move_speed and attack_range cannot both be zero");
    }
    if (a.attack_range > a.sight_range) bad("attack_range exceeds sight_range");
}

inline UnitArchetype archetype_from_json(const nlohmann::json& j) {
    UnitArchetype a;
    if (!j.contains("name") || !j["name"].is_string()) throw ConfigError("archetype missing name");
    a.name = j["name"].get<std::string>();
    a.max_hp = detail::json_fixed(j, "max_hp");
    a.max_shield = detail::json_fixed(j, "max_shield");
    a.armor = detail::json_fixed(j, "armor");
    a.damage = detail::json_fixed(j, "damage");
    a.attack_range = detail::json_fixed(j, "attack_range");
    a.sight_range = detail::json_fixed(j, "sight_range");
    a.cooldown_steps = detail::json_int(j, "cooldown_steps");
    a.move_speed = detail::json_fixed(j, "move_speed");
    a.shield_regen_rate = detail::json_fixed(j, "shield_regen_rate");
    a.shield_regen_delay = detail::json_int(j, "shield_regen_delay");
    validate(a);
    return a;
}

inline StatTable stat_table_from_json(const nlohmann::json& j) {
    if (!j.contains("archetypes") || !j["archetypes"].is_array()) {
        throw ConfigError("stat table: missing 'archetypes' array");
    }
    StatTable table;
    for (const auto& entry : j["archetypes"]) {
        UnitArchetype a = archetype_from_json(entry);
        if (table.count(a.name)) throw ConfigError("duplicate archetype '" + a.name + "'");
        table.emplace(a.name, std::move(a));
    }
    if (table.empty()) throw ConfigError("stat table: no archetypes");
    return table;
}

inline StatTable load_stat_table(const std::string& path) {
    return stat_table_from_json(detail::parse_file(path));
}

inline Rect rect_from_json(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 4) {
        throw ConfigError(std::string("scenario: '") + key + "' must be [x0, y0, x1, y1]");
    }
    Rect r{Fixed::from_double(j[key][0].get<double>()), Fixed::from_double(j[key][1].get<double>()),
           Fixed::from_double(j[key][2].get<double>()), Fixed::from_double(j[key][3].get<double>())};
    if (r.x0 > r.x1 || r.y0 > r.y1) {
        throw ConfigError(std::string("scenario: '") + key + "' corners out of order");
    }
    return r;
}

inline void validate(const ScenarioConfig& s, const StatTable& table) {
    auto bad = [&](const std::string& why) {
        throw ConfigError("scenario '" + s.name + "': " + why);
    };
    if (s.map_width.raw <= 0 || s.map_height.raw <= 0) bad("map dimensions must be positive");
    Rect map{Fixed::zero(), Fixed::zero(), s.map_width, s.map_height};
    for (const Rect* r : {&s.team1_spawn, &s.team2_spawn}) {
        if (r->x0 < map.x0 || r->y0 < map.y0 || r->x1 > map.x1 || r->y1 > map.y1) {
            bad("spawn region outside map bounds");
        }
    }
    if (s.team1_spawn.overlaps(s.team2_spawn)) bad("spawn regions overlap");
    if (s.team1_roster.empty() || s.team2_roster.empty()) bad("rosters must be non-empty");
    if (s.step_limit <= 0) bad("step_limit must be positive");
    if (s.difficulty < 1 || s.difficulty > 7) bad("difficulty must be in 1..7");
    for (const auto* roster : {&s.team1_roster, &s.team2_roster}) {
        for (const auto& name : *roster) {
            if (!table.count(name)) bad("unknown archetype '" + name + "'");
        }
    }
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    ScenarioConfig s;
    s.name = j.value("name", "unnamed");
    s.map_width = detail::json_fixed(j, "map_width");
    s.map_height = detail::json_fixed(j, "map_height");
    s.team1_spawn = rect_from_json(j, "team1_spawn");
    s.team2_spawn = rect_from_json(j, "team2_spawn");
    for (const char* key : {"team1_roster", "team2_roster"}) {
        if (!j.contains(key) || !j[key].is_array()) {
            throw ConfigError(std::string("scenario: missing '") + key + "' array");
        }
    }
    s.team1_roster = j["team1_roster"].get<std::vector<std::string>>();
    s.team2_roster = j["team2_roster"].get<std::vector<std::string>>();
    s.step_limit = detail::json_int(j, "step_limit");
    s.difficulty = detail::json_int(j, "difficulty", 7);
    return s;
}

inline ScenarioConfig load_scenario_config(const std::string& path, const StatTable& table) {
    ScenarioConfig s = scenario_from_json(detail::parse_file(path));
    validate(s, table);
    return s;
}

inline nlohmann::json to_json(const ScenarioConfig& s) {
    auto rect = [](const Rect& r) {
        return nlohmann::json::array(
            {r.x0.to_double(), r.y0.to_double(), r.x1.to_double(), r.y1.to_double()});
    };
    return nlohmann::json{{"name", s.name},
                          {"map_width", s.map_width.to_double()},
                          {"map_height", s.map_height.to_double()},
                          {"team1_spawn", rect(s.team1_spawn)},
                          {"team2_spawn", rect(s.team2_spawn)},
                          {"team1_roster", s.team1_roster},
                          {"team2_roster", s.team2_roster},
                          {"step_limit", s.step_limit},
                          {"difficulty", s.difficulty}};
}

// Resolves roster archetype names against the table and builds the
// deduplicated per-battle archetype list.
inline BattleContext make_context(const ScenarioConfig& scenario, const StatTable& table) {
    validate(scenario, table);
    BattleContext ctx;
    ctx.scenario = scenario;
    std::map<std::string, int> index_of;
    auto resolve = [&](const std::string& name) {
        auto it = index_of.find(name);
        if (it != index_of.end()) return it->second;
        int idx = static_cast<int>(ctx.archetypes.size());
        ctx.archetypes.push_back(table.at(name));
        index_of.emplace(name, idx);
        return idx;
    };
    for (const auto& name : scenario.team1_roster) ctx.team1_archetypes.push_back(resolve(name));
    for (const auto& name : scenario.team2_roster) ctx.team2_archetypes.push_back(resolve(name));
    return ctx;
}

}  // namespace skirmish::combat
