// Replay logs: JSON-lines, one header record plus one record per step, with
// fixed-point raw integers so re-simulation can be checked for exact
// equality. Schema in docs/replay_format.md.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skirmish/combat/data.hpp"
#include "skirmish/combat/engine.hpp"
#include "skirmish/core/error.hpp"

namespace skirmish::eval {

inline constexpr int kReplayVersion = 1;

struct ReplaySnapshot {
    int player = 0;
    int unit_id = 0;
    int64_t x_raw = 0;
    int64_t y_raw = 0;
    int64_t hp_raw = 0;
    int64_t shield_raw = 0;

    friend bool operator==(const ReplaySnapshot&, const ReplaySnapshot&) = default;
};

struct ReplayStep {
    std::vector<combat::IssuedCommand> commands_p1;
    std::vector<combat::IssuedCommand> commands_p2;
    std::vector<combat::DamageEvent> damage_events;
    std::vector<ReplaySnapshot> units;  // after the step
    std::string status;
};

struct ReplayLog {
    int version = kReplayVersion;
    nlohmann::json scenario;    // full scenario record
    nlohmann::json archetypes;  // resolved stat blocks, by name
    uint64_t seed = 0;
    int script_index = -1;
    std::string config_hash;
    std::vector<ReplaySnapshot> initial;
    std::vector<ReplayStep> steps;
};

inline std::vector<ReplaySnapshot> snapshot_units(const combat::BattleState& state) {
    std::vector<ReplaySnapshot> out;
    out.reserve(state.units.size());
    for (const auto& u : state.units) {
        out.push_back({u.player, u.unit_id, u.position.x.raw, u.position.y.raw, u.hp.raw,
                       u.shield.raw});
    }
    return out;
}

namespace detail {

inline nlohmann::json command_to_json(const combat::IssuedCommand& ic) {
    using K = combat::UnitCommand::Kind;
    nlohmann::json j{{"u", ic.unit_id}};
    switch (ic.command.kind) {
        case K::Noop: j["k"] = "noop"; break;
        case K::Stop: j["k"] = "stop"; break;
        case K::Move:
            j["k"] = "move";
            j["d"] = static_cast<int>(ic.command.dir);
            break;
        case K::Attack:
            j["k"] = "attack";
            j["t"] = ic.command.target;
            break;
    }
    return j;
}

inline combat::IssuedCommand command_from_json(const nlohmann::json& j) {
    combat::IssuedCommand ic;
    ic.unit_id = j.at("u").get<int>();
    std::string k = j.at("k").get<std::string>();
    if (k == "noop") {
        ic.command = combat::UnitCommand::noop();
    } else if (k == "stop") {
        ic.command = combat::UnitCommand::stop();
    } else if (k == "move") {
        ic.command = combat::UnitCommand::move(static_cast<combat::Direction>(j.at("d").get<int>()));
    } else if (k == "attack") {
        ic.command = combat::UnitCommand::attack(j.at("t").get<int>());
    } else {
        throw ConfigError("unknown command kind '" + k + "'");
    }
    return ic;
}

inline nlohmann::json snapshot_to_json(const ReplaySnapshot& s) {
    return nlohmann::json{{"p", s.player}, {"u", s.unit_id},   {"x", s.x_raw},
                          {"y", s.y_raw},  {"hp", s.hp_raw},   {"sh", s.shield_raw}};
}

inline ReplaySnapshot snapshot_from_json(const nlohmann::json& j) {
    return {j.at("p").get<int>(),  j.at("u").get<int>(),  j.at("x").get<int64_t>(),
            j.at("y").get<int64_t>(), j.at("hp").get<int64_t>(), j.at("sh").get<int64_t>()};
}

inline nlohmann::json event_to_json(const combat::DamageEvent& e) {
    return nlohmann::json{{"ap", e.attacker_player}, {"ai", e.attacker_id},
                          {"tp", e.target_player},   {"ti", e.target_id},
                          {"sd", e.shield_damage.raw}, {"hd", e.hp_damage.raw}};
}

inline combat::DamageEvent event_from_json(const nlohmann::json& j) {
    return {j.at("ap").get<int>(), j.at("ai").get<int>(),        j.at("tp").get<int>(),
            j.at("ti").get<int>(), Fixed(j.at("sd").get<int64_t>()),
            Fixed(j.at("hd").get<int64_t>())};
}

}  // namespace detail

inline void write_replay(const ReplayLog& log, std::ostream& out) {
    nlohmann::json header{{"record", "header"},
                          {"version", log.version},
                          {"scenario", log.scenario},
                          {"archetypes", log.archetypes},
                          {"seed", log.seed},
                          {"script_index", log.script_index},
                          {"config_hash", log.config_hash}};
    nlohmann::json initial = nlohmann::json::array();
    for (const auto& s : log.initial) initial.push_back(detail::snapshot_to_json(s));
    header["initial"] = initial;
    out << header.dump() << "\n";
    for (const auto& step : log.steps) {
        nlohmann::json j{{"record", "step"}, {"status", step.status}};
        for (const char* key : {"c1", "c2"}) {
            const auto& cmds = key[1] == '1' ? step.commands_p1 : step.commands_p2;
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& c : cmds) arr.push_back(detail::command_to_json(c));
            j[key] = arr;
        }
        nlohmann::json events = nlohmann::json::array();
        for (const auto& e : step.damage_events) events.push_back(detail::event_to_json(e));
        j["events"] = events;
        nlohmann::json units = nlohmann::json::array();
        for (const auto& u : step.units) units.push_back(detail::snapshot_to_json(u));
        j["units"] = units;
        out << j.dump() << "\n";
    }
}

inline void write_replay(const ReplayLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write replay " + path);
    write_replay(log, out);
}

inline ReplayLog read_replay(std::istream& in) {
    ReplayLog log;
    std::string line;
    int record_index = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            std::string kind = j.at("record").get<std::string>();
            if (kind == "header") {
                log.version = j.at("version").get<int>();
                if (log.version != kReplayVersion) {
                    throw ConfigError("unsupported replay version " +
                                      std::to_string(log.version));
                }
                log.scenario = j.at("scenario");
                log.archetypes = j.at("archetypes");
                log.seed = j.at("seed").get<uint64_t>();
                log.script_index = j.at("script_index").get<int>();
                log.config_hash = j.at("config_hash").get<std::string>();
                for (const auto& u : j.at("initial")) {
                    log.initial.push_back(detail::snapshot_from_json(u));
                }
                have_header = true;
            } else if (kind == "step") {
                ReplayStep step;
                for (const auto& c : j.at("c1")) {
                    step.commands_p1.push_back(detail::command_from_json(c));
                }
                for (const auto& c : j.at("c2")) {
                    step.commands_p2.push_back(detail::command_from_json(c));
                }
                for (const auto& e : j.at("events")) {
                    step.damage_events.push_back(detail::event_from_json(e));
                }
                for (const auto& u : j.at("units")) {
                    step.units.push_back(detail::snapshot_from_json(u));
                }
                step.status = j.at("status").get<std::string>();
                log.steps.push_back(std::move(step));
            } else {
                throw ConfigError("unknown record kind '" + kind + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("malformed replay record " + std::to_string(record_index) + ": " +
                              e.what());
        }
        ++record_index;
    }
    if (!have_header) throw ConfigError("replay has no header record");
    return log;
}

inline ReplayLog read_replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open replay " + path);
    return read_replay(in);
}

// Rebuilds the battle context embedded in the header.
inline combat::BattleContext replay_context(const ReplayLog& log) {
    combat::StatTable table;
    for (const auto& record : log.archetypes) {
        combat::UnitArchetype a = combat::archetype_from_json(record);
        table.emplace(a.name, std::move(a));
    }
    return combat::make_context(combat::scenario_from_json(log.scenario), table);
}

// Re-simulates the logged commands through the engine and checks every
// logged state for exact equality. Throws ProtocolError on divergence.
inline void resimulate(const ReplayLog& log) {
    combat::BattleContext ctx = replay_context(log);
    combat::BattleState state = combat::load_scenario(ctx, log.seed);
    if (snapshot_units(state) != log.initial) {
        throw ProtocolError("replay mismatch in the initial state");
    }
    for (size_t i = 0; i < log.steps.size(); ++i) {
        const ReplayStep& step = log.steps[i];
        combat::step_in_place(ctx, state, step.commands_p1, step.commands_p2);
        if (snapshot_units(state) != step.units) {
            throw ProtocolError("replay mismatch at step " + std::to_string(i));
        }
        if (step.status != combat::to_string(state.status)) {
            throw ProtocolError("replay status mismatch at step " + std::to_string(i));
        }
    }
}

// ASCII storyboard: one frame per step (plus the initial frame), top row
// north. Player 1 prints as digits, player 2 as letters.
inline std::string render_replay(const ReplayLog& log) {
    combat::BattleContext ctx = replay_context(log);
    int64_t w = ctx.scenario.map_width.floor_int() + 1;
    int64_t h = ctx.scenario.map_height.floor_int() + 1;
    int64_t sx = (w + 63) / 64;  // keep frames at most 64 columns wide
    int64_t sy = sx;

    std::ostringstream out;
    out << "replay " << log.scenario.value("name", "?") << " seed " << log.seed
        << " script_index " << log.script_index << " steps " << log.steps.size() << "\n";

    auto frame = [&](const std::vector<ReplaySnapshot>& units, const std::string& title) {
        std::vector<std::string> grid(h / sy + 1, std::string(w / sx + 1, '.'));
        for (const auto& u : units) {
            if (u.hp_raw <= 0) continue;
            int64_t cx = (u.x_raw / Fixed::kScale) / sx;
            int64_t cy = (u.y_raw / Fixed::kScale) / sy;
            char glyph = u.player == 1 ? static_cast<char>('0' + u.unit_id % 10)
                                       : static_cast<char>('A' + u.unit_id % 26);
            grid[grid.size() - 1 - cy][cx] = glyph;
        }
        out << "-- " << title << "\n";
        for (const auto& row : grid) out << row << "\n";
    };

    frame(log.initial, "step 0 (initial)");
    for (size_t i = 0; i < log.steps.size(); ++i) {
        const auto& step = log.steps[i];
        std::ostringstream title;
        title << "step " << (i + 1) << " status " << step.status << " events "
              << step.damage_events.size();
        frame(step.units, title.str());
    }
    return out.str();
}

}  // namespace skirmish::eval
