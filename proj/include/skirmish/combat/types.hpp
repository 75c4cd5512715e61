#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "skirmish/core/fixed.hpp"

namespace skirmish::combat {

struct UnitArchetype {
    std::string name;
    Fixed max_hp;
    Fixed max_shield;        // 0 for unshielded archetypes
    Fixed armor;             // flat reduction per landed shot
    Fixed damage;            // per shot, before armor
    Fixed attack_range;
    Fixed sight_range;
    int cooldown_steps = 0;  // steps between shots
    Fixed move_speed;        // map units per step
    Fixed shield_regen_rate; // shield points per step
    int shield_regen_delay = 0;  // undamaged steps before regen resumes
};

enum class Direction : uint8_t { North, South, East, West };

struct UnitCommand {
    enum class Kind : uint8_t { Noop, Stop, Move, Attack };

    Kind kind = Kind::Noop;
    Direction dir = Direction::North;  // Move only
    int target = -1;                   // Attack only: enemy unit_id

    static UnitCommand noop() { return {}; }
    static UnitCommand stop() { return {Kind::Stop, Direction::North, -1}; }
    static UnitCommand move(Direction d) { return {Kind::Move, d, -1}; }
    static UnitCommand attack(int enemy_unit_id) {
        return {Kind::Attack, Direction::North, enemy_unit_id};
    }

    friend bool operator==(const UnitCommand&, const UnitCommand&) = default;
};

// A command addressed to one of the issuing player's units. The engine takes
// one entry per roster slot in any order; list order never affects stepping.
struct IssuedCommand {
    int unit_id = 0;
    UnitCommand command;

    friend bool operator==(const IssuedCommand&, const IssuedCommand&) = default;
};

struct UnitState {
    int unit_id = 0;    // unique within a player, 0-based in roster order
    int player = 1;     // 1 or 2
    int archetype = 0;  // index into BattleContext::archetypes
    Vec2 position;
    Fixed hp;
    Fixed shield;
    int cooldown_remaining = 0;
    int steps_since_damaged = 0;
    std::map<int, Fixed> hate;  // enemy unit_id -> accumulated hate

    bool alive() const { return hp.raw > 0; }

    friend bool operator==(const UnitState&, const UnitState&) = default;
};

struct Rect {
    Fixed x0, y0, x1, y1;  // inclusive corners, x0 <= x1, y0 <= y1

    Fixed width() const { return x1 - x0; }
    Fixed height() const { return y1 - y0; }
    Vec2 center() const { return {Fixed((x0.raw + x1.raw) / 2), Fixed((y0.raw + y1.raw) / 2)}; }
    bool overlaps(const Rect& o) const {
        return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
    }
};

struct ScenarioConfig {
    std::string name;
    Fixed map_width;
    Fixed map_height;
    Rect team1_spawn;
    Rect team2_spawn;
    std::vector<std::string> team1_roster;  // archetype names, ordered
    std::vector<std::string> team2_roster;
    int step_limit = 0;
    int difficulty = 7;  // 1..7, opponent scripts re-evaluate every 8-d steps

    int n_agents() const { return static_cast<int>(team1_roster.size()); }
};

enum class BattleStatus : uint8_t { Ongoing, P1Win, P2Win, Draw };

inline const char* to_string(BattleStatus s) {
    switch (s) {
        case BattleStatus::Ongoing: return "ongoing";
        case BattleStatus::P1Win: return "p1_win";
        case BattleStatus::P2Win: return "p2_win";
        case BattleStatus::Draw: return "draw";
    }
    return "?";
}

struct BattleState {
    int step = 0;
    std::vector<UnitState> units;  // player-1 block first, then player-2
    BattleStatus status = BattleStatus::Ongoing;

    friend bool operator==(const BattleState&, const BattleState&) = default;
};

struct DamageEvent {
    int attacker_player = 0;
    int attacker_id = 0;
    int target_player = 0;
    int target_id = 0;
    Fixed shield_damage;
    Fixed hp_damage;
};

struct KilledUnit {
    int player = 0;
    int unit_id = 0;
};

struct StepOutcome {
    std::vector<DamageEvent> damage_events;  // sorted by (target, attacker)
    std::vector<KilledUnit> kills;
    BattleStatus status_after = BattleStatus::Ongoing;
};

// Immutable per-battle context resolved from a scenario: the stepping
// functions take (context, state) so BattleState stays a pure value.
struct BattleContext {
    ScenarioConfig scenario;
    std::vector<UnitArchetype> archetypes;  // deduped, indexed by UnitState::archetype
    std::vector<int> team1_archetypes;      // per roster slot
    std::vector<int> team2_archetypes;

    const UnitArchetype& arch_of(const UnitState& u) const { return archetypes[u.archetype]; }
    Vec2 spawn_center(int player) const {
        return player == 1 ? scenario.team1_spawn.center() : scenario.team2_spawn.center();
    }
};

}  // namespace skirmish::combat
