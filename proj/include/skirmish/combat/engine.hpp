// Deterministic two-team combat stepping. All resolution reads come from the
// pre-step state and results are applied together, so within-player command
// order never matters. Everything is fixed-point; there is no engine-level
// auto-attack.
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "skirmish/combat/types.hpp"
#include "skirmish/core/error.hpp"
#include "skirmish/core/fixed.hpp"
#include "skirmish/core/rng.hpp"

namespace skirmish::combat {

// Cardinal displacement clamped to [0, map_width] x [0, map_height].
inline Vec2 move_unit(Vec2 pos, Direction dir, Fixed speed, Fixed map_width, Fixed map_height) {
    switch (dir) {
        case Direction::North: pos.y += speed; break;
        case Direction::South: pos.y -= speed; break;
        case Direction::East: pos.x += speed; break;
        case Direction::West: pos.x -= speed; break;
    }
    pos.x = clamp(pos.x, Fixed::zero(), map_width);
    pos.y = clamp(pos.y, Fixed::zero(), map_height);
    return pos;
}

inline BattleStatus check_terminal(const BattleContext& ctx, const BattleState& state) {
    int living1 = 0;
    int living2 = 0;
    for (const auto& u : state.units) {
        if (!u.alive()) continue;
        (u.player == 1 ? living1 : living2)++;
    }
    if (living1 == 0 && living2 == 0) return BattleStatus::Draw;
    if (living2 == 0) return BattleStatus::P1Win;
    if (living1 == 0) return BattleStatus::P2Win;
    if (state.step >= ctx.scenario.step_limit) return BattleStatus::Draw;
    return BattleStatus::Ongoing;
}

namespace detail {

struct LatticePlacement {
    std::vector<Vec2> positions;  // roster order, inside the given rect
};

// Square-ish lattice filling the rect from its low corner, row-major in
// roster order, with a seeded whole-lattice offset inside the free space.
inline LatticePlacement lattice_in_rect(const Rect& rect, int count, uint32_t jitter_x,
                                        uint32_t jitter_y) {
    const Fixed spacing = Fixed::from_int(2);
    int cols = 1;
    while (cols * cols < count) ++cols;
    int rows = (count + cols - 1) / cols;

    auto axis_spacing = [&](Fixed extent, int cells) {
        if (cells <= 1) return Fixed::zero();
        Fixed s = spacing;
        Fixed fitted = Fixed(extent.raw / (cells - 1));
        return min(s, fitted);
    };
    Fixed sx = axis_spacing(rect.width(), cols);
    Fixed sy = axis_spacing(rect.height(), rows);
    Fixed used_w = Fixed(sx.raw * (cols - 1));
    Fixed used_h = Fixed(sy.raw * (rows - 1));
    Fixed free_w = rect.width() - used_w;
    Fixed free_h = rect.height() - used_h;

    Vec2 anchor{rect.x0 + Fixed(static_cast<int64_t>(jitter_x % (free_w.raw + 1))),
                rect.y0 + Fixed(static_cast<int64_t>(jitter_y % (free_h.raw + 1)))};

    LatticePlacement out;
    out.positions.reserve(count);
    for (int i = 0; i < count; ++i) {
        int row = i / cols;
        int col = i % cols;
        out.positions.push_back({anchor.x + Fixed(sx.raw * col), anchor.y + Fixed(sy.raw * row)});
    }
    return out;
}

}  // namespace detail

// Places both rosters on seeded lattices. Player 2 is laid out in the
// point-mirrored frame and reflected back, so mirrored spawn rects yield an
// exactly point-symmetric battle for any seed.
inline BattleState load_scenario(const BattleContext& ctx, uint64_t seed) {
    const ScenarioConfig& sc = ctx.scenario;
    Pcg32 rng = Pcg32::derive(seed, 0x5350574eull /* spawn */);
    uint32_t jx = rng.next_u32();
    uint32_t jy = rng.next_u32();

    BattleState state;
    state.step = 0;
    state.status = BattleStatus::Ongoing;

    auto p1 = detail::lattice_in_rect(sc.team1_spawn, static_cast<int>(sc.team1_roster.size()),
                                      jx, jy);
    Vec2 map_max{sc.map_width, sc.map_height};
    Rect mirrored{map_max.x - sc.team2_spawn.x1, map_max.y - sc.team2_spawn.y1,
                  map_max.x - sc.team2_spawn.x0, map_max.y - sc.team2_spawn.y0};
    auto p2 = detail::lattice_in_rect(mirrored, static_cast<int>(sc.team2_roster.size()), jx, jy);

    for (int i = 0; i < static_cast<int>(sc.team1_roster.size()); ++i) {
        UnitState u;
        u.unit_id = i;
        u.player = 1;
        u.archetype = ctx.team1_archetypes[i];
        u.position = p1.positions[i];
        u.hp = ctx.archetypes[u.archetype].max_hp;
        u.shield = ctx.archetypes[u.archetype].max_shield;
        state.units.push_back(std::move(u));
    }
    for (int i = 0; i < static_cast<int>(sc.team2_roster.size()); ++i) {
        UnitState u;
        u.unit_id = i;
        u.player = 2;
        u.archetype = ctx.team2_archetypes[i];
        u.position = {map_max.x - p2.positions[i].x, map_max.y - p2.positions[i].y};
        u.hp = ctx.archetypes[u.archetype].max_hp;
        u.shield = ctx.archetypes[u.archetype].max_shield;
        state.units.push_back(std::move(u));
    }
    return state;
}

namespace detail {

struct PendingShot {
    int attacker = 0;  // index into units
    int target = 0;
    Fixed amount;      // post-armor, at least one point
};

inline int unit_index(const BattleState& state, int player, int unit_id) {
    for (int i = 0; i < static_cast<int>(state.units.size()); ++i) {
        if (state.units[i].player == player && state.units[i].unit_id == unit_id) return i;
    }
    return -1;
}

}  // namespace detail

namespace detail {

// Canonicalizes an issued-command list into slot order, so the caller's list
// order can never influence resolution.
inline std::vector<UnitCommand> to_slots(const BattleContext& ctx, int player,
                                         std::span<const IssuedCommand> commands) {
    size_t n = player == 1 ? ctx.scenario.team1_roster.size() : ctx.scenario.team2_roster.size();
    if (commands.size() != n) {
        throw ProtocolError("player " + std::to_string(player) + ": expected " +
                            std::to_string(n) + " commands, got " +
                            std::to_string(commands.size()));
    }
    std::vector<UnitCommand> slots(n);
    std::vector<bool> seen(n, false);
    for (const auto& ic : commands) {
        if (ic.unit_id < 0 || ic.unit_id >= static_cast<int>(n)) {
            throw ProtocolError("player " + std::to_string(player) + ": unknown unit #" +
                                std::to_string(ic.unit_id));
        }
        if (seen[ic.unit_id]) {
            throw ProtocolError("player " + std::to_string(player) + ": duplicate command for #" +
                                std::to_string(ic.unit_id));
        }
        seen[ic.unit_id] = true;
        slots[ic.unit_id] = ic.command;
    }
    return slots;
}

}  // namespace detail

// Advances the battle by one step in place. One command per roster slot of
// each player, in any order; dead units must be given noop.
inline StepOutcome step_in_place(const BattleContext& ctx, BattleState& state,
                                 std::span<const IssuedCommand> issued_p1,
                                 std::span<const IssuedCommand> issued_p2) {
    if (state.status != BattleStatus::Ongoing) {
        throw ProtocolError("step on a terminated battle");
    }
    const size_t n1 = ctx.scenario.team1_roster.size();
    const size_t n2 = ctx.scenario.team2_roster.size();
    const std::vector<UnitCommand> commands_p1 = detail::to_slots(ctx, 1, issued_p1);
    const std::vector<UnitCommand> commands_p2 = detail::to_slots(ctx, 2, issued_p2);

    auto command_for = [&](const UnitState& u) -> const UnitCommand& {
        return u.player == 1 ? commands_p1[u.unit_id] : commands_p2[u.unit_id];
    };

    // Validate against the pre-step state.
    for (const auto& u : state.units) {
        const UnitCommand& cmd = command_for(u);
        if (!u.alive()) {
            if (cmd.kind != UnitCommand::Kind::Noop) {
                throw IllegalActionError("non-noop command for dead unit p" +
                                         std::to_string(u.player) + "#" +
                                         std::to_string(u.unit_id));
            }
            continue;
        }
        if (cmd.kind == UnitCommand::Kind::Attack) {
            size_t enemy_count = u.player == 1 ? n2 : n1;
            if (cmd.target < 0 || cmd.target >= static_cast<int>(enemy_count)) {
                throw ProtocolError("attack target #" + std::to_string(cmd.target) +
                                    " not present in scenario");
            }
        }
    }

    // Phase 1: collect landed shots from the pre-step snapshot.
    std::vector<detail::PendingShot> shots;
    std::vector<bool> fired(state.units.size(), false);
    for (int i = 0; i < static_cast<int>(state.units.size()); ++i) {
        const UnitState& u = state.units[i];
        if (!u.alive()) continue;
        const UnitCommand& cmd = command_for(u);
        if (cmd.kind != UnitCommand::Kind::Attack || u.cooldown_remaining != 0) continue;
        int enemy_player = u.player == 1 ? 2 : 1;
        int t = detail::unit_index(state, enemy_player, cmd.target);
        if (t < 0) continue;
        const UnitState& target = state.units[t];
        if (!target.alive()) continue;  // stale order, shot fizzles
        const UnitArchetype& arch = ctx.arch_of(u);
        if (!within(u.position, target.position, arch.attack_range)) continue;
        Fixed amount = max(Fixed::one(), arch.damage - ctx.arch_of(target).armor);
        shots.push_back({i, t, amount});
        fired[i] = true;
    }

    // Phase 2: movement, displacements computed from pre-step positions.
    for (auto& u : state.units) {
        if (!u.alive()) continue;
        const UnitCommand& cmd = command_for(u);
        if (cmd.kind == UnitCommand::Kind::Move) {
            u.position = move_unit(u.position, cmd.dir, ctx.arch_of(u).move_speed,
                                   ctx.scenario.map_width, ctx.scenario.map_height);
        }
    }

    // Phase 3: damage, applied in canonical (target, attacker) order so the
    // shield/hp split in the outcome is permutation-invariant too.
    std::sort(shots.begin(), shots.end(), [](const auto& a, const auto& b) {
        return std::tie(a.target, a.attacker) < std::tie(b.target, b.attacker);
    });

    // Hate decays before fresh damage lands, so the newest damage dominates.
    for (auto& u : state.units) {
        if (!u.alive()) continue;
        for (auto& [enemy, value] : u.hate) value = Fixed(value.raw * 99 / 100);
    }

    StepOutcome outcome;
    std::vector<bool> damaged(state.units.size(), false);
    for (const auto& shot : shots) {
        UnitState& target = state.units[shot.target];
        const UnitState& attacker = state.units[shot.attacker];
        Fixed to_shield = min(target.shield, shot.amount);
        Fixed to_hp = min(target.hp, shot.amount - to_shield);
        target.shield -= to_shield;
        target.hp -= to_hp;
        damaged[shot.target] = true;
        target.hate[attacker.unit_id] += to_shield + to_hp;
        outcome.damage_events.push_back({attacker.player, attacker.unit_id, target.player,
                                         target.unit_id, to_shield, to_hp});
    }

    // Phase 4: cooldowns, damage timers, shield regen, kills.
    for (int i = 0; i < static_cast<int>(state.units.size()); ++i) {
        UnitState& u = state.units[i];
        if (u.hp.raw == 0 && damaged[i]) {
            outcome.kills.push_back({u.player, u.unit_id});
            continue;
        }
        if (!u.alive()) continue;
        const UnitArchetype& arch = ctx.arch_of(u);
        int cd = fired[i] ? arch.cooldown_steps : u.cooldown_remaining;
        u.cooldown_remaining = cd > 0 ? cd - 1 : 0;
        u.steps_since_damaged = damaged[i] ? 0 : u.steps_since_damaged + 1;
        if (u.steps_since_damaged >= arch.shield_regen_delay && u.shield < arch.max_shield) {
            u.shield = min(arch.max_shield, u.shield + arch.shield_regen_rate);
        }
    }

    state.step += 1;
    state.status = check_terminal(ctx, state);
    outcome.status_after = state.status;
    return outcome;
}

// Pure-value flavor of the stepper.
inline std::pair<BattleState, StepOutcome> step(const BattleContext& ctx, const BattleState& state,
                                                std::span<const IssuedCommand> commands_p1,
                                                std::span<const IssuedCommand> commands_p2) {
    BattleState next = state;
    StepOutcome outcome = step_in_place(ctx, next, commands_p1, commands_p2);
    return {std::move(next), std::move(outcome)};
}

// Slot-ordered convenience wrapper: entry i addresses unit i.
inline std::vector<IssuedCommand> address_slots(const std::vector<UnitCommand>& commands) {
    std::vector<IssuedCommand> out;
    out.reserve(commands.size());
    for (int i = 0; i < static_cast<int>(commands.size()); ++i) out.push_back({i, commands[i]});
    return out;
}

}  // namespace skirmish::combat
