// Observation, state, and mask encoders. Layouts are a pure function of the
// scenario roster and are documented in docs/observation_layout.md.
//
// All spatial features are expressed in the requesting team's frame: player 2
// sees the map point-mirrored, so for mirrored rosters the two players'
// encodings are structurally and numerically aligned (the self-play facade
// mirrors player-2 move actions back, see environment.hpp).
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "skirmish/combat/types.hpp"
#include "skirmish/core/error.hpp"

namespace skirmish::env {

using ObservationVector = std::vector<double>;
using StateVector = std::vector<double>;
using ActionMask = std::vector<uint8_t>;

// Action indices, per agent: [noop, stop, move x4, attack(enemy 0..n-1)].
inline constexpr int kActionNoop = 0;
inline constexpr int kActionStop = 1;
inline constexpr int kActionMoveBase = 2;  // north, south, east, west in team frame
inline constexpr int kActionAttackBase = 6;

struct ObsLayout {
    int n_team1 = 0;
    int n_team2 = 0;
    int n_arch = 0;                 // distinct archetypes in the scenario
    std::vector<int> onehot_index;  // ctx archetype index -> one-hot slot (name-sorted)

    static constexpr int kOwnBlock = 5;  // hp, shield, cooldown_ready, pos x, pos y
    int unit_block() const { return 6 + n_arch; }  // visible, rel x, rel y, dist, hp, shield, one-hot

    int n_enemies(int player) const { return player == 1 ? n_team2 : n_team1; }
    int n_allies(int player) const { return (player == 1 ? n_team1 : n_team2) - 1; }

    int obs_len(int player) const {
        return kOwnBlock + (n_enemies(player) + n_allies(player)) * unit_block();
    }
    // State uses one absolute block per unit: alive, hp, shield, cooldown_ready,
    // pos x, pos y, one-hot.
    int state_len() const { return (n_team1 + n_team2) * (6 + n_arch); }
    int mask_len(int player) const { return kActionAttackBase + n_enemies(player); }
};

inline ObsLayout make_layout(const combat::BattleContext& ctx) {
    ObsLayout layout;
    layout.n_team1 = static_cast<int>(ctx.scenario.team1_roster.size());
    layout.n_team2 = static_cast<int>(ctx.scenario.team2_roster.size());
    layout.n_arch = static_cast<int>(ctx.archetypes.size());
    std::vector<std::string> names;
    for (const auto& a : ctx.archetypes) names.push_back(a.name);
    std::sort(names.begin(), names.end());
    layout.onehot_index.resize(ctx.archetypes.size());
    for (size_t i = 0; i < ctx.archetypes.size(); ++i) {
        layout.onehot_index[i] = static_cast<int>(
            std::find(names.begin(), names.end(), ctx.archetypes[i].name) - names.begin());
    }
    return layout;
}

namespace detail {

// Team frame: identity for player 1, point mirror for player 2.
inline Vec2 frame_position(const combat::BattleContext& ctx, int player, Vec2 p) {
    if (player == 1) return p;
    return {ctx.scenario.map_width - p.x, ctx.scenario.map_height - p.y};
}

inline double frac(Fixed value, Fixed denom) {
    if (denom.raw <= 0) return 0.0;
    return static_cast<double>(value.raw) / static_cast<double>(denom.raw);
}

inline const combat::UnitState* find_unit(const combat::BattleState& state, int player,
                                          int unit_id) {
    for (const auto& u : state.units) {
        if (u.player == player && u.unit_id == unit_id) return &u;
    }
    return nullptr;
}

// Appends one observed-unit block relative to the observer, or zeros when the
// subject is dead or out of the observer's sight.
inline void append_unit_block(std::vector<double>& out, const combat::BattleContext& ctx,
                              const ObsLayout& layout, const combat::UnitState& observer,
                              const combat::UnitState* subject) {
    const Fixed sight = ctx.arch_of(observer).sight_range;
    if (!subject || !subject->alive() ||
        !within(observer.position, subject->position, sight)) {
        out.insert(out.end(), layout.unit_block(), 0.0);
        return;
    }
    Vec2 obs_f = frame_position(ctx, observer.player, observer.position);
    Vec2 sub_f = frame_position(ctx, observer.player, subject->position);
    Fixed dist = distance(observer.position, subject->position);
    const auto& arch = ctx.arch_of(*subject);
    out.push_back(1.0);
    out.push_back(frac(sub_f.x - obs_f.x, sight));
    out.push_back(frac(sub_f.y - obs_f.y, sight));
    out.push_back(frac(dist, sight));
    out.push_back(frac(subject->hp, arch.max_hp));
    out.push_back(frac(subject->shield, arch.max_shield));
    for (int k = 0; k < layout.n_arch; ++k) {
        out.push_back(layout.onehot_index[subject->archetype] == k ? 1.0 : 0.0);
    }
}

}  // namespace detail

inline ObservationVector encode_observation(const combat::BattleContext& ctx,
                                            const ObsLayout& layout,
                                            const combat::BattleState& state, int player,
                                            int agent_index) {
    int n_own = player == 1 ? layout.n_team1 : layout.n_team2;
    if (agent_index < 0 || agent_index >= n_own) {
        throw ProtocolError("unknown agent index " + std::to_string(agent_index));
    }
    ObservationVector out;
    out.reserve(layout.obs_len(player));
    const combat::UnitState* self = detail::find_unit(state, player, agent_index);
    if (!self || !self->alive()) {
        out.assign(layout.obs_len(player), 0.0);
        return out;
    }
    const auto& arch = ctx.arch_of(*self);
    Vec2 pos_f = detail::frame_position(ctx, player, self->position);
    out.push_back(detail::frac(self->hp, arch.max_hp));
    out.push_back(detail::frac(self->shield, arch.max_shield));
    out.push_back(self->cooldown_remaining == 0 ? 1.0 : 0.0);
    out.push_back(detail::frac(pos_f.x, ctx.scenario.map_width));
    out.push_back(detail::frac(pos_f.y, ctx.scenario.map_height));

    int enemy_player = player == 1 ? 2 : 1;
    for (int e = 0; e < layout.n_enemies(player); ++e) {
        detail::append_unit_block(out, ctx, layout, *self,
                                  detail::find_unit(state, enemy_player, e));
    }
    for (int a = 0; a < n_own; ++a) {
        if (a == agent_index) continue;
        detail::append_unit_block(out, ctx, layout, *self, detail::find_unit(state, player, a));
    }
    return out;
}

inline StateVector encode_state(const combat::BattleContext& ctx, const ObsLayout& layout,
                                const combat::BattleState& state, int player) {
    StateVector out;
    out.reserve(layout.state_len());
    auto append_team = [&](int team) {
        int n = team == 1 ? layout.n_team1 : layout.n_team2;
        for (int i = 0; i < n; ++i) {
            const combat::UnitState* u = detail::find_unit(state, team, i);
            if (!u || !u->alive()) {
                out.insert(out.end(), 6 + layout.n_arch, 0.0);
                continue;
            }
            const auto& arch = ctx.arch_of(*u);
            Vec2 pos_f = detail::frame_position(ctx, player, u->position);
            out.push_back(1.0);
            out.push_back(detail::frac(u->hp, arch.max_hp));
            out.push_back(detail::frac(u->shield, arch.max_shield));
            out.push_back(u->cooldown_remaining == 0 ? 1.0 : 0.0);
            out.push_back(detail::frac(pos_f.x, ctx.scenario.map_width));
            out.push_back(detail::frac(pos_f.y, ctx.scenario.map_height));
            for (int k = 0; k < layout.n_arch; ++k) {
                out.push_back(layout.onehot_index[u->archetype] == k ? 1.0 : 0.0);
            }
        }
    };
    append_team(player);          // requester's team first
    append_team(player == 1 ? 2 : 1);
    return out;
}

inline ActionMask available_actions(const combat::BattleContext& ctx, const ObsLayout& layout,
                                    const combat::BattleState& state, int player,
                                    int agent_index) {
    int n_own = player == 1 ? layout.n_team1 : layout.n_team2;
    if (agent_index < 0 || agent_index >= n_own) {
        throw ProtocolError("unknown agent index " + std::to_string(agent_index));
    }
    ActionMask mask(layout.mask_len(player), 0);
    const combat::UnitState* self = detail::find_unit(state, player, agent_index);
    if (!self || !self->alive()) {
        mask[kActionNoop] = 1;  // dead agents may only noop
        return mask;
    }
    mask[kActionStop] = 1;
    for (int d = 0; d < 4; ++d) mask[kActionMoveBase + d] = 1;
    int enemy_player = player == 1 ? 2 : 1;
    Fixed sight = ctx.arch_of(*self).sight_range;
    for (int e = 0; e < layout.n_enemies(player); ++e) {
        const combat::UnitState* enemy = detail::find_unit(state, enemy_player, e);
        if (enemy && enemy->alive() && within(self->position, enemy->position, sight)) {
            mask[kActionAttackBase + e] = 1;
        }
    }
    return mask;
}

// Inverse of decode_action: engine command -> action index for `player`.
inline int encode_action(int player, const combat::UnitCommand& cmd) {
    using combat::Direction;
    switch (cmd.kind) {
        case combat::UnitCommand::Kind::Noop: return kActionNoop;
        case combat::UnitCommand::Kind::Stop: return kActionStop;
        case combat::UnitCommand::Kind::Attack: return kActionAttackBase + cmd.target;
        case combat::UnitCommand::Kind::Move: break;
    }
    Direction d = cmd.dir;
    if (player == 2) {
        switch (d) {
            case Direction::North: d = Direction::South; break;
            case Direction::South: d = Direction::North; break;
            case Direction::East: d = Direction::West; break;
            case Direction::West: d = Direction::East; break;
        }
    }
    return kActionMoveBase + static_cast<int>(d);
}

// Decodes a masked action index into an engine command. Player-2 move
// directions are translated out of the mirrored team frame.
inline combat::UnitCommand decode_action(int player, int action) {
    using combat::Direction;
    using combat::UnitCommand;
    if (action == kActionNoop) return UnitCommand::noop();
    if (action == kActionStop) return UnitCommand::stop();
    if (action >= kActionMoveBase && action < kActionMoveBase + 4) {
        static constexpr Direction dirs[4] = {Direction::North, Direction::South, Direction::East,
                                              Direction::West};
        Direction d = dirs[action - kActionMoveBase];
        if (player == 2) {
            switch (d) {
                case Direction::North: d = Direction::South; break;
                case Direction::South: d = Direction::North; break;
                case Direction::East: d = Direction::West; break;
                case Direction::West: d = Direction::East; break;
            }
        }
        return UnitCommand::move(d);
    }
    return UnitCommand::attack(action - kActionAttackBase);
}

}  // namespace skirmish::env
