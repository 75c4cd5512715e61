// Decision-tree evaluation against ground-truth battle state. Pure function
// of (tree, context, state, player); all tie-breaks go to the lowest enemy
// unit_id so trajectories are reproducible.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "skirmish/combat/engine.hpp"
#include "skirmish/combat/types.hpp"
#include "skirmish/core/error.hpp"
#include "skirmish/core/rng.hpp"
#include "skirmish/script/ast.hpp"

namespace skirmish::script {

namespace detail {

using combat::BattleContext;
using combat::BattleState;
using combat::Direction;
using combat::UnitArchetype;
using combat::UnitCommand;
using combat::UnitState;

// Cardinal step along the dominant axis of (to - from); x wins ties.
inline UnitCommand approach(Vec2 from, Vec2 to) {
    Fixed dx = to.x - from.x;
    Fixed dy = to.y - from.y;
    int64_t ax = std::llabs(dx.raw);
    int64_t ay = std::llabs(dy.raw);
    if (ax >= ay) {
        return UnitCommand::move(dx.raw > 0 ? Direction::East : Direction::West);
    }
    return UnitCommand::move(dy.raw > 0 ? Direction::North : Direction::South);
}

struct UnitView {
    const UnitState* self = nullptr;
    std::vector<const UnitState*> living_enemies;  // ascending unit_id
};

inline const UnitState* nearest_enemy(const UnitView& v) {
    const UnitState* best = nullptr;
    int64_t best_d = 0;
    for (const UnitState* e : v.living_enemies) {
        int64_t d = dist_sq_raw(v.self->position, e->position);
        if (!best || d < best_d) {
            best = e;
            best_d = d;
        }
    }
    return best;
}

inline const UnitState* weakest_enemy(const UnitView& v) {
    const UnitState* best = nullptr;
    for (const UnitState* e : v.living_enemies) {
        if (!best || e->hp + e->shield < best->hp + best->shield) best = e;
    }
    return best;
}

inline const UnitState* most_hated_enemy(const UnitView& v) {
    const UnitState* best = nullptr;
    Fixed best_hate = Fixed::zero();
    for (const UnitState* e : v.living_enemies) {
        auto it = v.self->hate.find(e->unit_id);
        Fixed h = it == v.self->hate.end() ? Fixed::zero() : it->second;
        if (h > best_hate) {
            best = e;
            best_hate = h;
        }
    }
    return best ? best : nearest_enemy(v);  // all hates zero: fall back to nearest
}

inline int enemies_in_attack_range(const BattleContext& ctx, const UnitView& v) {
    int count = 0;
    Fixed range = ctx.arch_of(*v.self).attack_range;
    for (const UnitState* e : v.living_enemies) {
        if (within(v.self->position, e->position, range)) ++count;
    }
    return count;
}

inline bool eval_condition(const Condition& c, const BattleContext& ctx, const BattleState& state,
                           const UnitView& v) {
    switch (c.kind) {
        case Condition::Kind::And:
            return eval_condition(c.children[0], ctx, state, v) &&
                   eval_condition(c.children[1], ctx, state, v);
        case Condition::Kind::Or:
            return eval_condition(c.children[0], ctx, state, v) ||
                   eval_condition(c.children[1], ctx, state, v);
        case Condition::Kind::Not:
            return !eval_condition(c.children[0], ctx, state, v);
        case Condition::Kind::CooldownReady:
            return v.self->cooldown_remaining == 0;
        case Condition::Kind::Compare:
            break;
    }

    auto compare = [&](int64_t lhs, int64_t rhs) {
        switch (c.cmp) {
            case Comparator::Lt: return lhs < rhs;
            case Comparator::Le: return lhs <= rhs;
            case Comparator::Gt: return lhs > rhs;
            case Comparator::Ge: return lhs >= rhs;
            case Comparator::Eq: return lhs == rhs;
            case Comparator::Ne: return lhs != rhs;
        }
        return false;
    };

    const UnitArchetype& arch = ctx.arch_of(*v.self);
    switch (c.metric) {
        case MetricKind::DistanceToNearestEnemy: {
            const UnitState* e = nearest_enemy(v);
            if (!e) {
                // No living enemy: distance is effectively infinite.
                return c.cmp == Comparator::Gt || c.cmp == Comparator::Ge ||
                       c.cmp == Comparator::Ne;
            }
            // Compare squared values; both sides are exact in raw^2 units.
            int64_t lit = c.literal.raw < 0 ? 0 : c.literal.raw;
            return compare(dist_sq_raw(v.self->position, e->position), lit * lit);
        }
        case MetricKind::HpFraction:
            return compare(v.self->hp.raw * Fixed::kScale, c.literal.raw * arch.max_hp.raw);
        case MetricKind::ShieldFraction:
            if (arch.max_shield.raw == 0) return compare(0, c.literal.raw);
            return compare(v.self->shield.raw * Fixed::kScale,
                           c.literal.raw * arch.max_shield.raw);
        case MetricKind::EnemiesInRange:
            return compare(Fixed::from_int(enemies_in_attack_range(ctx, v)).raw, c.literal.raw);
        case MetricKind::StepCount:
            return compare(Fixed::from_int(state.step).raw, c.literal.raw);
    }
    return false;
}

inline UnitCommand attack_or_close(const BattleContext& ctx, const UnitView& v,
                                   const UnitState* target) {
    if (!target) return UnitCommand::stop();
    if (within(v.self->position, target->position, ctx.arch_of(*v.self).attack_range)) {
        return UnitCommand::attack(target->unit_id);
    }
    return approach(v.self->position, target->position);
}

inline UnitCommand run_action(ActionKind action, const BattleContext& ctx, const UnitView& v) {
    const UnitState& self = *v.self;
    const UnitArchetype& arch = ctx.arch_of(self);
    switch (action) {
        case ActionKind::AttackNearest:
            return attack_or_close(ctx, v, nearest_enemy(v));
        case ActionKind::AttackWeakest:
            return attack_or_close(ctx, v, weakest_enemy(v));
        case ActionKind::AttackHighestHate:
            return attack_or_close(ctx, v, most_hated_enemy(v));
        case ActionKind::AttackFocus:
            return attack_or_close(ctx, v,
                                   v.living_enemies.empty() ? nullptr : v.living_enemies.front());
        case ActionKind::MoveTowardEnemySpawn:
        case ActionKind::MoveTowardOwnSpawn: {
            int dest_player = action == ActionKind::MoveTowardEnemySpawn
                                  ? (self.player == 1 ? 2 : 1)
                                  : self.player;
            Vec2 dest = ctx.spawn_center(dest_player);
            Fixed dx = Fixed(std::llabs(dest.x.raw - self.position.x.raw));
            Fixed dy = Fixed(std::llabs(dest.y.raw - self.position.y.raw));
            // Arrived once the destination is within one step on both axes.
            if (dx <= arch.move_speed && dy <= arch.move_speed) return UnitCommand::stop();
            return approach(self.position, dest);
        }
        case ActionKind::MoveAwayFromNearestEnemy: {
            const UnitState* e = nearest_enemy(v);
            if (!e) return UnitCommand::stop();
            // Pick the direction whose clamped landing point is farthest from
            // the threat; this slides along map edges instead of pinning.
            Direction best = Direction::North;
            int64_t best_d = -1;
            for (Direction d : {Direction::North, Direction::South, Direction::East,
                                Direction::West}) {
                Vec2 landed = combat::move_unit(self.position, d, arch.move_speed,
                                                ctx.scenario.map_width, ctx.scenario.map_height);
                int64_t dist = dist_sq_raw(landed, e->position);
                if (dist > best_d) {
                    best_d = dist;
                    best = d;
                }
            }
            return UnitCommand::move(best);
        }
        case ActionKind::Hold:
            return UnitCommand::stop();
    }
    return UnitCommand::stop();
}

}  // namespace detail

// One legal command per roster slot of `player`, in ascending unit order;
// dead slots get noop.
inline std::vector<combat::IssuedCommand> evaluate_script(const DecisionTree& tree,
                                                          const combat::BattleContext& ctx,
                                                          const combat::BattleState& state,
                                                          int player) {
    size_t n = player == 1 ? ctx.scenario.team1_roster.size() : ctx.scenario.team2_roster.size();
    std::vector<combat::IssuedCommand> commands;
    commands.reserve(n);
    for (int i = 0; i < static_cast<int>(n); ++i) {
        commands.push_back({i, combat::UnitCommand::noop()});
    }

    detail::UnitView view;
    for (const auto& e : state.units) {
        if (e.player != player && e.alive()) view.living_enemies.push_back(&e);
    }

    for (const auto& u : state.units) {
        if (u.player != player || !u.alive()) continue;
        view.self = &u;
        ActionKind action = tree.fallback;
        for (const auto& rule : tree.rules) {
            if (detail::eval_condition(rule.condition, ctx, state, view)) {
                action = rule.action;
                break;
            }
        }
        commands[u.unit_id].command = detail::run_action(action, ctx, view);
    }
    return commands;
}

inline void validate(const MixturePolicy& mixture) {
    if (mixture.entries.empty()) throw ConfigError("mixture must have at least one entry");
    double sum = 0.0;
    for (const auto& e : mixture.entries) {
        if (e.weight < 0.0) throw ConfigError("mixture weights must be non-negative");
        sum += e.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("mixture weights must sum to 1, got " + std::to_string(sum));
    }
}

// Inverse-CDF selection: smallest index whose cumulative weight exceeds u.
inline int select_index(const MixturePolicy& mixture, double u) {
    double cum = 0.0;
    for (int i = 0; i < static_cast<int>(mixture.entries.size()); ++i) {
        cum += mixture.entries[i].weight;
        if (u < cum) return i;
    }
    return static_cast<int>(mixture.entries.size()) - 1;
}

inline int select_strategy(const MixturePolicy& mixture, Pcg32& rng) {
    return select_index(mixture, rng.next_double());
}

}  // namespace skirmish::script
