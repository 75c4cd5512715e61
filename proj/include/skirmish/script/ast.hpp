#pragma once

#include <string>
#include <vector>

#include "skirmish/core/fixed.hpp"

namespace skirmish::script {

struct ScriptSource {
    std::string text;
    std::string name;
};

enum class MetricKind {
    DistanceToNearestEnemy,
    HpFraction,
    ShieldFraction,
    EnemiesInRange,
    StepCount,
};

enum class Comparator { Lt, Le, Gt, Ge, Eq, Ne };

// Behaviors, one per living unit per step. Attack behaviors close to their
// target when out of range; move_toward behaviors hold once arrived.
enum class ActionKind {
    AttackNearest,
    AttackWeakest,
    AttackHighestHate,
    AttackFocus,
    MoveTowardEnemySpawn,
    MoveTowardOwnSpawn,
    MoveAwayFromNearestEnemy,
    Hold,
};

struct Condition {
    enum class Kind { And, Or, Not, Compare, CooldownReady };

    Kind kind = Kind::CooldownReady;
    std::vector<Condition> children;        // And/Or: 2, Not: 1
    MetricKind metric = MetricKind::StepCount;  // Compare only
    Comparator cmp = Comparator::Lt;
    Fixed literal;

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct Rule {
    Condition condition;
    ActionKind action;

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct DecisionTree {
    std::string name;
    std::vector<Rule> rules;     // evaluated in order, first match wins
    ActionKind fallback = ActionKind::Hold;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct MixturePolicy {
    struct Entry {
        DecisionTree tree;
        double weight = 0.0;
    };
    std::vector<Entry> entries;
    bool resample_per_step = false;
};

inline const char* to_keyword(MetricKind m) {
    switch (m) {
        case MetricKind::DistanceToNearestEnemy: return "distance_to_nearest_enemy";
        case MetricKind::HpFraction: return "hp_fraction";
        case MetricKind::ShieldFraction: return "shield_fraction";
        case MetricKind::EnemiesInRange: return "enemies_in_range";
        case MetricKind::StepCount: return "step_count";
    }
    return "?";
}

inline const char* to_keyword(Comparator c) {
    switch (c) {
        case Comparator::Lt: return "<";
        case Comparator::Le: return "<=";
        case Comparator::Gt: return ">";
        case Comparator::Ge: return ">=";
        case Comparator::Eq: return "==";
        case Comparator::Ne: return "!=";
    }
    return "?";
}

inline const char* to_keyword(ActionKind a) {
    switch (a) {
        case ActionKind::AttackNearest: return "attack_nearest";
        case ActionKind::AttackWeakest: return "attack_weakest";
        case ActionKind::AttackHighestHate: return "attack_highest_hate";
        case ActionKind::AttackFocus: return "attack_focus";
        case ActionKind::MoveTowardEnemySpawn: return "move_toward_enemy_spawn";
        case ActionKind::MoveTowardOwnSpawn: return "move_toward_own_spawn";
        case ActionKind::MoveAwayFromNearestEnemy: return "move_away_from_nearest_enemy";
        case ActionKind::Hold: return "hold";
    }
    return "?";
}

}  // namespace skirmish::script
