#pragma once

#include <optional>
#include <string>

#include "skirmish/eval/policy.hpp"
#include "skirmish/eval/replay.hpp"
#include "skirmish/learn/model.hpp"

namespace skirmish::eval {

struct EpisodeResult {
    enum class Winner { P1, P2, Draw };
    Winner winner = Winner::Draw;
    int steps = 0;
    double return_p1 = 0.0;
    double return_p2 = 0.0;
    int opponent_script_index = -1;
    uint64_t seed = 0;
};

inline const char* to_string(EpisodeResult::Winner w) {
    switch (w) {
        case EpisodeResult::Winner::P1: return "p1";
        case EpisodeResult::Winner::P2: return "p2";
        case EpisodeResult::Winner::Draw: return "draw";
    }
    return "?";
}

// Draws count as losses in win-rate statistics.
inline double win_value(const EpisodeResult& r) {
    return r.winner == EpisodeResult::Winner::P1 ? 1.0 : 0.0;
}

// Runs one full episode. policy_p2 is required in self_play mode and must be
// null in decision_tree mode, matching the environment's step contract.
inline EpisodeResult run_episode(env::Environment& envr, Policy& policy_p1, Policy* policy_p2,
                                 uint64_t seed, ReplayLog* replay = nullptr) {
    if ((envr.config().mode == env::Mode::SelfPlay) != (policy_p2 != nullptr)) {
        throw ProtocolError(policy_p2 ? "player-2 policy given in decision_tree mode"
                                      : "self_play mode needs a player-2 policy");
    }
    envr.reset(seed);
    policy_p1.begin_episode(envr, 1, seed);
    if (policy_p2) policy_p2->begin_episode(envr, 2, seed);

    if (replay) {
        *replay = ReplayLog{};
        replay->scenario = combat::to_json(envr.context().scenario);
        replay->archetypes = nlohmann::json::array();
        for (const auto& a : envr.context().archetypes) {
            replay->archetypes.push_back(nlohmann::json{
                {"name", a.name},
                {"max_hp", a.max_hp.to_double()},
                {"max_shield", a.max_shield.to_double()},
                {"armor", a.armor.to_double()},
                {"damage", a.damage.to_double()},
                {"attack_range", a.attack_range.to_double()},
                {"sight_range", a.sight_range.to_double()},
                {"cooldown_steps", a.cooldown_steps},
                {"move_speed", a.move_speed.to_double()},
                {"shield_regen_rate", a.shield_regen_rate.to_double()},
                {"shield_regen_delay", a.shield_regen_delay}});
        }
        replay->seed = seed;
        replay->script_index = envr.episode().script_index;
        replay->config_hash = learn::hex64(
            learn::fnv1a64(replay->scenario.dump() + replay->archetypes.dump()));
        replay->initial = snapshot_units(envr.battle());
    }

    EpisodeResult result;
    result.seed = seed;
    result.opponent_script_index = envr.episode().script_index;
    while (envr.active()) {
        auto actions_p1 = policy_p1.act(envr, 1);
        env::StepResult step;
        if (policy_p2) {
            auto actions_p2 = policy_p2->act(envr, 2);
            step = envr.step(actions_p1, &actions_p2);
        } else {
            step = envr.step(actions_p1);
        }
        result.return_p1 += step.reward_p1;
        result.return_p2 += step.info.reward_p2;
        if (replay) {
            replay->steps.push_back({step.info.commands_p1, step.info.commands_p2,
                                     step.info.outcome.damage_events,
                                     snapshot_units(envr.battle()),
                                     combat::to_string(envr.battle().status)});
        }
    }
    result.steps = envr.battle().step;
    switch (envr.battle().status) {
        case combat::BattleStatus::P1Win: result.winner = EpisodeResult::Winner::P1; break;
        case combat::BattleStatus::P2Win: result.winner = EpisodeResult::Winner::P2; break;
        default: result.winner = EpisodeResult::Winner::Draw; break;
    }
    return result;
}

}  // namespace skirmish::eval
