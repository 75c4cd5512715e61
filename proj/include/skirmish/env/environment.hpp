// Dual-sided Dec-POMDP facade over the combat engine. Player 1 always acts
// through masked action indices; player 2 is driven either by the sampled
// opponent decision tree (decision_tree mode) or by a second set of masked
// actions through an identically shaped interface (self_play mode).
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skirmish/combat/data.hpp"
#include "skirmish/combat/engine.hpp"
#include "skirmish/core/rng.hpp"
#include "skirmish/env/config.hpp"
#include "skirmish/env/encoding.hpp"
#include "skirmish/script/interpreter.hpp"

namespace skirmish::env {

struct RewardComponents {
    double damage_dealt = 0.0;
    int kill_count = 0;
    bool won = false;
};

struct PlayerIo {
    std::vector<ObservationVector> observations;
    StateVector state;
    std::vector<ActionMask> masks;
};

struct ResetResult {
    PlayerIo p1;
    std::optional<PlayerIo> p2;  // self_play mode only
};

struct EpisodeMeta {
    uint64_t seed = 0;
    int script_index = -1;  // -1 in self_play mode
};

struct StepInfo {
    combat::StepOutcome outcome;
    std::vector<combat::IssuedCommand> commands_p1;  // as resolved by the engine
    std::vector<combat::IssuedCommand> commands_p2;
    RewardComponents components_p1;
    RewardComponents components_p2;
    double reward_p2 = 0.0;  // always computed, surfaced here in decision_tree mode
    bool won_p1 = false;
    bool won_p2 = false;
    int script_index = -1;
    int step = 0;
};

struct StepResult {
    double reward_p1 = 0.0;
    std::optional<double> reward_p2;  // self_play mode only
    bool terminated = false;
    StepInfo info;
};

inline RewardComponents reward_components(const combat::StepOutcome& outcome, int player) {
    RewardComponents rc;
    Fixed damage;
    for (const auto& ev : outcome.damage_events) {
        if (ev.attacker_player == player) damage += ev.shield_damage + ev.hp_damage;
    }
    rc.damage_dealt = damage.to_double();
    int enemy = player == 1 ? 2 : 1;
    for (const auto& k : outcome.kills) {
        if (k.player == enemy) ++rc.kill_count;
    }
    rc.won = outcome.status_after ==
             (player == 1 ? combat::BattleStatus::P1Win : combat::BattleStatus::P2Win);
    return rc;
}

// reward = scale * damage dealt + kill_bonus * kills + win_bonus * won.
// Damage taken is never penalized, so rewards are non-negative.
inline double compute_reward(const combat::StepOutcome& outcome, int player,
                             const EnvConfig& cfg) {
    RewardComponents rc = reward_components(outcome, player);
    return cfg.reward_scale * rc.damage_dealt + cfg.kill_bonus * rc.kill_count +
           cfg.win_bonus * (rc.won ? 1.0 : 0.0);
}

class Environment {
public:
    Environment(EnvConfig cfg, const combat::StatTable& table)
        : cfg_(std::move(cfg)), ctx_(combat::make_context(cfg_.scenario, table)) {
        apply_default_rewards(cfg_, ctx_);
        layout_ = make_layout(ctx_);
        if (cfg_.mode == Mode::DecisionTree) {
            script::validate(cfg_.opponent_mixture);
        }
    }

    ResetResult reset() { return reset(cfg_.seed); }

    ResetResult reset(uint64_t seed) {
        meta_ = EpisodeMeta{seed, -1};
        battle_ = combat::load_scenario(ctx_, seed);
        mixture_rng_ = Pcg32::derive(seed, 0x4d495854ull /* mixture stream */);
        if (cfg_.mode == Mode::DecisionTree) {
            meta_.script_index = script::select_strategy(cfg_.opponent_mixture, mixture_rng_);
        }
        opponent_commands_.clear();
        last_opponent_eval_step_ = -1;
        damage_credit_.clear();
        for (const auto& u : battle_.units) {
            const auto& arch = ctx_.arch_of(u);
            damage_credit_.push_back(arch.max_hp + arch.max_shield);
        }
        ResetResult out;
        out.p1 = snapshot_io(1);
        if (cfg_.mode == Mode::SelfPlay) out.p2 = snapshot_io(2);
        return out;
    }

    bool active() const { return battle_.status == combat::BattleStatus::Ongoing; }

    StepResult step(const std::vector<int>& actions_p1,
                    const std::vector<int>* actions_p2 = nullptr) {
        if (!active()) throw ProtocolError("step on a finished episode");
        if (cfg_.mode == Mode::SelfPlay && !actions_p2) {
            throw ProtocolError("self_play mode requires player-2 actions");
        }
        if (cfg_.mode == Mode::DecisionTree && actions_p2) {
            throw ProtocolError("player-2 actions are not accepted in decision_tree mode");
        }
        auto commands_p1 = decode_player_actions(1, actions_p1);
        std::vector<combat::IssuedCommand> commands_p2;
        if (cfg_.mode == Mode::SelfPlay) {
            commands_p2 = decode_player_actions(2, *actions_p2);
        } else {
            commands_p2 = opponent_commands();
        }

        combat::StepOutcome outcome = combat::step_in_place(ctx_, battle_, commands_p1,
                                                            commands_p2);
        StepResult result;
        result.info.outcome = outcome;
        result.info.commands_p1 = std::move(commands_p1);
        result.info.commands_p2 = std::move(commands_p2);
        result.info.components_p1 = credited_components(outcome, 1);
        result.info.components_p2 = credited_components(outcome, 2);
        result.reward_p1 = reward_from(result.info.components_p1);
        result.info.reward_p2 = reward_from(result.info.components_p2);
        if (cfg_.mode == Mode::SelfPlay) result.reward_p2 = result.info.reward_p2;
        result.terminated = !active();
        result.info.won_p1 = outcome.status_after == combat::BattleStatus::P1Win;
        result.info.won_p2 = outcome.status_after == combat::BattleStatus::P2Win;
        result.info.script_index = meta_.script_index;
        result.info.step = battle_.step;
        return result;
    }

    ObservationVector observation(int player, int agent_index) const {
        return encode_observation(ctx_, layout_, battle_, player, agent_index);
    }
    StateVector state(int player) const { return encode_state(ctx_, layout_, battle_, player); }
    ActionMask mask(int player, int agent_index) const {
        return available_actions(ctx_, layout_, battle_, player, agent_index);
    }
    PlayerIo snapshot_io(int player) const {
        PlayerIo io;
        int n = n_agents(player);
        for (int i = 0; i < n; ++i) {
            io.observations.push_back(observation(player, i));
            io.masks.push_back(mask(player, i));
        }
        io.state = state(player);
        return io;
    }

    int n_agents(int player) const { return player == 1 ? layout_.n_team1 : layout_.n_team2; }
    const combat::BattleState& battle() const { return battle_; }
    const combat::BattleContext& context() const { return ctx_; }
    const ObsLayout& layout() const { return layout_; }
    const EnvConfig& config() const { return cfg_; }
    const EpisodeMeta& episode() const { return meta_; }

private:
    // Damage reward is credited per target only up to its max hp+shield for
    // the episode, so shield regen cannot push the undiscounted return past
    // scale * enemy pool + kill and win bonuses.
    RewardComponents credited_components(const combat::StepOutcome& outcome, int player) {
        RewardComponents rc = reward_components(outcome, player);
        Fixed credited;
        for (const auto& ev : outcome.damage_events) {
            if (ev.attacker_player != player) continue;
            int gid = unit_gid(ev.target_player, ev.target_id);
            Fixed amount = min(ev.shield_damage + ev.hp_damage, damage_credit_[gid]);
            damage_credit_[gid] -= amount;
            credited += amount;
        }
        rc.damage_dealt = credited.to_double();
        return rc;
    }

    double reward_from(const RewardComponents& rc) const {
        return cfg_.reward_scale * rc.damage_dealt + cfg_.kill_bonus * rc.kill_count +
               cfg_.win_bonus * (rc.won ? 1.0 : 0.0);
    }

    int unit_gid(int player, int unit_id) const {
        return player == 1 ? unit_id : layout_.n_team1 + unit_id;
    }

    std::vector<combat::IssuedCommand> decode_player_actions(int player,
                                                             const std::vector<int>& actions) {
        int n = n_agents(player);
        if (static_cast<int>(actions.size()) != n) {
            throw ProtocolError("player " + std::to_string(player) + ": expected " +
                                std::to_string(n) + " actions, got " +
                                std::to_string(actions.size()));
        }
        std::vector<combat::IssuedCommand> commands;
        commands.reserve(n);
        for (int i = 0; i < n; ++i) {
            ActionMask m = mask(player, i);
            int a = actions[i];
            if (a < 0 || a >= static_cast<int>(m.size()) || !m[a]) {
                throw IllegalActionError("player " + std::to_string(player) + " agent " +
                                         std::to_string(i) + ": action " + std::to_string(a) +
                                         " is not available");
            }
            commands.push_back({i, decode_action(player, a)});
        }
        return commands;
    }

    // Decision-tree opponent. The script re-evaluates every (8 - difficulty)
    // steps; between refreshes cached commands are reused, with per-unit
    // re-evaluation when a cached command went stale (dead unit, dead target).
    std::vector<combat::IssuedCommand> opponent_commands() {
        if (cfg_.opponent_mixture.resample_per_step) {
            meta_.script_index = script::select_strategy(cfg_.opponent_mixture, mixture_rng_);
        }
        const script::DecisionTree& tree = cfg_.opponent_mixture.entries[meta_.script_index].tree;
        int cadence = 8 - ctx_.scenario.difficulty;
        bool refresh = last_opponent_eval_step_ < 0 ||
                       battle_.step - last_opponent_eval_step_ >= cadence ||
                       cfg_.opponent_mixture.resample_per_step;
        if (refresh) {
            opponent_commands_ = script::evaluate_script(tree, ctx_, battle_, 2);
            last_opponent_eval_step_ = battle_.step;
            return opponent_commands_;
        }
        std::vector<combat::IssuedCommand> fixed = opponent_commands_;
        std::optional<std::vector<combat::IssuedCommand>> fresh;
        for (int i = 0; i < static_cast<int>(fixed.size()); ++i) {
            const combat::UnitState* u = detail::find_unit(battle_, 2, i);
            if (!u || !u->alive()) {
                fixed[i].command = combat::UnitCommand::noop();
                continue;
            }
            if (fixed[i].command.kind == combat::UnitCommand::Kind::Attack) {
                const combat::UnitState* target =
                    detail::find_unit(battle_, 1, fixed[i].command.target);
                if (target && target->alive()) continue;
            } else if (fixed[i].command.kind != combat::UnitCommand::Kind::Noop) {
                continue;
            }
            // Stale order (dead target, or the unit outlived a noop snapshot):
            // give this unit a fresh decision against the current state.
            if (!fresh) fresh = script::evaluate_script(tree, ctx_, battle_, 2);
            fixed[i] = (*fresh)[i];
        }
        opponent_commands_ = fixed;
        return fixed;
    }

    EnvConfig cfg_;
    combat::BattleContext ctx_;
    ObsLayout layout_;
    combat::BattleState battle_;
    EpisodeMeta meta_;
    Pcg32 mixture_rng_{1};
    std::vector<combat::IssuedCommand> opponent_commands_;
    int last_opponent_eval_step_ = -1;
    std::vector<Fixed> damage_credit_;  // per unit, player-1 block first
};

}  // namespace skirmish::env
