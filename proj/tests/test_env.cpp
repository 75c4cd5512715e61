#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <vector>

#include "skirmish/env/environment.hpp"
#include "test_support.hpp"

using namespace skirmish;
using namespace skirmish::testing;
namespace cb = skirmish::combat;

namespace {

env::EnvConfig decision_tree_config(const cb::ScenarioConfig& sc, const char* opponent) {
    env::EnvConfig cfg;
    cfg.scenario = sc;
    cfg.mode = env::Mode::DecisionTree;
    cfg.opponent_mixture.entries.push_back({script::builtin_script(opponent), 1.0});
    return cfg;
}

env::EnvConfig self_play_config(const cb::ScenarioConfig& sc) {
    env::EnvConfig cfg;
    cfg.scenario = sc;
    cfg.mode = env::Mode::SelfPlay;
    return cfg;
}

}  // namespace

TEST_CASE("reset: decision-tree mode returns player-1 tuples and records the script") {
    env::Environment envr(decision_tree_config(fixture_scenario(2, 1), "attack_nearest"),
                          fixture_table());
    auto out = envr.reset(5);
    CHECK_FALSE(out.p2.has_value());
    CHECK(out.p1.observations.size() == 2);
    CHECK(out.p1.masks.size() == 2);
    CHECK(envr.episode().script_index == 0);
    CHECK(envr.episode().seed == 5);
}

TEST_CASE("reset: self-play mode returns aligned tuples for both players") {
    env::Environment envr(self_play_config(shipped_scenario("4m_sym")), shipped_stat_table());
    auto out = envr.reset(3);
    REQUIRE(out.p2.has_value());
    CHECK(out.p1.observations.size() == out.p2->observations.size());
    for (size_t i = 0; i < out.p1.observations.size(); ++i) {
        CHECK(out.p1.observations[i].size() == out.p2->observations[i].size());
        CHECK(out.p1.masks[i].size() == out.p2->masks[i].size());
    }
    CHECK(out.p1.state.size() == out.p2->state.size());
}

TEST_CASE("reset: same seed reproduces identical observations") {
    env::Environment envr(decision_tree_config(fixture_scenario(2, 2), "kite"), fixture_table());
    auto a = envr.reset(11);
    auto b = envr.reset(11);
    CHECK(a.p1.observations == b.p1.observations);
    CHECK(a.p1.state == b.p1.state);
}

TEST_CASE("mirror symmetry: point-mirrored battle encodes identically for both players") {
    // 4m_sym spawns are point-mirrored and the lattice mirrors with them, so
    // a fresh episode is an exactly symmetric fixture.
    auto table = shipped_stat_table();
    auto ctx = cb::make_context(shipped_scenario("4m_sym"), table);
    auto layout = env::make_layout(ctx);
    for (uint64_t seed : {0ull, 1ull, 9ull}) {
        auto state = cb::load_scenario(ctx, seed);
        for (int i = 0; i < 4; ++i) {
            CHECK(env::encode_observation(ctx, layout, state, 1, i) ==
                  env::encode_observation(ctx, layout, state, 2, i));
            CHECK(env::available_actions(ctx, layout, state, 1, i) ==
                  env::available_actions(ctx, layout, state, 2, i));
        }
        CHECK(env::encode_state(ctx, layout, state, 1) == env::encode_state(ctx, layout, state, 2));
    }
}

TEST_CASE("observation: visibility, zero blocks, and own features") {
    auto table = fixture_table();
    auto ctx = cb::make_context(fixture_scenario(1, 1), table);
    auto layout = env::make_layout(ctx);
    auto state = cb::load_scenario(ctx, 0);
    place(state, 1, 0, 16, 16);

    SUBCASE("enemy outside sight gives an all-zero block") {
        place(state, 2, 0, 28, 16);  // distance 12 > sight 9
        auto obs = env::encode_observation(ctx, layout, state, 1, 0);
        for (int k = env::ObsLayout::kOwnBlock; k < layout.obs_len(1); ++k) {
            CHECK(obs[k] == 0.0);
        }
    }

    SUBCASE("own hp at half max encodes as 0.5, entries stay in [-1, 1]") {
        find_unit(state, 1, 0)->hp = Fixed::from_double(22.5);
        place(state, 2, 0, 19, 14);
        auto obs = env::encode_observation(ctx, layout, state, 1, 0);
        CHECK(obs[0] == doctest::Approx(0.5));
        for (double v : obs) {
            CHECK(v <= 1.0);
            CHECK(v >= -1.0);
        }
    }

    SUBCASE("dead agent observes nothing") {
        find_unit(state, 1, 0)->hp = Fixed::zero();
        auto obs = env::encode_observation(ctx, layout, state, 1, 0);
        for (double v : obs) CHECK(v == 0.0);
    }
}

TEST_CASE("mask: dead agents, sight gating, boundary cases") {
    auto table = fixture_table();
    auto ctx = cb::make_context(fixture_scenario(1, 1), table);
    auto layout = env::make_layout(ctx);
    auto state = cb::load_scenario(ctx, 0);
    place(state, 1, 0, 16, 16);

    SUBCASE("dead agent: only noop") {
        find_unit(state, 1, 0)->hp = Fixed::zero();
        auto mask = env::available_actions(ctx, layout, state, 1, 0);
        CHECK(mask[env::kActionNoop] == 1);
        for (size_t a = 1; a < mask.size(); ++a) CHECK(mask[a] == 0);
    }

    SUBCASE("living agent: no noop, stop and moves available") {
        auto mask = env::available_actions(ctx, layout, state, 1, 0);
        CHECK(mask[env::kActionNoop] == 0);
        CHECK(mask[env::kActionStop] == 1);
        for (int d = 0; d < 4; ++d) CHECK(mask[env::kActionMoveBase + d] == 1);
    }

    SUBCASE("attack bit follows sight range") {
        place(state, 2, 0, 16 + 10, 16);  // sight 9, distance 10
        auto far = env::available_actions(ctx, layout, state, 1, 0);
        CHECK(far[env::kActionAttackBase] == 0);

        place(state, 2, 0, 16 + 8, 16);  // distance 8 < sight
        auto near = env::available_actions(ctx, layout, state, 1, 0);
        CHECK(near[env::kActionAttackBase] == 1);
    }

    SUBCASE("unknown agent index raises a protocol error") {
        CHECK_THROWS_AS(env::available_actions(ctx, layout, state, 1, 4), ProtocolError);
    }
}

TEST_CASE("reward: formula on a single five-point hit") {
    auto table = fixture_table();
    auto ctx = cb::make_context(fixture_scenario(1, 1), table);
    auto state = cb::load_scenario(ctx, 0);
    place(state, 1, 0, 10, 10);
    place(state, 2, 0, 13, 10);

    std::vector<cb::IssuedCommand> p1 = {{0, cb::UnitCommand::attack(0)}};
    std::vector<cb::IssuedCommand> p2 = {{0, cb::UnitCommand::stop()}};
    auto [next, outcome] = cb::step(ctx, state, p1, p2);

    env::EnvConfig cfg = decision_tree_config(fixture_scenario(1, 1), "attack_nearest");
    cfg.reward_scale = 0.25;
    cfg.kill_bonus = 2.0;
    cfg.win_bonus = 40.0;
    CHECK(env::compute_reward(outcome, 1, cfg) == doctest::Approx(5 * 0.25));
    CHECK(env::compute_reward(outcome, 2, cfg) == doctest::Approx(0.0));

    cb::StepOutcome empty;
    CHECK(env::compute_reward(empty, 1, cfg) == doctest::Approx(0.0));
}

TEST_CASE("reward: untouched victory accounts to the exact closed form") {
    // Opponent never fires (default_team1_attack), so player 1's undiscounted
    // return must equal scale * enemy pool + kill_bonus * n + win_bonus.
    auto table = shipped_stat_table();
    auto sc = shipped_scenario("3m_vs_5m_ambush");
    env::EnvConfig cfg = decision_tree_config(sc, "default_team1_attack");
    env::Environment envr(cfg, table);
    envr.reset(4);

    const auto& tree = script::builtin_script("focus_fire");
    double ret = 0.0;
    bool won = false;
    while (envr.active()) {
        auto cmds = script::evaluate_script(tree, envr.context(), envr.battle(), 1);
        std::vector<int> actions;
        for (const auto& ic : cmds) {
            if (ic.command.kind == cb::UnitCommand::Kind::Attack) {
                actions.push_back(env::kActionAttackBase + ic.command.target);
            } else if (ic.command.kind == cb::UnitCommand::Kind::Move) {
                actions.push_back(env::kActionMoveBase + static_cast<int>(ic.command.dir));
            } else if (ic.command.kind == cb::UnitCommand::Kind::Noop) {
                actions.push_back(env::kActionNoop);
            } else {
                actions.push_back(env::kActionStop);
            }
        }
        auto result = envr.step(actions);
        ret += result.reward_p1;
        won = result.info.won_p1;
    }
    REQUIRE(won);

    double pool = 5 * 45.0;  // five marines, no shields
    double expected = envr.config().reward_scale * pool + envr.config().kill_bonus * 5 +
                      envr.config().win_bonus;
    CHECK(ret == doctest::Approx(expected).epsilon(1e-9));
    // and the shipped default normalizes that maximum to 20
    CHECK(expected == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("step: masked and malformed submissions are rejected with names") {
    env::Environment envr(decision_tree_config(fixture_scenario(2, 1), "attack_nearest"),
                          fixture_table());
    envr.reset(0);

    CHECK_THROWS_WITH_AS(envr.step({env::kActionNoop, env::kActionStop}),
                         doctest::Contains("agent 0"), IllegalActionError);

    std::vector<int> too_few = {env::kActionStop};
    CHECK_THROWS_AS(envr.step(too_few), ProtocolError);

    std::vector<int> p2_actions = {env::kActionStop};
    std::vector<int> ok = {env::kActionStop, env::kActionStop};
    CHECK_THROWS_AS(envr.step(ok, &p2_actions), ProtocolError);  // decision_tree mode
}

TEST_CASE("step: stop-only play never produces damage") {
    env::Environment envr(self_play_config(shipped_scenario("4m_sym")), shipped_stat_table());
    envr.reset(0);
    std::vector<int> stops(4, env::kActionStop);
    double total = 0.0;
    for (int t = 0; t < 50; ++t) {
        auto result = envr.step(stops, &stops);
        total += result.reward_p1 + *result.reward_p2;
        CHECK(result.info.outcome.damage_events.empty());
    }
    CHECK(total == 0.0);
}

TEST_CASE("step: terminal elimination sets the win flags") {
    auto table = fixture_table();
    auto sc = fixture_scenario(2, 1);
    env::EnvConfig cfg = decision_tree_config(sc, "default_team1_attack");
    env::Environment envr(cfg, table);
    envr.reset(1);

    const auto& tree = script::builtin_script("attack_nearest");
    env::StepResult last;
    while (envr.active()) {
        auto cmds = script::evaluate_script(tree, envr.context(), envr.battle(), 1);
        std::vector<int> actions;
        for (const auto& ic : cmds) {
            if (ic.command.kind == cb::UnitCommand::Kind::Attack) {
                actions.push_back(env::kActionAttackBase + ic.command.target);
            } else if (ic.command.kind == cb::UnitCommand::Kind::Move) {
                actions.push_back(env::kActionMoveBase + static_cast<int>(ic.command.dir));
            } else {
                actions.push_back(env::kActionStop);
            }
        }
        last = envr.step(actions);
    }
    CHECK(last.terminated);
    CHECK(last.info.won_p1);
    CHECK_FALSE(last.info.won_p2);
    CHECK_THROWS_AS(envr.step({env::kActionNoop, env::kActionNoop}), ProtocolError);
}

TEST_CASE("property: mask soundness and the return bound over whole episodes") {
    auto table = shipped_stat_table();
    env::EnvConfig cfg = decision_tree_config(shipped_scenario("2m_vs_1b"), "attack_nearest");
    env::Environment envr(cfg, table);
    Pcg32 rng(31337);

    for (uint64_t seed = 0; seed < 6; ++seed) {
        envr.reset(seed);
        double ret = 0.0;
        while (envr.active()) {
            std::vector<int> actions;
            std::vector<env::ActionMask> masks;
            for (int i = 0; i < envr.n_agents(1); ++i) {
                masks.push_back(envr.mask(1, i));
                std::vector<int> legal;
                for (int a = 0; a < static_cast<int>(masks[i].size()); ++a) {
                    if (masks[i][a]) legal.push_back(a);
                }
                REQUIRE_FALSE(legal.empty());
                actions.push_back(legal[rng.next_below(static_cast<uint32_t>(legal.size()))]);
            }
            // occasionally flip one agent to a masked action: must raise and
            // must not advance the episode
            if (rng.next_below(5) == 0) {
                int agent = static_cast<int>(rng.next_below(envr.n_agents(1)));
                for (int a = 0; a < static_cast<int>(masks[agent].size()); ++a) {
                    if (!masks[agent][a]) {
                        auto bad = actions;
                        bad[agent] = a;
                        int step_before = envr.battle().step;
                        CHECK_THROWS_AS(envr.step(bad), IllegalActionError);
                        CHECK(envr.battle().step == step_before);
                        break;
                    }
                }
            }
            ret += envr.step(actions).reward_p1;
        }
        double bound = envr.config().reward_scale * (110.0) + envr.config().kill_bonus * 1 +
                       envr.config().win_bonus + 1e-9;
        CHECK(ret >= 0.0);
        CHECK(ret <= bound);
    }
}

TEST_CASE("opponent cadence: low difficulty episodes still resolve cleanly") {
    auto table = shipped_stat_table();
    auto sc = shipped_scenario("2m_vs_1b");
    sc.difficulty = 1;  // re-evaluate every 7 steps, cached orders in between
    env::EnvConfig cfg = decision_tree_config(sc, "attack_nearest");
    env::Environment envr(cfg, table);
    Pcg32 rng(99);
    for (uint64_t seed = 0; seed < 4; ++seed) {
        envr.reset(seed);
        while (envr.active()) {
            std::vector<int> actions;
            for (int i = 0; i < envr.n_agents(1); ++i) {
                auto mask = envr.mask(1, i);
                std::vector<int> legal;
                for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
                    if (mask[a]) legal.push_back(a);
                }
                actions.push_back(legal[rng.next_below(static_cast<uint32_t>(legal.size()))]);
            }
            CHECK_NOTHROW(envr.step(actions));
        }
    }
}

TEST_CASE("opponent cadence: difficulty changes the opponent's behavior") {
    auto table = shipped_stat_table();
    auto play = [&](int difficulty) {
        auto sc = shipped_scenario("3s_vs_3z");
        sc.difficulty = difficulty;
        env::Environment envr(decision_tree_config(sc, "attack_nearest"), table);
        envr.reset(2);
        double reward = 0.0;
        while (envr.active()) {
            std::vector<int> actions;
            for (int i = 0; i < envr.n_agents(1); ++i) {
                actions.push_back(envr.mask(1, i)[env::kActionStop] ? env::kActionStop
                                                                    : env::kActionNoop);
            }
            reward += envr.step(actions).info.reward_p2;
        }
        return std::pair{envr.battle().step, reward};
    };
    auto sharp = play(7);   // re-targets every step
    auto sluggish = play(1);  // re-targets every 7 steps
    CHECK(sharp != sluggish);
}

TEST_CASE("mixture: per-step resampling switches scripts inside an episode") {
    auto table = shipped_stat_table();
    env::EnvConfig cfg;
    cfg.scenario = shipped_scenario("2m_vs_1b");
    cfg.mode = env::Mode::DecisionTree;
    cfg.opponent_mixture.entries.push_back({script::builtin_script("attack_nearest"), 0.5});
    cfg.opponent_mixture.entries.push_back({script::builtin_script("hate_attack"), 0.5});
    cfg.opponent_mixture.resample_per_step = true;
    env::Environment envr(cfg, table);
    envr.reset(1);
    std::set<int> seen;
    for (int t = 0; t < 40 && envr.active(); ++t) {
        std::vector<int> actions;
        for (int i = 0; i < envr.n_agents(1); ++i) {
            actions.push_back(envr.mask(1, i)[env::kActionStop] ? env::kActionStop
                                                                : env::kActionNoop);
        }
        envr.step(actions);
        seen.insert(envr.episode().script_index);
    }
    CHECK(seen.size() == 2);
}

TEST_CASE("env config: loading from a file") {
    std::string path = "/tmp/skirmish_env_cfg.json";
    {
        std::ofstream out(path);
        out << R"({"scenario": "4m_sym", "mode": "self_play", "seed": 3})";
    }
    auto cfg = env::load_env_config(path, shipped_stat_table());
    CHECK(cfg.mode == env::Mode::SelfPlay);
    CHECK(cfg.scenario.name == "4m_sym");
    CHECK(cfg.seed == 3);
}

TEST_CASE("env config: JSON loading, defaults, and equal-weight mixtures") {
    nlohmann::json j = {
        {"scenario", "2m_vs_1b"},
        {"opponent", {{"scripts", {"attack_nearest", "attack_weakest"}}}},
        {"seed", 9},
    };
    auto cfg = env::env_config_from_json(j, shipped_stat_table());
    CHECK(cfg.mode == env::Mode::DecisionTree);  // the documented default
    REQUIRE(cfg.opponent_mixture.entries.size() == 2);
    CHECK(cfg.opponent_mixture.entries[0].weight == doctest::Approx(0.5));
    CHECK(cfg.opponent_mixture.entries[1].weight == doctest::Approx(0.5));
    CHECK(cfg.seed == 9);

    nlohmann::json bad = j;
    bad["mode"] = "tournament";
    CHECK_THROWS_AS(env::env_config_from_json(bad, shipped_stat_table()), ConfigError);

    nlohmann::json weighted = j;
    weighted["opponent"] = {{"scripts",
                             {{{"script", "attack_nearest"}, {"weight", 0.9}},
                              {{"script", "attack_weakest"}, {"weight", 0.1}}}}};
    auto wcfg = env::env_config_from_json(weighted, shipped_stat_table());
    CHECK(wcfg.opponent_mixture.entries[0].weight == doctest::Approx(0.9));
}
