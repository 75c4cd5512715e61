#include <doctest.h>

#include <set>
#include <vector>

#include "skirmish/script/builtins.hpp"
#include "skirmish/script/interpreter.hpp"
#include "skirmish/script/parser.hpp"
#include "test_support.hpp"

using namespace skirmish;
using namespace skirmish::testing;
namespace sc = skirmish::script;
namespace cb = skirmish::combat;

TEST_CASE("parse: grammar example") {
    auto tree = sc::parse_script(
        {"when cooldown_ready and enemies_in_range >= 1: attack_weakest;\n"
         "fallback: move_toward_enemy_spawn;",
         "example"});
    REQUIRE(tree.rules.size() == 1);
    CHECK(tree.rules[0].action == sc::ActionKind::AttackWeakest);
    CHECK(tree.fallback == sc::ActionKind::MoveTowardEnemySpawn);
    CHECK(tree.rules[0].condition.kind == sc::Condition::Kind::And);
}

TEST_CASE("parse: rejection with located errors") {
    CHECK_THROWS_WITH_AS(sc::parse_script({"", "empty"}), doctest::Contains("missing fallback"),
                         ParseError);

    try {
        sc::parse_script({"when hp_fraction < : attack_nearest;\nfallback: hold;", "bad"});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.column == 20);
    }

    try {
        sc::parse_script({"fallback: hold;\nwhen cooldown_ready: sprint;", "bad2"});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }

    CHECK_THROWS_AS(sc::parse_script({"when altitude > 3: hold; fallback: hold;", "pred"}),
                    ParseError);
    CHECK_THROWS_AS(sc::parse_script({"fallback: charge;", "act"}), ParseError);
}

TEST_CASE("parse: comments and parentheses") {
    auto tree = sc::parse_script(
        {"# opening comment\n"
         "when not (hp_fraction < 0.5 or shield_fraction < 0.25): attack_nearest;  # trailing\n"
         "fallback: hold;",
         "c"});
    REQUIRE(tree.rules.size() == 1);
    CHECK(tree.rules[0].condition.kind == sc::Condition::Kind::Not);
}

TEST_CASE("evaluate: targeting rules") {
    auto table = fixture_table();
    auto ctx = cb::make_context(fixture_scenario(1, 2), table);
    auto state = cb::load_scenario(ctx, 0);
    place(state, 1, 0, 10, 10);

    SUBCASE("attack_nearest picks the closer enemy") {
        place(state, 2, 0, 15, 10);  // distance 5
        place(state, 2, 1, 12, 10);  // distance 2
        auto tree = sc::parse_script({"fallback: attack_nearest;", "t"});
        auto cmds = sc::evaluate_script(tree, ctx, state, 1);
        CHECK(cmds[0].command == cb::UnitCommand::attack(1));
    }

    SUBCASE("attack_weakest compares hp plus shield") {
        place(state, 2, 0, 12, 10);
        place(state, 2, 1, 13, 10);
        find_unit(state, 2, 0)->hp = Fixed::from_int(30);
        find_unit(state, 2, 0)->shield = Fixed::zero();
        find_unit(state, 2, 1)->hp = Fixed::from_int(20);
        find_unit(state, 2, 1)->shield = Fixed::from_int(5);
        auto tree = sc::parse_script({"fallback: attack_weakest;", "t"});
        auto cmds = sc::evaluate_script(tree, ctx, state, 1);
        CHECK(cmds[0].command == cb::UnitCommand::attack(1));  // 25 < 30
    }

    SUBCASE("equal distance breaks toward the lower unit id") {
        place(state, 2, 0, 12, 10);
        place(state, 2, 1, 8, 10);
        auto tree = sc::parse_script({"fallback: attack_nearest;", "t"});
        auto cmds = sc::evaluate_script(tree, ctx, state, 1);
        CHECK(cmds[0].command == cb::UnitCommand::attack(0));
    }

    SUBCASE("out-of-range target is approached, not attacked") {
        place(state, 2, 0, 25, 10);  // past gun range 5
        place(state, 2, 1, 27, 10);
        auto tree = sc::parse_script({"fallback: attack_nearest;", "t"});
        auto cmds = sc::evaluate_script(tree, ctx, state, 1);
        CHECK(cmds[0].command == cb::UnitCommand::move(cb::Direction::East));
    }
}

TEST_CASE("evaluate: dead units noop, totality on shipped builtins") {
    auto table = fixture_table();
    auto ctx = cb::make_context(fixture_scenario(2, 2), table);
    auto state = cb::load_scenario(ctx, 0);
    find_unit(state, 1, 0)->hp = Fixed::zero();
    for (const auto& [name, tree] : sc::builtin_scripts()) {
        auto cmds = sc::evaluate_script(tree, ctx, state, 1);
        REQUIRE(cmds.size() == 2);
        CHECK(cmds[0].command == cb::UnitCommand::noop());
        CHECK(cmds[1].command.kind != cb::UnitCommand::Kind::Noop);
    }
}

TEST_CASE("builtins: kite walks when cooling down, shoots when ready") {
    auto table = shipped_stat_table();
    cb::ScenarioConfig scfg = fixture_scenario(1, 1, "stalker", "zealot");
    auto ctx = cb::make_context(scfg, table);
    auto state = cb::load_scenario(ctx, 0);
    place(state, 1, 0, 20, 20);
    place(state, 2, 0, 21, 20);  // adjacent

    const auto& kite = sc::builtin_script("kite");
    find_unit(state, 1, 0)->cooldown_remaining = 2;
    auto cmds = sc::evaluate_script(kite, ctx, state, 1);
    CHECK(cmds[0].command.kind == cb::UnitCommand::Kind::Move);  // move away

    find_unit(state, 1, 0)->cooldown_remaining = 0;
    cmds = sc::evaluate_script(kite, ctx, state, 1);
    CHECK(cmds[0].command == cb::UnitCommand::attack(0));
}

TEST_CASE("builtins: default_team1_attack holds at the enemy spawn") {
    auto table = fixture_table();
    auto ctx = cb::make_context(fixture_scenario(2, 2), table);
    auto state = cb::load_scenario(ctx, 0);
    Vec2 enemy_spawn = ctx.spawn_center(2);
    place(state, 1, 0, enemy_spawn.x.to_double(), enemy_spawn.y.to_double());
    place(state, 1, 1, enemy_spawn.x.to_double() + 1, enemy_spawn.y.to_double());

    const auto& tree = sc::builtin_script("default_team1_attack");
    auto cmds = sc::evaluate_script(tree, ctx, state, 1);
    CHECK(cmds[0].command == cb::UnitCommand::stop());
    CHECK(cmds[1].command == cb::UnitCommand::stop());
}

TEST_CASE("builtins: focus_fire attacks the lowest living enemy id") {
    auto table = fixture_table();
    auto ctx = cb::make_context(fixture_scenario(2, 8), table);
    auto state = cb::load_scenario(ctx, 0);
    for (int e = 0; e < 8; ++e) {
        if (e != 3 && e != 7) find_unit(state, 2, e)->hp = Fixed::zero();
    }
    place(state, 1, 0, 10, 10);
    place(state, 1, 1, 11, 10);
    place(state, 2, 3, 12, 10);
    place(state, 2, 7, 13, 10);

    const auto& tree = sc::builtin_script("focus_fire");
    auto cmds = sc::evaluate_script(tree, ctx, state, 1);
    CHECK(cmds[0].command == cb::UnitCommand::attack(3));
    CHECK(cmds[1].command == cb::UnitCommand::attack(3));
}

TEST_CASE("builtins: hate_attack tracks accumulated damage, else nearest") {
    auto table = fixture_table();
    auto ctx = cb::make_context(fixture_scenario(2, 1), table);
    auto state = cb::load_scenario(ctx, 0);
    place(state, 2, 0, 10, 10);
    place(state, 1, 0, 12, 10);  // nearest
    place(state, 1, 1, 14, 10);

    const auto& tree = sc::builtin_script("hate_attack");
    auto cmds = sc::evaluate_script(tree, ctx, state, 2);
    CHECK(cmds[0].command == cb::UnitCommand::attack(0));  // no hate: nearest

    find_unit(state, 2, 0)->hate[1] = Fixed::from_int(12);  // unit 1 hurt us more
    cmds = sc::evaluate_script(tree, ctx, state, 2);
    CHECK(cmds[0].command == cb::UnitCommand::attack(1));
}

TEST_CASE("builtins: unknown names are lookup errors") {
    CHECK_THROWS_AS(sc::builtin_script("zerg_rush"), ConfigError);
    CHECK(sc::is_builtin_script("kite"));
    CHECK_FALSE(sc::is_builtin_script("zerg_rush"));
}

TEST_CASE("mixture: validation and inverse-CDF selection") {
    sc::MixturePolicy m;
    m.entries.push_back({sc::builtin_script("attack_nearest"), 0.5});
    m.entries.push_back({sc::builtin_script("attack_weakest"), 0.5});
    CHECK_NOTHROW(sc::validate(m));

    CHECK(sc::select_index(m, 0.3) == 0);
    CHECK(sc::select_index(m, 0.5) == 1);
    CHECK(sc::select_index(m, 0.9999) == 1);

    sc::MixturePolicy solo;
    solo.entries.push_back({sc::builtin_script("kite"), 1.0});
    Pcg32 rng(1);
    for (int i = 0; i < 50; ++i) CHECK(sc::select_strategy(solo, rng) == 0);

    sc::MixturePolicy bad;
    bad.entries.push_back({sc::builtin_script("kite"), 0.7});
    CHECK_THROWS_AS(sc::validate(bad), ConfigError);
    bad.entries.push_back({sc::builtin_script("kite"), -0.3});
    CHECK_THROWS_AS(sc::validate(bad), ConfigError);
}

TEST_CASE("round-trip: canonical text reparses to the identical tree") {
    Pcg32 rng(2024);
    for (int i = 0; i < 200; ++i) {
        auto tree = random_tree(rng);
        auto text = sc::to_text(tree);
        auto reparsed = sc::parse_script({text, tree.name});
        reparsed.name = tree.name;
        CHECK(reparsed == tree);
    }
}

TEST_CASE("argmax invariance: scaling hp and shields preserves the weakest target") {
    auto table = fixture_table();
    auto ctx = cb::make_context(fixture_scenario(1, 3), table);
    auto tree = sc::parse_script({"fallback: attack_weakest;", "w"});
    Pcg32 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        auto state = cb::load_scenario(ctx, trial);
        randomize_state(ctx, state, rng);
        place(state, 1, 0, 16, 16);
        if (!find_unit(state, 1, 0)->alive()) continue;
        bool any_enemy = false;
        for (int e = 0; e < 3; ++e) any_enemy = any_enemy || find_unit(state, 2, e)->alive();
        if (!any_enemy) continue;

        auto base = sc::evaluate_script(tree, ctx, state, 1)[0].command;

        // scale every hp/shield (and the stat caps) by the same factor
        auto scaled_ctx = ctx;
        for (auto& a : scaled_ctx.archetypes) {
            a.max_hp = a.max_hp * 3;
            a.max_shield = a.max_shield * 3;
        }
        auto scaled = state;
        for (auto& u : scaled.units) {
            u.hp = u.hp * 3;
            u.shield = u.shield * 3;
        }
        auto after = sc::evaluate_script(tree, scaled_ctx, scaled, 1)[0].command;
        CHECK(base == after);
    }
}
