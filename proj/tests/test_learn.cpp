#include <doctest.h>

#include <cmath>

#include "skirmish/learn/trainer.hpp"
#include "test_support.hpp"

using namespace skirmish;
using namespace skirmish::testing;
namespace ln = skirmish::learn;

namespace {

env::EnvConfig dt_config(const combat::ScenarioConfig& sc, const char* opponent) {
    env::EnvConfig cfg;
    cfg.scenario = sc;
    cfg.mode = env::Mode::DecisionTree;
    cfg.opponent_mixture.entries.push_back({script::builtin_script(opponent), 1.0});
    return cfg;
}

// Observation shaped like the fixture 1v1 layout with a single visible enemy.
env::ObservationVector make_obs(const env::ObsLayout& layout, double hp_frac, bool ready,
                                double dist, double dx, double dy) {
    env::ObservationVector obs(layout.obs_len(1), 0.0);
    obs[0] = hp_frac;
    obs[2] = ready ? 1.0 : 0.0;
    obs[3] = 0.5;
    obs[4] = 0.5;
    int base = env::ObsLayout::kOwnBlock;
    obs[base] = 1.0;  // visible
    obs[base + 1] = dx;
    obs[base + 2] = dy;
    obs[base + 3] = dist;
    obs[base + 4] = 1.0;
    return obs;
}

}  // namespace

TEST_CASE("featurize: reserved index, determinism, bucket boundaries") {
    auto table = fixture_table();
    auto ctx = combat::make_context(fixture_scenario(1, 1), table);
    auto layout = env::make_layout(ctx);
    ln::FeatureSpec spec;  // 8 distance bins over [0,1)

    env::ObservationVector dead(layout.obs_len(1), 0.0);
    CHECK(ln::featurize(dead, layout, 1, spec) == 0);

    // same bucketed quantities -> same index
    auto a = make_obs(layout, 0.80, true, 0.30, 0.30, 0.05);
    auto b = make_obs(layout, 0.76, true, 0.33, 0.33, 0.02);
    CHECK(ln::featurize(a, layout, 1, spec) == ln::featurize(b, layout, 1, spec));

    // boundary at 3/8: just below vs at the boundary land in different buckets
    double edge = 3.0 / 8.0;
    auto below = make_obs(layout, 0.8, true, edge - 1e-9, edge - 1e-9, 0.0);
    auto at = make_obs(layout, 0.8, true, edge, edge, 0.0);
    CHECK(ln::featurize(below, layout, 1, spec) != ln::featurize(at, layout, 1, spec));

    // no visible enemy lands in the dedicated bucket, distinct from any seen one
    auto blind = make_obs(layout, 0.8, true, 0.0, 0.0, 0.0);
    blind[env::ObsLayout::kOwnBlock] = 0.0;  // clear the visible flag
    int blind_f = ln::featurize(blind, layout, 1, spec);
    CHECK(blind_f != ln::featurize(at, layout, 1, spec));
    CHECK(blind_f > 0);

    // bearing sectors split on the dominant axis
    auto east = make_obs(layout, 0.8, true, 0.4, 0.4, 0.01);
    auto north = make_obs(layout, 0.8, true, 0.4, 0.01, 0.4);
    CHECK(ln::featurize(east, layout, 1, spec) != ln::featurize(north, layout, 1, spec));
}

TEST_CASE("td_update: spec arithmetic") {
    env::ActionMask mask = {0, 1, 1};

    ln::QTable q(3);
    ln::Transition t{5, 1, 1.0, 6, true, mask};
    ln::td_update(q, t, 0.5, 0.9);
    CHECK(q.get(5, 1) == doctest::Approx(0.5));

    ln::QTable q2(3);
    q2.add(6, 2, 4.0);
    ln::Transition t2{5, 1, 1.0, 6, false, mask};
    ln::td_update(q2, t2, 1.0, 0.5);  // alpha 1: lands exactly on the target
    CHECK(q2.get(5, 1) == doctest::Approx(1.0 + 0.5 * 4.0));

    ln::QTable q3(3);
    q3.add(5, 1, 2.5);
    ln::Transition t3{5, 1, 7.0, 6, true, mask};
    ln::td_update(q3, t3, 0.0, 0.9);  // alpha 0: no change
    CHECK(q3.get(5, 1) == doctest::Approx(2.5));
}

TEST_CASE("vdn_joint_value: plain sum with the empty convention") {
    CHECK(ln::vdn_joint_value({0.2, 0.3, 0.5}) == doctest::Approx(1.0));
    CHECK(ln::vdn_joint_value({}) == doctest::Approx(0.0));
    CHECK(ln::vdn_joint_value({0.25, -1.5}) == doctest::Approx(ln::vdn_joint_value({-1.5, 0.25})));
}

TEST_CASE("epsilon_greedy: exploitation, exploration, and mask respect") {
    ln::QTable q(4);
    q.add(1, 0, 0.1);
    q.add(1, 2, 0.9);
    q.add(1, 3, 0.4);
    Pcg32 rng(5);

    env::ActionMask all = {1, 1, 1, 1};
    CHECK(ln::epsilon_greedy(q, 1, all, 0.0, rng) == 2);

    env::ActionMask no_best = {1, 1, 0, 1};  // argmax action masked out
    CHECK(ln::epsilon_greedy(q, 1, no_best, 0.0, rng) == 3);

    env::ActionMask empty = {0, 0, 0, 0};
    CHECK_THROWS_AS(ln::epsilon_greedy(q, 1, empty, 0.0, rng), ProtocolError);

    // epsilon 1: uniform over the three legal actions (chi-square, dof 2)
    env::ActionMask legal3 = {1, 0, 1, 1};
    std::vector<int> counts(4, 0);
    for (int i = 0; i < 10000; ++i) counts[ln::epsilon_greedy(q, 1, legal3, 1.0, rng)]++;
    CHECK(counts[1] == 0);
    std::vector<int> observed = {counts[0], counts[2], counts[3]};
    std::vector<double> expected(3, 10000.0 / 3.0);
    CHECK(chi_square_stat(observed, expected) < chi_square_crit_99(2));
}

TEST_CASE("td_update: bandit chain converges to the analytic values") {
    // feature 1 --(either action)--> feature 2, reward 0; feature 2 is a
    // terminal bandit paying 1.0 or 2.0. Analytic: Q(2,a0)=1, Q(2,a1)=2,
    // Q(1,a)=gamma*2.
    const double gamma = 0.9;
    env::ActionMask both = {1, 1};
    ln::QTable q(2);
    for (int sweep = 0; sweep < 2000; ++sweep) {
        ln::td_update(q, {2, 0, 1.0, 0, true, both}, 0.2, gamma);
        ln::td_update(q, {2, 1, 2.0, 0, true, both}, 0.2, gamma);
        ln::td_update(q, {1, 0, 0.0, 2, false, both}, 0.2, gamma);
        ln::td_update(q, {1, 1, 0.0, 2, false, both}, 0.2, gamma);
    }
    CHECK(std::abs(q.get(2, 0) - 1.0) < 1e-6);
    CHECK(std::abs(q.get(2, 1) - 2.0) < 1e-6);
    CHECK(std::abs(q.get(1, 0) - gamma * 2.0) < 1e-6);
    CHECK(std::abs(q.get(1, 1) - gamma * 2.0) < 1e-6);
}

TEST_CASE("learner config validation and the feature-space guard") {
    ln::LearnerConfig cfg;
    CHECK_NOTHROW(ln::validate(cfg));
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(ln::validate(cfg), ConfigError);

    ln::LearnerConfig big;
    big.features.dist_bins = 100000;
    big.total_steps = 10;
    auto table = shipped_stat_table();
    auto env_cfg = dt_config(shipped_scenario("2m_vs_1b"), "attack_nearest");
    CHECK_THROWS_AS(ln::train(env_cfg, table, big, 0), ConfigError);
}

TEST_CASE("train: short run produces a curve, a loadable model, and is bit-reproducible") {
    auto table = shipped_stat_table();
    auto env_cfg = dt_config(shipped_scenario("2m_vs_1b"), "attack_nearest");
    ln::LearnerConfig cfg;
    cfg.total_steps = 4000;
    cfg.eval_interval = 2000;
    cfg.eval_episodes = 4;
    cfg.epsilon_decay_steps = 2000;

    auto run_a = ln::train(env_cfg, table, cfg, 99);
    auto run_b = ln::train(env_cfg, table, cfg, 99);
    CHECK(ln::to_json(run_a.model).dump() == ln::to_json(run_b.model).dump());
    CHECK(run_a.model.table.size() > 0);
    REQUIRE(run_a.curve.size() >= 3);  // 0, 2000, final
    CHECK(run_a.curve.front().env_steps == 0);
    for (size_t i = 1; i < run_a.curve.size(); ++i) {
        CHECK(run_a.curve[i].env_steps > run_a.curve[i - 1].env_steps);
    }

    std::string path = "/tmp/skirmish_test_model.json";
    ln::save_model(run_a.model, path);
    auto loaded = ln::load_model(path);
    CHECK(ln::to_json(loaded).dump() == ln::to_json(run_a.model).dump());
}

TEST_CASE("train: vdn bookkeeping logs joint values equal to the per-agent sum") {
    auto table = shipped_stat_table();
    auto env_cfg = dt_config(shipped_scenario("2m_vs_1b"), "attack_nearest");
    ln::LearnerConfig cfg;
    cfg.total_steps = 2000;
    cfg.eval_interval = 1000;
    cfg.eval_episodes = 2;
    cfg.use_vdn = true;

    auto result = ln::train(env_cfg, table, cfg, 7);
    REQUIRE_FALSE(result.value_log.empty());
    for (const auto& entry : result.value_log) {
        CHECK(entry.joint == ln::vdn_joint_value(entry.per_agent));  // exact
    }
}
