// Policies drive one side of an episode through the masked action interface.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "skirmish/env/environment.hpp"
#include "skirmish/learn/featurize.hpp"
#include "skirmish/learn/model.hpp"
#include "skirmish/script/ast.hpp"
#include "skirmish/script/interpreter.hpp"

namespace skirmish::eval {

class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual void begin_episode(const env::Environment&, int /*player*/, uint64_t /*seed*/) {}
    virtual std::vector<int> act(const env::Environment& envr, int player) = 0;
};

// Drives units with a decision tree. Scripts only emit attacks inside attack
// range (within sight by the archetype invariant), so the produced actions
// are always mask-legal.
class ScriptPolicy : public Policy {
public:
    explicit ScriptPolicy(script::DecisionTree tree) : tree_(std::move(tree)) {}

    std::string name() const override { return tree_.name; }

    std::vector<int> act(const env::Environment& envr, int player) override {
        auto commands = script::evaluate_script(tree_, envr.context(), envr.battle(), player);
        std::vector<int> actions;
        actions.reserve(commands.size());
        for (const auto& ic : commands) actions.push_back(env::encode_action(player, ic.command));
        return actions;
    }

    const script::DecisionTree& tree() const { return tree_; }

private:
    script::DecisionTree tree_;
};

// Greedy play from a frozen tabular model.
class ModelPolicy : public Policy {
public:
    explicit ModelPolicy(learn::QModel model) : model_(std::move(model)) {}

    std::string name() const override { return "model:" + model_.scenario_name; }

    void begin_episode(const env::Environment& envr, int player, uint64_t) override {
        learn::check_shape(model_, envr.layout());
        if (player != 1) throw ConfigError("tabular models are trained for the player-1 layout");
    }

    std::vector<int> act(const env::Environment& envr, int player) override {
        std::vector<int> actions;
        for (int i = 0; i < envr.n_agents(player); ++i) {
            int f = learn::featurize(envr.observation(player, i), envr.layout(), player,
                                     model_.features);
            actions.push_back(model_.table.argmax_legal(f, envr.mask(player, i)));
        }
        return actions;
    }

    const learn::QModel& model() const { return model_; }

private:
    learn::QModel model_;
};

}  // namespace skirmish::eval
