// The script-authoring refinement loop: a planner drafts strategies for both
// sides, per-side coders emit scripts in the closed DSL (with parse-error
// repair rounds), the scripts fight in simulation, and a critic routes
// suggestions back into the next iteration. The loop stops once both sides'
// win rates hold steady over a window, or at the iteration cap, and returns
// the opponent-side (blue) script.
#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skirmish/env/environment.hpp"
#include "skirmish/eval/episode.hpp"
#include "skirmish/eval/policy.hpp"
#include "skirmish/gen/prompts.hpp"
#include "skirmish/gen/provider.hpp"
#include "skirmish/script/parser.hpp"

namespace skirmish::gen {

struct IterationRates {
    int iteration = 0;
    double p1_win = 0.0;
    double p2_win = 0.0;
};

struct RefinementState {
    int iteration = 0;
    script::ScriptSource red;
    script::ScriptSource blue;
    std::vector<IterationRates> history;
    bool converged = false;
};

struct RefineOptions {
    int max_iters = 8;
    int stability_window = 3;
    double stability_tol = 0.05;
    int sim_episodes = 32;
    int coder_repair_rounds = 3;
    uint64_t seed = 0;
    std::string transcript_path;  // empty: keep the transcript in memory only
};

// Stage failure carrying the loop state for diagnosis.
struct RefineAborted : GenerationError {
    RefinementState state;
    RefineAborted(const std::string& what, RefinementState s)
        : GenerationError(what), state(std::move(s)) {}
};

class Transcript {
public:
    explicit Transcript(const std::string& path) {
        if (!path.empty()) {
            file_.emplace(path);
            if (!*file_) throw IoError("cannot write transcript " + path);
        }
    }

    void record(int iteration, const std::string& stage, const std::string& direction,
                const std::string& text) {
        nlohmann::json j{{"iteration", iteration},
                         {"stage", stage},
                         {"direction", direction},
                         {"text", text}};
        entries_.push_back(j);
        if (file_) *file_ << j.dump() << "\n";
    }

    const std::vector<nlohmann::json>& entries() const { return entries_; }

private:
    std::optional<std::ofstream> file_;
    std::vector<nlohmann::json> entries_;
};

namespace detail {

inline ProviderResponse ask(TextProvider& provider, const PromptBundle& system,
                            std::vector<std::pair<std::string, std::string>> messages,
                            Transcript& transcript, int iteration, const std::string& stage) {
    ProviderRequest request;
    request.prompt.system = system.system;
    request.prompt.messages = std::move(messages);
    for (const auto& [role, text] : request.prompt.messages) {
        transcript.record(iteration, stage, "request", text);
    }
    ProviderResponse response;
    try {
        response = provider.complete(request);
    } catch (const ProviderError&) {
        // transport errors are retriable: one immediate retry
        response = provider.complete(request);
    }
    transcript.record(iteration, stage, "response", response.text);
    return response;
}

}  // namespace detail

// Planner: two free-text strategies extracted by the documented section
// headers. A malformed response earns exactly one reprompt before failing.
inline std::pair<std::string, std::string> plan_strategies(TextProvider& provider,
                                                           const PromptBundle& env_prompt,
                                                           Transcript& transcript, int iteration,
                                                           const std::string& extra_context = "") {
    std::string task = std::string(kStagePlan) + "\nIteration " + std::to_string(iteration) +
                       ".\nPropose one strategy per side. Answer with sections " + kRedHeader +
                       " and " + kBlueHeader + ".";
    if (!extra_context.empty()) task += "\n\n" + extra_context;
    auto response = detail::ask(provider, env_prompt, {{"user", task}}, transcript, iteration,
                                "plan");
    try {
        return split_sides(response.text);
    } catch (const GenerationError&) {
        auto retry = detail::ask(
            provider, env_prompt,
            {{"user", task + "\n\nYour previous answer was missing the required sections. "
                             "Answer again with both sections present."}},
            transcript, iteration, "plan");
        return split_sides(retry.text);  // second failure propagates
    }
}

// Coder: emits DSL for one side; parse failures are fed back verbatim for up
// to `repair_rounds` repair attempts.
inline script::ScriptSource code_script(TextProvider& provider, const PromptBundle& env_prompt,
                                        const std::string& plan, const std::string& side,
                                        Transcript& transcript, int iteration,
                                        int repair_rounds = 3) {
    if (plan.empty()) throw GenerationError("empty plan for the " + side + " coder");
    const char* stage = side == "red" ? kStageCodeRed : kStageCodeBlue;
    std::vector<std::pair<std::string, std::string>> messages;
    messages.emplace_back("user", std::string(stage) + "\nIteration " +
                                      std::to_string(iteration) + ".\nStrategy:\n" + plan +
                                      "\nAnswer with one fenced code block of script text.");
    std::string last_error;
    for (int round = 0; round <= repair_rounds; ++round) {
        auto response = detail::ask(provider, env_prompt, messages, transcript, iteration,
                                    "code_" + side);
        std::string text = extract_code(response.text);
        try {
            script::parse_script({text, side + "_iter" + std::to_string(iteration)});
            return {text, side + "_iter" + std::to_string(iteration)};
        } catch (const ParseError& e) {
            last_error = e.what();
            messages.emplace_back("assistant", response.text);
            messages.emplace_back("user", std::string("The script failed to parse: ") + e.what() +
                                              "\nFix it and answer with one fenced code block.");
        }
    }
    throw GenerationError("the " + side + " coder produced unparseable scripts after " +
                          std::to_string(repair_rounds) + " repair rounds; last error: " +
                          last_error);
}

// Critic: turns a simulation summary into per-side suggestions. The same
// one-reprompt policy as the planner applies.
inline std::pair<std::string, std::string> critique(TextProvider& provider,
                                                    const PromptBundle& env_prompt,
                                                    const std::string& simulation_report,
                                                    Transcript& transcript, int iteration) {
    std::string task = std::string(kStageCritique) + "\nIteration " + std::to_string(iteration) +
                       ".\n" + simulation_report + "\nAnswer with sections " + kRedHeader +
                       " and " + kBlueHeader + ".";
    auto response = detail::ask(provider, env_prompt, {{"user", task}}, transcript, iteration,
                                "critique");
    try {
        return split_sides(response.text);
    } catch (const GenerationError&) {
        auto retry = detail::ask(
            provider, env_prompt,
            {{"user", task + "\n\nYour previous answer was missing the required sections. "
                             "Answer again with both sections present."}},
            transcript, iteration, "critique");
        return split_sides(retry.text);
    }
}

// Window stability: every rate in the last `window` iterations stays within
// `tol` of that window's extremes, for both sides.
inline bool rates_stable(const std::vector<IterationRates>& history, int window, double tol) {
    if (static_cast<int>(history.size()) < window) return false;
    double lo1 = 1.0, hi1 = 0.0, lo2 = 1.0, hi2 = 0.0;
    for (size_t i = history.size() - window; i < history.size(); ++i) {
        lo1 = std::min(lo1, history[i].p1_win);
        hi1 = std::max(hi1, history[i].p1_win);
        lo2 = std::min(lo2, history[i].p2_win);
        hi2 = std::max(hi2, history[i].p2_win);
    }
    return (hi1 - lo1) <= tol && (hi2 - lo2) <= tol;
}

struct RefineResult {
    script::ScriptSource accepted;  // blue, the opponent side
    RefinementState state;
    std::vector<nlohmann::json> transcript;
};

inline IterationRates simulate_pair(const script::ScriptSource& red,
                                    const script::ScriptSource& blue,
                                    const combat::ScenarioConfig& scenario,
                                    const combat::StatTable& table, int episodes, uint64_t seed,
                                    int iteration) {
    env::EnvConfig cfg;
    cfg.scenario = scenario;
    cfg.mode = env::Mode::SelfPlay;
    env::Environment envr(cfg, table);
    eval::ScriptPolicy p1(script::parse_script(red));
    eval::ScriptPolicy p2(script::parse_script(blue));
    IterationRates rates;
    rates.iteration = iteration;
    for (int ep = 0; ep < episodes; ++ep) {
        uint64_t s = seed ^ (0x17ull * (iteration + 1));
        uint64_t ep_seed = splitmix64(s) + ep;
        auto result = eval::run_episode(envr, p1, &p2, ep_seed);
        if (result.winner == eval::EpisodeResult::Winner::P1) rates.p1_win += 1.0;
        if (result.winner == eval::EpisodeResult::Winner::P2) rates.p2_win += 1.0;
    }
    rates.p1_win /= episodes;
    rates.p2_win /= episodes;
    return rates;
}

inline RefineResult refine_loop(TextProvider& provider, const combat::ScenarioConfig& scenario,
                                const combat::StatTable& table, const RefineOptions& options) {
    if (options.max_iters < 1) throw ConfigError("max_iters must be at least 1");
    PromptBundle env_prompt = build_env_prompt(scenario, table);
    Transcript transcript(options.transcript_path);
    RefinementState state;
    std::string carry_context;

    for (int iter = 0; iter < options.max_iters; ++iter) {
        state.iteration = iter + 1;
        try {
            auto [plan_red, plan_blue] = plan_strategies(provider, env_prompt, transcript, iter,
                                                         carry_context);
            state.red = code_script(provider, env_prompt, plan_red, "red", transcript, iter,
                                    options.coder_repair_rounds);
            state.blue = code_script(provider, env_prompt, plan_blue, "blue", transcript, iter,
                                     options.coder_repair_rounds);

            IterationRates rates = simulate_pair(state.red, state.blue, scenario, table,
                                                 options.sim_episodes, options.seed, iter);
            state.history.push_back(rates);

            std::ostringstream report;
            report << "Simulation over " << options.sim_episodes << " episodes: red win rate "
                   << rates.p1_win << ", blue win rate " << rates.p2_win << ".";
            auto [suggest_red, suggest_blue] = critique(provider, env_prompt, report.str(),
                                                        transcript, iter);
            carry_context = std::string("Critic suggestions from the previous iteration:\n") +
                            kRedHeader + "\n" + suggest_red + "\n" + kBlueHeader + "\n" +
                            suggest_blue;
        } catch (const ProviderError& e) {
            throw RefineAborted(std::string("provider failure: ") + e.what(), state);
        } catch (const GenerationError& e) {
            throw RefineAborted(e.what(), state);
        }

        if (rates_stable(state.history, options.stability_window, options.stability_tol)) {
            state.converged = true;
            break;
        }
    }

    // Accepted scripts must parse and survive a 100-episode smoke rollout.
    script::DecisionTree blue_tree = script::parse_script(state.blue);
    {
        env::EnvConfig cfg;
        cfg.scenario = scenario;
        cfg.mode = env::Mode::DecisionTree;
        cfg.opponent_mixture.entries.push_back({blue_tree, 1.0});
        env::Environment envr(cfg, table);
        eval::ScriptPolicy probe(script::builtin_script("attack_nearest"));
        for (int ep = 0; ep < 100; ++ep) {
            eval::run_episode(envr, probe, nullptr, options.seed + 7000 + ep);
        }
    }

    return {state.blue, state, transcript.entries()};
}

}  // namespace skirmish::gen
