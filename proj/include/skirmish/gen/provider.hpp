// Text-generation provider interface plus the deterministic mock used for
// all offline testing. Generated text is only ever fed to the script parser;
// nothing a provider returns is executed as native code.
#pragma once

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "skirmish/core/error.hpp"

namespace skirmish::gen {

struct PromptBundle {
    std::string system;
    std::vector<std::pair<std::string, std::string>> messages;  // (role, text)
};

struct ProviderRequest {
    PromptBundle prompt;
    int max_tokens = 2048;
    double temperature = 0.2;
};

struct ProviderResponse {
    std::string text;
    std::string finish_reason = "stop";
};

class TextProvider {
public:
    virtual ~TextProvider() = default;
    virtual std::string name() const = 0;
    virtual ProviderResponse complete(const ProviderRequest& request) = 0;
};

// Stage markers the refinement loop embeds in its task messages; the mock
// playbook keys on them.
inline constexpr const char* kStagePlan = "## Task: plan strategies";
inline constexpr const char* kStageCodeRed = "## Task: write the red-side script";
inline constexpr const char* kStageCodeBlue = "## Task: write the blue-side script";
inline constexpr const char* kStageCritique = "## Task: critique the simulation results";

// Section delimiters for two-sided responses.
inline constexpr const char* kRedHeader = "[RED]";
inline constexpr const char* kBlueHeader = "[BLUE]";

// Deterministic offline provider. With queued responses it replays them in
// order; otherwise it answers from a fixed playbook that is a pure function
// of the request text (stage marker + iteration number).
class MockProvider : public TextProvider {
public:
    std::string name() const override { return "mock"; }

    void push_response(std::string text) { queue_.push_back(std::move(text)); }
    size_t queued() const { return queue_.size(); }

    ProviderResponse complete(const ProviderRequest& request) override {
        if (!queue_.empty()) {
            ProviderResponse r{queue_.front(), "stop"};
            queue_.pop_front();
            return r;
        }
        return {playbook(request), "stop"};
    }

private:
    static int iteration_of(const std::string& text) {
        auto pos = text.rfind("Iteration ");
        if (pos == std::string::npos) return 0;
        return std::atoi(text.c_str() + pos + 10);
    }

    static std::string playbook(const ProviderRequest& request) {
        std::string all;
        for (const auto& [role, text] : request.prompt.messages) {
            all += text;
            all += "\n";
        }
        int iter = iteration_of(all);
        auto contains = [&](const char* marker) { return all.find(marker) != std::string::npos; };

        if (contains(kStagePlan)) {
            return std::string(kRedHeader) +
                   "\nPressure the closest target and retreat while weapons cycle.\n" +
                   kBlueHeader + "\nCollapse onto the most damaged enemy and finish it.\n";
        }
        if (contains(kStageCodeRed)) {
            if (iter == 0) return "```\nfallback: attack_nearest;\n```\n";
            return "```\nwhen cooldown_ready and enemies_in_range >= 1: attack_nearest;\n"
                   "fallback: move_away_from_nearest_enemy;\n```\n";
        }
        if (contains(kStageCodeBlue)) {
            if (iter == 0) return "```\nfallback: attack_weakest;\n```\n";
            return "```\nwhen hp_fraction < 0.3: move_away_from_nearest_enemy;\n"
                   "fallback: attack_weakest;\n```\n";
        }
        if (contains(kStageCritique)) {
            return std::string(kRedHeader) +
                   "\nKeep range discipline; avoid trading at melee distance.\n" + kBlueHeader +
                   "\nCommit to the focus target even while repositioning.\n";
        }
        return "OK.\n";
    }

    std::deque<std::string> queue_;
};

}  // namespace skirmish::gen
