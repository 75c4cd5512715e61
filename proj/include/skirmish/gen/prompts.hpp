// Environment prompt assembly and response-section extraction.
#pragma once

#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "skirmish/combat/data.hpp"
#include "skirmish/core/error.hpp"
#include "skirmish/gen/provider.hpp"
#include "skirmish/script/grammar.hpp"

namespace skirmish::gen {

// Pure function of (scenario, stat table): unit stat blocks for both rosters,
// map facts, the win condition, and the script grammar.
inline PromptBundle build_env_prompt(const combat::ScenarioConfig& scenario,
                                     const combat::StatTable& table) {
    combat::validate(scenario, table);
    std::ostringstream sys;
    sys << "You design opponent scripts for a two-team micromanagement combat simulator.\n\n";
    sys << "## Map\n";
    sys << "size " << scenario.map_width.to_string() << " x " << scenario.map_height.to_string()
        << ", step limit " << scenario.step_limit << ", difficulty " << scenario.difficulty
        << "\n";
    auto rect = [](const combat::Rect& r) {
        std::ostringstream s;
        s << "[" << r.x0.to_string() << ", " << r.y0.to_string() << "] to [" << r.x1.to_string()
          << ", " << r.y1.to_string() << "]";
        return s.str();
    };
    sys << "red (player 1) spawn " << rect(scenario.team1_spawn) << "\n";
    sys << "blue (player 2) spawn " << rect(scenario.team2_spawn) << "\n\n";

    sys << "## Rosters\n";
    sys << "red:";
    for (const auto& name : scenario.team1_roster) sys << " " << name;
    sys << "\nblue:";
    for (const auto& name : scenario.team2_roster) sys << " " << name;
    sys << "\n\n## Unit stats\n";
    std::set<std::string> listed;
    for (const auto* roster : {&scenario.team1_roster, &scenario.team2_roster}) {
        for (const auto& name : *roster) {
            if (!listed.insert(name).second) continue;
            const auto& a = table.at(name);
            sys << name << ": hp " << a.max_hp.to_string() << ", shield "
                << a.max_shield.to_string() << ", armor " << a.armor.to_string() << ", damage "
                << a.damage.to_string() << ", attack range " << a.attack_range.to_string()
                << ", sight " << a.sight_range.to_string() << ", cooldown " << a.cooldown_steps
                << " steps, speed " << a.move_speed.to_string() << "\n";
        }
    }
    sys << "\n## Win condition\n";
    sys << "A side wins when the other side has no remaining units; hitting the step limit is a "
           "draw.\n\n";
    sys << "## Script language\n" << script::kGrammarText << "\n";

    PromptBundle bundle;
    bundle.system = sys.str();
    return bundle;
}

// Splits a two-sided response on the [RED] / [BLUE] headers.
inline std::pair<std::string, std::string> split_sides(const std::string& text) {
    auto red = text.find(kRedHeader);
    auto blue = text.find(kBlueHeader);
    if (red == std::string::npos || blue == std::string::npos || blue < red) {
        throw GenerationError("response is missing the [RED]/[BLUE] sections");
    }
    auto red_start = red + std::string(kRedHeader).size();
    std::string red_text = text.substr(red_start, blue - red_start);
    std::string blue_text = text.substr(blue + std::string(kBlueHeader).size());
    auto trim = [](std::string s) {
        auto a = s.find_first_not_of(" \t\r\n");
        auto b = s.find_last_not_of(" \t\r\n");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    red_text = trim(red_text);
    blue_text = trim(blue_text);
    if (red_text.empty() || blue_text.empty()) {
        throw GenerationError("response has an empty [RED] or [BLUE] section");
    }
    return {red_text, blue_text};
}

// Pulls the first fenced code block; falls back to the whole text.
inline std::string extract_code(const std::string& text) {
    auto open = text.find("```");
    if (open == std::string::npos) return text;
    auto body_start = text.find('\n', open);
    if (body_start == std::string::npos) return text;
    auto close = text.find("```", body_start);
    if (close == std::string::npos) return text.substr(body_start + 1);
    return text.substr(body_start + 1, close - body_start - 1);
}

}  // namespace skirmish::gen
