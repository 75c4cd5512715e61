// Win-rate aggregation and report rendering: stdout table, CSV, and
// JSON-lines of the raw per-episode results.
#pragma once

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skirmish/eval/episode.hpp"

namespace skirmish::eval {

struct CellResult {
    std::string task;
    std::string policy_name;
    std::string opponent_name;
    int episodes_per_seed = 0;
    std::vector<double> per_seed_means;
    double mean = 0.0;      // arithmetic mean of the per-seed means
    double variance = 0.0;  // across seeds
    std::vector<EpisodeResult> episodes;
};

struct WinRateReport {
    std::vector<CellResult> cells;
    double smoothing = 0.6;
};

// s_0 = x_0, s_t = factor * s_(t-1) + (1 - factor) * x_t
inline std::vector<double> smooth_series(const std::vector<double>& xs, double factor) {
    std::vector<double> out;
    out.reserve(xs.size());
    double s = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        s = i == 0 ? xs[0] : factor * s + (1.0 - factor) * xs[i];
        out.push_back(s);
    }
    return out;
}

inline void finalize_cell(CellResult& cell) {
    double sum = 0.0;
    for (double m : cell.per_seed_means) sum += m;
    cell.mean = cell.per_seed_means.empty() ? 0.0 : sum / cell.per_seed_means.size();
    double var = 0.0;
    for (double m : cell.per_seed_means) var += (m - cell.mean) * (m - cell.mean);
    cell.variance = cell.per_seed_means.empty() ? 0.0 : var / cell.per_seed_means.size();
}

inline std::string render_table(const WinRateReport& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %-24s %-24s %8s %10s\n", "task", "policy", "opponent",
                  "win", "variance");
    out << line;
    for (const auto& cell : report.cells) {
        std::snprintf(line, sizeof line, "%-20s %-24s %-24s %8.4f %10.6f\n", cell.task.c_str(),
                      cell.policy_name.c_str(), cell.opponent_name.c_str(), cell.mean,
                      cell.variance);
        out << line;
    }
    return out.str();
}

inline std::string to_csv(const WinRateReport& report) {
    std::ostringstream out;
    out << "task,policy,opponent,mean_win_rate,variance,per_seed_means\n";
    for (const auto& cell : report.cells) {
        out << cell.task << "," << cell.policy_name << "," << cell.opponent_name << ","
            << cell.mean << "," << cell.variance << ",";
        for (size_t i = 0; i < cell.per_seed_means.size(); ++i) {
            out << (i ? ";" : "") << cell.per_seed_means[i];
        }
        out << "\n";
    }
    return out.str();
}

inline void episodes_to_jsonl(const WinRateReport& report, std::ostream& out) {
    for (const auto& cell : report.cells) {
        for (const auto& ep : cell.episodes) {
            out << nlohmann::json{{"task", cell.task},
                                  {"policy", cell.policy_name},
                                  {"opponent", cell.opponent_name},
                                  {"winner", to_string(ep.winner)},
                                  {"steps", ep.steps},
                                  {"return_p1", ep.return_p1},
                                  {"return_p2", ep.return_p2},
                                  {"script_index", ep.opponent_script_index},
                                  {"seed", ep.seed}}
                       .dump()
                << "\n";
        }
    }
}

}  // namespace skirmish::eval
