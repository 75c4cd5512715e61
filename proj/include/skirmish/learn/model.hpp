// Model persistence: a versioned, self-describing JSON dump of the shared
// Q-table plus the configuration hash and the shape facts needed to validate
// it against a scenario at load time. Entries are kept sorted so identical
// training runs produce byte-identical files.
#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "skirmish/core/error.hpp"
#include "skirmish/learn/featurize.hpp"
#include "skirmish/learn/qtable.hpp"

namespace skirmish::learn {

inline uint64_t fnv1a64(const std::string& text) {
    uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

struct QModel {
    int version = 1;
    std::string scenario_name;
    int n_actions = 0;
    int obs_len = 0;
    FeatureSpec features;
    double gamma = 0.99;
    bool use_vdn = false;
    std::string config_hash;
    QTable table{0};
};

inline nlohmann::json to_json(const QModel& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [k, v] : m.table.entries()) {
        entries.push_back(nlohmann::json::array({k, v}));
    }
    return nlohmann::json{{"version", m.version},
                          {"kind", "qtable"},
                          {"scenario", m.scenario_name},
                          {"n_actions", m.n_actions},
                          {"obs_len", m.obs_len},
                          {"dist_bins", m.features.dist_bins},
                          {"hp_bins", m.features.hp_bins},
                          {"gamma", m.gamma},
                          {"use_vdn", m.use_vdn},
                          {"config_hash", m.config_hash},
                          {"entries", entries}};
}

inline void save_model(const QModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << to_json(m).dump() << "\n";
}

inline QModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed model file " + path + ": " + e.what());
    }
    if (j.value("kind", "") != "qtable" || j.value("version", 0) != 1) {
        throw ConfigError("unsupported model file " + path);
    }
    QModel m;
    m.scenario_name = j.value("scenario", "");
    m.n_actions = j["n_actions"].get<int>();
    m.obs_len = j["obs_len"].get<int>();
    m.features.dist_bins = j["dist_bins"].get<int>();
    m.features.hp_bins = j["hp_bins"].get<int>();
    m.gamma = j["gamma"].get<double>();
    m.use_vdn = j.value("use_vdn", false);
    m.config_hash = j.value("config_hash", "");
    m.table = QTable(m.n_actions);
    for (const auto& e : j["entries"]) {
        m.table.set_raw(e[0].get<int64_t>(), e[1].get<double>());
    }
    return m;
}

// Raises when a model was trained against a different interface shape.
inline void check_shape(const QModel& m, const env::ObsLayout& layout) {
    if (m.n_actions != layout.mask_len(1) || m.obs_len != layout.obs_len(1)) {
        throw ConfigError("model/scenario shape mismatch: model expects obs " +
                          std::to_string(m.obs_len) + "/actions " + std::to_string(m.n_actions) +
                          ", scenario has obs " + std::to_string(layout.obs_len(1)) +
                          "/actions " + std::to_string(layout.mask_len(1)));
    }
}

}  // namespace skirmish::learn
