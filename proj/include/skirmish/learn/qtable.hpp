// Tabular action values with parameter sharing across homogeneous agents,
// plus the TD update, the additive joint value, and epsilon-greedy selection.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "skirmish/core/error.hpp"
#include "skirmish/core/rng.hpp"
#include "skirmish/env/encoding.hpp"

namespace skirmish::learn {

class QTable {
public:
    explicit QTable(int n_actions) : n_actions_(n_actions) {}

    int n_actions() const { return n_actions_; }

    // Unseen entries read as zero.
    double get(int feature, int action) const {
        auto it = values_.find(key(feature, action));
        return it == values_.end() ? 0.0 : it->second;
    }

    void add(int feature, int action, double delta) { values_[key(feature, action)] += delta; }

    double max_legal(int feature, const env::ActionMask& mask) const {
        double best = 0.0;
        bool seen = false;
        for (int a = 0; a < n_actions_ && a < static_cast<int>(mask.size()); ++a) {
            if (!mask[a]) continue;
            double v = get(feature, a);
            if (!seen || v > best) {
                best = v;
                seen = true;
            }
        }
        return seen ? best : 0.0;
    }

    // Greedy legal action, ties broken toward the lowest action index.
    int argmax_legal(int feature, const env::ActionMask& mask) const {
        int best_action = -1;
        double best = 0.0;
        for (int a = 0; a < n_actions_ && a < static_cast<int>(mask.size()); ++a) {
            if (!mask[a]) continue;
            double v = get(feature, a);
            if (best_action < 0 || v > best) {
                best = v;
                best_action = a;
            }
        }
        if (best_action < 0) throw ProtocolError("no legal action in mask");
        return best_action;
    }

    size_t size() const { return values_.size(); }
    const std::map<int64_t, double>& entries() const { return values_; }
    void set_raw(int64_t k, double v) { values_[k] = v; }

private:
    int64_t key(int feature, int action) const {
        return static_cast<int64_t>(feature) * n_actions_ + action;
    }

    int n_actions_ = 0;
    std::map<int64_t, double> values_;  // ordered, so serialization is canonical
};

struct Transition {
    int feature = 0;
    int action = 0;
    double reward = 0.0;  // this agent's share
    int next_feature = 0;
    bool terminal = false;
    env::ActionMask next_mask;
};

// Q(f,a) += alpha * (r + gamma * max_legal Q(f',.) * [not terminal] - Q(f,a))
inline void td_update(QTable& q, const Transition& t, double alpha, double gamma) {
    double bootstrap = t.terminal ? 0.0 : gamma * q.max_legal(t.next_feature, t.next_mask);
    double td_error = t.reward + bootstrap - q.get(t.feature, t.action);
    q.add(t.feature, t.action, alpha * td_error);
}

// Joint action value as the plain sum of per-agent values.
inline double vdn_joint_value(const std::vector<double>& per_agent_values) {
    double sum = 0.0;
    for (double v : per_agent_values) sum += v;
    return sum;
}

inline int epsilon_greedy(const QTable& q, int feature, const env::ActionMask& mask,
                          double epsilon, Pcg32& rng) {
    std::vector<int> legal;
    for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
        if (mask[a]) legal.push_back(a);
    }
    if (legal.empty()) throw ProtocolError("no legal action in mask");
    if (epsilon > 0.0 && rng.next_double() < epsilon) {
        return legal[rng.next_below(static_cast<uint32_t>(legal.size()))];
    }
    return q.argmax_legal(feature, mask);
}

}  // namespace skirmish::learn
