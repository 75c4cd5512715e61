// Coarse observation discretization for the tabular learner.
//
// Buckets, in mixed-radix order (all boundaries are half-open, floor rule):
//   distance:  nearest visible enemy's dist/sight in [0,1), dist_bins equal
//              cells, plus one extra "no enemy visible" cell
//   own hp:    hp fraction in [0,1], hp_bins cells, full hp lands in the last
//   cooldown:  ready flag
//   bearing:   8 sectors around the nearest enemy direction (team frame)
// Index 0 is reserved for dead agents (all-zero observation).
#pragma once

#include <cmath>

#include "skirmish/env/encoding.hpp"

namespace skirmish::learn {

struct FeatureSpec {
    int dist_bins = 8;
    int hp_bins = 4;

    static constexpr int kBearingSectors = 8;

    int feature_count() const { return 1 + (dist_bins + 1) * hp_bins * 2 * kBearingSectors; }
};

namespace detail {

// Octant of (dx, dy), counted counterclockwise from east, by comparisons only.
inline int bearing_sector(double dx, double dy) {
    double ax = std::abs(dx);
    double ay = std::abs(dy);
    if (dx >= 0 && dy >= 0) return ax >= ay ? 0 : 1;
    if (dx < 0 && dy >= 0) return ax < ay ? 2 : 3;
    if (dx < 0 && dy < 0) return ax >= ay ? 4 : 5;
    return ax < ay ? 6 : 7;
}

}  // namespace detail

inline int featurize(const env::ObservationVector& obs, const env::ObsLayout& layout, int player,
                     const FeatureSpec& spec) {
    // Dead agents observe nothing; their own-hp entry is zero only when dead
    // (a living unit has hp > 0).
    if (obs[0] == 0.0) return 0;

    double hp_frac = obs[0];
    bool cooldown_ready = obs[2] != 0.0;

    int block = layout.unit_block();
    int n_enemies = layout.n_enemies(player);
    double best_dist = -1.0;
    double best_dx = 0.0;
    double best_dy = 0.0;
    for (int e = 0; e < n_enemies; ++e) {
        int base = env::ObsLayout::kOwnBlock + e * block;
        if (obs[base] == 0.0) continue;  // not visible
        double dist = obs[base + 3];
        if (best_dist < 0.0 || dist < best_dist) {
            best_dist = dist;
            best_dx = obs[base + 1];
            best_dy = obs[base + 2];
        }
    }

    int dist_bucket;
    int bearing = 0;
    if (best_dist < 0.0) {
        dist_bucket = spec.dist_bins;  // nothing in sight
    } else {
        dist_bucket = static_cast<int>(best_dist * spec.dist_bins);
        if (dist_bucket >= spec.dist_bins) dist_bucket = spec.dist_bins - 1;
        bearing = detail::bearing_sector(best_dx, best_dy);
    }
    int hp_bucket = static_cast<int>(hp_frac * spec.hp_bins);
    if (hp_bucket >= spec.hp_bins) hp_bucket = spec.hp_bins - 1;

    int index = dist_bucket;
    index = index * spec.hp_bins + hp_bucket;
    index = index * 2 + (cooldown_ready ? 1 : 0);
    index = index * FeatureSpec::kBearingSectors + bearing;
    return 1 + index;
}

}  // namespace skirmish::learn
