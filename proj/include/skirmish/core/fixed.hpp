// Fixed-point scalar and 2D vector used for all world-state quantities
// (positions, hp, shields, damage, hate). Integer arithmetic throughout so
// trajectories are bit-identical across runs and platforms.
#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace skirmish {

struct Fixed {
    static constexpr int64_t kScale = 1 << 10;  // 1024 sub-units per map unit

    int64_t raw = 0;

    constexpr Fixed() = default;
    constexpr explicit Fixed(int64_t raw_value) : raw(raw_value) {}

    static constexpr Fixed from_int(int64_t v) { return Fixed(v * kScale); }
    static Fixed from_double(double v) { return Fixed(static_cast<int64_t>(std::llround(v * kScale))); }
    static constexpr Fixed zero() { return Fixed(0); }
    static constexpr Fixed one() { return Fixed(kScale); }

    double to_double() const { return static_cast<double>(raw) / kScale; }
    constexpr int64_t floor_int() const {
        return raw >= 0 ? raw / kScale : (raw - kScale + 1) / kScale;
    }

    constexpr bool is_zero() const { return raw == 0; }

    friend constexpr Fixed operator+(Fixed a, Fixed b) { return Fixed(a.raw + b.raw); }
    friend constexpr Fixed operator-(Fixed a, Fixed b) { return Fixed(a.raw - b.raw); }
    friend constexpr Fixed operator-(Fixed a) { return Fixed(-a.raw); }
    friend constexpr Fixed operator*(Fixed a, int64_t k) { return Fixed(a.raw * k); }
    friend constexpr Fixed operator*(int64_t k, Fixed a) { return Fixed(a.raw * k); }
    constexpr Fixed& operator+=(Fixed b) { raw += b.raw; return *this; }
    constexpr Fixed& operator-=(Fixed b) { raw -= b.raw; return *this; }

    // Product of two fixed scalars, truncated toward zero.
    friend constexpr Fixed mul(Fixed a, Fixed b) { return Fixed(a.raw * b.raw / kScale); }

    friend constexpr auto operator<=>(Fixed a, Fixed b) = default;

    // Exact decimal text (scale is a power of two, so the expansion is finite).
    std::string to_string() const {
        int64_t v = raw;
        std::string sign = v < 0 ? "-" : "";
        if (v < 0) v = -v;
        int64_t whole = v / kScale;
        int64_t frac = v % kScale;
        std::string out = sign + std::to_string(whole);
        if (frac != 0) {
            // frac/1024 as decimal digits: multiply by 10 and peel.
            std::string digits;
            int64_t rem = frac;
            while (rem != 0) {
                rem *= 10;
                digits.push_back(static_cast<char>('0' + rem / kScale));
                rem %= kScale;
            }
            out += "." + digits;
        }
        return out;
    }
};

// Clamp to [lo, hi].
constexpr Fixed clamp(Fixed v, Fixed lo, Fixed hi) {
    if (v < lo) return lo;
    if (v > hi) return hi;
    return v;
}

constexpr Fixed min(Fixed a, Fixed b) { return a < b ? a : b; }
constexpr Fixed max(Fixed a, Fixed b) { return a > b ? a : b; }

struct Vec2 {
    Fixed x;
    Fixed y;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

// Squared distance in raw^2 units. Fits int64 for any map up to ~2^21 units.
constexpr int64_t dist_sq_raw(Vec2 a, Vec2 b) {
    int64_t dx = a.x.raw - b.x.raw;
    int64_t dy = a.y.raw - b.y.raw;
    return dx * dx + dy * dy;
}

// Integer square root, floor(sqrt(v)) for v >= 0.
inline int64_t isqrt64(int64_t v) {
    if (v <= 0) return 0;
    int64_t r = static_cast<int64_t>(std::sqrt(static_cast<double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

// Euclidean distance as a Fixed, rounded down to the raw grid.
inline Fixed distance(Vec2 a, Vec2 b) { return Fixed(isqrt64(dist_sq_raw(a, b))); }

// Compares distance(a,b) against a fixed threshold without taking a root.
inline bool within(Vec2 a, Vec2 b, Fixed range) {
    if (range.raw < 0) return false;
    return dist_sq_raw(a, b) <= range.raw * range.raw;
}

}  // namespace skirmish
