#pragma once

// Random admissible step functions and a hill climber for the Hardy integral.
// Every iterate stays inside the admissible class, so the sharp bound applies
// to each of them; the search doubles as a probe of where the maximum sits.

#include "dyadic/bellman.hpp"
#include "dyadic/error.hpp"
#include "dyadic/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dyadic {

/// Seeded 64-bit engine with platform-independent real draws.
class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform on {0, ..., n-1}.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

    bool coin(double p = 0.5) { return uniform() < p; }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

namespace detail {

inline bool try_sample(const AdmissibleTriple& c, std::size_t pieces, Random& rng, StepFunction& out)
{
    const double plateau = c.plateau();
    std::vector<double> cuts(pieces - 1);
    for (double& t : cuts) {
        do {
            t = rng.uniform();
        } while (t == 0.0);
    }
    std::sort(cuts.begin(), cuts.end());
    // The blend targets below need t_1 <= c <= t_{n-1}.
    if (cuts.front() > plateau)
        cuts.front() = plateau * (1.0 - rng.uniform());
    if (cuts.back() < plateau)
        cuts.back() = plateau + (1.0 - plateau) * rng.uniform();
    std::sort(cuts.begin(), cuts.end());
    if (std::adjacent_find(cuts.begin(), cuts.end()) != cuts.end() || cuts.back() >= 1.0)
        return false;

    std::vector<double> breakpoints{0.0};
    breakpoints.insert(breakpoints.end(), cuts.begin(), cuts.end());
    breakpoints.push_back(1.0);

    std::vector<double> values(pieces);
    for (std::size_t i = 1; i + 1 < pieces; ++i)
        values[i] = rng.uniform(c.m2(), c.m1());
    std::sort(values.begin() + 1, values.end() - 1, std::greater<>{});
    values.front() = c.m1();
    values.back() = c.m2();

    auto mass = [&](const std::vector<double>& v) {
        detail::CompensatedSum s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += v[i] * (breakpoints[i + 1] - breakpoints[i]);
        return s.value();
    };

    // Blend toward whichever extreme lies on the other side of f. Both extremes
    // share g's breakpoints, endpoints and monotonicity, so the blend does too.
    const double current = mass(values);
    std::vector<double> extreme(pieces, c.m2());
    if (current > c.f()) {
        extreme.front() = c.m1();
    } else {
        std::fill(extreme.begin(), extreme.end() - 1, c.m1());
    }
    const double target_mass = mass(extreme);
    if (current != c.f()) {
        const double lambda = (current - c.f()) / (current - target_mass);
        if (!(lambda >= 0.0 && lambda <= 1.0))
            return false;
        for (std::size_t i = 0; i < pieces; ++i)
            values[i] = (1.0 - lambda) * values[i] + lambda * extreme[i];
    }
    values.front() = c.m1();
    values.back() = c.m2();
    for (std::size_t i = 1; i < pieces; ++i)
        values[i] = std::clamp(values[i], c.m2(), values[i - 1]);

    StepFunction g(std::move(breakpoints), std::move(values));
    if (!check_admissible(g, c, 1e-9))
        return false;
    out = std::move(g);
    return true;
}

} // namespace detail

/// A random member of the admissible class with at most `pieces` pieces.
/// Deterministic in `seed`.
inline StepFunction sample_admissible(const AdmissibleTriple& c, std::size_t pieces, std::uint64_t seed)
{
    if (pieces < 2)
        throw DomainError("sample_admissible: pieces must be at least 2");
    if (pieces == 2 || c.m1() == c.f())
        return two_level_extremizer(c);
    Random rng(seed);
    StepFunction out = StepFunction::constant(c.f());
    constexpr int max_attempts = 64;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        if (detail::try_sample(c, pieces, rng, out))
            return out;
    }
    throw Error("sample_admissible: no admissible draw after " + std::to_string(max_attempts) + " attempts");
}

struct SearchRecord {
    std::size_t iteration = 0;
    double value = 0.0;       // I_g
    double gap = 0.0;         // sharp_bound - I_g
    double l1_distance = 0.0; // to the two-level extremizer
};

struct SearchTrace {
    std::vector<SearchRecord> records;
    StepFunction best = StepFunction::constant(0.0);
    std::uint64_t seed = 0;
    double bound = 0.0;
};

namespace detail {

// Mutable working copy of a step function for the hill climber. Pieces may
// carry equal values; widths stay positive.
class Staircase {
public:
    explicit Staircase(const StepFunction& g) : t_(g.breakpoints()), v_(g.values()), h_(t_.size())
    {
        for (std::size_t i = 0; i < t_.size(); ++i)
            h_[i] = entropy_weight(t_[i]);
    }

    [[nodiscard]] std::size_t pieces() const { return v_.size(); }
    [[nodiscard]] double width(std::size_t i) const { return t_[i + 1] - t_[i]; }

    [[nodiscard]] double hardy_integral() const
    {
        CompensatedSum s;
        for (std::size_t i = 0; i < v_.size(); ++i)
            s += v_[i] * (h_[i + 1] - h_[i]);
        return s.value();
    }

    [[nodiscard]] StepFunction to_step_function() const { return {t_, v_}; }

    std::vector<double>& breakpoints() { return t_; }
    std::vector<double>& values() { return v_; }

    void set_breakpoint(std::size_t b, double t)
    {
        t_[b] = t;
        h_[b] = entropy_weight(t);
    }

private:
    std::vector<double> t_;
    std::vector<double> v_;
    std::vector<double> h_;
};

} // namespace detail

/// Hill climbing over the admissible class with at most `pieces` pieces.
///
/// Moves: transfer mass from a later free piece to an earlier one, or shift a
/// breakpoint and rebalance the integral on a free piece. The first and last
/// pieces are pinned to M1 and M2. A move is kept only if I_g increases, and a
/// record is appended for the start and for every kept move.
inline SearchTrace maximize_hardy_integral(const AdmissibleTriple& c, std::size_t pieces, std::size_t budget,
                                           std::uint64_t seed)
{
    if (pieces < 2)
        throw DomainError("maximize_hardy_integral: pieces must be at least 2");
    if (budget < 1)
        throw DomainError("maximize_hardy_integral: budget must be at least 1");

    const StepFunction target = two_level_extremizer(c);
    SearchTrace trace;
    trace.seed = seed;
    trace.bound = sharp_bound(c);

    StepFunction start = sample_admissible(c, pieces, seed);
    detail::Staircase state(start);
    double value = state.hardy_integral();
    auto record = [&](std::size_t iteration, const StepFunction& g) {
        trace.records.push_back({iteration, value, trace.bound - value, l1_distance(g, target)});
    };
    record(0, start);
    trace.best = std::move(start);

    const std::size_t n = state.pieces();
    if (n < 3) // no free piece
        return trace;

    constexpr double min_width = 1e-12;
    Random rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto& t = state.breakpoints();
    auto& v = state.values();
    const std::size_t free_count = n - 2; // pieces 1 .. n-2

    for (std::size_t iteration = 1; iteration <= budget; ++iteration) {
        const auto saved_t = t;
        const auto saved_v = v;
        bool proposed = false;

        if (free_count >= 2 && rng.coin(0.6)) {
            std::size_t i = 1 + rng.index(free_count);
            std::size_t j = 1 + rng.index(free_count);
            if (i == j)
                continue;
            if (i > j)
                std::swap(i, j);
            const double room_up = (v[i - 1] - v[i]) * state.width(i);
            const double room_down = (v[j] - v[j + 1]) * state.width(j);
            double mass = std::min(room_up, room_down);
            if (!(mass > 0.0))
                continue;
            if (rng.coin())
                mass *= rng.uniform();
            v[i] = std::min(v[i - 1], v[i] + mass / state.width(i));
            v[j] = std::max(v[j + 1], v[j] - mass / state.width(j));
            proposed = true;
        } else {
            const std::size_t b = 1 + rng.index(n - 1); // between pieces b-1 and b
            const double scale = std::pow(10.0, rng.uniform(-7.0, -1.0));
            const double moved = std::clamp(t[b] + scale * rng.uniform(-1.0, 1.0), t[b - 1] + min_width,
                                            t[b + 1] - min_width);
            if (!(moved > t[b - 1] && moved < t[b + 1]) || moved == t[b])
                continue;
            const double gained = (v[b - 1] - v[b]) * (moved - t[b]);
            std::size_t m = 0;
            if (rng.coin()) {
                m = rng.coin() ? b - 1 : b;
                if (m == 0 || m == n - 1)
                    m = b == 1 ? 1 : b - 1;
            } else {
                m = 1 + rng.index(free_count);
            }
            state.set_breakpoint(b, moved);
            const double w = state.width(m);
            const double rebalanced = v[m] - gained / w;
            if (!(w > min_width) || rebalanced > v[m - 1] || rebalanced < v[m + 1] || rebalanced < 0.0) {
                state.set_breakpoint(b, saved_t[b]);
                continue;
            }
            v[m] = rebalanced;
            proposed = true;
        }

        if (!proposed)
            continue;
        const double candidate = state.hardy_integral();
        if (candidate > value) {
            value = candidate;
            StepFunction g = state.to_step_function();
            record(iteration, g);
            trace.best = std::move(g);
        } else {
            for (std::size_t b = 0; b < t.size(); ++b) {
                if (t[b] != saved_t[b])
                    state.set_breakpoint(b, saved_t[b]);
            }
            v = saved_v;
        }
    }
    return trace;
}

} // namespace dyadic
