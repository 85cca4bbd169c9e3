#pragma once

// Independent reference computations for the tests. None of these call into the
// library beyond reading breakpoints, values and leaves.

#include "dyadic/search.hpp"
#include "dyadic/step_function.hpp"
#include "dyadic/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

// Value of g at t by a linear scan, left-continuous.
inline double eval(const dyadic::StepFunction& g, double t)
{
    const auto& b = g.breakpoints();
    for (std::size_t i = 1; i < b.size(); ++i) {
        if (t <= b[i])
            return g.values()[i - 1];
    }
    return g.values().back();
}

// Midpoint rule for the integral of g on an n-point grid.
inline double riemann_integral(const dyadic::StepFunction& g, std::size_t n)
{
    long double s = 0.0L;
    const double dt = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        s += eval(g, (static_cast<double>(i) + 0.5) * dt);
    return static_cast<double>(s * dt);
}

// -int_0^1 log(t) g(t) dt by the midpoint rule, about n cells spread over the
// pieces so that no cell straddles a jump. The cell touching 0 uses
// -int_0^d log t dt = d - d log d.
inline double log_weight_quadrature(const dyadic::StepFunction& g, std::size_t n)
{
    long double s = 0.0L;
    const auto& b = g.breakpoints();
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const double width = b[i + 1] - b[i];
        const auto cells = std::max<std::size_t>(1, static_cast<std::size_t>(width * static_cast<double>(n)));
        const double dt = width / static_cast<double>(cells);
        long double piece = 0.0L;
        for (std::size_t j = 0; j < cells; ++j) {
            const double lo = b[i] + static_cast<double>(j) * dt;
            if (lo == 0.0)
                piece += dt - dt * std::log(dt);
            else
                piece -= static_cast<long double>(std::log(lo + 0.5 * dt)) * dt;
        }
        s += piece * g.values()[i];
    }
    return static_cast<double>(s);
}

// int_0^t g by summing whole and partial pieces.
inline double prefix_mass(const dyadic::StepFunction& g, double t)
{
    double s = 0.0;
    const auto& b = g.breakpoints();
    for (std::size_t i = 0; i + 1 < b.size() && b[i] < t; ++i)
        s += g.values()[i] * (std::min(b[i + 1], t) - b[i]);
    return s;
}

// Decreasing rearrangement by sorting (value, width) pairs.
inline std::vector<std::pair<double, double>> sorted_pieces(const dyadic::StepFunction& g)
{
    std::vector<std::pair<double, double>> p;
    for (std::size_t i = 0; i < g.pieces(); ++i)
        p.emplace_back(g.values()[i], g.width(i));
    std::stable_sort(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return p;
}

// Maximal function by enumerating every ancestor of every leaf and averaging
// its leaves directly.
inline std::vector<double> brute_maximal(const dyadic::LeafFunction& phi)
{
    const dyadic::Tree& tree = phi.tree();
    const std::size_t n = tree.leaf_count();
    std::vector<double> out(n, 0.0);
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        std::size_t block = 1;
        double best = 0.0;
        for (int level = tree.depth(); level >= 0; --level) {
            const std::size_t begin = leaf / block * block;
            double s = 0.0;
            for (std::size_t j = begin; j < begin + block; ++j)
                s += phi[j];
            best = std::max(best, s / static_cast<double>(block));
            block *= static_cast<std::size_t>(tree.arity());
        }
        out[leaf] = best;
    }
    return out;
}

inline double leaf_mean(const std::vector<double>& v, const std::vector<std::size_t>& leaves, double leaf_measure)
{
    double s = 0.0;
    for (std::size_t leaf : leaves)
        s += v[leaf];
    return s * leaf_measure;
}

// A random step function with `pieces` pieces and values in [0, scale).
inline dyadic::StepFunction random_step(dyadic::Random& rng, std::size_t pieces, double scale)
{
    std::vector<double> b{0.0};
    for (std::size_t i = 1; i < pieces; ++i)
        b.push_back(rng.uniform(0.001, 0.999));
    b.push_back(1.0);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    std::vector<double> v(b.size() - 1);
    for (double& x : v)
        x = scale * rng.uniform();
    return {b, v};
}

// Random step function on the grid j/2^bits with dyadic values, so sums and
// rearrangements are exact in binary floating point.
inline dyadic::StepFunction random_dyadic_step(dyadic::Random& rng, int bits, std::size_t max_pieces)
{
    const std::size_t cells = std::size_t{1} << bits;
    std::vector<std::size_t> cuts;
    const std::size_t pieces = 1 + rng.index(max_pieces);
    for (std::size_t i = 1; i < pieces; ++i)
        cuts.push_back(1 + rng.index(cells - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> b{0.0};
    for (std::size_t c : cuts)
        b.push_back(static_cast<double>(c) / static_cast<double>(cells));
    b.push_back(1.0);
    std::vector<double> v(b.size() - 1);
    for (double& x : v)
        x = static_cast<double>(rng.index(64)) / 8.0;
    return {b, v};
}

// A random decreasing step function with values in (0, scale].
inline dyadic::StepFunction random_decreasing(dyadic::Random& rng, std::size_t pieces, double scale)
{
    dyadic::StepFunction g = random_step(rng, pieces, scale);
    std::vector<double> v = g.values();
    for (double& x : v)
        x += 1e-3;
    std::sort(v.begin(), v.end(), std::greater<>{});
    return {g.breakpoints(), v};
}

} // namespace oracle
