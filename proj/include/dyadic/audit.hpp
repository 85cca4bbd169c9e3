#pragma once

// Batch verification of every bound and auxiliary inequality on random
// instances. Each suite reports how many cases it checked, how many violated
// their inequality, and the worst margin (tolerance-adjusted slack; negative means violation).

#include "dyadic/bellman.hpp"
#include "dyadic/search.hpp"
#include "dyadic/step_function.hpp"
#include "dyadic/tree.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace dyadic {

struct AuditConfig {
    std::uint64_t seed = 1;
    std::size_t triples = 20;
    std::size_t samples_per_triple = 25;
    std::size_t max_pieces = 64;
    std::vector<Tree> trees = {Tree(2, 8), Tree(3, 5)};
    std::size_t leaf_functions = 40; // per tree
    std::size_t random_sets = 20;    // equal-measure competitors per sandwich instance
    std::size_t search_budget = 2000;
    double time_limit_seconds = 0.0; // 0 disables the limit

    /// "quick", "default" or "acceptance".
    static AuditConfig preset(const std::string& name, std::uint64_t seed)
    {
        AuditConfig config;
        config.seed = seed;
        if (name == "default")
            return config;
        if (name == "quick") {
            config.triples = 5;
            config.samples_per_triple = 10;
            config.trees = {Tree(2, 5), Tree(3, 3)};
            config.leaf_functions = 10;
            config.random_sets = 5;
            config.search_budget = 200;
            return config;
        }
        if (name == "acceptance") {
            config.samples_per_triple = 500;
            config.trees = {Tree(2, 10)};
            config.leaf_functions = 1000;
            config.random_sets = 100;
            config.search_budget = 20000;
            return config;
        }
        throw ConstraintError("unknown audit preset: " + name);
    }
};

struct SuiteResult {
    std::string suite;
    std::size_t cases = 0;
    std::size_t violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;

    void check(double margin)
    {
        ++cases;
        if (margin < 0.0 || std::isnan(margin))
            ++violations;
        if (std::isnan(margin) || margin < worst_margin)
            worst_margin = margin;
    }
};

struct AuditReport {
    std::vector<SuiteResult> suites;
    std::uint64_t seed = 0;
    bool complete = true;

    [[nodiscard]] std::size_t violations() const
    {
        return std::accumulate(suites.begin(), suites.end(), std::size_t{0},
                               [](std::size_t n, const SuiteResult& s) { return n + s.violations; });
    }
    [[nodiscard]] bool passed() const { return violations() == 0; }
};

/// A random triple M1 >= f > M2 >= 0; a quarter of draws have M2 = 0 and a few have M1 = f.
inline AdmissibleTriple random_triple(Random& rng)
{
    const double m2 = rng.coin(0.25) ? 0.0 : rng.uniform(0.0, 2.0);
    const double f = m2 + rng.uniform(0.01, 3.0);
    const double m1 = rng.coin(0.05) ? f : f + rng.uniform(0.01, 5.0);
    return {m1, f, m2};
}

/// A random nonnegative leaf function with positive integral, drawn from a mix
/// of shapes: dense uniform, sparse spikes, heavy tails and dyadic rationals.
inline LeafFunction random_leaf_function(const Tree& tree, Random& rng)
{
    std::vector<double> values(tree.leaf_count());
    const double scale = rng.uniform(0.1, 10.0);
    switch (rng.index(4)) {
    case 0:
        for (double& v : values)
            v = scale * rng.uniform();
        break;
    case 1: {
        const double density = rng.uniform(0.01, 0.3);
        for (double& v : values)
            v = rng.coin(density) ? scale * rng.uniform(0.5, 1.0) : 0.0;
        break;
    }
    case 2:
        for (double& v : values)
            v = std::min(1e3, scale / std::sqrt(1.0 - rng.uniform()) - scale);
        break;
    default:
        for (double& v : values)
            v = static_cast<double>(rng.index(8 * 1024)) / 1024.0;
        break;
    }
    if (std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; }))
        values[rng.index(values.size())] = scale;
    return {tree, std::move(values)};
}

/// A uniformly random set of exactly `count` leaves.
inline NodeSet random_node_set(const Tree& tree, std::size_t count, Random& rng)
{
    std::vector<std::size_t> leaves(tree.leaf_count());
    std::iota(leaves.begin(), leaves.end(), std::size_t{0});
    count = std::min(count, leaves.size());
    for (std::size_t i = 0; i < count; ++i)
        std::swap(leaves[i], leaves[i + rng.index(leaves.size() - i)]);
    leaves.resize(count);
    return NodeSet::from_leaves(tree, leaves);
}

namespace detail {

inline double relative_margin(double lhs, double rhs, double tol)
{
    return tol * std::max(1.0, std::fabs(rhs)) - std::fabs(lhs - rhs);
}

class Auditor {
public:
    explicit Auditor(const AuditConfig& config)
        : config_(config), start_(std::chrono::steady_clock::now())
    {
        report_.seed = config.seed;
    }

    AuditReport run()
    {
        suite("formula_agreement", [&](SuiteResult& r, Random& rng) {
            for (std::size_t i = 0; i < config_.triples && alive(); ++i) {
                const auto c = random_triple(rng);
                r.check(relative_margin(hardy_integral(two_level_extremizer(c)), sharp_bound(c), 1e-12));
            }
        });
        suite("upper_bound", [&](SuiteResult& r, Random& rng) {
            for (std::size_t i = 0; i < config_.triples && alive(); ++i) {
                const auto c = random_triple(rng);
                const double bound = sharp_bound(c);
                for (std::size_t s = 0; s < config_.samples_per_triple; ++s) {
                    const std::size_t pieces = 2 + rng.index(std::max<std::size_t>(config_.max_pieces, 2) - 1);
                    const auto g = sample_admissible(c, pieces, rng.next());
                    r.check(bound + 1e-9 - hardy_integral(g));
                }
            }
        });
        suite("search_bound", [&](SuiteResult& r, Random& rng) {
            if (config_.triples == 0 || config_.search_budget == 0)
                return;
            const auto c = random_triple(rng);
            const auto trace = maximize_hardy_integral(c, std::min<std::size_t>(config_.max_pieces, 32),
                                                       config_.search_budget, rng.next());
            for (const auto& rec : trace.records)
                r.check(trace.bound + 1e-9 - rec.value);
        });
        suite("symmetrization_identity", [&](SuiteResult& r, Random& rng) {
            for (std::size_t i = 0; i < config_.triples && alive(); ++i) {
                const auto g = sample_admissible(random_triple(rng), 2 + rng.index(30), rng.next());
                r.check(1e-9 - std::fabs(symmetrized_rhs(g, MonotoneMap::identity(), MonotoneMap::constant_one(), 1.0) -
                                         hardy_integral(g)));
            }
        });
        suite("k1_consistency", [&](SuiteResult& r, Random& rng) {
            for (std::size_t i = 0; i < config_.triples && alive(); ++i) {
                const double f = rng.uniform(0.01, 5.0);
                const double m = f + rng.uniform(0.0, 5.0);
                r.check(1e-12 - std::fabs(sharp_local_bound({f, m, 1.0}) - sharp_bound({m, f, 0.0})));
            }
        });
        suite("subfamily_error", [&](SuiteResult& r, Random& rng) {
            for (const Tree& tree : config_.trees) {
                for (std::size_t i = 0; i < config_.leaf_functions && alive(); ++i) {
                    const int level = static_cast<int>(rng.index(static_cast<std::size_t>(tree.depth()) + 1));
                    const Node node{level, rng.index(tree.nodes_at(level))};
                    const double alpha = rng.uniform(1e-6, 1.0 - 1e-6);
                    const auto family = select_subfamily(tree, node, alpha);
                    NodeSet whole(tree);
                    whole.insert(node);
                    const double margin = tree.leaf_measure() - family.error();
                    r.check(family.set.subset_of(whole) ? margin : -1.0);
                }
            }
        });
        per_leaf_function_suites();
        return report_;
    }

private:
    void suite(const std::string& name, const std::function<void(SuiteResult&, Random&)>& body)
    {
        SuiteResult result;
        result.suite = name;
        result.seed = config_.seed + 0x100 * (report_.suites.size() + 1);
        Random rng(result.seed);
        if (alive())
            body(result, rng);
        report_.suites.push_back(result);
    }

    void per_leaf_function_suites()
    {
        static const char* names[] = {"hardy_domination",       "global_bound_domination", "local_bound_domination",
                                      "threshold_contract",     "sandwich_optimality",     "split_identity",
                                      "monotone_approximation", "conditioning_mass"};
        std::vector<SuiteResult> results;
        for (const char* name : names)
            results.push_back({name, 0, 0, std::numeric_limits<double>::infinity(), 0});
        const std::uint64_t seed = config_.seed + 0x100 * (report_.suites.size() + 1);
        for (auto& r : results)
            r.seed = seed;

        Random rng(seed);
        for (const Tree& tree : config_.trees) {
            for (std::size_t i = 0; i < config_.leaf_functions && alive(); ++i) {
                const auto phi = random_leaf_function(tree, rng);
                check_leaf_function(phi, rng, results);
            }
        }
        for (auto& r : results)
            report_.suites.push_back(r);
    }

    void check_leaf_function(const LeafFunction& phi, Random& rng, std::vector<SuiteResult>& out)
    {
        const Tree& tree = phi.tree();
        const auto mphi = maximal_function(phi);
        const double f = phi.integral();
        const double sup = std::max(phi.max(), f); // guards a rounded-up integral

        // (M phi)^*(t) <= (1/t) int_0^t phi^*, on the leaf grid.
        {
            const auto lhs = leaf_rearrangement(mphi);
            const auto rhs = leaf_rearrangement(phi);
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t j = 1; j <= tree.leaf_count(); ++j) {
                const double t = j == tree.leaf_count() ? 1.0 : static_cast<double>(j) / tree.leaf_count();
                worst = std::min(worst, hardy_average(rhs, t) + 1e-9 - lhs(t));
            }
            out[0].check(worst);
        }
        if (f > phi.min()) {
            out[1].check(sharp_bound({sup, f, phi.min()}) + 1e-9 - mphi.integral());
        }
        for (double k : {0.125, 0.25, 0.5, 1.0}) {
            // Nearest leaf-grid measure; exact on binary trees.
            const auto count = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(k * static_cast<double>(tree.leaf_count()))));
            const double bound = sharp_local_bound({f, sup, static_cast<double>(count) * tree.leaf_measure()});
            out[2].check(bound + 1e-9 - integrate_over(mphi, top_leaves(mphi, count)));
            out[2].check(bound + 1e-9 - integrate_over(mphi, random_node_set(tree, count, rng)));
        }

        const double k = static_cast<double>(1 + rng.index(tree.leaf_count())) / tree.leaf_count();
        const double u = threshold_level(mphi, k);
        {
            std::size_t above = 0;
            std::size_t at_least = 0;
            for (double w : mphi.values()) {
                above += w > u;
                at_least += w >= u;
            }
            const double n = static_cast<double>(tree.leaf_count());
            out[3].check(std::min(k - above / n, at_least / n - k) + 1e-15);
        }
        const auto sandwich = sandwich_set(mphi, k);
        const double on_d = integrate_over(mphi, sandwich.d);
        for (std::size_t s = 0; s < config_.random_sets; ++s) {
            const auto competitor = random_node_set(tree, sandwich.d.count(), rng);
            out[4].check(on_d + 1e-12 - integrate_over(mphi, competitor));
        }
        const double mixed =
            sandwich.s * integrate_over(mphi, sandwich.v1) + (1.0 - sandwich.s) * integrate_over(mphi, sandwich.v2);
        out[5].check(1e-12 - std::fabs(on_d - mixed));

        LeafFunction previous = maximal_function(condition_on_level(phi, 0));
        double worst_monotone = std::numeric_limits<double>::infinity();
        double worst_mass = std::numeric_limits<double>::infinity();
        const double tol = 1e-12 * std::max(1.0, sup);
        for (int n = 0; n <= tree.depth(); ++n) {
            const auto conditioned = condition_on_level(phi, n);
            const auto current = maximal_function(conditioned);
            worst_mass = std::min(worst_mass, relative_margin(conditioned.integral(), f, 1e-12));
            for (std::size_t leaf = 0; leaf < phi.size(); ++leaf)
                worst_monotone = std::min(worst_monotone, current[leaf] - previous[leaf] + tol);
            previous = current;
        }
        for (std::size_t leaf = 0; leaf < phi.size(); ++leaf)
            worst_monotone = std::min(worst_monotone, tol - std::fabs(previous[leaf] - mphi[leaf]));
        out[6].check(worst_monotone);
        out[7].check(worst_mass);
    }

    bool alive()
    {
        if (config_.time_limit_seconds <= 0.0)
            return true;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        if (elapsed.count() > config_.time_limit_seconds)
            report_.complete = false;
        return report_.complete;
    }

    AuditConfig config_;
    AuditReport report_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

/// Runs every verification suite. The report is a pure function of the config
/// unless the time limit cuts it short, in which case `complete` is false.
inline AuditReport audit_bounds(const AuditConfig& config)
{
    return detail::Auditor(config).run();
}

} // namespace dyadic
