#pragma once

// Finite uniform trees as a model of a tree-structured probability space:
// the dyadic maximal operator, level conditioning, threshold/sandwich sets and
// the extremal constructions that make the sharp bounds nearly attained.

#include "dyadic/bellman.hpp"
#include "dyadic/detail/sum.hpp"
#include "dyadic/error.hpp"
#include "dyadic/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dyadic {

/// Uniform tree of the given arity and depth. A depth-n node has measure arity^-n;
/// leaves are numbered in depth-first order, so every node is a contiguous leaf range.
class Tree {
public:
    static constexpr std::size_t max_leaves = std::size_t{1} << 24;
    static constexpr int max_depth = 24;

    Tree(int arity, int depth) : arity_(arity), depth_(depth)
    {
        if (arity < 2)
            throw ConstraintError("tree arity must be at least 2");
        if (depth < 0)
            throw ConstraintError("tree depth must be nonnegative");
        if (depth > max_depth)
            throw ResourceError("tree depth exceeds " + std::to_string(max_depth));
        std::size_t leaves = 1;
        for (int i = 0; i < depth; ++i) {
            leaves *= static_cast<std::size_t>(arity);
            if (leaves > max_leaves)
                throw ResourceError("tree exceeds the leaf cap of 2^24 leaves");
        }
        leaf_count_ = leaves;
    }

    [[nodiscard]] int arity() const noexcept { return arity_; }
    [[nodiscard]] int depth() const noexcept { return depth_; }
    [[nodiscard]] std::size_t leaf_count() const noexcept { return leaf_count_; }
    [[nodiscard]] double leaf_measure() const noexcept { return 1.0 / static_cast<double>(leaf_count_); }

    /// Number of nodes at the given level.
    [[nodiscard]] std::size_t nodes_at(int level) const
    {
        std::size_t n = 1;
        for (int i = 0; i < level; ++i)
            n *= static_cast<std::size_t>(arity_);
        return n;
    }

    /// Number of leaves below a node at the given level.
    [[nodiscard]] std::size_t leaves_under(int level) const { return leaf_count_ / nodes_at(level); }

    friend bool operator==(const Tree&, const Tree&) = default;

private:
    int arity_;
    int depth_;
    std::size_t leaf_count_ = 1;
};

inline Tree build_uniform_tree(int arity, int depth) { return Tree(arity, depth); }

/// A node of a uniform tree, addressed by level and position within the level.
struct Node {
    int level = 0;
    std::size_t index = 0;

    friend bool operator==(const Node&, const Node&) = default;
};

inline Node root() { return {}; }

inline std::size_t first_leaf(const Tree& tree, Node node) { return node.index * tree.leaves_under(node.level); }

inline double measure(const Tree& tree, Node node)
{
    return static_cast<double>(tree.leaves_under(node.level)) * tree.leaf_measure();
}

/// A nonnegative function constant on each leaf.
class LeafFunction {
public:
    LeafFunction(Tree tree, std::vector<double> values) : tree_(tree), values_(std::move(values))
    {
        if (values_.size() != tree_.leaf_count())
            throw ConstraintError("leaf function needs one value per leaf");
        for (double v : values_) {
            if (!std::isfinite(v) || v < 0.0)
                throw ConstraintError("leaf function values must be finite and nonnegative");
        }
    }

    static LeafFunction constant(Tree tree, double c) { return {tree, std::vector<double>(tree.leaf_count(), c)}; }

    [[nodiscard]] const Tree& tree() const noexcept { return tree_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t leaf) const { return values_[leaf]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] double max() const { return *std::max_element(values_.begin(), values_.end()); }
    [[nodiscard]] double min() const { return *std::min_element(values_.begin(), values_.end()); }

    /// Integral over X, summed child-by-child up the tree (the root average).
    [[nodiscard]] double integral() const;

    friend bool operator==(const LeafFunction&, const LeafFunction&) = default;

private:
    Tree tree_;
    std::vector<double> values_;
};

/// A measurable set given as a union of leaves.
class NodeSet {
public:
    explicit NodeSet(Tree tree) : tree_(tree), mask_(tree.leaf_count(), 0) {}

    static NodeSet all(Tree tree)
    {
        NodeSet s(tree);
        std::fill(s.mask_.begin(), s.mask_.end(), std::uint8_t{1});
        s.count_ = s.mask_.size();
        return s;
    }

    static NodeSet from_leaves(Tree tree, const std::vector<std::size_t>& leaves)
    {
        NodeSet s(tree);
        for (std::size_t leaf : leaves)
            s.insert(leaf);
        return s;
    }

    [[nodiscard]] const Tree& tree() const noexcept { return tree_; }
    [[nodiscard]] bool contains(std::size_t leaf) const { return mask_.at(leaf) != 0; }
    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] double measure() const noexcept { return static_cast<double>(count_) * tree_.leaf_measure(); }

    void insert(std::size_t leaf)
    {
        if (leaf >= mask_.size())
            throw ConstraintError("leaf index out of range");
        if (!mask_[leaf]) {
            mask_[leaf] = 1;
            ++count_;
        }
    }

    void insert(Node node)
    {
        const std::size_t begin = first_leaf(tree_, node);
        const std::size_t end = begin + tree_.leaves_under(node.level);
        for (std::size_t leaf = begin; leaf < end; ++leaf)
            insert(leaf);
    }

    [[nodiscard]] std::vector<std::size_t> members() const
    {
        std::vector<std::size_t> out;
        out.reserve(count_);
        for (std::size_t i = 0; i < mask_.size(); ++i) {
            if (mask_[i])
                out.push_back(i);
        }
        return out;
    }

    [[nodiscard]] bool subset_of(const NodeSet& other) const
    {
        for (std::size_t i = 0; i < mask_.size(); ++i) {
            if (mask_[i] && !other.mask_[i])
                return false;
        }
        return true;
    }

    friend bool operator==(const NodeSet&, const NodeSet&) = default;

private:
    Tree tree_;
    std::vector<std::uint8_t> mask_;
    std::size_t count_ = 0;
};

namespace detail {

// Sums of phi over every node, level by level; sums[n][j] is the sum over the
// j-th node of level n. Children are added left to right.
inline std::vector<std::vector<double>> level_sums(const LeafFunction& phi)
{
    const Tree& tree = phi.tree();
    const auto arity = static_cast<std::size_t>(tree.arity());
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(tree.depth()) + 1);
    sums.back() = phi.values();
    for (int level = tree.depth() - 1; level >= 0; --level) {
        const auto& below = sums[static_cast<std::size_t>(level) + 1];
        auto& here = sums[static_cast<std::size_t>(level)];
        here.assign(below.size() / arity, 0.0);
        for (std::size_t j = 0; j < here.size(); ++j) {
            double s = below[j * arity];
            for (std::size_t c = 1; c < arity; ++c)
                s += below[j * arity + c];
            here[j] = s;
        }
    }
    return sums;
}

// Splits the first `count` leaves of `node` into maximal aligned sub-nodes.
inline std::vector<Node> aligned_prefix(const Tree& tree, Node node, std::size_t count)
{
    std::vector<Node> out;
    std::size_t offset = first_leaf(tree, node);
    std::size_t remaining = count;
    for (int level = node.level; level <= tree.depth() && remaining > 0; ++level) {
        const std::size_t size = tree.leaves_under(level);
        const std::size_t take = remaining / size;
        for (std::size_t i = 0; i < take; ++i)
            out.push_back({level, offset / size + i});
        offset += take * size;
        remaining -= take * size;
    }
    return out;
}

// Splits `total` into integer parts proportional to `weights` (largest
// remainder, ties to the lower index).
inline std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t>& weights)
{
    const std::size_t capacity = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
    const double weight_sum = static_cast<double>(capacity);
    std::vector<std::size_t> parts(weights.size(), 0);
    if (capacity == 0)
        return parts;
    total = std::min(total, capacity);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double ideal = static_cast<double>(total) * static_cast<double>(weights[i]) / weight_sum;
        parts[i] = std::min(weights[i], static_cast<std::size_t>(std::floor(ideal)));
        assigned += parts[i];
        remainders.emplace_back(ideal - static_cast<double>(parts[i]), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < total; r = (r + 1) % remainders.size()) {
        const std::size_t i = remainders[r].second;
        if (parts[i] < weights[i]) {
            ++parts[i];
            ++assigned;
        }
    }
    return parts;
}

inline std::size_t representable_count(const Tree& tree, double k)
{
    const double scaled = k * static_cast<double>(tree.leaf_count());
    const double rounded = std::round(scaled);
    if (std::fabs(scaled - rounded) > 1e-9 * std::max(1.0, scaled))
        throw ConstraintError("k = " + std::to_string(k) + " is not a multiple of the leaf measure");
    return static_cast<std::size_t>(rounded);
}

inline void require_same_tree(const Tree& a, const Tree& b)
{
    if (!(a == b))
        throw ConstraintError("objects live on different trees");
}

} // namespace detail

inline double LeafFunction::integral() const
{
    return detail::level_sums(*this).front().front() * tree_.leaf_measure();
}

/// M phi(x) = max over nodes I containing x of the average of phi over I.
inline LeafFunction maximal_function(const LeafFunction& phi)
{
    const Tree& tree = phi.tree();
    auto sums = detail::level_sums(phi);
    for (int level = 0; level <= tree.depth(); ++level) {
        auto& here = sums[static_cast<std::size_t>(level)];
        const double size = static_cast<double>(tree.leaves_under(level));
        for (double& s : here)
            s /= size;
        if (level > 0) {
            const auto& above = sums[static_cast<std::size_t>(level) - 1];
            const auto arity = static_cast<std::size_t>(tree.arity());
            for (std::size_t j = 0; j < here.size(); ++j)
                here[j] = std::max(here[j], above[j / arity]);
        }
    }
    return {tree, std::move(sums.back())};
}

/// Decreasing rearrangement of a leaf function as a step function on (0,1].
inline StepFunction leaf_rearrangement(const LeafFunction& phi)
{
    std::vector<double> sorted = phi.values();
    std::sort(sorted.begin(), sorted.end(), std::greater<>{});
    const double n = static_cast<double>(sorted.size());
    std::vector<double> breakpoints{0.0};
    std::vector<double> values;
    for (std::size_t i = 0; i < sorted.size();) {
        const double v = sorted[i];
        while (i < sorted.size() && sorted[i] == v)
            ++i;
        breakpoints.push_back(i == sorted.size() ? 1.0 : static_cast<double>(i) / n);
        values.push_back(v);
    }
    return {std::move(breakpoints), std::move(values)};
}

/// phi_n: every leaf replaced by the average of phi over its level-n ancestor.
inline LeafFunction condition_on_level(const LeafFunction& phi, int level)
{
    const Tree& tree = phi.tree();
    if (level < 0 || level > tree.depth())
        throw DomainError("condition_on_level: level must lie in [0, depth]");
    const auto sums = detail::level_sums(phi);
    const auto& at_level = sums[static_cast<std::size_t>(level)];
    const std::size_t size = tree.leaves_under(level);
    std::vector<double> values(tree.leaf_count());
    for (std::size_t j = 0; j < at_level.size(); ++j) {
        const double average = at_level[j] / static_cast<double>(size);
        std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(j * size), size, average);
    }
    return {tree, std::move(values)};
}

/// Almost disjoint sub-nodes of a node whose union approximates a target measure.
struct Subfamily {
    std::vector<Node> nodes;
    NodeSet set;
    double target = 0.0; // requested measure

    /// |mu(union) - target|; at most half a leaf measure.
    [[nodiscard]] double error() const { return std::fabs(set.measure() - target); }
};

/// Union of descendants of `node` with measure (1 - alpha) mu(node), rounded to
/// the nearest multiple of the leaf measure and built greedily from the largest
/// aligned sub-nodes down.
inline Subfamily select_subfamily(const Tree& tree, Node node, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("select_subfamily: alpha must lie in (0,1)");
    if (node.level < 0 || node.level > tree.depth() || node.index >= tree.nodes_at(node.level))
        throw ConstraintError("select_subfamily: node is not in the tree");
    const std::size_t size = tree.leaves_under(node.level);
    const double target_leaves = (1.0 - alpha) * static_cast<double>(size);
    const auto count = std::min(size, static_cast<std::size_t>(std::floor(target_leaves + 0.5)));
    Subfamily out{detail::aligned_prefix(tree, node, count), NodeSet(tree), (1.0 - alpha) * measure(tree, node)};
    for (const Node& n : out.nodes)
        out.set.insert(n);
    return out;
}

namespace detail {

// Largest distinct value u of w with #{w >= u} >= count.
inline double threshold_by_count(const LeafFunction& w, std::size_t count)
{
    std::vector<double> sorted = w.values();
    std::sort(sorted.begin(), sorted.end(), std::greater<>{});
    const std::size_t index = std::clamp<std::size_t>(count, 1, sorted.size()) - 1;
    return sorted[index];
}

inline std::size_t count_for_measure(const Tree& tree, double k)
{
    const double scaled = k * static_cast<double>(tree.leaf_count());
    return static_cast<std::size_t>(std::ceil(scaled - 1e-9));
}

} // namespace detail

/// u with mu(w > u) <= k <= mu(w >= u): the largest distinct value of w whose
/// upper level set has measure at least k.
inline double threshold_level(const LeafFunction& w, double k)
{
    if (!(k > 0.0 && k <= 1.0))
        throw DomainError("threshold_level: k must lie in (0,1]");
    if (k < 1.0 && w.max() == 0.0)
        throw PreconditionError("threshold_level: w vanishes identically, level sets degenerate for k < 1");
    return detail::threshold_by_count(w, detail::count_for_measure(w.tree(), k));
}

/// D with [w > u] in D in [w >= u] and mu(D) = k, plus the weight s solving
/// k = s mu(V1) + (1 - s) mu(V2) for V1 = [w > u], V2 = [w >= u].
struct SandwichResult {
    NodeSet d;
    NodeSet v1;
    NodeSet v2;
    double u = 0.0;
    double s = 0.0;
    double k = 0.0; // measure actually used, a multiple of the leaf measure
};

inline SandwichResult sandwich_set(const LeafFunction& w, double k)
{
    if (!(k > 0.0 && k <= 1.0))
        throw DomainError("sandwich_set: k must lie in (0,1]");
    const Tree& tree = w.tree();
    const double n = static_cast<double>(tree.leaf_count());
    const auto target = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(k * n)), 1, tree.leaf_count());
    const double k_used = static_cast<double>(target) / n;
    const double u = threshold_level(w, k_used);

    SandwichResult out{NodeSet(tree), NodeSet(tree), NodeSet(tree), u, 0.0, k_used};
    for (std::size_t leaf = 0; leaf < w.size(); ++leaf) {
        if (w[leaf] > u) {
            out.v1.insert(leaf);
            out.v2.insert(leaf);
            out.d.insert(leaf);
        } else if (w[leaf] == u) {
            out.v2.insert(leaf);
        }
    }
    const std::size_t c1 = out.v1.count();
    const std::size_t c2 = out.v2.count();
    if (target < c1 || target > c2)
        throw std::logic_error("sandwich_set: threshold does not bracket k");
    for (std::size_t leaf = 0; leaf < w.size() && out.d.count() < target; ++leaf) {
        if (w[leaf] == u)
            out.d.insert(leaf);
    }
    out.s = c2 == c1 ? 1.0 : static_cast<double>(c2 - target) / static_cast<double>(c2 - c1);
    return out;
}

/// int_K phi.
inline double integrate_over(const LeafFunction& phi, const NodeSet& k)
{
    detail::require_same_tree(phi.tree(), k.tree());
    detail::CompensatedSum s;
    for (std::size_t leaf = 0; leaf < phi.size(); ++leaf) {
        if (k.contains(leaf))
            s += phi[leaf];
    }
    return s.value() * phi.tree().leaf_measure();
}

/// The `count` leaves with the largest values of w (ties to the lower index).
inline NodeSet top_leaves(const LeafFunction& w, std::size_t count)
{
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    order.resize(std::min(count, order.size()));
    return NodeSet::from_leaves(w.tree(), order);
}

/// phi together with the set K on which its maximal function is integrated.
struct LocalExtremal {
    LeafFunction phi;
    NodeSet support;
};

/// Plateau-branch extremal pair (k <= f/M): phi = M on a union of nodes of
/// measure k and (f - Mk)/(1 - k) elsewhere, so int_K M phi = kM.
inline LocalExtremal plateau_extremizer(const Tree& tree, const LocalBoundQuery& q)
{
    if (!q.plateau_branch())
        throw ConstraintError("plateau_extremizer: requires k <= f/M");
    const std::size_t count = detail::representable_count(tree, q.k());
    NodeSet support(tree);
    for (const Node& n : detail::aligned_prefix(tree, root(), count))
        support.insert(n);
    const double rest = q.k() == 1.0 ? q.m() : std::max(0.0, (q.f() - q.m() * q.k()) / (1.0 - q.k()));
    std::vector<double> values(tree.leaf_count(), rest);
    for (std::size_t leaf : support.members())
        values[leaf] = q.m();
    return {LeafFunction(tree, std::move(values)), std::move(support)};
}

namespace detail {

// Nested staircase S_0 = node ⊇ S_1 ⊇ ... ⊇ S_levels: inside every maximal node of
// S_j the next set occupies a prefix of relative measure `ratio`, split into
// aligned sub-nodes. `quota` leaves of S_levels are distributed in proportion to
// sub-node sizes so the final count is exact.
class StaircaseBuilder {
public:
    StaircaseBuilder(const Tree& tree, double ratio, int levels, std::vector<std::uint8_t>& top)
        : tree_(tree), ratio_(ratio), levels_(levels), top_(top)
    {
    }

    void build(Node node, int stage, std::size_t quota)
    {
        if (quota == 0)
            return;
        const std::size_t size = tree_.leaves_under(node.level);
        if (stage == levels_ || quota >= size) {
            const std::size_t begin = first_leaf(tree_, node);
            std::fill_n(top_.begin() + static_cast<std::ptrdiff_t>(begin), std::min(quota, size), std::uint8_t{1});
            return;
        }
        const auto ideal = static_cast<std::size_t>(std::llround(ratio_ * static_cast<double>(size)));
        const std::size_t next = std::clamp(ideal, quota, size);
        const auto children = aligned_prefix(tree_, node, next);
        std::vector<std::size_t> sizes;
        sizes.reserve(children.size());
        for (const Node& c : children)
            sizes.push_back(tree_.leaves_under(c.level));
        const auto quotas = apportion(quota, sizes);
        for (std::size_t i = 0; i < children.size(); ++i)
            build(children[i], stage + 1, quotas[i]);
    }

private:
    const Tree& tree_;
    double ratio_;
    int levels_;
    std::vector<std::uint8_t>& top_;
};

inline void require_staircase_depth(const Tree& tree, int levels)
{
    if (levels < 1)
        throw DomainError("staircase requires levels >= 1");
    if (tree.depth() < levels)
        throw ResourceError("staircase with " + std::to_string(levels) + " levels needs tree depth >= " +
                            std::to_string(levels) + " (minimal depth " + std::to_string(levels) + ")");
}

} // namespace detail

/// phi in {M1, M2} whose rearrangement approximates the two-level extremizer and
/// whose maximal function approaches the sharp bound as levels and depth grow.
///
/// Ranks t_j = c^(j/levels); every point of S_j \ S_{j+1} lies in a node of S_j
/// whose average is (c/t_j) M1 + (1 - c/t_j) M2.
inline LeafFunction staircase_extremizer(const Tree& tree, const AdmissibleTriple& c, int levels)
{
    detail::require_staircase_depth(tree, levels);
    if (c.m1() == c.f())
        return LeafFunction::constant(tree, c.f());
    const double plateau = c.plateau();
    const auto quota = static_cast<std::size_t>(std::llround(plateau * static_cast<double>(tree.leaf_count())));
    std::vector<std::uint8_t> top(tree.leaf_count(), 0);
    detail::StaircaseBuilder(tree, std::pow(plateau, 1.0 / levels), levels, top).build(root(), 0, quota);
    std::vector<double> values(tree.leaf_count());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = top[i] ? c.m1() : c.m2();
    return {tree, std::move(values)};
}

/// Extremal pair for k >= f/M: K is a union of nodes of measure k, phi vanishes
/// off K and is a staircase for the triple (M, f/k, 0) inside every node of K.
inline LocalExtremal local_staircase_extremizer(const Tree& tree, const LocalBoundQuery& q, int levels)
{
    if (q.k() * q.m() < q.f())
        throw ConstraintError("local_staircase_extremizer: requires k >= f/M");
    detail::require_staircase_depth(tree, levels);
    const std::size_t count = detail::representable_count(tree, q.k());
    const auto family = detail::aligned_prefix(tree, root(), count);
    NodeSet support(tree);
    for (const Node& n : family)
        support.insert(n);

    const double plateau = std::min(1.0, q.f() / (q.k() * q.m()));
    const auto quota = std::min(
        count, static_cast<std::size_t>(std::llround(q.f() / q.m() * static_cast<double>(tree.leaf_count()))));
    std::vector<std::size_t> sizes;
    for (const Node& n : family)
        sizes.push_back(tree.leaves_under(n.level));
    const auto quotas = detail::apportion(quota, sizes);

    std::vector<std::uint8_t> top(tree.leaf_count(), 0);
    detail::StaircaseBuilder builder(tree, std::pow(plateau, 1.0 / levels), levels, top);
    for (std::size_t i = 0; i < family.size(); ++i)
        builder.build(family[i], 0, quotas[i]);
    std::vector<double> values(tree.leaf_count(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (top[i])
            values[i] = q.m();
    }
    return {LeafFunction(tree, std::move(values)), std::move(support)};
}

} // namespace dyadic
