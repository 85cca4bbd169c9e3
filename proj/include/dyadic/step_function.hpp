#pragma once

// Piecewise-constant functions on (0,1] and the exact calculus used by the
// sharp L1 bounds: integrals, decreasing rearrangement, Hardy averages and
// the Hardy integral I_g = int_0^1 (1/t) int_0^t g = int_0^1 g dh.

#include "dyadic/detail/sum.hpp"
#include "dyadic/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace dyadic {

/// A nonnegative step function on (0,1].
///
/// Piece i covers (t_i, t_{i+1}] and carries values()[i]; the first piece's value
/// also stands for g(0). Adjacent pieces with equal values are merged on
/// construction, so two step functions are equal iff they are the same function.
class StepFunction {
public:
    StepFunction(std::vector<double> breakpoints, std::vector<double> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values))
    {
        validate();
        canonicalize();
    }

    static StepFunction constant(double c) { return StepFunction({0.0, 1.0}, {c}); }

    [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::size_t pieces() const noexcept { return values_.size(); }

    [[nodiscard]] double left(std::size_t i) const { return breakpoints_[i]; }
    [[nodiscard]] double right(std::size_t i) const { return breakpoints_[i + 1]; }
    [[nodiscard]] double width(std::size_t i) const { return breakpoints_[i + 1] - breakpoints_[i]; }

    [[nodiscard]] double front() const noexcept { return values_.front(); }
    [[nodiscard]] double back() const noexcept { return values_.back(); }
    [[nodiscard]] double max_value() const { return *std::max_element(values_.begin(), values_.end()); }
    [[nodiscard]] double min_value() const { return *std::min_element(values_.begin(), values_.end()); }

    /// Index of the piece containing t, with t <= 0 mapped to the first piece.
    [[nodiscard]] std::size_t piece_at(double t) const
    {
        auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end() - 1, t);
        return static_cast<std::size_t>(it - (breakpoints_.begin() + 1));
    }

    /// Left-continuous evaluation.
    [[nodiscard]] double operator()(double t) const { return values_[piece_at(t)]; }

    /// Nonincreasing values (strictly decreasing once canonical).
    [[nodiscard]] bool is_decreasing() const noexcept
    {
        return std::adjacent_find(values_.begin(), values_.end(), std::less<>{}) == values_.end();
    }

    friend bool operator==(const StepFunction&, const StepFunction&) = default;

private:
    void validate() const
    {
        if (breakpoints_.size() < 2)
            throw ConstraintError("step function needs at least two breakpoints");
        if (values_.size() + 1 != breakpoints_.size())
            throw ConstraintError("step function needs one value per piece");
        if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
            throw ConstraintError("step function breakpoints must start at 0 and end at 1");
        for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
            if (!(breakpoints_[i] > breakpoints_[i - 1]))
                throw ConstraintError("step function breakpoints must be strictly increasing");
        }
        for (double v : values_) {
            if (!std::isfinite(v) || v < 0.0)
                throw ConstraintError("step function values must be finite and nonnegative");
        }
    }

    void canonicalize()
    {
        std::size_t out = 0;
        for (std::size_t i = 1; i < values_.size(); ++i) {
            if (values_[i] == values_[out]) {
                breakpoints_[out + 1] = breakpoints_[i + 1];
            } else {
                ++out;
                values_[out] = values_[i];
                breakpoints_[out + 1] = breakpoints_[i + 1];
            }
        }
        values_.resize(out + 1);
        breakpoints_.resize(out + 2);
    }

    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/// Parameters (M1, f, M2) of the class of decreasing functions with sup M1,
/// integral f and inf M2. Requires M1 >= f > M2 >= 0.
class AdmissibleTriple {
public:
    AdmissibleTriple(double m1, double f, double m2) : m1_(m1), f_(f), m2_(m2)
    {
        if (!std::isfinite(m1) || !std::isfinite(f) || !std::isfinite(m2))
            throw ConstraintError("triple entries must be finite");
        if (m2 < 0.0)
            throw ConstraintError("triple requires M2 >= 0");
        if (!(f > m2))
            throw ConstraintError("triple requires f > M2");
        if (m1 < f)
            throw ConstraintError("triple requires M1 >= f");
    }

    [[nodiscard]] double m1() const noexcept { return m1_; }
    [[nodiscard]] double f() const noexcept { return f_; }
    [[nodiscard]] double m2() const noexcept { return m2_; }

    /// c = (f - M2) / (M1 - M2), the length of the top plateau of the extremizer.
    [[nodiscard]] double plateau() const noexcept { return m1_ == f_ ? 1.0 : (f_ - m2_) / (m1_ - m2_); }

    friend bool operator==(const AdmissibleTriple&, const AdmissibleTriple&) = default;

private:
    double m1_;
    double f_;
    double m2_;
};

/// h(t) = t - t log t on (0,1], h(0) = 0. Increasing and strictly concave.
inline double entropy_weight(double t)
{
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("entropy_weight: t must lie in [0,1]");
    if (t == 0.0)
        return 0.0;
    return t - t * std::log(t);
}

inline double integral(const StepFunction& g)
{
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < g.pieces(); ++i)
        s += g.values()[i] * g.width(i);
    return s.value();
}

/// int_0^t g.
inline double partial_integral(const StepFunction& g, double t)
{
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < g.pieces() && g.left(i) < t; ++i)
        s += g.values()[i] * (std::min(g.right(i), t) - g.left(i));
    return s.value();
}

/// mu{s : g(s) > lambda}.
inline double distribution(const StepFunction& g, double lambda)
{
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < g.pieces(); ++i) {
        if (g.values()[i] > lambda)
            s += g.width(i);
    }
    return s.value();
}

/// The decreasing, left-continuous function equimeasurable with g.
inline StepFunction decreasing_rearrangement(const StepFunction& g)
{
    if (g.is_decreasing())
        return g;
    std::vector<std::pair<double, double>> by_value; // (value, width)
    by_value.reserve(g.pieces());
    for (std::size_t i = 0; i < g.pieces(); ++i)
        by_value.emplace_back(g.values()[i], g.width(i));
    std::stable_sort(by_value.begin(), by_value.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<double> breakpoints{0.0};
    std::vector<double> values;
    detail::CompensatedSum position;
    for (std::size_t i = 0; i < by_value.size();) {
        const double v = by_value[i].first;
        for (; i < by_value.size() && by_value[i].first == v; ++i)
            position += by_value[i].second;
        const double t = i == by_value.size() ? 1.0 : position.value();
        if (t >= 1.0 && i != by_value.size())
            continue; // rounding swallowed the remaining pieces; merge into the next value
        if (!values.empty() && !(t > breakpoints.back()))
            continue;
        breakpoints.push_back(t);
        values.push_back(v);
    }
    return {std::move(breakpoints), std::move(values)};
}

/// (1/t) int_0^t g for t in (0,1].
inline double hardy_average(const StepFunction& g, double t)
{
    if (!(t > 0.0 && t <= 1.0))
        throw DomainError("hardy_average: t must lie in (0,1]");
    return partial_integral(g, t) / t;
}

/// I_g = int_0^1 (1/t) int_0^t g(u) du dt, evaluated as the Stieltjes sum
/// sum_i v_i (h(t_i) - h(t_{i-1})), which is exact on every piece.
inline double hardy_integral(const StepFunction& g)
{
    detail::CompensatedSum s;
    double h_prev = 0.0;
    for (std::size_t i = 0; i < g.pieces(); ++i) {
        const double h_next = entropy_weight(g.right(i));
        s += g.values()[i] * (h_next - h_prev);
        h_prev = h_next;
    }
    return s.value();
}

/// The unique maximizer of I_g over the class: M1 on (0,c], M2 on (c,1].
inline StepFunction two_level_extremizer(const AdmissibleTriple& c)
{
    const double plateau = c.plateau();
    if (plateau >= 1.0)
        return StepFunction::constant(c.m1());
    return StepFunction({0.0, plateau, 1.0}, {c.m1(), c.m2()});
}

enum class AdmissibilityIssue {
    none,
    not_decreasing,
    first_value,
    last_value,
    integral,
};

inline const char* to_string(AdmissibilityIssue issue) noexcept
{
    switch (issue) {
    case AdmissibilityIssue::none: return "none";
    case AdmissibilityIssue::not_decreasing: return "not_decreasing";
    case AdmissibilityIssue::first_value: return "first_value";
    case AdmissibilityIssue::last_value: return "last_value";
    case AdmissibilityIssue::integral: return "integral";
    }
    return "unknown";
}

struct Admissibility {
    AdmissibilityIssue issue = AdmissibilityIssue::none;

    [[nodiscard]] bool ok() const noexcept { return issue == AdmissibilityIssue::none; }
    explicit operator bool() const noexcept { return ok(); }
};

/// Membership in the admissible class: decreasing, g(0) = M1, g(1) = M2, integral f.
///
/// When M1 = f the class degenerates to the constant M1 and the last-value
/// clause is waived.
inline Admissibility check_admissible(const StepFunction& g, const AdmissibleTriple& c, double tol)
{
    if (!g.is_decreasing())
        return {AdmissibilityIssue::not_decreasing};
    if (std::fabs(g.front() - c.m1()) > tol)
        return {AdmissibilityIssue::first_value};
    if (c.m1() != c.f() && std::fabs(g.back() - c.m2()) > tol)
        return {AdmissibilityIssue::last_value};
    if (std::fabs(integral(g) - c.f()) > tol)
        return {AdmissibilityIssue::integral};
    return {};
}

/// int_0^1 |g - g'| on the merged breakpoint grid.
inline double l1_distance(const StepFunction& a, const StepFunction& b)
{
    detail::CompensatedSum s;
    std::size_t i = 0;
    std::size_t j = 0;
    double position = 0.0;
    while (i < a.pieces() && j < b.pieces()) {
        const double next = std::min(a.right(i), b.right(j));
        s += std::fabs(a.values()[i] - b.values()[j]) * (next - position);
        position = next;
        if (a.right(i) == next)
            ++i;
        if (b.right(j) == next)
            ++j;
    }
    return s.value();
}

} // namespace dyadic
