#pragma once

// Closed-form sharp bounds for the integral of the dyadic maximal function,
// and the right-hand side of the symmetrization principle.

#include "dyadic/error.hpp"
#include "dyadic/step_function.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>

namespace dyadic {

/// Sup of int_X M phi over phi >= 0 with int phi = f, ||phi||_inf = M1, ess inf phi = M2:
///   f + (f - M2) log((M1 - M2) / (f - M2)).
inline double sharp_bound(const AdmissibleTriple& c)
{
    if (c.m1() == c.f())
        return c.f();
    return c.f() + (c.f() - c.m2()) * std::log((c.m1() - c.m2()) / (c.f() - c.m2()));
}

/// Query (f, M, k) with 0 < f <= M and 0 < k <= 1.
class LocalBoundQuery {
public:
    LocalBoundQuery(double f, double m, double k) : f_(f), m_(m), k_(k)
    {
        if (!std::isfinite(f) || !std::isfinite(m) || !std::isfinite(k))
            throw ConstraintError("query entries must be finite");
        if (!(f > 0.0))
            throw ConstraintError("query requires f > 0");
        if (!(f <= m))
            throw ConstraintError("query requires f <= M");
        if (!(k > 0.0 && k <= 1.0))
            throw ConstraintError("query requires 0 < k <= 1");
    }

    [[nodiscard]] double f() const noexcept { return f_; }
    [[nodiscard]] double m() const noexcept { return m_; }
    [[nodiscard]] double k() const noexcept { return k_; }

    /// True on the plateau branch k <= f/M, where the bound is kM.
    [[nodiscard]] bool plateau_branch() const noexcept { return k_ * m_ <= f_; }

private:
    double f_;
    double m_;
    double k_;
};

/// Sup of int_K M phi over phi >= 0 with int phi = f, ||phi||_inf = M and mu(K) = k:
///   kM                    if k <= f/M,
///   f + f log(Mk / f)     otherwise.
inline double sharp_local_bound(const LocalBoundQuery& q)
{
    if (q.plateau_branch())
        return q.k() * q.m();
    return q.f() + q.f() * std::log(q.m() * q.k() / q.f());
}

/// Nondecreasing maps [0, inf) -> [0, inf) accepted by the symmetrization evaluator.
class MonotoneMap {
public:
    enum class Kind { identity, constant_one, power, log1p };

    static MonotoneMap identity() { return MonotoneMap(Kind::identity, 1.0); }
    static MonotoneMap constant_one() { return MonotoneMap(Kind::constant_one, 0.0); }
    static MonotoneMap log1p() { return MonotoneMap(Kind::log1p, 0.0); }
    static MonotoneMap power(double p)
    {
        if (!(p >= 1.0) || !std::isfinite(p))
            throw ConstraintError("power map requires a finite exponent p >= 1");
        return MonotoneMap(Kind::power, p);
    }

    /// Accepts "identity", "one", "log1p" and "power:<p>".
    static MonotoneMap parse(const std::string& name)
    {
        if (name == "identity")
            return identity();
        if (name == "one")
            return constant_one();
        if (name == "log1p")
            return log1p();
        if (name.rfind("power:", 0) == 0) {
            std::size_t used = 0;
            const std::string exponent = name.substr(6);
            double p = 0.0;
            try {
                p = std::stod(exponent, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != exponent.size())
                throw ConstraintError("malformed power map: " + name);
            return power(p);
        }
        throw ConstraintError("unknown monotone map: " + name);
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double exponent() const noexcept { return exponent_; }

    [[nodiscard]] double operator()(double x) const
    {
        switch (kind_) {
        case Kind::identity: return x;
        case Kind::constant_one: return 1.0;
        case Kind::power: return std::pow(x, exponent_);
        case Kind::log1p: return std::log1p(x);
        }
        return 0.0;
    }

private:
    MonotoneMap(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}

    Kind kind_;
    double exponent_;
};

/// int_0^k G1((1/t) int_0^t g) G2(g(t)) dt for decreasing g.
///
/// With G1 = identity and G2 = 1 this is evaluated in closed form:
///   log(k) int_0^k g + sum_i v_i (h(min(t_i, k)) - h(t_{i-1})).
/// Otherwise each piece is integrated by adaptive Gauss-Kronrod (relative
/// tolerance 1e-12); the Hardy average is smooth inside a piece.
inline double symmetrized_rhs(const StepFunction& g, const MonotoneMap& g1, const MonotoneMap& g2, double k)
{
    if (!g.is_decreasing())
        throw PreconditionError("symmetrized_rhs: g must be decreasing");
    if (!(k > 0.0 && k <= 1.0))
        throw DomainError("symmetrized_rhs: k must lie in (0,1]");

    detail::CompensatedSum total;
    if (g1.kind() == MonotoneMap::Kind::identity && g2.kind() == MonotoneMap::Kind::constant_one) {
        double h_prev = 0.0;
        for (std::size_t i = 0; i < g.pieces() && g.left(i) < k; ++i) {
            const double h_next = entropy_weight(std::min(g.right(i), k));
            total += g.values()[i] * (h_next - h_prev);
            h_prev = h_next;
        }
        if (k < 1.0)
            total += std::log(k) * partial_integral(g, k);
        return total.value();
    }

    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 21>;
    double mass_before = 0.0; // int_0^{t_{i-1}} g
    for (std::size_t i = 0; i < g.pieces() && g.left(i) < k; ++i) {
        const double a = g.left(i);
        const double b = std::min(g.right(i), k);
        const double v = g.values()[i];
        const double weight = g2(v);
        if (weight != 0.0) {
            auto integrand = [&](double t) { return g1((mass_before + v * (t - a)) / t); };
            double piece = 0.0;
            if (a == 0.0) {
                piece = g1(v) * b;
            } else {
                double error = 0.0;
                piece = Quadrature::integrate(integrand, a, b, 15, 1e-12, &error);
            }
            total += weight * piece;
        }
        mass_before += v * (g.right(i) - a);
    }
    return total.value();
}

} // namespace dyadic
