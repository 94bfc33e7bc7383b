#pragma once

#include "riesz/measure.hpp"

namespace riesz {

// ---------------------------------------------------------------------------
// The test battery: the declared finite family of observables standing in for
// C_b(X) in extensional equality and convergence checks. Per space:
//   - finite carriers: one indicator bump per point;
//   - intervals: monomials of the normalized coordinate up to degree 8, plus
//     sin/cos at integer frequencies up to 4;
//   - the real line: powers of clamp(x,-1,1) plus sin/cos up to frequency 4;
//   - products: all pairwise products of the factor batteries.
// The battery is versioned contract data: changing it changes what measure
// equality means.
// ---------------------------------------------------------------------------

inline constexpr int kBatteryMaxDegree = 8;
inline constexpr int kBatteryMaxFrequency = 4;

namespace detail {

inline ExprPtr monomial(const ExprPtr& base, int degree) {
    if (degree == 0) return Expr::real(1.0);
    ExprPtr acc = base;
    for (int i = 1; i < degree; ++i) acc = Expr::binary(Expr::Kind::Mul, acc, base);
    return acc;
}

inline std::vector<TestFunction> battery_1d(const SpaceDescriptor& s) {
    std::vector<TestFunction> out;
    const std::string p = "x";
    ExprPtr x = Expr::var(p);
    if (s.enumerable()) {
        for (const auto& v : s.enumerate()) {
            ExprPtr ind = Expr::cond(
                Expr::binary(Expr::Kind::Eq, x, Expr::constant(v)), Expr::real(1.0),
                Expr::real(0.0));
            out.emplace_back(p, std::move(ind), s);
        }
        return out;
    }
    ExprPtr u;
    if (s.is_real_interval()) {
        double a = s.interval().a, b = s.interval().b;
        u = Expr::binary(Expr::Kind::Mul,
                         Expr::binary(Expr::Kind::Sub, x, Expr::real(a)),
                         Expr::real(1.0 / (b - a)));
    } else if (s.is_real_line()) {
        u = Expr::clamp(x, -1.0, 1.0);
    } else {
        throw DomainMismatch("no battery for space " + s.to_string());
    }
    for (int d = 0; d <= kBatteryMaxDegree; ++d)
        out.emplace_back(p, monomial(u, d), s);
    for (int k = 1; k <= kBatteryMaxFrequency; ++k) {
        ExprPtr arg = s.is_real_interval()
                          ? Expr::binary(Expr::Kind::Mul, Expr::real(double(k)), u)
                          : Expr::binary(Expr::Kind::Mul, Expr::real(double(k)), x);
        out.emplace_back(p, Expr::unary(Expr::Kind::Sin, arg), s);
        out.emplace_back(p, Expr::unary(Expr::Kind::Cos, arg), s);
    }
    return out;
}

}  // namespace detail

inline std::vector<TestFunction> battery_for(const SpaceDescriptor& s) {
    if (s.is_product()) {
        std::vector<TestFunction> lefts = battery_for(s.left());
        std::vector<TestFunction> rights = battery_for(s.right());
        std::vector<TestFunction> out;
        out.reserve(lefts.size() * rights.size());
        ExprPtr p = Expr::var("p");
        ExprPtr px = Expr::unary(Expr::Kind::Fst, p);
        ExprPtr py = Expr::unary(Expr::Kind::Snd, p);
        for (const auto& f : lefts) {
            ExprPtr fb = subst_expr(f.body(), f.param(), px);
            for (const auto& g : rights) {
                ExprPtr gb = subst_expr(g.body(), g.param(), py);
                out.emplace_back("p", Expr::binary(Expr::Kind::Mul, fb, gb), s);
            }
        }
        return out;
    }
    return detail::battery_1d(s);
}

// Certified Lipschitz constant of the battery (max over members); +inf when a
// member carries no certificate (indicators on finite carriers).
inline double battery_lipschitz(const SpaceDescriptor& s) {
    double L = 0;
    for (const auto& f : battery_for(s)) L = std::max(L, f.lipschitz_bound());
    return L;
}

// Extensional distance on the declared battery: max_f |mu(f) - nu(f)|.
inline double battery_distance(const Measure& mu, const Measure& nu,
                               const IntegrationConfig& cfg,
                               const TestFunction** worst = nullptr,
                               const std::vector<TestFunction>* battery = nullptr) {
    if (mu.space() != nu.space())
        throw SpaceMismatch("battery_distance: measures live on different spaces");
    std::vector<TestFunction> local;
    if (!battery) {
        local = battery_for(mu.space());
        battery = &local;
    }
    double worst_d = 0;
    for (const auto& f : *battery) {
        double d = std::fabs(integrate(mu, f, cfg) - integrate(nu, f, cfg));
        if (d > worst_d) {
            worst_d = d;
            if (worst) *worst = &f;
        }
    }
    return worst_d;
}

inline bool measures_equal(const Measure& mu, const Measure& nu,
                           const IntegrationConfig& cfg) {
    return battery_distance(mu, nu, cfg) <= cfg.tol_abs;
}

}  // namespace riesz
