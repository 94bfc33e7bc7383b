#pragma once

#include "riesz/measure.hpp"

namespace riesz {

// ---------------------------------------------------------------------------
// The monad and symmetric-monoidal structure on measures.
// ---------------------------------------------------------------------------

// delta_x, the monad unit.
inline Measure unit(const Value& x, const SpaceDescriptor& space) {
    return Measure::dirac(space, x);
}

// Averaging a finite measure over measures into a measure.
inline Measure join(MeasureOverMeasures pi) { return Measure::join(std::move(pi)); }

inline Measure pushforward(const ContinuousMap& g, Measure mu) {
    return Measure::pushforward(g, std::move(mu));
}

// Kleisli extension. The node evaluates fused; bind_via_join below is the
// join-of-pushforward factorization it must agree with.
inline Measure bind(Measure mu, Kernel k) {
    return Measure::bind(std::move(mu), std::move(k));
}

// The factorized form join((k_*)(mu)), available when mu has finite support.
inline Measure bind_via_join(const Measure& mu, const Kernel& k) {
    auto atoms = finite_support(mu);
    if (!atoms)
        throw BackendUnsupported(
            "bind_via_join requires a finitely supported base measure");
    std::vector<std::pair<Measure, double>> comps;
    comps.reserve(atoms->size());
    for (const auto& [x, w] : *atoms) comps.emplace_back(k.apply(x), w);
    return join(MeasureOverMeasures(std::move(comps)));
}

inline Measure product(Measure mu, Measure nu) {
    return Measure::product(std::move(mu), std::move(nu));
}

// Left strength: (x, nu) |-> delta_x (x) nu.
inline Measure strength_left(const Value& x, const SpaceDescriptor& x_space,
                             Measure nu) {
    return product(unit(x, x_space), std::move(nu));
}

// Right strength: (mu, y) |-> mu (x) delta_y.
inline Measure strength_right(Measure mu, const Value& y,
                              const SpaceDescriptor& y_space) {
    return product(std::move(mu), unit(y, y_space));
}

inline ContinuousMap projection_1(const SpaceDescriptor& prod) {
    if (!prod.is_product()) throw NotProduct("projection_1 requires a product space");
    return ContinuousMap("p", Expr::unary(Expr::Kind::Fst, Expr::var("p")), prod,
                         prod.left());
}

inline ContinuousMap projection_2(const SpaceDescriptor& prod) {
    if (!prod.is_product()) throw NotProduct("projection_2 requires a product space");
    return ContinuousMap("p", Expr::unary(Expr::Kind::Snd, Expr::var("p")), prod,
                         prod.right());
}

inline Measure marginal_1(const Measure& mu) {
    if (!mu.space().is_product())
        throw NotProduct("marginal_1: measure does not live on a product space");
    return pushforward(projection_1(mu.space()), mu);
}

inline Measure marginal_2(const Measure& mu) {
    if (!mu.space().is_product())
        throw NotProduct("marginal_2: measure does not live on a product space");
    return pushforward(projection_2(mu.space()), mu);
}

// Kleisli composition of kernels, used by tests: x |-> bind(k1(x), k2).
inline Kernel kleisli_compose(const Kernel& k1, const Kernel& k2) {
    if (k2.domain() != k1.codomain())
        throw DomainMismatch("kleisli_compose: kernel domains do not line up");
    MExprPtr body = MeasureExpr::make(MeasureExpr::MBind{
        k2.param(), k1.body(), k2.body(), k1.codomain(), k2.codomain()});
    // Both captured environments are merged; k2's bindings win on clashes.
    Env env = k1.captured();
    for (const auto& [n, v] : k2.captured().values()) env = env.with_value(n, v);
    for (const auto& [n, m] : k2.captured().measures()) env = env.with_measure(n, m);
    return Kernel(k1.domain(), k2.codomain(), k1.param(), std::move(body),
                  std::move(env));
}

// Map a pushforward across the components of a measure over measures.
inline MeasureOverMeasures map_pushforward(const ContinuousMap& g,
                                           const MeasureOverMeasures& pi) {
    std::vector<std::pair<Measure, double>> comps;
    comps.reserve(pi.components().size());
    for (const auto& [m, w] : pi.components())
        comps.emplace_back(pushforward(g, m), w);
    return MeasureOverMeasures(std::move(comps));
}

}  // namespace riesz
