#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riesz/battery.hpp"
#include "riesz/monad.hpp"

using namespace riesz;

namespace {

const SpaceDescriptor kUnit = SpaceDescriptor::real_interval(0.0, 1.0);
const SpaceDescriptor kBools = SpaceDescriptor::booleans();
const IntegrationConfig kExact = IntegrationConfig::exact();

TestFunction id_on(const SpaceDescriptor& s) {
    return TestFunction("x", ex::var("x"), s);
}

}  // namespace

TEST_CASE("unit integrates observables at the point") {
    Measure d = unit(Value::real(0.0), kUnit);
    CHECK(integrate(d, id_on(kUnit), kExact) == doctest::Approx(0.0));
    Measure d7 = unit(Value::real(0.7), kUnit);
    CHECK(integrate(d7, id_on(kUnit), kExact) == doctest::Approx(0.7));
}

TEST_CASE("pushforward precomposes the observable") {
    using namespace ex;
    SpaceDescriptor wide = SpaceDescriptor::real_interval(0.0, 2.0);
    ContinuousMap g("x", lit(2.0) * var("x"), kUnit, wide);
    Measure m = pushforward(g, Measure::uniform(0.0, 1.0));
    CHECK(integrate(m, id_on(wide), IntegrationConfig::quadrature()) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(pushforward(g, Measure::bernoulli(0.5)), DomainMismatch);
}

TEST_CASE("bind through a bernoulli kernel gives 0.75") {
    // bind(Bernoulli(0.5), b -> if b then delta_true else Bernoulli(0.5));
    // P(true) = 0.5 + 0.5*0.5 = 0.75 by exhaustive enumeration.
    using ME = MeasureExpr;
    using namespace ex;
    MExprPtr rule = ME::make(ME::MIf{var("b"),
                                     ME::make(ME::MDirac{boollit(true), kBools}),
                                     ME::make(ME::MBernoulli{0.5})});
    Kernel k(kBools, kBools, "b", rule);
    Measure m = bind(Measure::bernoulli(0.5), k);
    TestFunction ind("b", ite(var("b"), lit(1.0), lit(0.0)), kBools);
    CHECK(integrate(m, ind, kExact) == doctest::Approx(0.75).epsilon(1e-15));

    auto atoms = finite_support(m);
    REQUIRE(atoms.has_value());
    double p_true = 0;
    for (const auto& [v, w] : *atoms)
        if (v == Value::boolean(true)) p_true += w;
    CHECK(p_true == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("fused bind agrees with the join factorization") {
    using ME = MeasureExpr;
    using namespace ex;
    MExprPtr rule = ME::make(ME::MIf{var("b"),
                                     ME::make(ME::MDirac{boollit(true), kBools}),
                                     ME::make(ME::MBernoulli{0.25})});
    Kernel k(kBools, kBools, "b", rule);
    Measure base = Measure::bernoulli(0.4);
    CHECK(battery_distance(bind(base, k), bind_via_join(base, k), kExact) <= 1e-12);
    CHECK_THROWS_AS(bind_via_join(Measure::uniform(0.0, 1.0),
                                  Kernel::dirac_kernel(kUnit)),
                    BackendUnsupported);
}

TEST_CASE("product marginals recover the factors") {
    Measure mu = Measure::bernoulli(0.3);
    Measure nu = Measure::finite_weighted(
        SpaceDescriptor::symbols({"a", "b"}),
        {{Value::symbol("a"), 0.6}, {Value::symbol("b"), 0.4}});
    Measure p = product(mu, nu);
    CHECK(battery_distance(marginal_1(p), mu, kExact) <= 1e-12);
    CHECK(battery_distance(marginal_2(p), nu, kExact) <= 1e-12);
}

TEST_CASE("strengths build the expected products") {
    Measure nu = Measure::bernoulli(0.5);
    Measure l = strength_left(Value::real(0.3), kUnit, nu);
    CHECK(battery_distance(marginal_1(l), unit(Value::real(0.3), kUnit), kExact) <=
          1e-12);
    CHECK(battery_distance(marginal_2(l), nu, kExact) <= 1e-12);

    Measure r = strength_right(nu, Value::real(0.3), kUnit);
    CHECK(battery_distance(marginal_1(r), nu, kExact) <= 1e-12);
    CHECK(battery_distance(marginal_2(r), unit(Value::real(0.3), kUnit), kExact) <=
          1e-12);
}

TEST_CASE("join of a point mass over measures returns the inner measure") {
    Measure mu = Measure::bernoulli(0.35);
    Measure j = join(MeasureOverMeasures({{mu, 1.0}}));
    CHECK(battery_distance(j, mu, kExact) <= 1e-12);
}

TEST_CASE("kleisli composition associates") {
    using ME = MeasureExpr;
    using namespace ex;
    SpaceDescriptor s = kBools;
    auto flip = [&](double p_stay) {
        MExprPtr rule = ME::make(ME::MIf{var("b"),
                                         ME::make(ME::MBernoulli{p_stay}),
                                         ME::make(ME::MBernoulli{1.0 - p_stay})});
        return Kernel(s, s, "b", rule);
    };
    Kernel k1 = flip(0.9), k2 = flip(0.8), k3 = flip(0.7);
    Measure base = Measure::bernoulli(0.5);
    Measure lhs = bind(base, kleisli_compose(kleisli_compose(k1, k2), k3));
    Measure rhs = bind(base, kleisli_compose(k1, kleisli_compose(k2, k3)));
    CHECK(battery_distance(lhs, rhs, kExact) <= 1e-12);
}

TEST_CASE("map_pushforward acts componentwise") {
    using namespace ex;
    SpaceDescriptor s = SpaceDescriptor::int_range(0, 3);
    SpaceDescriptor t = SpaceDescriptor::int_range(1, 4);
    ContinuousMap g("n", var("n") + intlit(1), s, t);
    MeasureOverMeasures pi(
        {{Measure::dirac(s, Value::integer(0)), 0.5},
         {Measure::finite_weighted(s, {{Value::integer(1), 0.5},
                                       {Value::integer(2), 0.5}}),
          0.5}});
    Measure lhs = pushforward(g, join(pi));
    Measure rhs = join(map_pushforward(g, pi));
    CHECK(battery_distance(lhs, rhs, kExact) <= 1e-12);
}
