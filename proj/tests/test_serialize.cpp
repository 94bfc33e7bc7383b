#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riesz/laws.hpp"
#include "riesz/monad.hpp"
#include "riesz/serialize.hpp"

using namespace riesz;

namespace {

const SpaceDescriptor kUnit = SpaceDescriptor::real_interval(0.0, 1.0);

std::string canon(const Measure& m) { return measure_to_json(m).dump(); }

}  // namespace

TEST_CASE("values round trip") {
    std::vector<Value> cases = {
        Value::real(0.5), Value::real(1e-17), Value::integer(-3),
        Value::boolean(true), Value::symbol("tok"),
        Value::pair(Value::real(0.25), Value::pair(Value::integer(1),
                                                   Value::symbol("b")))};
    for (const auto& v : cases) {
        Json j = value_to_json(v);
        CHECK(value_from_json(Json::parse(j.dump())) == v);
    }
}

TEST_CASE("spaces round trip") {
    std::vector<SpaceDescriptor> cases = {
        SpaceDescriptor::booleans(),
        SpaceDescriptor::symbols({"a", "b", "c"}),
        SpaceDescriptor::int_range(-2, 7),
        SpaceDescriptor::real_interval(0.25, 1.5),
        SpaceDescriptor::real_line(),
        SpaceDescriptor::product(SpaceDescriptor::booleans(),
                                 SpaceDescriptor::real_interval(0.0, 1.0))};
    for (const auto& s : cases) {
        Json j = space_to_json(s);
        CHECK(space_from_json(Json::parse(j.dump())) == s);
    }
}

TEST_CASE("observables and maps round trip through s-expressions") {
    using namespace ex;
    TestFunction f("x", vsin(var("x") * lit(3.0)) + vclamp(var("x"), 0.0, 0.5), kUnit);
    TestFunction f2 = testfn_from_json(Json::parse(testfn_to_json(f).dump()));
    CHECK(f2.param() == f.param());
    CHECK(f2.domain() == f.domain());
    for (double t : {0.0, 0.3, 0.77, 1.0})
        CHECK(f2.eval(Value::real(t)) == f.eval(Value::real(t)));

    ContinuousMap g("x", var("x") * lit(0.5) + lit(0.25), kUnit, kUnit);
    ContinuousMap g2 = map_from_json(Json::parse(map_to_json(g).dump()));
    CHECK(g2.apply(Value::real(0.5)) == g.apply(Value::real(0.5)));
}

TEST_CASE("measure trees round trip byte-identically") {
    using ME = MeasureExpr;
    using namespace ex;
    SpaceDescriptor bools = SpaceDescriptor::booleans();
    MExprPtr rule = ME::make(ME::MIf{var("b"),
                                     ME::make(ME::MDirac{boollit(true), bools}),
                                     ME::make(ME::MBernoulli{0.25})});
    std::vector<Measure> cases = {
        Measure::dirac(kUnit, Value::real(0.7)),
        Measure::bernoulli(0.3),
        Measure::uniform(0.0, 1.0),
        Measure::pushforward(ContinuousMap("x", var("x") * lit(0.5), kUnit, kUnit),
                             Measure::uniform(0.0, 1.0)),
        Measure::product(Measure::bernoulli(0.5), Measure::uniform(0.0, 1.0)),
        join(MeasureOverMeasures({{Measure::bernoulli(0.2), 0.5},
                                  {Measure::bernoulli(0.9), 0.5}})),
        bind(Measure::bernoulli(0.4), Kernel(bools, bools, "b", rule)),
        Measure::sum(Measure::scale(0.5, Measure::bernoulli(0.1)),
                     Measure::scale(0.5, Measure::bernoulli(0.8))),
    };
    for (const auto& m : cases) {
        std::string s1 = canon(m);
        Measure back = measure_from_json(Json::parse(s1));
        CHECK(canon(back) == s1);
        CHECK(back.space() == m.space());
    }
}

TEST_CASE("round trip preserves the integration functional") {
    MeasureGenerator fin(MeasureGenerator::Mode::Finite, 31);
    IntegrationConfig exact = IntegrationConfig::exact();
    for (std::size_t i = 0; i < 25; ++i) {
        SampleRng rng = fin.rng_for(i);
        SpaceDescriptor s = fin.space(rng);
        Measure m = fin.measure(rng, s);
        Measure back = measure_from_json(Json::parse(canon(m)));
        CHECK(battery_distance(m, back, exact) <= 1e-15);
    }
    MeasureGenerator inter(MeasureGenerator::Mode::Interval, 32);
    IntegrationConfig quad = IntegrationConfig::quadrature();
    for (std::size_t i = 0; i < 10; ++i) {
        SampleRng rng = inter.rng_for(i);
        SpaceDescriptor s = inter.space(rng);
        Measure m = inter.measure(rng, s);
        Measure back = measure_from_json(Json::parse(canon(m)));
        CHECK(battery_distance(m, back, quad) <= 1e-12);
    }
}

TEST_CASE("kernels round trip with their captured environment") {
    using ME = MeasureExpr;
    using namespace ex;
    Env env;
    env = env.with_measure("base", Measure::bernoulli(0.6));
    env = env.with_value("offset", Value::real(0.1));
    SpaceDescriptor bools = SpaceDescriptor::booleans();
    MExprPtr rule = ME::make(ME::MIf{var("b"), ME::make(ME::MVar{"base"}),
                                     ME::make(ME::MBernoulli{0.5})});
    Kernel k(bools, bools, "b", rule, env);
    Kernel back = kernel_from_json(Json::parse(kernel_to_json(k).dump()));
    IntegrationConfig exact = IntegrationConfig::exact();
    for (bool b : {false, true})
        CHECK(battery_distance(k.apply(Value::boolean(b)),
                               back.apply(Value::boolean(b)), exact) <= 1e-15);
}

TEST_CASE("dump is deterministic and keys are ordered") {
    Measure m = Measure::product(Measure::bernoulli(0.5), Measure::uniform(0.0, 1.0));
    CHECK(canon(m) == canon(m));
    Json j = measure_to_json(m);
    std::string s = j.dump();
    CHECK(s.find("\"kind\":\"product\"") != std::string::npos);
    // Lexicographic key order within a node.
    CHECK(s.find("\"left\"") > s.find("\"kind\""));
    CHECK(s.find("\"right\"") > s.find("\"left\""));
}

TEST_CASE("reports serialize with schema versions") {
    MeasureGenerator gen(MeasureGenerator::Mode::Finite, 3);
    LawReport r = check_monad_laws(gen, 10, IntegrationConfig::exact());
    Json j = report_to_json(r);
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("law") == "monad_laws");
    CHECK(j.at("pass") == true);
    CHECK(j.contains("max_residual"));
    CHECK(j.contains("tolerance"));
    CHECK(j.contains("witness"));
}
