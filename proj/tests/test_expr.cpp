#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riesz/testfn.hpp"

using namespace riesz;

namespace {

Value eval_closed(const ExprPtr& e) {
    EvalEnv root;
    return eval_expr(e, root);
}

Value eval_at(const ExprPtr& e, const std::string& name, const Value& v) {
    EvalEnv root;
    EvalEnv frame = root.extend(name, v);
    return eval_expr(e, frame);
}

}  // namespace

TEST_CASE("arithmetic evaluation") {
    using namespace ex;
    ExprPtr e = (lit(2.0) + lit(3.0)) * lit(4.0);
    CHECK(eval_closed(e).numeric() == doctest::Approx(20.0));
    CHECK(eval_closed(vmin(lit(1.5), lit(-2.0))).numeric() == doctest::Approx(-2.0));
    CHECK(eval_closed(vmax(lit(1.5), lit(-2.0))).numeric() == doctest::Approx(1.5));
    CHECK(eval_closed(vabs(lit(-3.5))).numeric() == doctest::Approx(3.5));
    CHECK(eval_closed(vexp(lit(0.0))).numeric() == doctest::Approx(1.0));
    CHECK(eval_closed(vclamp(lit(7.0), -1.0, 1.0)).numeric() == doctest::Approx(1.0));
}

TEST_CASE("conditional and comparisons") {
    using namespace ex;
    ExprPtr e = ite(le(var("x"), lit(0.5)), lit(1.0), lit(0.0));
    CHECK(eval_at(e, "x", Value::real(0.25)).numeric() == doctest::Approx(1.0));
    CHECK(eval_at(e, "x", Value::real(0.75)).numeric() == doctest::Approx(0.0));
    ExprPtr eqs = ite(eq(var("x"), sym("b")), lit(1.0), lit(0.0));
    CHECK(eval_at(eqs, "x", Value::symbol("b")).numeric() == doctest::Approx(1.0));
    CHECK(eval_at(eqs, "x", Value::symbol("a")).numeric() == doctest::Approx(0.0));
}

TEST_CASE("pair projections") {
    using namespace ex;
    Value p = Value::pair(Value::real(0.25), Value::real(4.0));
    ExprPtr e = fst(var("p")) * snd(var("p"));
    CHECK(eval_at(e, "p", p).numeric() == doctest::Approx(1.0));
}

TEST_CASE("s-expression round trip") {
    using namespace ex;
    std::vector<ExprPtr> cases = {
        var("x"),
        lit(0.5),
        lit(1e-7),
        intlit(42),
        sym("tok"),
        boollit(true),
        vmin(vexp(var("x")), lit(2.0)),
        ite(lt(var("x"), lit(0.0)), lit(0.0) - var("x"), var("x")),
        vclamp(var("x") * lit(3.0), -1.0, 1.0),
        vsin(var("x")) + vcos(var("y")) * fst(mkpair(var("x"), var("y"))),
    };
    for (const auto& e : cases) {
        std::string s = print_sexpr(e);
        ExprPtr back = parse_sexpr(s);
        CHECK(print_sexpr(back) == s);
    }
}

TEST_CASE("range analysis certifies bounds") {
    using namespace ex;
    AbsEnv env;
    env.emplace("x", space_abstract(SpaceDescriptor::real_interval(0.0, 1.0)));

    AbsVal s = analyze_expr(vsin(var("x") * lit(50.0)), env);
    NumRange r = std::get<NumRange>(s.rep);
    CHECK(r.lo >= -1.0);
    CHECK(r.hi <= 1.0);

    AbsVal sq = analyze_expr(var("x") * var("x"), env);
    NumRange rq = std::get<NumRange>(sq.rep);
    CHECK(rq.lo >= 0.0);
    CHECK(rq.hi <= 1.0);

    AbsVal cl = analyze_expr(vclamp(var("x") * lit(5.0), 0.0, 2.0), env);
    NumRange rc = std::get<NumRange>(cl.rep);
    CHECK(rc.lo >= 0.0);
    CHECK(rc.hi <= 2.0);
}

TEST_CASE("lipschitz propagation") {
    using namespace ex;
    AbsEnv env;
    env.emplace("x", space_abstract(SpaceDescriptor::real_interval(0.0, 1.0)));

    NumRange rs = std::get<NumRange>(analyze_expr(vsin(lit(3.0) * var("x")), env).rep);
    CHECK(rs.lip <= 3.0 + 1e-12);

    NumRange rq = std::get<NumRange>(analyze_expr(var("x") * var("x"), env).rep);
    CHECK(rq.lip <= 2.0 + 1e-12);

    AbsEnv line;
    line.emplace("x", space_abstract(SpaceDescriptor::real_line()));
    NumRange rl = std::get<NumRange>(analyze_expr(vsin(lit(4.0) * var("x")), line).rep);
    CHECK(std::isfinite(rl.lip));
    CHECK(rl.lip <= 4.0 + 1e-12);
}

TEST_CASE("unbounded bodies are rejected as observables") {
    using namespace ex;
    CHECK_THROWS_AS(TestFunction("x", vexp(var("x")), SpaceDescriptor::real_line()),
                    UnboundedFunction);
    CHECK_THROWS_AS(TestFunction("x", var("x"), SpaceDescriptor::real_line()),
                    UnboundedFunction);
    // The same bodies are fine on a compact interval.
    TestFunction ok("x", vexp(var("x")), SpaceDescriptor::real_interval(0.0, 1.0));
    CHECK(bound_of(ok) >= std::exp(1.0) - 1e-9);
}

TEST_CASE("tightened bound on enumerable carriers") {
    using namespace ex;
    SpaceDescriptor s = SpaceDescriptor::int_range(-3, 2);
    TestFunction f("n", var("n") * var("n"), s);
    TestFunction t = f.tightened();
    CHECK(t.declared_bound() == doctest::Approx(9.0));
    CHECK(t.declared_bound() <= f.declared_bound() + 1e-12);
}

TEST_CASE("membership-checked evaluation") {
    using namespace ex;
    TestFunction f("x", var("x"), SpaceDescriptor::real_interval(0.0, 1.0));
    CHECK(eval_fn(f, Value::real(0.5)) == doctest::Approx(0.5));
    CHECK_THROWS_AS(f.eval(Value::real(2.0)), DomainMismatch);
}

TEST_CASE("composition substitutes the map body") {
    using namespace ex;
    SpaceDescriptor s = SpaceDescriptor::real_interval(0.0, 1.0);
    SpaceDescriptor t = SpaceDescriptor::real_interval(0.0, 2.0);
    ContinuousMap g("x", lit(2.0) * var("x"), s, t);
    TestFunction f("y", var("y") * var("y"), t);
    TestFunction fg = compose_fn(f, g);
    CHECK(fg.domain() == s);
    CHECK(fg.eval(Value::real(0.5)) == doctest::Approx(1.0));

    ContinuousMap h = compose_map(g, ContinuousMap::identity(s));
    CHECK(h.apply(Value::real(0.25)).numeric() == doctest::Approx(0.5));
}

TEST_CASE("space coercion") {
    CHECK(coerce_to_space(Value::real(3.0000000001),
                          SpaceDescriptor::int_range(0, 5)) == Value::integer(3));
    // Coercion is lenient; membership is enforced downstream.
    Value off = coerce_to_space(Value::real(3.4), SpaceDescriptor::int_range(0, 5));
    CHECK(off.is_real());
    CHECK_THROWS_AS(require_member(SpaceDescriptor::int_range(0, 5), off, "test"),
                    DomainMismatch);
    Value p = coerce_to_space(
        Value::pair(Value::real(1.0), Value::real(0.5)),
        SpaceDescriptor::product(SpaceDescriptor::int_range(0, 2),
                                 SpaceDescriptor::real_interval(0.0, 1.0)));
    CHECK(p.first() == Value::integer(1));
}
