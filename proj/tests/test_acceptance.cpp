// Acceptance gate: one pass/fail line per criterion, all must pass.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "riesz/convergence.hpp"
#include "riesz/dsl.hpp"
#include "riesz/laws.hpp"
#include "riesz/serialize.hpp"

using namespace riesz;

namespace {

const SpaceDescriptor kUnit = SpaceDescriptor::real_interval(0.0, 1.0);

void verdict(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", criterion, name,
                detail.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(pass, "criterion " << criterion << " (" << name << "): " << detail);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("criterion 1: monad laws") {
    auto t0 = std::chrono::steady_clock::now();
    MeasureGenerator fin(MeasureGenerator::Mode::Finite, 1001);
    LawReport rf = check_monad_laws(fin, 200, IntegrationConfig::exact(), 4);
    MeasureGenerator inter(MeasureGenerator::Mode::Interval, 1002);
    LawReport ri = check_monad_laws(inter, 50, IntegrationConfig::quadrature(), 4);
    double secs = seconds_since(t0);
    bool pass = rf.pass && rf.instances_checked >= 200 && rf.max_residual <= 1e-12 &&
                ri.pass && ri.instances_checked >= 50 && ri.max_residual <= 1e-6 &&
                secs < 60.0;
    std::ostringstream d;
    d << "finite residual " << rf.max_residual << ", interval residual "
      << ri.max_residual << ", " << secs << "s";
    verdict(1, "monad laws", pass, d.str());
}

TEST_CASE("criterion 2: naturality") {
    auto t0 = std::chrono::steady_clock::now();
    using namespace ex;
    SpaceDescriptor syms = SpaceDescriptor::symbols({"a", "b", "c", "d", "e"});
    ExprPtr collapse = ite(eq(var("x"), sym("b")), sym("b"), sym("a"));
    ContinuousMap gf("x", collapse, syms, syms);
    MeasureGenerator fin(MeasureGenerator::Mode::Finite, 2001, 5);
    LawReport rf = check_naturality(gf, fin, 200, IntegrationConfig::exact(), 4);

    ContinuousMap gi("x", var("x") * lit(0.5) + lit(0.25), kUnit, kUnit);
    MeasureGenerator inter(MeasureGenerator::Mode::Interval, 2002);
    LawReport ri = check_naturality(gi, inter, 50, IntegrationConfig::quadrature(), 4);
    double secs = seconds_since(t0);
    bool pass = rf.pass && rf.max_residual <= 1e-12 && ri.pass &&
                ri.max_residual <= 1e-6 && secs < 60.0;
    std::ostringstream d;
    d << "finite residual " << rf.max_residual << ", interval residual "
      << ri.max_residual << ", " << secs << "s";
    verdict(2, "naturality", pass, d.str());
}

TEST_CASE("criterion 3: hexagon and fubini") {
    using namespace ex;
    MeasureGenerator fin(MeasureGenerator::Mode::Finite, 3001);
    LawReport rhf = check_hexagon_sweep(fin, 200, IntegrationConfig::exact(), 4);
    LawReport rff = check_fubini_sweep(fin, 200, IntegrationConfig::exact(), 4);
    MeasureGenerator inter(MeasureGenerator::Mode::Interval, 3002);
    LawReport rhi = check_hexagon_sweep(inter, 50, IntegrationConfig::quadrature(), 4);

    // Analytic control: iint exp(x)cos(y) over U(0,1) x U(0,2) in both orders.
    Measure mu = Measure::uniform(0.0, 1.0);
    Measure nu = Measure::uniform(0.0, 2.0);
    SpaceDescriptor prod = SpaceDescriptor::product(mu.space(), nu.space());
    TestFunction f("q", vexp(fst(var("q"))) * vcos(snd(var("q"))), prod);
    double oracle = (std::exp(1.0) - 1.0) * std::sin(2.0) / 2.0;
    double v = integrate(Measure::product(mu, nu), f, IntegrationConfig::quadrature());
    LawReport rfo = check_fubini(mu, nu, f, IntegrationConfig::quadrature());
    bool oracle_ok = std::fabs(v - oracle) <= 1e-9 && rfo.pass;

    bool pass = rhf.pass && rff.pass && rhi.pass && rhi.max_residual <= 1e-6 &&
                oracle_ok;
    std::ostringstream d;
    d << "hexagon residuals " << rhf.max_residual << "/" << rhi.max_residual
      << ", fubini residual " << rff.max_residual << ", oracle |" << v << " - "
      << oracle << "| = " << std::fabs(v - oracle);
    verdict(3, "hexagon and fubini", pass, d.str());
}

TEST_CASE("criterion 4: strong affineness") {
    auto t0 = std::chrono::steady_clock::now();
    IntegrationConfig exact = IntegrationConfig::exact();
    bool pass = true;
    std::ostringstream d;
    double worst = 0;
    std::size_t rects = 0;

    // Exhaustive rectangles over factorized joints up to 8x8 carriers.
    MeasureGenerator gen(MeasureGenerator::Mode::Finite, 4001, 8);
    for (std::size_t i = 0; i < 40 && pass; ++i) {
        SampleRng rng = gen.rng_for(i);
        SpaceDescriptor xs = gen.space(rng);
        Measure nu = gen.measure(rng, xs);
        SpaceDescriptor ys = gen.space(rng);
        Value y = gen.point(rng, ys);
        Measure joint = Measure::product(nu, Measure::dirac(ys, y));
        LawReport r = check_strongly_affine(joint, exact);
        worst = std::max(worst, r.max_residual);
        rects += r.instances_checked;
        pass = pass && r.pass && r.max_residual <= 1e-12;
    }

    // Non-Dirac second marginals must be rejected as a precondition.
    SpaceDescriptor xs = SpaceDescriptor::symbols({"a", "b"});
    SpaceDescriptor ys = SpaceDescriptor::symbols({"u", "v"});
    Measure correlated = Measure::finite_weighted(
        SpaceDescriptor::product(xs, ys),
        {{Value::pair(Value::symbol("a"), Value::symbol("u")), 0.5},
         {Value::pair(Value::symbol("b"), Value::symbol("v")), 0.5}});
    bool rejected = false;
    try {
        check_strongly_affine(correlated, exact);
    } catch (const NotDeterministicMarginal&) {
        rejected = true;
    }
    Measure spread = Measure::product(
        Measure::dirac(xs, Value::symbol("a")),
        Measure::finite_weighted(ys, {{Value::symbol("u"), 0.5},
                                      {Value::symbol("v"), 0.5}}));
    bool rejected2 = false;
    try {
        check_strongly_affine(spread, exact);
    } catch (const NotDeterministicMarginal&) {
        rejected2 = true;
    }

    double secs = seconds_since(t0);
    pass = pass && rejected && rejected2 && secs < 10.0;
    d << "max residual " << worst << " over " << rects
      << " rectangle checks, precondition rejections "
      << (rejected && rejected2 ? "ok" : "MISSING") << ", " << secs << "s";
    verdict(4, "strong affineness", pass, d.str());
}

TEST_CASE("criterion 5: weak convergence") {
    auto idx = default_indices(1, 64);
    IntegrationConfig cfg = IntegrationConfig::quadrature();
    double L = battery_lipschitz(kUnit);
    cfg.tol_abs = L / 64.0;

    MeasureSequence diracs{"dirac(1/n)", [](std::size_t n) {
                               return Measure::dirac(kUnit, Value::real(1.0 / double(n)));
                           }};
    Measure limit = Measure::dirac(kUnit, Value::real(0.0));
    ConvergenceReport r1 = weak_convergence_check(diracs, limit, idx, cfg);

    Measure base = Measure::uniform(0.0, 1.0);
    using namespace ex;
    MeasureSequence unis{"uniform(0,1/n)", [&](std::size_t n) {
                             ContinuousMap squeeze(
                                 "x", var("x") * lit(1.0 / double(n)), kUnit, kUnit);
                             return Measure::pushforward(squeeze, base);
                         }};
    ConvergenceReport r2 = weak_convergence_check(unis, limit, idx, cfg);

    bool rate_ok = std::isfinite(L);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        rate_ok = rate_ok && r1.sup_residuals[i] <= L / double(idx[i]) + 1e-9;
        rate_ok = rate_ok && r2.sup_residuals[i] <= L / double(idx[i]) + 1e-9;
    }
    bool pass = r1.pass && r2.pass && r1.decreasing && r2.decreasing && rate_ok;
    std::ostringstream d;
    d << "final residuals " << r1.sup_residuals.back() << " and "
      << r2.sup_residuals.back() << " vs certified L/n with L = " << L;
    verdict(5, "weak convergence", pass, d.str());
}

TEST_CASE("criterion 6: strengthened continuous mapping") {
    using namespace ex;
    SpaceDescriptor wide = SpaceDescriptor::real_interval(0.0, 2.0);
    auto idx = default_indices(1, 64);
    IntegrationConfig cfg = IntegrationConfig::quadrature();
    double L = battery_lipschitz(wide);
    cfg.tol_abs = 2.0 * L / 64.0;

    MapSequence gs{"x+1/n", [&](std::size_t n) {
                       return ContinuousMap("x", var("x") + lit(1.0 / double(n)), kUnit,
                                            wide);
                   }};
    ContinuousMap limit_map("x", var("x") + lit(0.0), kUnit, wide);
    MeasureSequence ms{"dirac(1/n)", [](std::size_t n) {
                           return Measure::dirac(kUnit, Value::real(1.0 / double(n)));
                       }};
    Measure limit = Measure::dirac(kUnit, Value::real(0.0));
    ConvergenceReport r = strengthened_cmt_check(gs, limit_map, ms, limit, idx, cfg);

    bool rate_ok = std::isfinite(L);
    for (std::size_t i = 0; i < idx.size(); ++i)
        rate_ok = rate_ok && r.sup_residuals[i] <= 2.0 * L / double(idx[i]) + 1e-9;

    // Constant control: nothing moves, residuals vanish identically.
    MapSequence cgs{"const", [&](std::size_t) { return limit_map; }};
    MeasureSequence cms{"const", [&](std::size_t) {
                            return Measure::dirac(kUnit, Value::real(0.25));
                        }};
    IntegrationConfig ccfg = IntegrationConfig::quadrature();
    ccfg.tol_abs = 1e-12;
    ConvergenceReport rc = strengthened_cmt_check(
        cgs, limit_map, cms, Measure::dirac(kUnit, Value::real(0.25)),
        default_indices(1, 8), ccfg);
    bool const_zero = rc.pass;
    for (double v : rc.sup_residuals) const_zero = const_zero && v == 0.0;

    bool pass = r.pass && rate_ok && const_zero;
    std::ostringstream d;
    d << "final residual " << r.sup_residuals.back() << " vs 2L/n with L = " << L
      << ", constant control " << (const_zero ? "0" : "nonzero");
    verdict(6, "strengthened continuous mapping", pass, d.str());
}

TEST_CASE("criterion 7: language frontend") {
    const char* env = std::getenv("RIESZ_PROGRAMS");
    std::filesystem::path dir = env ? env : "programs";
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".rpl") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    bool corpus_ok = files.size() >= 25;
    dsl::EvalConfig cfg;
    for (const auto& f : files) {
        try {
            dsl::SourceProgram prog = dsl::parse(slurp(f));
            std::string canon = dsl::print(prog);
            corpus_ok = corpus_ok && dsl::print(dsl::parse(canon)) == canon;
            dsl::infer_spaces(prog);
            dsl::evaluate(prog, cfg);
        } catch (const std::exception&) {
            corpus_ok = false;
        }
    }

    // Source-level right identity, extensionally on the battery.
    auto ident = dsl::evaluate(dsl::parse("let m = uniform(0.0, 1.0);\n"
                                          "let m2 = bind x ~ m in dirac(x);\n"),
                               cfg);
    bool identity_ok = measures_equal(ident.lets[0].second, ident.lets[1].second,
                                      IntegrationConfig::quadrature());

    dsl::EvalConfig exact_cfg;
    exact_cfg.integration = IntegrationConfig::exact();
    auto coin = dsl::evaluate(
        dsl::parse("let coin = bernoulli(0.5);\n"
                   "let m = bind b ~ coin in bind c ~ coin in "
                   "dirac(if b then 1.0 else if c then 1.0 else 0.0);\n"
                   "expect fn(x) = x of m;\n"),
        exact_cfg);
    bool coin_ok = coin.expects.size() == 1 && coin.expects[0].value == 0.75;

    auto prod = dsl::evaluate(
        dsl::parse("let p = prod(uniform(0.0, 1.0), uniform(0.0, 1.0));\n"
                   "expect fn(q) = fst(q) * snd(q) of p;\n"),
        cfg);
    bool prod_ok =
        prod.expects.size() == 1 && std::fabs(prod.expects[0].value - 0.25) <= 1e-6;

    bool pass = corpus_ok && identity_ok && coin_ok && prod_ok;
    std::ostringstream d;
    d << files.size() << " corpus programs, two-coin expectation "
      << (coin.expects.empty() ? -1.0 : coin.expects[0].value)
      << ", product expectation "
      << (prod.expects.empty() ? -1.0 : prod.expects[0].value);
    verdict(7, "language frontend", pass, d.str());
}

TEST_CASE("criterion 8: reproducible output") {
    const char* bin = std::getenv("RIESZLAB_BIN");
    bool pass = false;
    std::ostringstream d;
    if (!bin) {
        d << "RIESZLAB_BIN not set";
    } else {
        auto tmp = std::filesystem::temp_directory_path();
        auto a = tmp / "riesz_acc8_a.json";
        auto b = tmp / "riesz_acc8_b.json";
        auto c = tmp / "riesz_acc8_c.json";
        std::string base = std::string("\"") + bin + "\"";
        std::string prog = (std::filesystem::path(std::getenv("RIESZ_PROGRAMS")
                                                      ? std::getenv("RIESZ_PROGRAMS")
                                                      : "programs") /
                            "19_check_monad.rpl")
                               .string();
        int r1 = std::system((base + " run " + prog +
                              " --json --seed 7 --threads 1 --out " + a.string())
                                 .c_str());
        int r2 = std::system((base + " run " + prog +
                              " --json --seed 7 --threads 4 --out " + b.string())
                                 .c_str());
        int r3 = std::system((base + " laws --trials 40 --json --seed 7 --threads 3 --out " +
                              c.string())
                                 .c_str());
        std::string sa = slurp(a), sb = slurp(b), sc = slurp(c);
        bool rerun_same = false;
        if (r3 == 0) {
            int r4 = std::system(
                (base + " laws --trials 40 --json --seed 7 --threads 1 --out " +
                 c.string())
                    .c_str());
            rerun_same = r4 == 0 && slurp(c) == sc;
        }
        pass = r1 == 0 && r2 == 0 && !sa.empty() && sa == sb && rerun_same;
        d << "run bytes " << (sa == sb ? "identical" : "DIFFER") << " across threads, "
          << "laws bytes " << (rerun_same ? "identical" : "DIFFER");
    }
    verdict(8, "reproducible output", pass, d.str());
}
