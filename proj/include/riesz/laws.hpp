#pragma once

#include <thread>

#include "riesz/battery.hpp"
#include "riesz/monad.hpp"

namespace riesz {

// ---------------------------------------------------------------------------
// LawReport: the structured verdict every checker emits.
// ---------------------------------------------------------------------------

struct LawReport {
    std::string law_name;
    std::size_t instances_checked = 0;
    double max_residual = 0;
    double tolerance = 0;
    bool pass = true;
    std::string witness;  // empty on pass; inputs + offending observable on fail

    void finalize() { pass = !(max_residual > tolerance); }
};

// A finite rectangle event A x B over finite carriers.
struct RectangleEvent {
    std::vector<Value> first;
    std::vector<Value> second;
};

// ---------------------------------------------------------------------------
// MeasureGenerator: seeded instance streams for the law sweeps.
// ---------------------------------------------------------------------------

class MeasureGenerator {
public:
    enum class Mode { Finite, Interval };

    MeasureGenerator(Mode mode, std::uint64_t seed, std::size_t max_points = 5)
        : mode_(mode), seed_(seed), max_points_(max_points) {}

    Mode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }

    SampleRng rng_for(std::size_t instance) const {
        return SampleRng::for_sample(seed_, instance);
    }

    SpaceDescriptor space(SampleRng& rng) const {
        if (mode_ == Mode::Interval) return SpaceDescriptor::real_interval(0.0, 1.0);
        static const char* names[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
        std::size_t n = 1 + static_cast<std::size_t>(rng.u01() * double(max_points_));
        n = std::min(n, max_points_);
        std::vector<std::string> syms(names, names + n);
        return SpaceDescriptor::symbols(std::move(syms));
    }

    Value point(SampleRng& rng, const SpaceDescriptor& s) const {
        if (s.enumerable()) {
            auto elems = s.enumerate();
            std::size_t i = static_cast<std::size_t>(rng.u01() * double(elems.size()));
            return elems[std::min(i, elems.size() - 1)];
        }
        double a = s.interval().a, b = s.interval().b;
        return Value::real(a + (b - a) * rng.u01());
    }

    Measure measure(SampleRng& rng, const SpaceDescriptor& s) const {
        if (s.enumerable()) {
            auto elems = s.enumerate();
            if (rng.u01() < 0.25) return Measure::dirac(s, point(rng, s));
            std::vector<std::pair<Value, double>> atoms;
            double total = 0;
            for (const auto& e : elems) {
                double w = rng.u01();
                atoms.emplace_back(e, w);
                total += w;
            }
            for (auto& [v, w] : atoms) w /= total;
            return Measure::finite_weighted(s, std::move(atoms));
        }
        // Interval instances: a convex combination of diracs, sub-interval
        // uniforms and a quadratic density.
        double a = s.interval().a, b = s.interval().b;
        int parts = 1 + static_cast<int>(rng.u01() * 3.0);
        std::vector<std::pair<Measure, double>> comps;
        double total = 0;
        for (int i = 0; i < parts; ++i) {
            double w = 0.2 + rng.u01();
            double kind = rng.u01();
            if (kind < 0.34) {
                comps.emplace_back(Measure::dirac(s, point(rng, s)), w);
            } else if (kind < 0.67) {
                double u = a + (b - a) * rng.u01();
                double v = a + (b - a) * rng.u01();
                double lo = std::min(u, v), hi = std::max(u, v);
                if (hi - lo < 1e-3) hi = std::min(b, lo + 1e-3);
                if (hi <= lo) { lo = a; hi = b; }
                // Uniform on [lo,hi], viewed on the ambient interval via an
                // affine squeeze so every component shares the space s.
                ExprPtr squeeze = Expr::binary(
                    Expr::Kind::Add, Expr::real(lo),
                    Expr::binary(Expr::Kind::Mul,
                                 Expr::binary(Expr::Kind::Sub, Expr::var("x"),
                                              Expr::real(a)),
                                 Expr::real((hi - lo) / (b - a))));
                comps.emplace_back(
                    Measure::pushforward(ContinuousMap("x", squeeze, s, s),
                                         Measure::uniform(a, b)),
                    w);
            } else {
                double c0 = 0.1 + rng.u01(), c1 = rng.u01(), c2 = rng.u01();
                // density c0 + c1*u + c2*u^2 in the normalized coordinate.
                ExprPtr x = Expr::var("x");
                ExprPtr u = Expr::binary(
                    Expr::Kind::Mul, Expr::binary(Expr::Kind::Sub, x, Expr::real(a)),
                    Expr::real(1.0 / (b - a)));
                ExprPtr dens = Expr::binary(
                    Expr::Kind::Add, Expr::real(c0),
                    Expr::binary(Expr::Kind::Add,
                                 Expr::binary(Expr::Kind::Mul, Expr::real(c1), u),
                                 Expr::binary(Expr::Kind::Mul, Expr::real(c2),
                                              Expr::binary(Expr::Kind::Mul, u, u))));
                double mass = (b - a) * (c0 + c1 / 2.0 + c2 / 3.0);
                comps.emplace_back(
                    Measure::density(a, b, TestFunction("x", dens, s), 1.0 / mass), w);
            }
            total += w;
        }
        Measure acc = Measure::scale(comps[0].second / total, comps[0].first);
        for (std::size_t i = 1; i < comps.size(); ++i)
            acc = Measure::sum(std::move(acc),
                               Measure::scale(comps[i].second / total, comps[i].first));
        return acc;
    }

    MeasureOverMeasures mixture(SampleRng& rng, const SpaceDescriptor& s) const {
        int k = 1 + static_cast<int>(rng.u01() * 3.0);
        std::vector<std::pair<Measure, double>> comps;
        double total = 0;
        for (int i = 0; i < k; ++i) {
            double w = 0.2 + rng.u01();
            comps.emplace_back(measure(rng, s), w);
            total += w;
        }
        for (auto& [m, w] : comps) w /= total;
        return MeasureOverMeasures(std::move(comps));
    }

    std::vector<std::pair<MeasureOverMeasures, double>> two_level(
        SampleRng& rng, const SpaceDescriptor& s) const {
        int k = 1 + static_cast<int>(rng.u01() * 2.0);
        std::vector<std::pair<MeasureOverMeasures, double>> out;
        double total = 0;
        for (int i = 0; i < k; ++i) {
            double w = 0.2 + rng.u01();
            out.emplace_back(mixture(rng, s), w);
            total += w;
        }
        for (auto& [m, w] : out) w /= total;
        return out;
    }

private:
    Mode mode_;
    std::uint64_t seed_;
    std::size_t max_points_;
};

// ---------------------------------------------------------------------------
// Deterministic parallel sweep: per-instance work is independent, the merge
// (max residual, smallest witness index on ties) is associative, so verdicts
// do not depend on the thread count.
// ---------------------------------------------------------------------------

namespace detail {

struct InstanceResult {
    double residual = 0;
    std::string witness;
};

template <typename Fn>
inline void run_sweep(std::size_t trials, int threads, Fn&& fn, LawReport& report) {
    std::vector<double> residuals(trials, 0.0);
    std::vector<std::string> witnesses(trials);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                InstanceResult r = fn(i);
                residuals[i] = r.residual;
                witnesses[i] = std::move(r.witness);
            } catch (const Error& e) {
                residuals[i] = std::numeric_limits<double>::infinity();
                witnesses[i] = std::string("error: ") + e.what();
            }
        }
    };
    threads = std::max(1, threads);
    if (threads == 1 || trials < 2) {
        work(0, trials);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (trials + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::size_t lo = t * chunk, hi = std::min(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    report.instances_checked += trials;
    for (std::size_t i = 0; i < trials; ++i) {
        if (residuals[i] > report.max_residual) {
            report.max_residual = residuals[i];
            report.witness = "instance " + std::to_string(i) + ": " + witnesses[i];
        }
    }
    report.finalize();
    if (report.pass) report.witness.clear();
}

inline std::string describe_worst(const std::vector<TestFunction>& battery,
                                  const Measure& mu, const Measure& nu,
                                  const IntegrationConfig& cfg) {
    double worst = -1;
    std::string s;
    for (const auto& f : battery) {
        double d = std::fabs(integrate(mu, f, cfg) - integrate(nu, f, cfg));
        if (d > worst) {
            worst = d;
            s = print_sexpr(f.body());
        }
    }
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Monad laws
// ---------------------------------------------------------------------------

inline LawReport check_monad_laws(const MeasureGenerator& gen, std::size_t trials,
                                  const IntegrationConfig& cfg, int threads = 1) {
    LawReport report;
    report.law_name = "monad_laws";
    report.tolerance = cfg.tol_abs;
    detail::run_sweep(
        trials, threads,
        [&](std::size_t i) {
            SampleRng rng = gen.rng_for(i);
            SpaceDescriptor s = gen.space(rng);
            std::vector<TestFunction> battery = battery_for(s);
            Measure mu = gen.measure(rng, s);
            detail::InstanceResult out;

            auto note = [&](const char* law, const Measure& lhs, const Measure& rhs) {
                const TestFunction* worst = nullptr;
                double d = battery_distance(lhs, rhs, cfg, &worst, &battery);
                if (d > out.residual) {
                    out.residual = d;
                    out.witness = std::string(law) + " on " + s.to_string() +
                                  ", observable " +
                                  (worst ? print_sexpr(worst->body()) : "?");
                }
            };

            // First unit law: join(delta_mu) == mu.
            note("first unit law", join(MeasureOverMeasures({{mu, 1.0}})), mu);

            // Second unit law: join((delta)_* mu) == mu, evaluated through the
            // fused Kleisli path, and through an explicit finite mixture when
            // the support is finite.
            note("second unit law (bind)",
                 bind(mu, Kernel::dirac_kernel(s)), mu);
            if (auto atoms = finite_support(mu)) {
                std::vector<std::pair<Measure, double>> comps;
                for (const auto& [x, w] : *atoms)
                    comps.emplace_back(unit(x, s), w);
                note("second unit law (join)", join(MeasureOverMeasures(comps)), mu);
            }

            // Associativity: join of the outer flattening == join of the
            // component joins.
            auto two = gen.two_level(rng, s);
            std::vector<std::pair<Measure, double>> flat;
            std::vector<std::pair<Measure, double>> joined;
            for (const auto& [pi, W] : two) {
                for (const auto& [m, w] : pi.components())
                    flat.emplace_back(m, W * w);
                joined.emplace_back(join(pi), W);
            }
            note("associativity law", join(MeasureOverMeasures(flat)),
                 join(MeasureOverMeasures(joined)));
            return out;
        },
        report);
    return report;
}

// ---------------------------------------------------------------------------
// Naturality squares for unit and join along a map g.
// ---------------------------------------------------------------------------

inline LawReport check_naturality(const ContinuousMap& g, const MeasureGenerator& gen,
                                  std::size_t trials, const IntegrationConfig& cfg,
                                  int threads = 1) {
    LawReport report;
    report.law_name = "naturality";
    report.tolerance = cfg.tol_abs;
    detail::run_sweep(
        trials, threads,
        [&](std::size_t i) {
            SampleRng rng = gen.rng_for(i);
            const SpaceDescriptor& s = g.domain();
            const SpaceDescriptor& t = g.codomain();
            std::vector<TestFunction> battery = battery_for(t);
            detail::InstanceResult out;
            auto note = [&](const char* what, const Measure& lhs, const Measure& rhs) {
                const TestFunction* worst = nullptr;
                double d = battery_distance(lhs, rhs, cfg, &worst, &battery);
                if (d > out.residual) {
                    out.residual = d;
                    out.witness = std::string(what) + ", observable " +
                                  (worst ? print_sexpr(worst->body()) : "?");
                }
            };
            // g_* delta_x == delta_{g(x)}
            Value x = gen.point(rng, s);
            note("unit naturality", pushforward(g, unit(x, s)),
                 unit(g.apply(x), t));
            // g_* join(pi) == join(g_* applied componentwise)
            MeasureOverMeasures pi = gen.mixture(rng, s);
            note("join naturality", pushforward(g, join(pi)),
                 join(map_pushforward(g, pi)));
            return out;
        },
        report);
    return report;
}

// ---------------------------------------------------------------------------
// Fubini: both iterated-integral orders agree.
// ---------------------------------------------------------------------------

inline LawReport check_fubini(const Measure& mu, const Measure& nu,
                              const TestFunction& f, const IntegrationConfig& cfg) {
    LawReport report;
    report.law_name = "fubini";
    report.tolerance = cfg.tol_abs;
    report.instances_checked = 1;
    double x_first = integrate_raw(
        nu,
        [&](const Value& y) {
            return integrate_raw(
                mu, [&](const Value& x) { return f.eval_unchecked(Value::pair(x, y)); },
                cfg);
        },
        cfg);
    double y_first = integrate_raw(
        mu,
        [&](const Value& x) {
            return integrate_raw(
                nu, [&](const Value& y) { return f.eval_unchecked(Value::pair(x, y)); },
                cfg);
        },
        cfg);
    report.max_residual = std::fabs(x_first - y_first);
    report.finalize();
    if (!report.pass)
        report.witness = "observable " + print_sexpr(f.body());
    return report;
}

inline LawReport check_fubini_sweep(const MeasureGenerator& gen, std::size_t trials,
                                    const IntegrationConfig& cfg, int threads = 1) {
    LawReport report;
    report.law_name = "fubini";
    report.tolerance = cfg.tol_abs;
    detail::run_sweep(
        trials, threads,
        [&](std::size_t i) {
            SampleRng rng = gen.rng_for(i);
            SpaceDescriptor sx = gen.space(rng);
            SpaceDescriptor sy = gen.space(rng);
            Measure mu = gen.measure(rng, sx);
            Measure nu = gen.measure(rng, sy);
            SpaceDescriptor prod = SpaceDescriptor::product(sx, sy);
            detail::InstanceResult out;
            for (const auto& f : battery_for(prod)) {
                LawReport one = check_fubini(mu, nu, f, cfg);
                if (one.max_residual > out.residual) {
                    out.residual = one.max_residual;
                    out.witness = "observable " + print_sexpr(f.body());
                }
            }
            return out;
        },
        report);
    return report;
}

// ---------------------------------------------------------------------------
// Commutativity hexagon: both strength paths equal the product measure.
// ---------------------------------------------------------------------------

inline LawReport check_hexagon(const Measure& mu, const Measure& nu,
                               const IntegrationConfig& cfg) {
    LawReport report;
    report.law_name = "hexagon";
    report.tolerance = cfg.tol_abs;
    report.instances_checked = 1;
    SpaceDescriptor prod = SpaceDescriptor::product(mu.space(), nu.space());
    Measure direct = product(mu, nu);

    // When nu has finite support, the left path join(M(rho)(lambda(mu,nu)))
    // is an honest finite measure over measures; build it and include it.
    std::optional<Measure> left_join;
    if (auto atoms = finite_support(nu)) {
        std::vector<std::pair<Measure, double>> comps;
        for (const auto& [y, w] : *atoms)
            comps.emplace_back(strength_right(mu, y, nu.space()), w);
        left_join = join(MeasureOverMeasures(std::move(comps)));
    }
    std::optional<Measure> right_join;
    if (auto atoms = finite_support(mu)) {
        std::vector<std::pair<Measure, double>> comps;
        for (const auto& [x, w] : *atoms)
            comps.emplace_back(strength_left(x, mu.space(), nu), w);
        right_join = join(MeasureOverMeasures(std::move(comps)));
    }

    for (const auto& f : battery_for(prod)) {
        auto integrand = [&](const Value& x, const Value& y) {
            return f.eval_unchecked(Value::pair(x, y));
        };
        // join . M(rho) . lambda: nu(y -> mu(x -> f(x,y)))
        double path_left = integrate_raw(
            nu,
            [&](const Value& y) {
                return integrate_raw(
                    mu, [&](const Value& x) { return integrand(x, y); }, cfg);
            },
            cfg);
        // join . M(lambda) . rho: mu(x -> nu(y -> f(x,y)))
        double path_right = integrate_raw(
            mu,
            [&](const Value& x) {
                return integrate_raw(
                    nu, [&](const Value& y) { return integrand(x, y); }, cfg);
            },
            cfg);
        double via_product = integrate(direct, f, cfg);
        double r = std::max(std::fabs(path_left - via_product),
                            std::fabs(path_right - via_product));
        if (left_join)
            r = std::max(r, std::fabs(integrate(*left_join, f, cfg) - via_product));
        if (right_join)
            r = std::max(r, std::fabs(integrate(*right_join, f, cfg) - via_product));
        if (r > report.max_residual) {
            report.max_residual = r;
            report.witness = "observable " + print_sexpr(f.body());
        }
    }
    report.finalize();
    if (report.pass) report.witness.clear();
    return report;
}

inline LawReport check_hexagon_sweep(const MeasureGenerator& gen, std::size_t trials,
                                     const IntegrationConfig& cfg, int threads = 1) {
    LawReport report;
    report.law_name = "hexagon";
    report.tolerance = cfg.tol_abs;
    detail::run_sweep(
        trials, threads,
        [&](std::size_t i) {
            SampleRng rng = gen.rng_for(i);
            SpaceDescriptor sx = gen.space(rng);
            SpaceDescriptor sy = gen.space(rng);
            Measure mu = gen.measure(rng, sx);
            Measure nu = gen.measure(rng, sy);
            LawReport one = check_hexagon(mu, nu, cfg);
            return detail::InstanceResult{one.max_residual, one.witness};
        },
        report);
    return report;
}

// ---------------------------------------------------------------------------
// Strong affineness: a joint probability with a Dirac second marginal
// factorizes over every rectangle.
// ---------------------------------------------------------------------------

inline constexpr double kDeterministicAtomThreshold = 1e-9;

inline LawReport check_strongly_affine(const Measure& mu,
                                       const IntegrationConfig& cfg) {
    LawReport report;
    report.law_name = "strongly_affine";
    report.tolerance = std::max(cfg.tol_abs, 1e-12);
    report.instances_checked = 1;

    if (!mu.space().is_product())
        throw NotProduct("check_strongly_affine requires a product-space measure");
    const SpaceDescriptor& sx = mu.space().left();
    const SpaceDescriptor& sy = mu.space().right();
    if (!sx.enumerable() || !sy.enumerable())
        throw DomainMismatch("strong affineness is checked on finite carriers only");
    if (!is_probability(mu, cfg))
        throw NotProbability("check_strongly_affine requires a probability measure");

    std::vector<Value> xs = sx.enumerate();
    std::vector<Value> ys = sy.enumerate();

    // Exact joint table.
    auto atoms = finite_support(mu);
    if (!atoms) throw DomainMismatch("measure has no finite support table");
    std::vector<std::vector<double>> table(xs.size(),
                                           std::vector<double>(ys.size(), 0.0));
    for (const auto& [v, w] : *atoms) {
        bool placed = false;
        for (std::size_t i = 0; i < xs.size() && !placed; ++i)
            for (std::size_t j = 0; j < ys.size() && !placed; ++j)
                if (v.first() == xs[i] && v.second() == ys[j]) {
                    table[i][j] += w;
                    placed = true;
                }
        if (!placed) throw DomainMismatch("support atom outside the declared carriers");
    }

    // Deterministic-marginal precondition: one atom of the second marginal
    // carries (nearly) all the mass.
    std::size_t y_star = ys.size();
    for (std::size_t j = 0; j < ys.size(); ++j) {
        double m = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) m += table[i][j];
        if (m >= 1.0 - kDeterministicAtomThreshold) {
            y_star = j;
            break;
        }
    }
    if (y_star == ys.size())
        throw NotDeterministicMarginal(
            "second marginal has no atom of mass 1; precondition, not a law failure");

    std::vector<double> nu(xs.size(), 0.0);  // first marginal
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) nu[i] += table[i][j];

    // Exhaustive rectangles: mu(A x B) == nu(A) * delta_y(B).
    if (xs.size() > 8 || ys.size() > 8)
        throw DomainMismatch("rectangle enumeration supports carriers up to 8 points");
    for (std::uint32_t A = 0; A < (1u << xs.size()); ++A) {
        double nuA = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (A & (1u << i)) nuA += nu[i];
        for (std::uint32_t B = 0; B < (1u << ys.size()); ++B) {
            double muAB = 0;
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (A & (1u << i))
                    for (std::size_t j = 0; j < ys.size(); ++j)
                        if (B & (1u << j)) muAB += table[i][j];
            double deltaB = (B & (1u << y_star)) ? 1.0 : 0.0;
            double r = std::fabs(muAB - nuA * deltaB);
            if (r > report.max_residual) {
                report.max_residual = r;
                report.witness = "rectangle A=" + std::to_string(A) +
                                 " B=" + std::to_string(B);
            }
        }
    }

    // Pullback-universality surrogate. Surjectivity: mu equals the product of
    // its marginals (battery equality). Left inverse: the first marginal of
    // nu (x) delta_y recovers nu.
    Measure nu_measure = marginal_1(mu);
    Measure rebuilt = product(nu_measure, unit(ys[y_star], sy));
    IntegrationConfig exact = IntegrationConfig::exact(report.tolerance);
    double d1 = battery_distance(mu, rebuilt, exact);
    double d2 = battery_distance(marginal_1(rebuilt), nu_measure, exact);
    if (std::max(d1, d2) > report.max_residual) {
        report.max_residual = std::max(d1, d2);
        report.witness = "pullback factorization residual";
    }

    report.finalize();
    if (report.pass) report.witness.clear();
    return report;
}

// Commuting-square part of the pullback diagram: (pi_2)_* (nu (x) delta_y)
// equals delta_y.
inline LawReport check_pullback_strength(const MeasureGenerator& gen,
                                         std::size_t trials,
                                         const IntegrationConfig& cfg,
                                         int threads = 1) {
    LawReport report;
    report.law_name = "pullback_strength";
    report.tolerance = cfg.tol_abs;
    detail::run_sweep(
        trials, threads,
        [&](std::size_t i) {
            SampleRng rng = gen.rng_for(i);
            SpaceDescriptor sx = gen.space(rng);
            SpaceDescriptor sy = gen.space(rng);
            Measure nu = gen.measure(rng, sx);
            Value y = gen.point(rng, sy);
            Measure joint = strength_right(nu, y, sy);
            detail::InstanceResult out;
            std::vector<TestFunction> battery = battery_for(sy);
            const TestFunction* worst = nullptr;
            out.residual = battery_distance(marginal_2(joint), unit(y, sy), cfg,
                                            &worst, &battery);
            if (worst) out.witness = "observable " + print_sexpr(worst->body());
            return out;
        },
        report);
    return report;
}

}  // namespace riesz
