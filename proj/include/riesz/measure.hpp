#pragma once

#include <functional>
#include <numeric>

#include "riesz/quadrature.hpp"
#include "riesz/testfn.hpp"

namespace riesz {

// ---------------------------------------------------------------------------
// IntegrationConfig
// ---------------------------------------------------------------------------

struct IntegrationConfig {
    enum class Backend { Exact, Quadrature, MonteCarlo };

    Backend backend = Backend::Quadrature;
    int order = 64;              // Quadrature
    std::uint64_t samples = 0;   // MonteCarlo
    std::uint64_t seed = 0;      // MonteCarlo
    double tol_abs = 1e-6;

    static IntegrationConfig exact(double tol = 1e-12) {
        IntegrationConfig c;
        c.backend = Backend::Exact;
        c.tol_abs = tol;
        return c;
    }
    static IntegrationConfig quadrature(int order = 64, double tol = 1e-6) {
        if (order < 2) throw DomainMismatch("quadrature order must be >= 2");
        IntegrationConfig c;
        c.backend = Backend::Quadrature;
        c.order = order;
        c.tol_abs = tol;
        return c;
    }
    static IntegrationConfig monte_carlo(std::uint64_t samples, std::uint64_t seed,
                                         double tol = 0.05) {
        if (samples < 1) throw DomainMismatch("monte carlo needs at least one sample");
        IntegrationConfig c;
        c.backend = Backend::MonteCarlo;
        c.samples = samples;
        c.seed = seed;
        c.tol_abs = tol;
        return c;
    }
};

// ---------------------------------------------------------------------------
// Deterministic counter-based randomness (splitmix64): sample i of a run gets
// its own stream derived from (seed, i), so results are independent of the
// number of worker threads.
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t s = seed ^ (counter * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return splitmix64(s);
}

}  // namespace detail

struct SampleRng {
    std::uint64_t state;

    explicit SampleRng(std::uint64_t seed) : state(seed) {}
    static SampleRng for_sample(std::uint64_t seed, std::uint64_t index) {
        return SampleRng(detail::mix_seed(seed, index));
    }

    double u01() {
        return (detail::splitmix64(state) >> 11) * (1.0 / 9007199254740992.0);
    }
};

namespace detail {

inline double pairwise_sum(std::vector<double>& terms) {
    if (terms.empty()) return 0.0;
    std::size_t n = terms.size();
    while (n > 1) {
        std::size_t h = (n + 1) / 2;
        for (std::size_t i = 0; i + h < n; ++i) terms[i] += terms[i + h];
        n = h;
    }
    return terms[0];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Measure: a finite-variation R-valued measure as a symbolic construction
// tree. Its meaning is the integration functional f |-> integral of f.
// ---------------------------------------------------------------------------

class Measure;
class MeasureOverMeasures;
class Kernel;
struct MeasureExpr;
using MExprPtr = std::shared_ptr<const MeasureExpr>;

class Measure {
public:
    struct Dirac {
        Value point;
    };
    struct FiniteWeighted {
        std::vector<std::pair<Value, double>> atoms;
    };
    struct Density {
        double a, b;            // the supporting interval
        TestFunction density;   // declared >= 0 on [a,b]
        double normalization;
    };
    struct PushforwardNode {
        ContinuousMap map;
        std::shared_ptr<const Measure> base;
    };
    struct ProductNode {
        std::shared_ptr<const Measure> left, right;
    };
    struct JoinNode {
        std::shared_ptr<const MeasureOverMeasures> outer;
    };
    struct BindNode {
        std::shared_ptr<const Measure> base;
        std::shared_ptr<const Kernel> kernel;
    };
    struct ScaleNode {
        double c;
        std::shared_ptr<const Measure> base;
    };
    struct SumNode {
        std::shared_ptr<const Measure> left, right;
    };

    using Node = std::variant<Dirac, FiniteWeighted, Density, PushforwardNode,
                              ProductNode, JoinNode, BindNode, ScaleNode, SumNode>;

    // -- factories (defined after the helper classes where needed) -----------

    static Measure dirac(SpaceDescriptor space, Value point) {
        require_member(space, point, "dirac");
        return Measure(std::move(space), Dirac{std::move(point)});
    }

    static Measure finite_weighted(SpaceDescriptor space,
                                   std::vector<std::pair<Value, double>> atoms) {
        for (const auto& [v, w] : atoms) {
            require_member(space, v, "finite_weighted");
            if (!std::isfinite(w)) throw NonFinite("non-finite atom weight");
        }
        return Measure(std::move(space), FiniteWeighted{std::move(atoms)});
    }

    // The probability measure on {false, true} with P(true) = p.
    static Measure bernoulli(double p) {
        if (p < 0.0 || p > 1.0) throw DomainMismatch("bernoulli parameter outside [0,1]");
        return finite_weighted(SpaceDescriptor::booleans(),
                               {{Value::boolean(false), 1.0 - p},
                                {Value::boolean(true), p}});
    }

    static Measure density(double a, double b, TestFunction dens, double normalization) {
        if (!(a < b)) throw DomainMismatch("density interval requires a < b");
        if (dens.domain() != SpaceDescriptor::real_interval(a, b))
            throw DomainMismatch("density domain must be the supporting interval");
        if (dens.range().lo < 0)
            throw DomainMismatch("density must be certifiably nonnegative");
        return Measure(SpaceDescriptor::real_interval(a, b),
                       Density{a, b, std::move(dens), normalization});
    }

    // Uniform probability measure on [a, b].
    static Measure uniform(double a, double b) {
        TestFunction one("x", Expr::real(1.0), SpaceDescriptor::real_interval(a, b));
        return density(a, b, std::move(one), 1.0 / (b - a));
    }

    static Measure pushforward(ContinuousMap map, Measure base) {
        if (map.domain() != base.space())
            throw DomainMismatch("pushforward: map domain differs from measure space");
        SpaceDescriptor target = map.codomain();
        return Measure(std::move(target),
                       PushforwardNode{std::move(map),
                                       std::make_shared<const Measure>(std::move(base))});
    }

    static Measure product(Measure left, Measure right) {
        SpaceDescriptor s = SpaceDescriptor::product(left.space(), right.space());
        return Measure(std::move(s),
                       ProductNode{std::make_shared<const Measure>(std::move(left)),
                                   std::make_shared<const Measure>(std::move(right))});
    }

    static Measure join(MeasureOverMeasures outer);  // defined below
    static Measure bind(Measure base, Kernel kernel);  // defined below

    static Measure scale(double c, Measure base) {
        if (!std::isfinite(c)) throw NonFinite("non-finite scale factor");
        SpaceDescriptor s = base.space();
        return Measure(std::move(s),
                       ScaleNode{c, std::make_shared<const Measure>(std::move(base))});
    }

    static Measure sum(Measure left, Measure right) {
        if (left.space() != right.space())
            throw SpaceMismatch("sum: measures live on different spaces");
        SpaceDescriptor s = left.space();
        return Measure(std::move(s),
                       SumNode{std::make_shared<const Measure>(std::move(left)),
                               std::make_shared<const Measure>(std::move(right))});
    }

    const SpaceDescriptor& space() const { return space_; }
    const Node& node() const { return *node_; }

    template <typename T>
    const T* as() const {
        return std::get_if<T>(node_.get());
    }

private:
    Measure(SpaceDescriptor space, Node node)
        : space_(std::move(space)),
          node_(std::make_shared<const Node>(std::move(node))) {}

    SpaceDescriptor space_;
    std::shared_ptr<const Node> node_;
};

// A finitely supported measure over measures: the only representable layer of
// M(M(X)). Every law in the library is quantified over such finite witnesses.
class MeasureOverMeasures {
public:
    MeasureOverMeasures(std::vector<std::pair<Measure, double>> components)
        : components_(std::move(components)) {
        if (components_.empty())
            throw SpaceMismatch("measure over measures needs at least one component");
        for (std::size_t i = 1; i < components_.size(); ++i)
            if (components_[i].first.space() != components_[0].first.space())
                throw SpaceMismatch("inner measures live on different spaces");
    }

    const std::vector<std::pair<Measure, double>>& components() const {
        return components_;
    }
    const SpaceDescriptor& inner_space() const { return components_[0].first.space(); }

private:
    std::vector<std::pair<Measure, double>> components_;
};

// ---------------------------------------------------------------------------
// MeasureExpr: a serializable parameterized family of measures. Kernel rules
// are MeasureExprs with a distinguished parameter; the DSL frontend compiles
// its surface syntax onto the same nodes.
// ---------------------------------------------------------------------------

class Env {
public:
    const Value* lookup_value(const std::string& n) const {
        auto it = values_.find(n);
        return it == values_.end() ? nullptr : &it->second;
    }
    const Measure* lookup_measure(const std::string& n) const {
        auto it = measures_.find(n);
        return it == measures_.end() ? nullptr : &it->second;
    }
    Env with_value(const std::string& n, Value v) const {
        Env out = *this;
        out.values_.insert_or_assign(n, std::move(v));
        return out;
    }
    Env with_measure(const std::string& n, Measure m) const {
        Env out = *this;
        out.measures_.insert_or_assign(n, std::move(m));
        return out;
    }
    const std::map<std::string, Value>& values() const { return values_; }
    const std::map<std::string, Measure>& measures() const { return measures_; }

private:
    std::map<std::string, Value> values_;
    std::map<std::string, Measure> measures_;
};

struct MeasureExpr {
    struct MDirac {
        ExprPtr point;
        SpaceDescriptor space;
    };
    struct MUniform {
        double a, b;
    };
    struct MBernoulli {
        double p;
    };
    struct MCategorical {
        std::vector<std::pair<Value, double>> atoms;
        SpaceDescriptor space;
    };
    struct MBind {
        std::string param;
        MExprPtr base;
        MExprPtr body;
        SpaceDescriptor base_space;
        SpaceDescriptor codomain;
    };
    struct MMap {
        ContinuousMap map;
        MExprPtr base;
    };
    struct MProd {
        MExprPtr left, right;
    };
    struct MVar {
        std::string name;
    };
    struct MIf {
        ExprPtr cond;
        MExprPtr then_branch, else_branch;
    };
    struct MLit {
        std::shared_ptr<const Measure> measure;
    };

    using Node = std::variant<MDirac, MUniform, MBernoulli, MCategorical, MBind,
                              MMap, MProd, MVar, MIf, MLit>;
    Node node;

    static MExprPtr make(Node n) {
        return std::make_shared<const MeasureExpr>(MeasureExpr{std::move(n)});
    }
};

inline Measure eval_measure_expr(const MExprPtr& e, const Env& env);

// A Markov(-style) kernel: Value -> Measure as a serializable rule.
class Kernel {
public:
    Kernel(SpaceDescriptor domain, SpaceDescriptor codomain, std::string param,
           MExprPtr body, Env captured = Env())
        : domain_(std::move(domain)),
          codomain_(std::move(codomain)),
          param_(std::move(param)),
          body_(std::move(body)),
          captured_(std::move(captured)) {}

    const SpaceDescriptor& domain() const { return domain_; }
    const SpaceDescriptor& codomain() const { return codomain_; }
    const std::string& param() const { return param_; }
    const MExprPtr& body() const { return body_; }
    const Env& captured() const { return captured_; }

    Measure apply(const Value& x) const {
        require_member(domain_, x, "kernel application");
        Measure m = eval_measure_expr(body_, captured_.with_value(param_, x));
        if (m.space() != codomain_)
            throw SpaceMismatch("kernel rule produced a measure on the wrong space");
        return m;
    }

    // The unit kernel x |-> delta_x.
    static Kernel dirac_kernel(const SpaceDescriptor& s) {
        return Kernel(s, s, "x",
                      MeasureExpr::make(MeasureExpr::MDirac{Expr::var("x"), s}));
    }

private:
    SpaceDescriptor domain_;
    SpaceDescriptor codomain_;
    std::string param_;
    MExprPtr body_;
    Env captured_;
};

inline Measure Measure::join(MeasureOverMeasures outer) {
    SpaceDescriptor s = outer.inner_space();
    return Measure(std::move(s),
                   JoinNode{std::make_shared<const MeasureOverMeasures>(std::move(outer))});
}

inline Measure Measure::bind(Measure base, Kernel kernel) {
    if (kernel.domain() != base.space())
        throw DomainMismatch("bind: kernel domain differs from measure space");
    SpaceDescriptor s = kernel.codomain();
    return Measure(std::move(s),
                   BindNode{std::make_shared<const Measure>(std::move(base)),
                            std::make_shared<const Kernel>(std::move(kernel))});
}

inline Measure eval_measure_expr(const MExprPtr& e, const Env& env) {
    using ME = MeasureExpr;
    return std::visit(
        [&](const auto& n) -> Measure {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ME::MDirac>) {
                EvalEnv root;
                std::vector<std::string> names;
                std::vector<EvalEnv> frames;
                // Build a chain over the captured values.
                const EvalEnv* cur = &root;
                frames.reserve(env.values().size());
                for (const auto& [name, value] : env.values()) {
                    frames.push_back(EvalEnv{cur, &name, &value});
                    cur = &frames.back();
                }
                Value v = coerce_to_space(eval_expr(n.point, *cur), n.space);
                return Measure::dirac(n.space, std::move(v));
            } else if constexpr (std::is_same_v<T, ME::MUniform>) {
                return Measure::uniform(n.a, n.b);
            } else if constexpr (std::is_same_v<T, ME::MBernoulli>) {
                return Measure::bernoulli(n.p);
            } else if constexpr (std::is_same_v<T, ME::MCategorical>) {
                return Measure::finite_weighted(n.space, n.atoms);
            } else if constexpr (std::is_same_v<T, ME::MBind>) {
                Measure base = eval_measure_expr(n.base, env);
                Kernel k(n.base_space, n.codomain, n.param, n.body, env);
                return Measure::bind(std::move(base), std::move(k));
            } else if constexpr (std::is_same_v<T, ME::MMap>) {
                return Measure::pushforward(n.map, eval_measure_expr(n.base, env));
            } else if constexpr (std::is_same_v<T, ME::MProd>) {
                return Measure::product(eval_measure_expr(n.left, env),
                                        eval_measure_expr(n.right, env));
            } else if constexpr (std::is_same_v<T, ME::MVar>) {
                if (const Measure* m = env.lookup_measure(n.name)) return *m;
                throw DomainMismatch("unbound measure variable '" + n.name + "'");
            } else if constexpr (std::is_same_v<T, ME::MIf>) {
                EvalEnv root;
                std::vector<EvalEnv> frames;
                const EvalEnv* cur = &root;
                frames.reserve(env.values().size());
                for (const auto& [name, value] : env.values()) {
                    frames.push_back(EvalEnv{cur, &name, &value});
                    cur = &frames.back();
                }
                Value c = eval_expr(n.cond, *cur);
                if (!c.is_bool())
                    throw DomainMismatch("measure-level condition is not boolean");
                return eval_measure_expr(c.as_bool() ? n.then_branch : n.else_branch, env);
            } else {
                static_assert(std::is_same_v<T, ME::MLit>);
                return *n.measure;
            }
        },
        e->node);
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

namespace detail {

using Integrand = std::function<double(const Value&)>;

inline double integrate_impl(const Measure& mu, const Integrand& f,
                             const IntegrationConfig& cfg);

inline double integrate_density(const Measure::Density& d, const Integrand& f,
                                const IntegrationConfig& cfg) {
    if (cfg.backend == IntegrationConfig::Backend::Exact)
        throw BackendUnsupported("Exact backend cannot integrate a Density leaf");
    if (cfg.backend == IntegrationConfig::Backend::MonteCarlo) {
        std::vector<double> terms(cfg.samples);
        for (std::uint64_t i = 0; i < cfg.samples; ++i) {
            SampleRng rng = SampleRng::for_sample(cfg.seed, i);
            double t = d.a + (d.b - d.a) * rng.u01();
            Value v = Value::real(t);
            terms[i] = f(v) * d.density.eval_unchecked(v);
        }
        double mean = pairwise_sum(terms) / static_cast<double>(cfg.samples);
        return d.normalization * (d.b - d.a) * mean;
    }
    return d.normalization *
           gauss_legendre_integrate(
               [&](double t) {
                   Value v = Value::real(t);
                   return f(v) * d.density.eval_unchecked(v);
               },
               d.a, d.b, cfg.order);
}

inline double integrate_impl(const Measure& mu, const Integrand& f,
                             const IntegrationConfig& cfg) {
    using M = Measure;
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, M::Dirac>) {
                return f(n.point);
            } else if constexpr (std::is_same_v<T, M::FiniteWeighted>) {
                std::vector<double> terms(n.atoms.size());
                for (std::size_t i = 0; i < n.atoms.size(); ++i)
                    terms[i] = n.atoms[i].second * f(n.atoms[i].first);
                return pairwise_sum(terms);
            } else if constexpr (std::is_same_v<T, M::Density>) {
                return integrate_density(n, f, cfg);
            } else if constexpr (std::is_same_v<T, M::PushforwardNode>) {
                const ContinuousMap& g = n.map;
                return integrate_impl(
                    *n.base, [&](const Value& x) { return f(g.apply_unchecked(x)); },
                    cfg);
            } else if constexpr (std::is_same_v<T, M::ProductNode>) {
                // (mu (x) nu)(f) = nu(y -> mu(x -> f(x,y)))
                const Measure& left = *n.left;
                return integrate_impl(
                    *n.right,
                    [&](const Value& y) {
                        return integrate_impl(
                            left,
                            [&](const Value& x) { return f(Value::pair(x, y)); }, cfg);
                    },
                    cfg);
            } else if constexpr (std::is_same_v<T, M::JoinNode>) {
                const auto& comps = n.outer->components();
                std::vector<double> terms(comps.size());
                for (std::size_t i = 0; i < comps.size(); ++i)
                    terms[i] = comps[i].second * integrate_impl(comps[i].first, f, cfg);
                return pairwise_sum(terms);
            } else if constexpr (std::is_same_v<T, M::BindNode>) {
                const Kernel& k = *n.kernel;
                return integrate_impl(
                    *n.base,
                    [&](const Value& x) { return integrate_impl(k.apply(x), f, cfg); },
                    cfg);
            } else if constexpr (std::is_same_v<T, M::ScaleNode>) {
                return n.c * integrate_impl(*n.base, f, cfg);
            } else {
                static_assert(std::is_same_v<T, M::SumNode>);
                return integrate_impl(*n.left, f, cfg) + integrate_impl(*n.right, f, cfg);
            }
        },
        mu.node());
}

}  // namespace detail

inline double integrate(const Measure& mu, const TestFunction& f,
                        const IntegrationConfig& cfg) {
    if (f.domain() != mu.space())
        throw DomainMismatch("integrate: observable domain differs from measure space");
    double r = detail::integrate_impl(
        mu, [&](const Value& x) { return f.eval_unchecked(x); }, cfg);
    if (!std::isfinite(r)) throw NonFinite("integral is not finite");
    return r;
}

// Integral of a raw functional; used internally by the law and convergence
// checkers where building an expression tree would be circular.
inline double integrate_raw(const Measure& mu, const detail::Integrand& f,
                            const IntegrationConfig& cfg) {
    double r = detail::integrate_impl(mu, f, cfg);
    if (!std::isfinite(r)) throw NonFinite("integral is not finite");
    return r;
}

inline double total_mass(const Measure& mu, const IntegrationConfig& cfg) {
    return integrate_raw(mu, [](const Value&) { return 1.0; }, cfg);
}

// ---------------------------------------------------------------------------
// Structural certificates
// ---------------------------------------------------------------------------

namespace detail {

// Finite support atoms, when the tree is structurally finite. Pushforward,
// bind and join over finite parts flatten; Density makes the result empty.
inline bool collect_atoms(const Measure& mu, double weight,
                          std::vector<std::pair<Value, double>>& out) {
    using M = Measure;
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, M::Dirac>) {
                out.emplace_back(n.point, weight);
                return true;
            } else if constexpr (std::is_same_v<T, M::FiniteWeighted>) {
                for (const auto& [v, w] : n.atoms) out.emplace_back(v, weight * w);
                return true;
            } else if constexpr (std::is_same_v<T, M::Density>) {
                return false;
            } else if constexpr (std::is_same_v<T, M::PushforwardNode>) {
                std::vector<std::pair<Value, double>> inner;
                if (!collect_atoms(*n.base, weight, inner)) return false;
                for (auto& [v, w] : inner)
                    out.emplace_back(n.map.apply_unchecked(v), w);
                return true;
            } else if constexpr (std::is_same_v<T, M::ProductNode>) {
                std::vector<std::pair<Value, double>> l, r;
                if (!collect_atoms(*n.left, 1.0, l)) return false;
                if (!collect_atoms(*n.right, 1.0, r)) return false;
                for (const auto& [lv, lw] : l)
                    for (const auto& [rv, rw] : r)
                        out.emplace_back(Value::pair(lv, rv), weight * lw * rw);
                return true;
            } else if constexpr (std::is_same_v<T, M::JoinNode>) {
                for (const auto& [m, w] : n.outer->components())
                    if (!collect_atoms(m, weight * w, out)) return false;
                return true;
            } else if constexpr (std::is_same_v<T, M::BindNode>) {
                std::vector<std::pair<Value, double>> base;
                if (!collect_atoms(*n.base, weight, base)) return false;
                for (const auto& [v, w] : base)
                    if (!collect_atoms(n.kernel->apply(v), w, out)) return false;
                return true;
            } else if constexpr (std::is_same_v<T, M::ScaleNode>) {
                return collect_atoms(*n.base, weight * n.c, out);
            } else {
                static_assert(std::is_same_v<T, M::SumNode>);
                return collect_atoms(*n.left, weight, out) &&
                       collect_atoms(*n.right, weight, out);
            }
        },
        mu.node());
}

}  // namespace detail

// Flattened finite support, if the tree has one.
inline std::optional<std::vector<std::pair<Value, double>>> finite_support(
    const Measure& mu) {
    std::vector<std::pair<Value, double>> out;
    if (!detail::collect_atoms(mu, 1.0, out)) return std::nullopt;
    return out;
}

namespace detail {

inline bool nonneg_measure_expr(const MeasureExpr& e, const Env& env);

inline bool nonneg_certificate(const Measure& mu) {
    using M = Measure;
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, M::Dirac>) {
                return true;
            } else if constexpr (std::is_same_v<T, M::FiniteWeighted>) {
                for (const auto& [v, w] : n.atoms)
                    if (w < 0) return false;
                return true;
            } else if constexpr (std::is_same_v<T, M::Density>) {
                return n.normalization >= 0 && n.density.range().lo >= 0;
            } else if constexpr (std::is_same_v<T, M::PushforwardNode>) {
                return nonneg_certificate(*n.base);
            } else if constexpr (std::is_same_v<T, M::ProductNode>) {
                return nonneg_certificate(*n.left) && nonneg_certificate(*n.right);
            } else if constexpr (std::is_same_v<T, M::JoinNode>) {
                for (const auto& [m, w] : n.outer->components())
                    if (w < 0 || !nonneg_certificate(m)) return false;
                return true;
            } else if constexpr (std::is_same_v<T, M::BindNode>) {
                if (!nonneg_certificate(*n.base)) return false;
                return nonneg_measure_expr(*n.kernel->body(), n.kernel->captured());
            } else if constexpr (std::is_same_v<T, M::ScaleNode>) {
                return n.c >= 0 && nonneg_certificate(*n.base);
            } else {
                static_assert(std::is_same_v<T, M::SumNode>);
                return nonneg_certificate(*n.left) && nonneg_certificate(*n.right);
            }
        },
        mu.node());
}

// Structural nonnegativity of a kernel body, without applying it: every
// construct in the rule must itself be nonnegative for every parameter value.
inline bool nonneg_measure_expr(const MeasureExpr& e, const Env& env) {
    using ME = MeasureExpr;
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ME::MDirac>) {
                return true;
            } else if constexpr (std::is_same_v<T, ME::MUniform>) {
                return true;
            } else if constexpr (std::is_same_v<T, ME::MBernoulli>) {
                return n.p >= 0 && n.p <= 1;
            } else if constexpr (std::is_same_v<T, ME::MCategorical>) {
                for (const auto& [v, w] : n.atoms)
                    if (w < 0) return false;
                return true;
            } else if constexpr (std::is_same_v<T, ME::MBind>) {
                return nonneg_measure_expr(*n.base, env) &&
                       nonneg_measure_expr(*n.body, env);
            } else if constexpr (std::is_same_v<T, ME::MMap>) {
                return nonneg_measure_expr(*n.base, env);
            } else if constexpr (std::is_same_v<T, ME::MProd>) {
                return nonneg_measure_expr(*n.left, env) &&
                       nonneg_measure_expr(*n.right, env);
            } else if constexpr (std::is_same_v<T, ME::MVar>) {
                if (const Measure* m = env.lookup_measure(n.name))
                    return nonneg_certificate(*m);
                // The variable is bound inside the rule itself; conservatively
                // accept, the binder was checked where it was introduced.
                return true;
            } else if constexpr (std::is_same_v<T, ME::MIf>) {
                return nonneg_measure_expr(*n.then_branch, env) &&
                       nonneg_measure_expr(*n.else_branch, env);
            } else {
                static_assert(std::is_same_v<T, ME::MLit>);
                return nonneg_certificate(*n.measure);
            }
        },
        e.node);
}

}  // namespace detail

// Structural upper bound on the total variation.
inline double variation_bound(const Measure& mu) {
    using M = Measure;
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, M::Dirac>) {
                return 1.0;
            } else if constexpr (std::is_same_v<T, M::FiniteWeighted>) {
                double s = 0;
                for (const auto& [v, w] : n.atoms) s += std::fabs(w);
                return s;
            } else if constexpr (std::is_same_v<T, M::Density>) {
                return std::fabs(n.normalization) * n.density.range().hi * (n.b - n.a);
            } else if constexpr (std::is_same_v<T, M::PushforwardNode>) {
                return variation_bound(*n.base);
            } else if constexpr (std::is_same_v<T, M::ProductNode>) {
                return variation_bound(*n.left) * variation_bound(*n.right);
            } else if constexpr (std::is_same_v<T, M::JoinNode>) {
                double s = 0;
                for (const auto& [m, w] : n.outer->components())
                    s += std::fabs(w) * variation_bound(m);
                return s;
            } else if constexpr (std::is_same_v<T, M::BindNode>) {
                std::vector<std::pair<Value, double>> base;
                if (detail::collect_atoms(*n.base, 1.0, base)) {
                    double s = 0;
                    for (const auto& [v, w] : base)
                        s += std::fabs(w) * variation_bound(n.kernel->apply(v));
                    return s;
                }
                // Continuous base: rules built from probability constructs have
                // kernel variation 1.
                return variation_bound(*n.base);
            } else if constexpr (std::is_same_v<T, M::ScaleNode>) {
                return std::fabs(n.c) * variation_bound(*n.base);
            } else {
                static_assert(std::is_same_v<T, M::SumNode>);
                return variation_bound(*n.left) + variation_bound(*n.right);
            }
        },
        mu.node());
}

inline bool is_probability(const Measure& mu, const IntegrationConfig& cfg) {
    if (!detail::nonneg_certificate(mu)) return false;
    try {
        return std::fabs(total_mass(mu, cfg) - 1.0) <= cfg.tol_abs;
    } catch (const BackendUnsupported&) {
        // Exact backend on a density tree: fall back to quadrature for the
        // mass check only.
        return std::fabs(total_mass(mu, IntegrationConfig::quadrature()) - 1.0) <=
               1e-6;
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace detail {

inline Value sample_impl(const Measure& mu, SampleRng& rng);

inline double branch_mass(const Measure& m) {
    std::vector<std::pair<Value, double>> atoms;
    if (collect_atoms(m, 1.0, atoms)) {
        double s = 0;
        for (const auto& [v, w] : atoms) s += w;
        return s;
    }
    return total_mass(m, IntegrationConfig::quadrature());
}

inline Value sample_impl(const Measure& mu, SampleRng& rng) {
    using M = Measure;
    return std::visit(
        [&](const auto& n) -> Value {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, M::Dirac>) {
                return n.point;
            } else if constexpr (std::is_same_v<T, M::FiniteWeighted>) {
                double total = 0;
                for (const auto& [v, w] : n.atoms) total += w;
                if (total <= 0) throw NotProbability("finite measure has no mass");
                double u = rng.u01() * total, acc = 0;
                for (const auto& [v, w] : n.atoms) {
                    acc += w;
                    if (u <= acc) return v;
                }
                return n.atoms.back().first;
            } else if constexpr (std::is_same_v<T, M::Density>) {
                double envelope = n.density.range().hi;
                if (envelope <= 0) throw NotProbability("density has no mass");
                for (int tries = 0; tries < 100000; ++tries) {
                    double t = n.a + (n.b - n.a) * rng.u01();
                    Value v = Value::real(t);
                    if (rng.u01() * envelope <= n.density.eval_unchecked(v)) return v;
                }
                throw RejectionStall("rejection sampler acceptance rate too low");
            } else if constexpr (std::is_same_v<T, M::PushforwardNode>) {
                return n.map.apply_unchecked(sample_impl(*n.base, rng));
            } else if constexpr (std::is_same_v<T, M::ProductNode>) {
                Value a = sample_impl(*n.left, rng);
                Value b = sample_impl(*n.right, rng);
                return Value::pair(std::move(a), std::move(b));
            } else if constexpr (std::is_same_v<T, M::JoinNode>) {
                const auto& comps = n.outer->components();
                double total = 0;
                for (const auto& [m, w] : comps) total += w;
                double u = rng.u01() * total, acc = 0;
                for (const auto& [m, w] : comps) {
                    acc += w;
                    if (u <= acc) return sample_impl(m, rng);
                }
                return sample_impl(comps.back().first, rng);
            } else if constexpr (std::is_same_v<T, M::BindNode>) {
                Value x = sample_impl(*n.base, rng);
                Measure inner = n.kernel->apply(x);
                return sample_impl(inner, rng);
            } else if constexpr (std::is_same_v<T, M::ScaleNode>) {
                return sample_impl(*n.base, rng);
            } else {
                static_assert(std::is_same_v<T, M::SumNode>);
                double m1 = branch_mass(*n.left);
                double m2 = branch_mass(*n.right);
                if (m1 + m2 <= 0) throw NotProbability("sum has no mass");
                if (rng.u01() * (m1 + m2) <= m1) return sample_impl(*n.left, rng);
                return sample_impl(*n.right, rng);
            }
        },
        mu.node());
}

}  // namespace detail

inline Value sample(const Measure& mu, std::uint64_t seed) {
    if (!detail::nonneg_certificate(mu))
        throw NotProbability("sample requires a certified probability measure");
    SampleRng rng = SampleRng::for_sample(seed, 0);
    return detail::sample_impl(mu, rng);
}

// The i-th sample of a seeded run; independent of the order and the thread
// the calls are made on.
inline Value sample_indexed(const Measure& mu, std::uint64_t seed, std::uint64_t index) {
    if (!detail::nonneg_certificate(mu))
        throw NotProbability("sample requires a certified probability measure");
    SampleRng rng = SampleRng::for_sample(seed, index);
    return detail::sample_impl(mu, rng);
}

}  // namespace riesz
