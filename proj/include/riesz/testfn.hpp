#pragma once

#include "riesz/expr.hpp"

namespace riesz {

namespace detail {

// Does an abstract value certifiably land inside a space?
inline bool abs_fits(const AbsVal& a, const SpaceDescriptor& s) {
    if (s.is_real_interval()) {
        const auto* r = std::get_if<NumRange>(&a.rep);
        return r && r->lo >= s.interval().a && r->hi <= s.interval().b;
    }
    if (s.is_real_line()) {
        return std::holds_alternative<NumRange>(a.rep);
    }
    if (s.is_int_range()) {
        if (const auto* r = std::get_if<NumRange>(&a.rep))
            return r->lo >= static_cast<double>(s.ints().lo) &&
                   r->hi <= static_cast<double>(s.ints().hi);
        if (const auto* as = std::get_if<AbsVal::AtomSet>(&a.rep)) {
            for (const auto& v : as->atoms)
                if (!s.contains(v)) return false;
            return true;
        }
        return false;
    }
    if (s.is_finite_set()) {
        if (const auto* as = std::get_if<AbsVal::AtomSet>(&a.rep)) {
            for (const auto& v : as->atoms)
                if (!s.contains(v)) return false;
            return true;
        }
        if (const auto* bs = std::get_if<AbsVal::BoolSet>(&a.rep)) {
            if (bs->can_false && !s.contains(Value::boolean(false))) return false;
            if (bs->can_true && !s.contains(Value::boolean(true))) return false;
            return true;
        }
        if (const auto* r = std::get_if<NumRange>(&a.rep)) {
            // A numeric result fits a finite numeric carrier only if the carrier
            // covers the whole certified range; conservative, exact for constants.
            if (!r->bounded()) return false;
            if (r->lo == r->hi) {
                return s.contains(Value::real(r->lo)) ||
                       s.contains(Value::integer(static_cast<std::int64_t>(r->lo)));
            }
            return false;
        }
        return false;
    }
    // product
    const auto* p = std::get_if<AbsVal::PairAbs>(&a.rep);
    return p && abs_fits(*p->first, s.left()) && abs_fits(*p->second, s.right());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// TestFunction: a bounded continuous observable f : X -> R.
//
// The sup-norm bound is certified at construction time by interval analysis
// of the body over the domain; building an uncertifiably-bounded observable
// (e.g. exp on the whole line) throws UnboundedFunction.
// ---------------------------------------------------------------------------

class TestFunction {
public:
    TestFunction(std::string param, ExprPtr body, SpaceDescriptor domain)
        : param_(std::move(param)),
          body_(std::move(body)),
          domain_(std::move(domain)) {
        AbsEnv env;
        env.emplace(param_, space_abstract(domain_));
        AbsVal a = analyze_expr(body_, env);
        const auto* r = std::get_if<NumRange>(&a.rep);
        if (!r)
            throw DomainMismatch("test function body is not numeric");
        if (!r->bounded())
            throw UnboundedFunction(
                "cannot certify a sup-norm bound for this observable on " +
                domain_.to_string());
        range_ = *r;
        declared_bound_ = r->abs_bound();
    }

    const std::string& param() const { return param_; }
    const ExprPtr& body() const { return body_; }
    const SpaceDescriptor& domain() const { return domain_; }
    double declared_bound() const { return declared_bound_; }
    const NumRange& range() const { return range_; }

    // Certified Lipschitz bound w.r.t. the sup-metric on numeric coordinates;
    // +inf when the analysis cannot certify one (e.g. across an if-branch).
    double lipschitz_bound() const { return range_.lip; }

    double eval(const Value& x) const {
        require_member(domain_, x, "eval_fn");
        EvalEnv root;
        EvalEnv env = root.extend(param_, x);
        Value v = eval_expr(body_, env);
        if (!v.is_numeric())
            throw DomainMismatch("test function produced a non-numeric value");
        return detail::check_finite(v.numeric());
    }

    // Raw evaluation without the membership check; integration backends use it
    // on points they produced themselves.
    double eval_unchecked(const Value& x) const {
        EvalEnv root;
        EvalEnv env = root.extend(param_, x);
        return eval_expr(body_, env).numeric();
    }

    // On enumerable carriers, shrink declared_bound to the exact sup-norm.
    TestFunction tightened() const {
        if (!domain_.enumerable()) return *this;
        double sup = 0;
        for (const auto& x : domain_.enumerate())
            sup = std::max(sup, std::fabs(eval(x)));
        TestFunction out = *this;
        out.declared_bound_ = sup;
        return out;
    }

private:
    std::string param_;
    ExprPtr body_;
    SpaceDescriptor domain_;
    NumRange range_;
    double declared_bound_;
};

inline double eval_fn(const TestFunction& f, const Value& x) { return f.eval(x); }
inline double bound_of(const TestFunction& f) { return f.declared_bound(); }

// ---------------------------------------------------------------------------
// ContinuousMap: an expression-level map X -> Y.
// ---------------------------------------------------------------------------

class ContinuousMap {
public:
    ContinuousMap(std::string param, ExprPtr body, SpaceDescriptor domain,
                  SpaceDescriptor codomain)
        : param_(std::move(param)),
          body_(std::move(body)),
          domain_(std::move(domain)),
          codomain_(std::move(codomain)) {
        AbsEnv env;
        env.emplace(param_, space_abstract(domain_));
        AbsVal a = analyze_expr(body_, env);
        if (!detail::abs_fits(a, codomain_))
            throw DomainMismatch("map body does not certifiably land in " +
                                 codomain_.to_string());
    }

    const std::string& param() const { return param_; }
    const ExprPtr& body() const { return body_; }
    const SpaceDescriptor& domain() const { return domain_; }
    const SpaceDescriptor& codomain() const { return codomain_; }

    Value apply(const Value& x) const {
        require_member(domain_, x, "map application");
        EvalEnv root;
        EvalEnv env = root.extend(param_, x);
        Value y = coerce_to_space(eval_expr(body_, env), codomain_);
        require_member(codomain_, y, "map application (codomain)");
        return y;
    }

    Value apply_unchecked(const Value& x) const {
        EvalEnv root;
        EvalEnv env = root.extend(param_, x);
        return coerce_to_space(eval_expr(body_, env), codomain_);
    }

    static ContinuousMap identity(const SpaceDescriptor& s) {
        return ContinuousMap("x", Expr::var("x"), s, s);
    }

private:
    std::string param_;
    ExprPtr body_;
    SpaceDescriptor domain_;
    SpaceDescriptor codomain_;
};

// Pullback of an observable along a map: compose_fn(f, g) = f . g, defined on
// g's domain. The certified bound of f is preserved (g lands in f's domain).
inline TestFunction compose_fn(const TestFunction& f, const ContinuousMap& g) {
    if (g.codomain() != f.domain())
        throw DomainMismatch("compose_fn: map codomain differs from observable domain");
    ExprPtr body = subst_expr(f.body(), f.param(), g.body());
    return TestFunction(g.param(), std::move(body), g.domain());
}

inline ContinuousMap compose_map(const ContinuousMap& g, const ContinuousMap& h) {
    if (h.codomain() != g.domain())
        throw DomainMismatch("compose_map: domain/codomain mismatch");
    ExprPtr body = subst_expr(g.body(), g.param(), h.body());
    return ContinuousMap(h.param(), std::move(body), h.domain(), g.codomain());
}

}  // namespace riesz
