#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "riesz/value.hpp"

namespace riesz {

// ---------------------------------------------------------------------------
// Expr: a closed expression tree over Values.
//
// Expressions are the common currency of the library: test-function bodies,
// continuous maps between spaces, densities and kernel point rules are all
// Exprs with named free variables. Keeping them first-order (no opaque
// callables) is what makes bound certification and serialization possible.
// ---------------------------------------------------------------------------

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
public:
    enum class Kind {
        Var, Const,
        Fst, Snd, MkPair,
        Add, Sub, Mul, Min, Max,
        Exp, Sin, Cos, Abs, Clamp,
        If, Eq, Le, Lt
    };

    Kind kind;
    std::string name;                    // Var
    std::optional<Value> literal;        // Const
    double clamp_lo = 0, clamp_hi = 0;   // Clamp
    std::vector<ExprPtr> kids;

    static ExprPtr var(std::string n) {
        Expr e(Kind::Var);
        e.name = std::move(n);
        return wrap(std::move(e));
    }
    static ExprPtr constant(Value v) {
        Expr e(Kind::Const);
        e.literal = std::move(v);
        return wrap(std::move(e));
    }
    static ExprPtr real(double x) { return constant(Value::real(x)); }
    static ExprPtr unary(Kind k, ExprPtr a) {
        Expr e(k);
        e.kids = {std::move(a)};
        return wrap(std::move(e));
    }
    static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b) {
        Expr e(k);
        e.kids = {std::move(a), std::move(b)};
        return wrap(std::move(e));
    }
    static ExprPtr clamp(ExprPtr a, double lo, double hi) {
        if (!(lo <= hi)) throw DomainMismatch("clamp requires lo <= hi");
        Expr e(Kind::Clamp);
        e.kids = {std::move(a)};
        e.clamp_lo = lo;
        e.clamp_hi = hi;
        return wrap(std::move(e));
    }
    static ExprPtr cond(ExprPtr c, ExprPtr a, ExprPtr b) {
        Expr e(Kind::If);
        e.kids = {std::move(c), std::move(a), std::move(b)};
        return wrap(std::move(e));
    }

private:
    explicit Expr(Kind k) : kind(k) {}
    static ExprPtr wrap(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

public:
    Expr(const Expr&) = default;
};

// Cheap chained environment for evaluation; frames live on the call stack.
struct EvalEnv {
    const EvalEnv* parent = nullptr;
    const std::string* name = nullptr;
    const Value* value = nullptr;

    const Value* lookup(const std::string& n) const {
        for (const EvalEnv* e = this; e; e = e->parent)
            if (e->name && *e->name == n) return e->value;
        return nullptr;
    }
    EvalEnv extend(const std::string& n, const Value& v) const {
        return EvalEnv{this, &n, &v};
    }
};

namespace detail {

inline double check_finite(double x) {
    if (!std::isfinite(x)) throw NonFinite("expression evaluated to a non-finite value");
    return x;
}

inline bool values_equal(const Value& a, const Value& b) {
    if (a.is_numeric() && b.is_numeric()) return a.numeric() == b.numeric();
    return a == b;
}

}  // namespace detail

inline Value eval_expr(const ExprPtr& e, const EvalEnv& env) {
    using K = Expr::Kind;
    switch (e->kind) {
        case K::Var: {
            const Value* v = env.lookup(e->name);
            if (!v) throw DomainMismatch("unbound variable '" + e->name + "'");
            return *v;
        }
        case K::Const:
            return *e->literal;
        case K::Fst: {
            Value v = eval_expr(e->kids[0], env);
            if (!v.is_pair()) throw DomainMismatch("fst applied to a non-pair");
            return v.first();
        }
        case K::Snd: {
            Value v = eval_expr(e->kids[0], env);
            if (!v.is_pair()) throw DomainMismatch("snd applied to a non-pair");
            return v.second();
        }
        case K::MkPair:
            return Value::pair(eval_expr(e->kids[0], env), eval_expr(e->kids[1], env));
        case K::Add:
        case K::Sub:
        case K::Mul:
        case K::Min:
        case K::Max: {
            double a = eval_expr(e->kids[0], env).numeric();
            double b = eval_expr(e->kids[1], env).numeric();
            double r = 0;
            switch (e->kind) {
                case K::Add: r = a + b; break;
                case K::Sub: r = a - b; break;
                case K::Mul: r = a * b; break;
                case K::Min: r = std::min(a, b); break;
                default: r = std::max(a, b); break;
            }
            return Value::real(detail::check_finite(r));
        }
        case K::Exp:
            return Value::real(detail::check_finite(
                std::exp(eval_expr(e->kids[0], env).numeric())));
        case K::Sin:
            return Value::real(std::sin(eval_expr(e->kids[0], env).numeric()));
        case K::Cos:
            return Value::real(std::cos(eval_expr(e->kids[0], env).numeric()));
        case K::Abs:
            return Value::real(std::fabs(eval_expr(e->kids[0], env).numeric()));
        case K::Clamp: {
            double a = eval_expr(e->kids[0], env).numeric();
            return Value::real(std::min(std::max(a, e->clamp_lo), e->clamp_hi));
        }
        case K::If: {
            Value c = eval_expr(e->kids[0], env);
            if (!c.is_bool()) throw DomainMismatch("if-condition is not boolean");
            return eval_expr(e->kids[c.as_bool() ? 1 : 2], env);
        }
        case K::Eq: {
            Value a = eval_expr(e->kids[0], env);
            Value b = eval_expr(e->kids[1], env);
            return Value::boolean(detail::values_equal(a, b));
        }
        case K::Le: {
            double a = eval_expr(e->kids[0], env).numeric();
            double b = eval_expr(e->kids[1], env).numeric();
            return Value::boolean(a <= b);
        }
        case K::Lt: {
            double a = eval_expr(e->kids[0], env).numeric();
            double b = eval_expr(e->kids[1], env).numeric();
            return Value::boolean(a < b);
        }
    }
    throw Error("unreachable expression kind");
}

// Substitute `replacement` for every free occurrence of variable `name`.
inline ExprPtr subst_expr(const ExprPtr& e, const std::string& name,
                          const ExprPtr& replacement) {
    if (e->kind == Expr::Kind::Var)
        return e->name == name ? replacement : e;
    if (e->kids.empty()) return e;
    Expr copy = *e;
    bool changed = false;
    for (auto& k : copy.kids) {
        ExprPtr nk = subst_expr(k, name, replacement);
        if (nk != k) {
            k = nk;
            changed = true;
        }
    }
    if (!changed) return e;
    return std::make_shared<const Expr>(std::move(copy));
}

inline void collect_free_vars(const ExprPtr& e, std::vector<std::string>& out) {
    if (e->kind == Expr::Kind::Var) {
        if (std::find(out.begin(), out.end(), e->name) == out.end())
            out.push_back(e->name);
        return;
    }
    for (const auto& k : e->kids) collect_free_vars(k, out);
}

// ---------------------------------------------------------------------------
// Abstract interpretation: certified range and Lipschitz bound.
//
// Each numeric result carries an interval [lo,hi] (ends may be infinite) and
// `lip`, an upper bound on the Lipschitz constant of the expression with
// respect to the sup-metric on the numeric inputs (every numeric leaf of the
// domain abstraction enters with lip = 1).
// ---------------------------------------------------------------------------

struct NumRange {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double lip = std::numeric_limits<double>::infinity();

    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
    double abs_bound() const { return std::max(std::fabs(lo), std::fabs(hi)); }
};

struct AbsVal;
using AbsPtr = std::shared_ptr<const AbsVal>;

struct AbsVal {
    struct BoolSet {
        bool can_false = true, can_true = true;
    };
    struct AtomSet {
        std::vector<Value> atoms;  // finite set of possible atoms
    };
    struct PairAbs {
        AbsPtr first, second;
    };
    std::variant<NumRange, BoolSet, AtomSet, PairAbs> rep;

    static AbsVal num(double lo, double hi, double lip) {
        return AbsVal{NumRange{lo, hi, lip}};
    }
};

namespace detail {

inline double inf() { return std::numeric_limits<double>::infinity(); }

// Product of interval endpoints with the convention 0 * inf = 0.
inline double safe_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

inline NumRange as_num(const AbsVal& a, const char* ctx) {
    if (const auto* r = std::get_if<NumRange>(&a.rep)) return *r;
    if (const auto* s = std::get_if<AbsVal::AtomSet>(&a.rep)) {
        NumRange r;
        r.lip = 0;  // atoms from a finite set do not vary continuously
        for (const auto& v : s->atoms) {
            if (!v.is_numeric())
                throw DomainMismatch(std::string(ctx) + ": non-numeric operand");
            r.lo = std::min(r.lo, v.numeric());
            r.hi = std::max(r.hi, v.numeric());
        }
        if (s->atoms.empty()) throw DomainMismatch(std::string(ctx) + ": empty atom set");
        return r;
    }
    throw DomainMismatch(std::string(ctx) + ": non-numeric operand");
}

}  // namespace detail

// Abstraction of a whole space: what an unknown point of it looks like.
inline AbsVal space_abstract(const SpaceDescriptor& s) {
    if (s.is_real_interval())
        return AbsVal::num(s.interval().a, s.interval().b, 1.0);
    if (s.is_real_line())
        return AbsVal::num(-detail::inf(), detail::inf(), 1.0);
    if (s.is_int_range())
        return AbsVal::num(static_cast<double>(s.ints().lo),
                           static_cast<double>(s.ints().hi), 1.0);
    if (s.is_finite_set()) {
        const auto& elems = s.finite().elements;
        bool all_bool = !elems.empty();
        for (const auto& e : elems) all_bool = all_bool && e.is_bool();
        if (all_bool) {
            AbsVal::BoolSet bs{false, false};
            for (const auto& e : elems)
                (e.as_bool() ? bs.can_true : bs.can_false) = true;
            return AbsVal{bs};
        }
        return AbsVal{AbsVal::AtomSet{elems}};
    }
    return AbsVal{AbsVal::PairAbs{
        std::make_shared<const AbsVal>(space_abstract(s.left())),
        std::make_shared<const AbsVal>(space_abstract(s.right()))}};
}

using AbsEnv = std::map<std::string, AbsVal>;

inline AbsVal analyze_expr(const ExprPtr& e, const AbsEnv& env) {
    using K = Expr::Kind;
    using detail::as_num;
    switch (e->kind) {
        case K::Var: {
            auto it = env.find(e->name);
            if (it == env.end())
                throw DomainMismatch("unbound variable '" + e->name + "' in analysis");
            return it->second;
        }
        case K::Const: {
            const Value& v = *e->literal;
            if (v.is_numeric()) return AbsVal::num(v.numeric(), v.numeric(), 0.0);
            if (v.is_bool())
                return AbsVal{AbsVal::BoolSet{!v.as_bool(), v.as_bool()}};
            if (v.is_symbol()) return AbsVal{AbsVal::AtomSet{{v}}};
            throw DomainMismatch("pair literals are not supported in analysis");
        }
        case K::Fst: {
            AbsVal a = analyze_expr(e->kids[0], env);
            if (const auto* p = std::get_if<AbsVal::PairAbs>(&a.rep)) return *p->first;
            throw DomainMismatch("fst applied to a non-pair");
        }
        case K::Snd: {
            AbsVal a = analyze_expr(e->kids[0], env);
            if (const auto* p = std::get_if<AbsVal::PairAbs>(&a.rep)) return *p->second;
            throw DomainMismatch("snd applied to a non-pair");
        }
        case K::MkPair:
            return AbsVal{AbsVal::PairAbs{
                std::make_shared<const AbsVal>(analyze_expr(e->kids[0], env)),
                std::make_shared<const AbsVal>(analyze_expr(e->kids[1], env))}};
        case K::Add: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "+");
            NumRange b = as_num(analyze_expr(e->kids[1], env), "+");
            return AbsVal::num(a.lo + b.lo, a.hi + b.hi, a.lip + b.lip);
        }
        case K::Sub: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "-");
            NumRange b = as_num(analyze_expr(e->kids[1], env), "-");
            return AbsVal::num(a.lo - b.hi, a.hi - b.lo, a.lip + b.lip);
        }
        case K::Mul: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "*");
            NumRange b = as_num(analyze_expr(e->kids[1], env), "*");
            double p1 = detail::safe_mul(a.lo, b.lo), p2 = detail::safe_mul(a.lo, b.hi);
            double p3 = detail::safe_mul(a.hi, b.lo), p4 = detail::safe_mul(a.hi, b.hi);
            double lip = detail::inf();
            if (a.bounded() && b.bounded())
                lip = a.lip * b.abs_bound() + a.abs_bound() * b.lip;
            else if (a.lo == a.hi && a.lip == 0)  // constant factor
                lip = std::fabs(a.lo) * b.lip;
            else if (b.lo == b.hi && b.lip == 0)
                lip = a.lip * std::fabs(b.lo);
            return AbsVal::num(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}), lip);
        }
        case K::Min: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "min");
            NumRange b = as_num(analyze_expr(e->kids[1], env), "min");
            return AbsVal::num(std::min(a.lo, b.lo), std::min(a.hi, b.hi),
                               std::max(a.lip, b.lip));
        }
        case K::Max: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "max");
            NumRange b = as_num(analyze_expr(e->kids[1], env), "max");
            return AbsVal::num(std::max(a.lo, b.lo), std::max(a.hi, b.hi),
                               std::max(a.lip, b.lip));
        }
        case K::Exp: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "exp");
            double hi = std::isfinite(a.hi) ? std::exp(a.hi) : detail::inf();
            double lo = std::isfinite(a.lo) ? std::exp(a.lo) : 0.0;
            double lip = std::isfinite(hi) ? hi * a.lip : detail::inf();
            return AbsVal::num(lo, hi, lip);
        }
        case K::Sin:
        case K::Cos: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "sin/cos");
            // Coarse but certified: values stay in [-1,1], derivative bound 1.
            return AbsVal::num(-1.0, 1.0, a.lip);
        }
        case K::Abs: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "abs");
            double lo = (a.lo <= 0 && a.hi >= 0) ? 0.0
                                                 : std::min(std::fabs(a.lo), std::fabs(a.hi));
            return AbsVal::num(lo, a.abs_bound(), a.lip);
        }
        case K::Clamp: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "clamp");
            auto cl = [&](double x) {
                return std::min(std::max(x, e->clamp_lo), e->clamp_hi);
            };
            return AbsVal::num(cl(a.lo), cl(a.hi), a.lip);
        }
        case K::If: {
            AbsVal c = analyze_expr(e->kids[0], env);
            const auto* bs = std::get_if<AbsVal::BoolSet>(&c.rep);
            if (!bs) throw DomainMismatch("if-condition is not boolean");
            if (bs->can_true && !bs->can_false) return analyze_expr(e->kids[1], env);
            if (bs->can_false && !bs->can_true) return analyze_expr(e->kids[2], env);
            AbsVal t = analyze_expr(e->kids[1], env);
            AbsVal f = analyze_expr(e->kids[2], env);
            if (std::holds_alternative<NumRange>(t.rep) &&
                std::holds_alternative<NumRange>(f.rep)) {
                NumRange a = std::get<NumRange>(t.rep), b = std::get<NumRange>(f.rep);
                // No continuity certificate across the branch; range is still exact.
                return AbsVal::num(std::min(a.lo, b.lo), std::max(a.hi, b.hi),
                                   detail::inf());
            }
            if (std::holds_alternative<AbsVal::AtomSet>(t.rep) &&
                std::holds_alternative<AbsVal::AtomSet>(f.rep)) {
                AbsVal::AtomSet out = std::get<AbsVal::AtomSet>(t.rep);
                for (const auto& v : std::get<AbsVal::AtomSet>(f.rep).atoms) {
                    bool seen = false;
                    for (const auto& w : out.atoms) seen = seen || w == v;
                    if (!seen) out.atoms.push_back(v);
                }
                return AbsVal{out};
            }
            if (std::holds_alternative<AbsVal::BoolSet>(t.rep) &&
                std::holds_alternative<AbsVal::BoolSet>(f.rep)) {
                auto a = std::get<AbsVal::BoolSet>(t.rep);
                auto b = std::get<AbsVal::BoolSet>(f.rep);
                return AbsVal{AbsVal::BoolSet{a.can_false || b.can_false,
                                              a.can_true || b.can_true}};
            }
            throw DomainMismatch("if-branches have incompatible shapes");
        }
        case K::Eq: {
            AbsVal a = analyze_expr(e->kids[0], env);
            AbsVal b = analyze_expr(e->kids[1], env);
            const auto* sa = std::get_if<AbsVal::AtomSet>(&a.rep);
            const auto* sb = std::get_if<AbsVal::AtomSet>(&b.rep);
            if (sa && sb && sa->atoms.size() == 1 && sb->atoms.size() == 1) {
                bool eq = detail::values_equal(sa->atoms[0], sb->atoms[0]);
                return AbsVal{AbsVal::BoolSet{!eq, eq}};
            }
            return AbsVal{AbsVal::BoolSet{}};
        }
        case K::Le:
        case K::Lt: {
            NumRange a = as_num(analyze_expr(e->kids[0], env), "cmp");
            NumRange b = as_num(analyze_expr(e->kids[1], env), "cmp");
            bool strict = e->kind == K::Lt;
            if (strict ? a.hi < b.lo : a.hi <= b.lo)
                return AbsVal{AbsVal::BoolSet{false, true}};
            if (strict ? a.lo >= b.hi : a.lo > b.hi)
                return AbsVal{AbsVal::BoolSet{true, false}};
            return AbsVal{AbsVal::BoolSet{}};
        }
    }
    throw Error("unreachable expression kind in analysis");
}

// ---------------------------------------------------------------------------
// Canonical S-expression form
// ---------------------------------------------------------------------------

namespace detail {

// Shortest decimal string that parses back to exactly x.
inline std::string fmt_real(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eE") == std::string::npos &&
        s.find_first_of("in") == std::string::npos)  // inf/nan never occur in trees
        s += ".0";
    return s;
}

}  // namespace detail

inline std::string print_sexpr(const ExprPtr& e) {
    using K = Expr::Kind;
    auto nary = [&](const char* op) {
        std::string s = "(";
        s += op;
        for (const auto& k : e->kids) {
            s += ' ';
            s += print_sexpr(k);
        }
        return s + ")";
    };
    switch (e->kind) {
        case K::Var: return e->name;
        case K::Const: {
            const Value& v = *e->literal;
            if (v.is_real()) return detail::fmt_real(v.as_real());
            if (v.is_int()) return std::to_string(v.as_int());
            if (v.is_bool()) return v.as_bool() ? "true" : "false";
            if (v.is_symbol()) return "'" + v.as_symbol();
            throw DomainMismatch("pair literals have no S-expression form");
        }
        case K::Fst: return nary("fst");
        case K::Snd: return nary("snd");
        case K::MkPair: return nary("pair");
        case K::Add: return nary("+");
        case K::Sub: return nary("-");
        case K::Mul: return nary("*");
        case K::Min: return nary("min");
        case K::Max: return nary("max");
        case K::Exp: return nary("exp");
        case K::Sin: return nary("sin");
        case K::Cos: return nary("cos");
        case K::Abs: return nary("abs");
        case K::Clamp:
            return "(clamp " + print_sexpr(e->kids[0]) + " " +
                   detail::fmt_real(e->clamp_lo) + " " + detail::fmt_real(e->clamp_hi) + ")";
        case K::If: return nary("if");
        case K::Eq: return nary("=");
        case K::Le: return nary("<=");
        case K::Lt: return nary("<");
    }
    throw Error("unreachable expression kind in printer");
}

namespace detail {

struct SexprReader {
    const std::string& src;
    std::size_t pos = 0;

    explicit SexprReader(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw DomainMismatch("malformed S-expression at offset " + std::to_string(pos) +
                             ": " + msg);
    }
    std::string token() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of input");
        std::size_t start = pos;
        while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos])) &&
               src[pos] != '(' && src[pos] != ')')
            ++pos;
        if (pos == start) fail("expected a token");
        return src.substr(start, pos - start);
    }
    double number() {
        std::string t = token();
        std::size_t used = 0;
        double x = std::stod(t, &used);
        if (used != t.size()) fail("bad number '" + t + "'");
        return x;
    }

    ExprPtr parse() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of input");
        if (src[pos] != '(') {
            std::string t = token();
            if (t == "true") return Expr::constant(Value::boolean(true));
            if (t == "false") return Expr::constant(Value::boolean(false));
            if (t[0] == '\'') return Expr::constant(Value::symbol(t.substr(1)));
            char c = t[0];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
                c == '.') {
                if (t.find_first_of(".eE") != std::string::npos)
                    return Expr::constant(Value::real(std::stod(t)));
                return Expr::constant(Value::integer(std::stoll(t)));
            }
            return Expr::var(t);
        }
        ++pos;  // '('
        std::string op = token();
        using K = Expr::Kind;
        ExprPtr out;
        auto close = [&]() {
            skip_ws();
            if (pos >= src.size() || src[pos] != ')') fail("expected ')'");
            ++pos;
        };
        auto un = [&](K k) {
            ExprPtr a = parse();
            close();
            return Expr::unary(k, std::move(a));
        };
        auto bin = [&](K k) {
            ExprPtr a = parse();
            ExprPtr b = parse();
            close();
            return Expr::binary(k, std::move(a), std::move(b));
        };
        if (op == "+") return bin(K::Add);
        if (op == "-") return bin(K::Sub);
        if (op == "*") return bin(K::Mul);
        if (op == "min") return bin(K::Min);
        if (op == "max") return bin(K::Max);
        if (op == "=") return bin(K::Eq);
        if (op == "<=") return bin(K::Le);
        if (op == "<") return bin(K::Lt);
        if (op == "pair") return bin(K::MkPair);
        if (op == "fst") return un(K::Fst);
        if (op == "snd") return un(K::Snd);
        if (op == "exp") return un(K::Exp);
        if (op == "sin") return un(K::Sin);
        if (op == "cos") return un(K::Cos);
        if (op == "abs") return un(K::Abs);
        if (op == "clamp") {
            ExprPtr a = parse();
            double lo = number(), hi = number();
            close();
            return Expr::clamp(std::move(a), lo, hi);
        }
        if (op == "if") {
            ExprPtr c = parse(), a = parse(), b = parse();
            close();
            return Expr::cond(std::move(c), std::move(a), std::move(b));
        }
        fail("unknown operator '" + op + "'");
    }
};

}  // namespace detail

inline ExprPtr parse_sexpr(const std::string& text) {
    detail::SexprReader r(text);
    ExprPtr e = r.parse();
    r.skip_ws();
    if (r.pos != text.size())
        throw DomainMismatch("trailing input after S-expression");
    return e;
}

// ---------------------------------------------------------------------------
// Small builder vocabulary for writing expressions in test and library code.
// ---------------------------------------------------------------------------

namespace ex {

struct E {
    ExprPtr p;
    E(ExprPtr q) : p(std::move(q)) {}  // NOLINT(google-explicit-constructor)
    E(double x) : p(Expr::real(x)) {}  // NOLINT(google-explicit-constructor)
    operator ExprPtr() const { return p; }  // NOLINT(google-explicit-constructor)
};

inline E var(const std::string& n) { return E(Expr::var(n)); }
inline E lit(double x) { return E(Expr::real(x)); }
inline E intlit(std::int64_t n) { return E(Expr::constant(Value::integer(n))); }
inline E boollit(bool b) { return E(Expr::constant(Value::boolean(b))); }
inline E sym(const std::string& s) { return E(Expr::constant(Value::symbol(s))); }
inline E operator+(E a, E b) { return E(Expr::binary(Expr::Kind::Add, a.p, b.p)); }
inline E operator-(E a, E b) { return E(Expr::binary(Expr::Kind::Sub, a.p, b.p)); }
inline E operator*(E a, E b) { return E(Expr::binary(Expr::Kind::Mul, a.p, b.p)); }
inline E vmin(E a, E b) { return E(Expr::binary(Expr::Kind::Min, a.p, b.p)); }
inline E vmax(E a, E b) { return E(Expr::binary(Expr::Kind::Max, a.p, b.p)); }
inline E vexp(E a) { return E(Expr::unary(Expr::Kind::Exp, a.p)); }
inline E vsin(E a) { return E(Expr::unary(Expr::Kind::Sin, a.p)); }
inline E vcos(E a) { return E(Expr::unary(Expr::Kind::Cos, a.p)); }
inline E vabs(E a) { return E(Expr::unary(Expr::Kind::Abs, a.p)); }
inline E vclamp(E a, double lo, double hi) { return E(Expr::clamp(a.p, lo, hi)); }
inline E fst(E a) { return E(Expr::unary(Expr::Kind::Fst, a.p)); }
inline E snd(E a) { return E(Expr::unary(Expr::Kind::Snd, a.p)); }
inline E mkpair(E a, E b) { return E(Expr::binary(Expr::Kind::MkPair, a.p, b.p)); }
inline E eq(E a, E b) { return E(Expr::binary(Expr::Kind::Eq, a.p, b.p)); }
inline E le(E a, E b) { return E(Expr::binary(Expr::Kind::Le, a.p, b.p)); }
inline E lt(E a, E b) { return E(Expr::binary(Expr::Kind::Lt, a.p, b.p)); }
inline E ite(E c, E a, E b) { return E(Expr::cond(c.p, a.p, b.p)); }

}  // namespace ex

}  // namespace riesz
