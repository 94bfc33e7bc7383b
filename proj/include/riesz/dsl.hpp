#pragma once

#include "riesz/laws.hpp"
#include "riesz/monad.hpp"

namespace riesz::dsl {

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct SrcPos {
    int line = 1;
    int col = 1;
};

struct Diagnostic {
    std::string code;  // "lex", "parse", "space"
    SrcPos pos;
    std::string message;
};

struct FrontendError : Error {
    Diagnostic diag;
    FrontendError(std::string code, SrcPos pos, const std::string& msg)
        : Error(code + " error at " + std::to_string(pos.line) + ":" +
                std::to_string(pos.col) + ": " + msg),
          diag{std::move(code), pos, msg} {}
};

struct LexError : FrontendError {
    LexError(SrcPos pos, const std::string& msg) : FrontendError("lex", pos, msg) {}
};
struct ParseError : FrontendError {
    ParseError(SrcPos pos, const std::string& msg) : FrontendError("parse", pos, msg) {}
};
struct SpaceError : FrontendError {
    SpaceError(SrcPos pos, const std::string& msg) : FrontendError("space", pos, msg) {}
};

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct Token {
    enum class Kind {
        Ident, Number, Punct, End
    };
    Kind kind = Kind::End;
    std::string text;
    SrcPos pos;
    bool is_real_literal = false;  // Number: carries a '.' or exponent
};

inline std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    SrcPos pos;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++pos.line;
            pos.col = 1;
        } else {
            ++pos.col;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {  // comment to end of line
            while (i < text.size() && text[i] != '\n') {
                advance(text[i]);
                ++i;
            }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(c);
            ++i;
            continue;
        }
        Token tok;
        tok.pos = pos;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            tok.kind = Token::Kind::Ident;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                tok.text += text[i];
                advance(text[i]);
                ++i;
            }
            out.push_back(std::move(tok));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            tok.kind = Token::Kind::Number;
            bool real = false;
            while (i < text.size()) {
                char d = text[i];
                if (std::isdigit(static_cast<unsigned char>(d))) {
                } else if (d == '.') {
                    real = true;
                } else if ((d == 'e' || d == 'E') && i + 1 < text.size() &&
                           (std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
                            text[i + 1] == '-' || text[i + 1] == '+')) {
                    real = true;
                    tok.text += d;
                    advance(d);
                    ++i;
                    d = text[i];  // sign or digit
                } else {
                    break;
                }
                tok.text += d;
                advance(d);
                ++i;
            }
            tok.is_real_literal = real;
            out.push_back(std::move(tok));
            continue;
        }
        // punctuation; two-char operators first
        static const char* two[] = {"==", "<=", ">="};
        bool matched = false;
        for (const char* op : two) {
            if (text.compare(i, 2, op) == 0) {
                tok.kind = Token::Kind::Punct;
                tok.text = op;
                advance(text[i]);
                advance(text[i + 1]);
                i += 2;
                out.push_back(std::move(tok));
                matched = true;
                break;
            }
        }
        if (matched) continue;
        static const std::string singles = "=~;(),*+-<>";
        if (singles.find(c) != std::string::npos) {
            tok.kind = Token::Kind::Punct;
            tok.text = std::string(1, c);
            advance(c);
            ++i;
            out.push_back(std::move(tok));
            continue;
        }
        throw LexError(pos, std::string("invalid character '") + c + "'");
    }
    Token end;
    end.kind = Token::Kind::End;
    end.pos = pos;
    out.push_back(std::move(end));
    return out;
}

// ---------------------------------------------------------------------------
// Ast
// ---------------------------------------------------------------------------

struct FnLit {
    std::string param;
    ExprPtr body;
    SrcPos pos;
};

struct MAst;
using MAstPtr = std::shared_ptr<const MAst>;

struct MAst {
    struct Dirac {
        ExprPtr point;
    };
    struct Uniform {
        double a, b;
    };
    struct Bernoulli {
        double p;
    };
    struct Categorical {
        std::vector<std::pair<Value, double>> atoms;
    };
    struct Bind {
        std::string name;
        MAstPtr base;
        MAstPtr body;
    };
    struct MapM {
        FnLit fn;
        MAstPtr base;
    };
    struct Prod {
        MAstPtr left, right;
    };
    struct Var {
        std::string name;
    };
    using Node =
        std::variant<Dirac, Uniform, Bernoulli, Categorical, Bind, MapM, Prod, Var>;

    Node node;
    SrcPos pos;

    static MAstPtr make(Node n, SrcPos pos) {
        return std::make_shared<const MAst>(MAst{std::move(n), pos});
    }
};

struct Statement {
    struct Let {
        std::string name;
        MAstPtr value;
    };
    struct Expect {
        FnLit fn;
        MAstPtr measure;
    };
    struct Check {
        std::string law;
        std::vector<double> args;
    };
    std::variant<Let, Expect, Check> node;
    SrcPos pos;
};

struct SourceProgram {
    std::string text;
    std::vector<Statement> statements;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    std::vector<Statement> program() {
        std::vector<Statement> out;
        while (!at_end()) out.push_back(statement());
        return out;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    const Token& advance() { return toks_[pos_++]; }

    bool check_ident(const char* kw) const {
        return peek().kind == Token::Kind::Ident && peek().text == kw;
    }
    bool check_punct(const char* p) const {
        return peek().kind == Token::Kind::Punct && peek().text == p;
    }
    bool match_ident(const char* kw) {
        if (!check_ident(kw)) return false;
        advance();
        return true;
    }
    bool match_punct(const char* p) {
        if (!check_punct(p)) return false;
        advance();
        return true;
    }
    void expect_punct(const char* p) {
        if (!match_punct(p))
            throw ParseError(peek().pos, "expected '" + std::string(p) + "', found '" +
                                             shown(peek()) + "'");
    }
    std::string ident(const char* what) {
        if (peek().kind != Token::Kind::Ident)
            throw ParseError(peek().pos, std::string("expected ") + what + ", found '" +
                                             shown(peek()) + "'");
        return advance().text;
    }
    static std::string shown(const Token& t) {
        return t.kind == Token::Kind::End ? "<end of input>" : t.text;
    }
    double number() {
        if (peek().kind != Token::Kind::Number) {
            bool neg = check_punct("-");
            if (neg && peek(1).kind == Token::Kind::Number) {
                advance();
                return -std::stod(advance().text);
            }
            throw ParseError(peek().pos, "expected a number, found '" + shown(peek()) + "'");
        }
        return std::stod(advance().text);
    }

    Statement statement() {
        Statement st;
        st.pos = peek().pos;
        if (match_ident("let")) {
            std::string name = ident("an identifier after 'let'");
            expect_punct("=");
            MAstPtr m = mexpr();
            expect_punct(";");
            st.node = Statement::Let{std::move(name), std::move(m)};
            return st;
        }
        if (match_ident("expect")) {
            FnLit fn = fnlit();
            if (!match_ident("of"))
                throw ParseError(peek().pos, "expected 'of' after the observable");
            MAstPtr m = mexpr();
            expect_punct(";");
            st.node = Statement::Expect{std::move(fn), std::move(m)};
            return st;
        }
        if (match_ident("check")) {
            std::string law = ident("a law name after 'check'");
            expect_punct("(");
            std::vector<double> args;
            if (!check_punct(")")) {
                args.push_back(number());
                while (match_punct(",")) args.push_back(number());
            }
            expect_punct(")");
            expect_punct(";");
            st.node = Statement::Check{std::move(law), std::move(args)};
            return st;
        }
        throw ParseError(peek().pos,
                         "expected 'let', 'expect' or 'check', found '" + shown(peek()) + "'");
    }

    FnLit fnlit() {
        SrcPos pos = peek().pos;
        if (!match_ident("fn"))
            throw ParseError(peek().pos, "expected 'fn', found '" + shown(peek()) + "'");
        expect_punct("(");
        std::string param = ident("a parameter name");
        expect_punct(")");
        expect_punct("=");
        ExprPtr body = sexpr();
        return FnLit{std::move(param), std::move(body), pos};
    }

    MAstPtr mexpr() {
        SrcPos pos = peek().pos;
        if (match_punct("(")) {
            MAstPtr inner = mexpr();
            expect_punct(")");
            return inner;
        }
        if (match_ident("dirac")) {
            expect_punct("(");
            ExprPtr e = sexpr();
            expect_punct(")");
            return MAst::make(MAst::Dirac{std::move(e)}, pos);
        }
        if (match_ident("uniform")) {
            expect_punct("(");
            double a = number();
            expect_punct(",");
            double b = number();
            expect_punct(")");
            return MAst::make(MAst::Uniform{a, b}, pos);
        }
        if (match_ident("bernoulli")) {
            expect_punct("(");
            double p = number();
            expect_punct(")");
            return MAst::make(MAst::Bernoulli{p}, pos);
        }
        if (match_ident("categorical")) {
            expect_punct("(");
            std::vector<std::pair<Value, double>> atoms;
            do {
                expect_punct("(");
                Value atom = literal_atom();
                expect_punct(",");
                double w = number();
                expect_punct(")");
                atoms.emplace_back(std::move(atom), w);
            } while (match_punct(","));
            expect_punct(")");
            return MAst::make(MAst::Categorical{std::move(atoms)}, pos);
        }
        if (match_ident("bind")) {
            std::string name = ident("an identifier after 'bind'");
            if (!match_punct("~"))
                throw ParseError(peek().pos, "expected '~' after the bound name");
            MAstPtr base = mexpr();
            if (!match_ident("in"))
                throw ParseError(peek().pos, "expected 'in' after the bound measure");
            MAstPtr body = mexpr();
            return MAst::make(MAst::Bind{std::move(name), std::move(base), std::move(body)},
                              pos);
        }
        if (match_ident("map")) {
            expect_punct("(");
            FnLit fn = fnlit();
            expect_punct(",");
            MAstPtr base = mexpr();
            expect_punct(")");
            return MAst::make(MAst::MapM{std::move(fn), std::move(base)}, pos);
        }
        if (match_ident("prod")) {
            expect_punct("(");
            MAstPtr l = mexpr();
            expect_punct(",");
            MAstPtr r = mexpr();
            expect_punct(")");
            return MAst::make(MAst::Prod{std::move(l), std::move(r)}, pos);
        }
        if (peek().kind == Token::Kind::Ident) {
            std::string name = advance().text;
            return MAst::make(MAst::Var{std::move(name)}, pos);
        }
        throw ParseError(peek().pos,
                         "expected a measure expression, found '" + shown(peek()) + "'");
    }

    Value literal_atom() {
        if (match_ident("true")) return Value::boolean(true);
        if (match_ident("false")) return Value::boolean(false);
        if (peek().kind == Token::Kind::Ident) return Value::symbol(advance().text);
        if (peek().kind == Token::Kind::Number || check_punct("-")) {
            bool real = peek().kind == Token::Kind::Number && peek().is_real_literal;
            double x = number();
            if (real) return Value::real(x);
            return Value::integer(static_cast<std::int64_t>(x));
        }
        throw ParseError(peek().pos, "expected a literal, found '" + shown(peek()) + "'");
    }

    // scalar expressions: comparison < additive < multiplicative < unary
    ExprPtr sexpr() {
        ExprPtr lhs = add_expr();
        if (peek().kind == Token::Kind::Punct) {
            const std::string& op = peek().text;
            if (op == "==" || op == "<=" || op == "<" || op == ">=" || op == ">") {
                advance();
                ExprPtr rhs = add_expr();
                if (op == "==") return Expr::binary(Expr::Kind::Eq, lhs, rhs);
                if (op == "<=") return Expr::binary(Expr::Kind::Le, lhs, rhs);
                if (op == "<") return Expr::binary(Expr::Kind::Lt, lhs, rhs);
                if (op == ">=") return Expr::binary(Expr::Kind::Le, rhs, lhs);
                return Expr::binary(Expr::Kind::Lt, rhs, lhs);
            }
        }
        return lhs;
    }

    ExprPtr add_expr() {
        ExprPtr e = mul_expr();
        while (true) {
            if (match_punct("+")) {
                e = Expr::binary(Expr::Kind::Add, e, mul_expr());
            } else if (match_punct("-")) {
                e = Expr::binary(Expr::Kind::Sub, e, mul_expr());
            } else {
                return e;
            }
        }
    }

    ExprPtr mul_expr() {
        ExprPtr e = unary_expr();
        while (match_punct("*")) e = Expr::binary(Expr::Kind::Mul, e, unary_expr());
        return e;
    }

    ExprPtr unary_expr() {
        if (check_punct("-")) {
            advance();
            return Expr::binary(Expr::Kind::Sub, Expr::real(0.0), unary_expr());
        }
        return primary_expr();
    }

    ExprPtr primary_expr() {
        SrcPos pos = peek().pos;
        if (peek().kind == Token::Kind::Number) {
            const Token& t = advance();
            if (t.is_real_literal) return Expr::constant(Value::real(std::stod(t.text)));
            return Expr::constant(Value::integer(std::stoll(t.text)));
        }
        if (match_punct("(")) {
            ExprPtr e = sexpr();
            expect_punct(")");
            return e;
        }
        if (match_ident("true")) return Expr::constant(Value::boolean(true));
        if (match_ident("false")) return Expr::constant(Value::boolean(false));
        if (match_ident("if")) {
            ExprPtr c = sexpr();
            if (!match_ident("then"))
                throw ParseError(peek().pos, "expected 'then'");
            ExprPtr a = sexpr();
            if (!match_ident("else"))
                throw ParseError(peek().pos, "expected 'else'");
            ExprPtr b = sexpr();
            return Expr::cond(c, a, b);
        }
        if (peek().kind == Token::Kind::Ident) {
            std::string name = advance().text;
            auto arg1 = [&]() {
                expect_punct("(");
                ExprPtr e = sexpr();
                expect_punct(")");
                return e;
            };
            if (name == "fst") return Expr::unary(Expr::Kind::Fst, arg1());
            if (name == "snd") return Expr::unary(Expr::Kind::Snd, arg1());
            if (name == "exp") return Expr::unary(Expr::Kind::Exp, arg1());
            if (name == "sin") return Expr::unary(Expr::Kind::Sin, arg1());
            if (name == "cos") return Expr::unary(Expr::Kind::Cos, arg1());
            if (name == "abs") return Expr::unary(Expr::Kind::Abs, arg1());
            if (name == "min" || name == "max") {
                expect_punct("(");
                ExprPtr a = sexpr();
                expect_punct(",");
                ExprPtr b = sexpr();
                expect_punct(")");
                return Expr::binary(name == "min" ? Expr::Kind::Min : Expr::Kind::Max,
                                    a, b);
            }
            if (name == "clamp") {
                expect_punct("(");
                ExprPtr a = sexpr();
                expect_punct(",");
                double lo = number();
                expect_punct(",");
                double hi = number();
                expect_punct(")");
                return Expr::clamp(a, lo, hi);
            }
            return Expr::var(name);
        }
        throw ParseError(pos, "expected an expression, found '" + shown(peek()) + "'");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline SourceProgram parse(const std::string& text) {
    detail::Parser p(tokenize(text));
    return SourceProgram{text, p.program()};
}

// ---------------------------------------------------------------------------
// Canonical formatter
// ---------------------------------------------------------------------------

namespace detail {

inline std::string print_scalar(const ExprPtr& e);

inline std::string print_bin(const char* op, const ExprPtr& a, const ExprPtr& b) {
    return "(" + print_scalar(a) + " " + op + " " + print_scalar(b) + ")";
}

inline std::string print_scalar(const ExprPtr& e) {
    using K = Expr::Kind;
    switch (e->kind) {
        case K::Var: return e->name;
        case K::Const: {
            const Value& v = *e->literal;
            if (v.is_real()) return riesz::detail::fmt_real(v.as_real());
            if (v.is_int()) return std::to_string(v.as_int());
            if (v.is_bool()) return v.as_bool() ? "true" : "false";
            return v.as_symbol();
        }
        case K::Fst: return "fst(" + print_scalar(e->kids[0]) + ")";
        case K::Snd: return "snd(" + print_scalar(e->kids[0]) + ")";
        case K::MkPair:
            throw DomainMismatch("pair construction has no surface syntax");
        case K::Add: return print_bin("+", e->kids[0], e->kids[1]);
        case K::Sub: return print_bin("-", e->kids[0], e->kids[1]);
        case K::Mul: return print_bin("*", e->kids[0], e->kids[1]);
        case K::Min:
            return "min(" + print_scalar(e->kids[0]) + ", " + print_scalar(e->kids[1]) + ")";
        case K::Max:
            return "max(" + print_scalar(e->kids[0]) + ", " + print_scalar(e->kids[1]) + ")";
        case K::Exp: return "exp(" + print_scalar(e->kids[0]) + ")";
        case K::Sin: return "sin(" + print_scalar(e->kids[0]) + ")";
        case K::Cos: return "cos(" + print_scalar(e->kids[0]) + ")";
        case K::Abs: return "abs(" + print_scalar(e->kids[0]) + ")";
        case K::Clamp:
            return "clamp(" + print_scalar(e->kids[0]) + ", " +
                   riesz::detail::fmt_real(e->clamp_lo) + ", " +
                   riesz::detail::fmt_real(e->clamp_hi) + ")";
        case K::If:
            return "(if " + print_scalar(e->kids[0]) + " then " +
                   print_scalar(e->kids[1]) + " else " + print_scalar(e->kids[2]) + ")";
        case K::Eq: return print_bin("==", e->kids[0], e->kids[1]);
        case K::Le: return print_bin("<=", e->kids[0], e->kids[1]);
        case K::Lt: return print_bin("<", e->kids[0], e->kids[1]);
    }
    throw Error("unreachable");
}

inline std::string print_fnlit(const FnLit& fn) {
    return "fn(" + fn.param + ") = " + print_scalar(fn.body);
}

inline std::string print_mexpr(const MAstPtr& m) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, MAst::Dirac>) {
                return "dirac(" + print_scalar(n.point) + ")";
            } else if constexpr (std::is_same_v<T, MAst::Uniform>) {
                return "uniform(" + riesz::detail::fmt_real(n.a) + ", " +
                       riesz::detail::fmt_real(n.b) + ")";
            } else if constexpr (std::is_same_v<T, MAst::Bernoulli>) {
                return "bernoulli(" + riesz::detail::fmt_real(n.p) + ")";
            } else if constexpr (std::is_same_v<T, MAst::Categorical>) {
                std::string s = "categorical(";
                for (std::size_t i = 0; i < n.atoms.size(); ++i) {
                    if (i) s += ", ";
                    const Value& v = n.atoms[i].first;
                    std::string atom;
                    if (v.is_real()) atom = riesz::detail::fmt_real(v.as_real());
                    else if (v.is_int()) atom = std::to_string(v.as_int());
                    else if (v.is_bool()) atom = v.as_bool() ? "true" : "false";
                    else atom = v.as_symbol();
                    s += "(" + atom + ", " + riesz::detail::fmt_real(n.atoms[i].second) + ")";
                }
                return s + ")";
            } else if constexpr (std::is_same_v<T, MAst::Bind>) {
                return "bind " + n.name + " ~ " + print_mexpr(n.base) + " in " +
                       print_mexpr(n.body);
            } else if constexpr (std::is_same_v<T, MAst::MapM>) {
                return "map(" + print_fnlit(n.fn) + ", " + print_mexpr(n.base) + ")";
            } else if constexpr (std::is_same_v<T, MAst::Prod>) {
                return "prod(" + print_mexpr(n.left) + ", " + print_mexpr(n.right) + ")";
            } else {
                static_assert(std::is_same_v<T, MAst::Var>);
                return n.name;
            }
        },
        m->node);
}

}  // namespace detail

inline std::string print(const SourceProgram& prog) {
    std::string out;
    for (const auto& st : prog.statements) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Statement::Let>) {
                    out += "let " + n.name + " = " + detail::print_mexpr(n.value) + ";\n";
                } else if constexpr (std::is_same_v<T, Statement::Expect>) {
                    out += "expect " + detail::print_fnlit(n.fn) + " of " +
                           detail::print_mexpr(n.measure) + ";\n";
                } else {
                    out += "check " + n.law + "(";
                    for (std::size_t i = 0; i < n.args.size(); ++i) {
                        if (i) out += ", ";
                        out += riesz::detail::fmt_real(n.args[i]);
                    }
                    out += ");\n";
                }
            },
            st.node);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Space inference and compilation onto MeasureExpr
// ---------------------------------------------------------------------------

namespace detail {

struct Scope {
    std::map<std::string, SpaceDescriptor> value_vars;    // bind-bound points
    std::map<std::string, SpaceDescriptor> measure_vars;  // let-bound measures
};

// Bare identifiers that are not in scope denote symbol literals; categorical
// atoms are the only way symbols enter a program, so the rewrite is safe.
inline ExprPtr resolve_symbols(const ExprPtr& e, const Scope& sc,
                               const std::string& extra = "") {
    std::vector<std::string> free;
    collect_free_vars(e, free);
    ExprPtr out = e;
    for (const auto& name : free) {
        if (name == extra || sc.value_vars.count(name)) continue;
        out = subst_expr(out, name, Expr::constant(Value::symbol(name)));
    }
    return out;
}

inline bool is_integral_expr(const ExprPtr& e, const Scope& sc) {
    using K = Expr::Kind;
    switch (e->kind) {
        case K::Var: {
            auto it = sc.value_vars.find(e->name);
            if (it == sc.value_vars.end()) return false;
            const SpaceDescriptor& s = it->second;
            if (s.is_int_range()) return true;
            if (s.is_finite_set()) {
                for (const auto& v : s.finite().elements)
                    if (!v.is_int()) return false;
                return true;
            }
            return false;
        }
        case K::Const:
            return e->literal->is_int();
        case K::Add:
        case K::Sub:
        case K::Mul:
        case K::Min:
        case K::Max:
            return is_integral_expr(e->kids[0], sc) && is_integral_expr(e->kids[1], sc);
        case K::If:
            return is_integral_expr(e->kids[1], sc) && is_integral_expr(e->kids[2], sc);
        default:
            return false;
    }
}

inline AbsEnv abs_env(const Scope& sc) {
    AbsEnv env;
    for (const auto& [name, space] : sc.value_vars)
        env.emplace(name, space_abstract(space));
    return env;
}

// Turn the certified range of a point expression into a space descriptor.
inline SpaceDescriptor abs_to_space(const AbsVal& a, bool integral, SrcPos pos) {
    if (const auto* r = std::get_if<NumRange>(&a.rep)) {
        if (!r->bounded())
            throw SpaceError(pos, "cannot infer a bounded space for this point");
        if (integral)
            return SpaceDescriptor::int_range(
                static_cast<std::int64_t>(std::floor(r->lo)),
                static_cast<std::int64_t>(std::ceil(r->hi)));
        if (r->lo < r->hi) return SpaceDescriptor::real_interval(r->lo, r->hi);
        // Degenerate range: pad to a proper interval around the point.
        return SpaceDescriptor::real_interval(r->lo - 0.5, r->hi + 0.5);
    }
    if (std::holds_alternative<AbsVal::BoolSet>(a.rep))
        return SpaceDescriptor::booleans();
    if (const auto* s = std::get_if<AbsVal::AtomSet>(&a.rep))
        return SpaceDescriptor::finite_set(s->atoms);
    const auto& p = std::get<AbsVal::PairAbs>(a.rep);
    // Pair points cannot be built by surface syntax, but keep this total.
    return SpaceDescriptor::product(abs_to_space(*p.first, false, pos),
                                    abs_to_space(*p.second, false, pos));
}

// Reject observables that are discontinuous at a comparison boundary.
// Discrete conditions (bools, symbols, integer carriers) are always fine;
// a comparison on a real-valued operand is accepted only when both branches
// agree at the boundary within tolerance and the compared operand is the
// parameter itself (or a projection of it).
inline void check_observable_continuity(const ExprPtr& e, const std::string& param,
                                        const SpaceDescriptor& domain, SrcPos pos,
                                        double tol) {
    using K = Expr::Kind;
    if (e->kind == K::If) {
        const ExprPtr& c = e->kids[0];
        if (c->kind == K::Le || c->kind == K::Lt) {
            AbsEnv env;
            env.emplace(param, space_abstract(domain));
            AbsVal lhs = analyze_expr(c->kids[0], env);
            bool continuous_operand = std::holds_alternative<NumRange>(lhs.rep) &&
                                      std::get<NumRange>(lhs.rep).lip > 0;
            if (continuous_operand) {
                const ExprPtr& operand = c->kids[0];
                const ExprPtr& threshold = c->kids[1];
                bool simple = operand->kind == K::Var &&
                              threshold->kind == K::Const &&
                              threshold->literal->is_numeric() &&
                              (domain.is_real_interval() || domain.is_real_line());
                if (!simple)
                    throw SpaceError(pos,
                                     "conditional on a continuous value must compare "
                                     "the parameter against a literal");
                double boundary = threshold->literal->numeric();
                EvalEnv root;
                Value b = Value::real(boundary);
                EvalEnv env2 = root.extend(param, b);
                double then_v = eval_expr(e->kids[1], env2).numeric();
                double else_v = eval_expr(e->kids[2], env2).numeric();
                if (std::fabs(then_v - else_v) > tol)
                    throw SpaceError(pos,
                                     "discontinuous observable: branches differ at the "
                                     "comparison boundary");
            }
        }
    }
    for (const auto& k : e->kids)
        check_observable_continuity(k, param, domain, pos, tol);
}

struct Compiled {
    MExprPtr expr;
    SpaceDescriptor space;
};

inline Compiled compile_mexpr(const MAstPtr& m, Scope& sc) {
    using ME = MeasureExpr;
    return std::visit(
        [&](const auto& n) -> Compiled {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, MAst::Dirac>) {
                ExprPtr point = resolve_symbols(n.point, sc);
                AbsVal a = [&] {
                    try {
                        return analyze_expr(point, abs_env(sc));
                    } catch (const DomainMismatch& err) {
                        throw SpaceError(m->pos, err.what());
                    }
                }();
                SpaceDescriptor s = abs_to_space(a, is_integral_expr(point, sc), m->pos);
                return {ME::make(ME::MDirac{point, s}), s};
            } else if constexpr (std::is_same_v<T, MAst::Uniform>) {
                if (!(n.a < n.b))
                    throw SpaceError(m->pos, "uniform requires a < b");
                return {ME::make(ME::MUniform{n.a, n.b}),
                        SpaceDescriptor::real_interval(n.a, n.b)};
            } else if constexpr (std::is_same_v<T, MAst::Bernoulli>) {
                if (n.p < 0 || n.p > 1)
                    throw SpaceError(m->pos, "bernoulli weight must lie in [0,1]");
                return {ME::make(ME::MBernoulli{n.p}), SpaceDescriptor::booleans()};
            } else if constexpr (std::is_same_v<T, MAst::Categorical>) {
                std::vector<Value> atoms;
                for (const auto& [v, w] : n.atoms) {
                    if (w < 0)
                        throw SpaceError(m->pos, "categorical weights must be nonnegative");
                    atoms.push_back(v);
                }
                SpaceDescriptor s = [&] {
                    try {
                        return SpaceDescriptor::finite_set(std::move(atoms));
                    } catch (const DomainMismatch& err) {
                        throw SpaceError(m->pos, err.what());
                    }
                }();
                return {ME::make(ME::MCategorical{n.atoms, s}), s};
            } else if constexpr (std::is_same_v<T, MAst::Bind>) {
                Compiled base = compile_mexpr(n.base, sc);
                if (sc.value_vars.count(n.name) || sc.measure_vars.count(n.name))
                    throw SpaceError(m->pos, "'" + n.name + "' shadows an existing binding");
                sc.value_vars.emplace(n.name, base.space);
                Compiled body = compile_mexpr(n.body, sc);
                sc.value_vars.erase(n.name);
                return {ME::make(ME::MBind{n.name, base.expr, body.expr, base.space,
                                           body.space}),
                        body.space};
            } else if constexpr (std::is_same_v<T, MAst::MapM>) {
                Compiled base = compile_mexpr(n.base, sc);
                Scope inner = sc;
                inner.value_vars.insert_or_assign(n.fn.param, base.space);
                ExprPtr body = resolve_symbols(n.fn.body, inner);
                AbsEnv env = abs_env(inner);
                AbsVal a = [&] {
                    try {
                        return analyze_expr(body, env);
                    } catch (const DomainMismatch& err) {
                        throw SpaceError(n.fn.pos, err.what());
                    }
                }();
                Scope param_only;
                param_only.value_vars.emplace(n.fn.param, base.space);
                SpaceDescriptor codomain =
                    abs_to_space(a, is_integral_expr(body, param_only), n.fn.pos);
                ContinuousMap map(n.fn.param, body, base.space, codomain);
                return {ME::make(ME::MMap{std::move(map), base.expr}), codomain};
            } else if constexpr (std::is_same_v<T, MAst::Prod>) {
                Compiled l = compile_mexpr(n.left, sc);
                Compiled r = compile_mexpr(n.right, sc);
                SpaceDescriptor s = SpaceDescriptor::product(l.space, r.space);
                return {ME::make(ME::MProd{l.expr, r.expr}), s};
            } else {
                static_assert(std::is_same_v<T, MAst::Var>);
                auto it = sc.measure_vars.find(n.name);
                if (it == sc.measure_vars.end())
                    throw SpaceError(m->pos, "unbound measure variable '" + n.name + "'");
                return {ME::make(ME::MVar{n.name}), it->second};
            }
        },
        m->node);
}

}  // namespace detail

// Per-expression space assignments for a whole program; throws SpaceError on
// ill-spaced programs. Returned in statement order for Let/Expect statements.
struct SpaceJudgment {
    std::vector<std::pair<std::string, SpaceDescriptor>> lets;
    std::vector<SpaceDescriptor> expects;  // space of each expect's measure
};

inline SpaceJudgment infer_spaces(const SourceProgram& prog) {
    SpaceJudgment out;
    detail::Scope sc;
    for (const auto& st : prog.statements) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Statement::Let>) {
                    detail::Compiled c = detail::compile_mexpr(n.value, sc);
                    sc.measure_vars.insert_or_assign(n.name, c.space);
                    out.lets.emplace_back(n.name, c.space);
                } else if constexpr (std::is_same_v<T, Statement::Expect>) {
                    detail::Compiled c = detail::compile_mexpr(n.measure, sc);
                    ExprPtr body = detail::resolve_symbols(n.fn.body, sc, n.fn.param);
                    detail::check_observable_continuity(body, n.fn.param, c.space,
                                                        n.fn.pos, 1e-9);
                    try {
                        TestFunction probe(n.fn.param, body, c.space);
                    } catch (const UnboundedFunction& err) {
                        throw SpaceError(n.fn.pos, err.what());
                    } catch (const DomainMismatch& err) {
                        throw SpaceError(n.fn.pos, err.what());
                    }
                    out.expects.push_back(c.space);
                }
                // Check statements introduce no spaces.
            },
            st.node);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct EvalConfig {
    IntegrationConfig integration = IntegrationConfig::quadrature();
    std::uint64_t seed = 0;
    int threads = 1;
};

struct ExpectResult {
    std::size_t statement_index;
    double value;
    std::string observable;
    std::string backend;
    SrcPos pos;
};

struct EvalOutput {
    std::vector<std::pair<std::string, Measure>> lets;
    std::vector<ExpectResult> expects;
    std::vector<LawReport> checks;
};

inline EvalOutput evaluate(const SourceProgram& prog, const EvalConfig& cfg) {
    EvalOutput out;
    detail::Scope sc;
    Env env;
    for (std::size_t idx = 0; idx < prog.statements.size(); ++idx) {
        const Statement& st = prog.statements[idx];
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Statement::Let>) {
                    detail::Compiled c = detail::compile_mexpr(n.value, sc);
                    Measure m = eval_measure_expr(c.expr, env);
                    env = env.with_measure(n.name, m);
                    sc.measure_vars.insert_or_assign(n.name, c.space);
                    out.lets.emplace_back(n.name, std::move(m));
                } else if constexpr (std::is_same_v<T, Statement::Expect>) {
                    detail::Compiled c = detail::compile_mexpr(n.measure, sc);
                    ExprPtr body = detail::resolve_symbols(n.fn.body, sc, n.fn.param);
                    detail::check_observable_continuity(body, n.fn.param, c.space,
                                                        n.fn.pos, 1e-9);
                    TestFunction f = [&] {
                        try {
                            return TestFunction(n.fn.param, body, c.space);
                        } catch (const UnboundedFunction& err) {
                            throw SpaceError(n.fn.pos, err.what());
                        }
                    }();
                    Measure m = eval_measure_expr(c.expr, env);
                    IntegrationConfig icfg = cfg.integration;
                    // Fall back to quadrature when an exact request meets a
                    // density-bearing tree.
                    double v;
                    std::string backend;
                    try {
                        v = integrate(m, f, icfg);
                        backend = icfg.backend == IntegrationConfig::Backend::Exact
                                      ? "exact"
                                      : icfg.backend == IntegrationConfig::Backend::Quadrature
                                            ? "quad:" + std::to_string(icfg.order)
                                            : "mc:" + std::to_string(icfg.samples);
                    } catch (const BackendUnsupported&) {
                        IntegrationConfig q = IntegrationConfig::quadrature();
                        v = integrate(m, f, q);
                        backend = "quad:" + std::to_string(q.order);
                    }
                    out.expects.push_back(ExpectResult{
                        idx, v, detail::print_fnlit(n.fn), backend, st.pos});
                } else {
                    static_assert(std::is_same_v<T, Statement::Check>);
                    std::size_t trials =
                        n.args.empty() ? 50 : static_cast<std::size_t>(n.args[0]);
                    MeasureGenerator gen(MeasureGenerator::Mode::Finite, cfg.seed);
                    IntegrationConfig exact = IntegrationConfig::exact();
                    if (n.law == "monad") {
                        out.checks.push_back(
                            check_monad_laws(gen, trials, exact, cfg.threads));
                    } else if (n.law == "fubini") {
                        out.checks.push_back(
                            check_fubini_sweep(gen, trials, exact, cfg.threads));
                    } else if (n.law == "hexagon") {
                        out.checks.push_back(
                            check_hexagon_sweep(gen, trials, exact, cfg.threads));
                    } else if (n.law == "naturality") {
                        SpaceDescriptor s = SpaceDescriptor::symbols(
                            {"a", "b", "c", "d", "e"});
                        // Collapse everything beyond the first two atoms onto 'a'.
                        ExprPtr x = Expr::var("x");
                        ExprPtr body = Expr::cond(
                            Expr::binary(Expr::Kind::Eq, x,
                                         Expr::constant(Value::symbol("b"))),
                            Expr::constant(Value::symbol("b")),
                            Expr::constant(Value::symbol("a")));
                        ContinuousMap g("x", body, s, s);
                        MeasureGenerator fixed(MeasureGenerator::Mode::Finite, cfg.seed,
                                               5);
                        out.checks.push_back(
                            check_naturality(g, fixed, trials, exact, cfg.threads));
                    } else {
                        throw SpaceError(st.pos, "unknown law '" + n.law + "'");
                    }
                }
            },
            st.node);
    }
    return out;
}

}  // namespace riesz::dsl
