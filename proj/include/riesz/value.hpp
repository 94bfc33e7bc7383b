#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace riesz {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainMismatch : Error { using Error::Error; };
struct SpaceMismatch : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct BackendUnsupported : Error { using Error::Error; };
struct NotProbability : Error { using Error::Error; };
struct RejectionStall : Error { using Error::Error; };
struct NotProduct : Error { using Error::Error; };
struct NotDeterministicMarginal : Error { using Error::Error; };
struct UnboundedFunction : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Value: a point of a sample space.
// ---------------------------------------------------------------------------

class Value;
using ValuePtr = std::shared_ptr<const Value>;

class Value {
public:
    struct Pair {
        ValuePtr first;
        ValuePtr second;
    };

    using Rep = std::variant<double, std::int64_t, bool, std::string, Pair>;

    static Value real(double x) { return Value(Rep(x)); }
    static Value integer(std::int64_t n) { return Value(Rep(n)); }
    static Value boolean(bool b) { return Value(Rep(b)); }
    static Value symbol(std::string name) { return Value(Rep(std::move(name))); }
    static Value pair(Value a, Value b) {
        return Value(Rep(Pair{std::make_shared<const Value>(std::move(a)),
                              std::make_shared<const Value>(std::move(b))}));
    }

    bool is_real() const { return std::holds_alternative<double>(rep_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(rep_); }
    bool is_bool() const { return std::holds_alternative<bool>(rep_); }
    bool is_symbol() const { return std::holds_alternative<std::string>(rep_); }
    bool is_pair() const { return std::holds_alternative<Pair>(rep_); }

    double as_real() const { return std::get<double>(rep_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(rep_); }
    bool as_bool() const { return std::get<bool>(rep_); }
    const std::string& as_symbol() const { return std::get<std::string>(rep_); }
    const Value& first() const { return *std::get<Pair>(rep_).first; }
    const Value& second() const { return *std::get<Pair>(rep_).second; }

    // Numeric view: reals and integers both act as scalars in expressions.
    bool is_numeric() const { return is_real() || is_int(); }
    double numeric() const {
        if (is_real()) return as_real();
        if (is_int()) return static_cast<double>(as_int());
        throw DomainMismatch("value is not numeric");
    }

    bool operator==(const Value& other) const {
        if (rep_.index() != other.rep_.index()) {
            // An Int and a Real with the same numeric value are distinct points;
            // spaces never mix the two kinds.
            return false;
        }
        if (is_pair())
            return first() == other.first() && second() == other.second();
        if (is_real()) return as_real() == other.as_real();
        if (is_int()) return as_int() == other.as_int();
        if (is_bool()) return as_bool() == other.as_bool();
        return as_symbol() == other.as_symbol();
    }
    bool operator!=(const Value& other) const { return !(*this == other); }

    std::string to_string() const {
        if (is_real()) {
            std::string s = std::to_string(as_real());
            return s;
        }
        if (is_int()) return std::to_string(as_int());
        if (is_bool()) return as_bool() ? "true" : "false";
        if (is_symbol()) return as_symbol();
        return "(" + first().to_string() + ", " + second().to_string() + ")";
    }

private:
    explicit Value(Rep rep) : rep_(std::move(rep)) {}
    Rep rep_;
};

// ---------------------------------------------------------------------------
// SpaceDescriptor
// ---------------------------------------------------------------------------

class SpaceDescriptor;
using SpacePtr = std::shared_ptr<const SpaceDescriptor>;

class SpaceDescriptor {
public:
    struct FiniteSet {
        std::vector<Value> elements;  // distinct atoms (symbols, bools or ints)
    };
    struct IntRange {
        std::int64_t lo;
        std::int64_t hi;  // inclusive
    };
    struct RealInterval {
        double a;
        double b;  // closed, a < b
    };
    struct RealLine {};
    struct ProductSpace {
        SpacePtr left;
        SpacePtr right;
    };

    using Rep = std::variant<FiniteSet, IntRange, RealInterval, RealLine, ProductSpace>;

    static SpaceDescriptor finite_set(std::vector<Value> elems) {
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (elems[i].is_pair())
                throw DomainMismatch("FiniteSet elements must be atoms");
            for (std::size_t j = i + 1; j < elems.size(); ++j)
                if (elems[i] == elems[j])
                    throw DomainMismatch("FiniteSet elements must be distinct");
        }
        return SpaceDescriptor(Rep(FiniteSet{std::move(elems)}));
    }
    static SpaceDescriptor symbols(std::vector<std::string> names) {
        std::vector<Value> elems;
        elems.reserve(names.size());
        for (auto& n : names) elems.push_back(Value::symbol(std::move(n)));
        return finite_set(std::move(elems));
    }
    static SpaceDescriptor booleans() {
        return finite_set({Value::boolean(false), Value::boolean(true)});
    }
    static SpaceDescriptor int_range(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw DomainMismatch("IntRange requires lo <= hi");
        return SpaceDescriptor(Rep(IntRange{lo, hi}));
    }
    static SpaceDescriptor real_interval(double a, double b) {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
            throw DomainMismatch("RealInterval requires finite a < b");
        return SpaceDescriptor(Rep(RealInterval{a, b}));
    }
    static SpaceDescriptor real_line() { return SpaceDescriptor(Rep(RealLine{})); }
    static SpaceDescriptor product(SpaceDescriptor left, SpaceDescriptor right) {
        return SpaceDescriptor(Rep(ProductSpace{
            std::make_shared<const SpaceDescriptor>(std::move(left)),
            std::make_shared<const SpaceDescriptor>(std::move(right))}));
    }

    bool is_finite_set() const { return std::holds_alternative<FiniteSet>(rep_); }
    bool is_int_range() const { return std::holds_alternative<IntRange>(rep_); }
    bool is_real_interval() const { return std::holds_alternative<RealInterval>(rep_); }
    bool is_real_line() const { return std::holds_alternative<RealLine>(rep_); }
    bool is_product() const { return std::holds_alternative<ProductSpace>(rep_); }

    const FiniteSet& finite() const { return std::get<FiniteSet>(rep_); }
    const IntRange& ints() const { return std::get<IntRange>(rep_); }
    const RealInterval& interval() const { return std::get<RealInterval>(rep_); }
    const SpaceDescriptor& left() const { return *std::get<ProductSpace>(rep_).left; }
    const SpaceDescriptor& right() const { return *std::get<ProductSpace>(rep_).right; }

    bool contains(const Value& x) const {
        if (is_finite_set()) {
            for (const auto& e : finite().elements)
                if (e == x) return true;
            return false;
        }
        if (is_int_range())
            return x.is_int() && x.as_int() >= ints().lo && x.as_int() <= ints().hi;
        if (is_real_interval())
            return x.is_real() && x.as_real() >= interval().a && x.as_real() <= interval().b;
        if (is_real_line()) return x.is_real() && std::isfinite(x.as_real());
        return x.is_pair() && left().contains(x.first()) && right().contains(x.second());
    }

    // Spaces with an enumerable carrier (FiniteSet, IntRange, finite products).
    bool enumerable() const {
        if (is_finite_set() || is_int_range()) return true;
        if (is_product()) return left().enumerable() && right().enumerable();
        return false;
    }

    std::vector<Value> enumerate() const {
        if (is_finite_set()) return finite().elements;
        if (is_int_range()) {
            std::vector<Value> out;
            for (std::int64_t n = ints().lo; n <= ints().hi; ++n)
                out.push_back(Value::integer(n));
            return out;
        }
        if (is_product()) {
            std::vector<Value> out;
            for (const auto& a : left().enumerate())
                for (const auto& b : right().enumerate())
                    out.push_back(Value::pair(a, b));
            return out;
        }
        throw DomainMismatch("space carrier is not enumerable");
    }

    bool operator==(const SpaceDescriptor& other) const {
        if (rep_.index() != other.rep_.index()) return false;
        if (is_finite_set()) {
            const auto& a = finite().elements;
            const auto& b = other.finite().elements;
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] != b[i]) return false;
            return true;
        }
        if (is_int_range())
            return ints().lo == other.ints().lo && ints().hi == other.ints().hi;
        if (is_real_interval())
            return interval().a == other.interval().a && interval().b == other.interval().b;
        if (is_real_line()) return true;
        return left() == other.left() && right() == other.right();
    }
    bool operator!=(const SpaceDescriptor& other) const { return !(*this == other); }

    std::string to_string() const {
        if (is_finite_set()) {
            std::string s = "{";
            for (std::size_t i = 0; i < finite().elements.size(); ++i) {
                if (i) s += ",";
                s += finite().elements[i].to_string();
            }
            return s + "}";
        }
        if (is_int_range())
            return "int[" + std::to_string(ints().lo) + ".." + std::to_string(ints().hi) + "]";
        if (is_real_interval())
            return "[" + std::to_string(interval().a) + "," + std::to_string(interval().b) + "]";
        if (is_real_line()) return "R";
        return left().to_string() + " x " + right().to_string();
    }

private:
    explicit SpaceDescriptor(Rep rep) : rep_(std::move(rep)) {}
    Rep rep_;
};

// Arithmetic always produces Real values; coerce them back onto integer or
// finite carriers where the target space expects atoms.
inline Value coerce_to_space(const Value& v, const SpaceDescriptor& target) {
    if (target.is_int_range() && v.is_real()) {
        double n = std::nearbyint(v.as_real());
        if (std::fabs(v.as_real() - n) < 1e-9)
            return Value::integer(static_cast<std::int64_t>(n));
        return v;
    }
    if (target.is_finite_set() && v.is_real()) {
        for (const auto& e : target.finite().elements)
            if (e.is_numeric() && e.numeric() == v.as_real()) return e;
        return v;
    }
    if (target.is_product() && v.is_pair())
        return Value::pair(coerce_to_space(v.first(), target.left()),
                           coerce_to_space(v.second(), target.right()));
    return v;
}

inline void require_member(const SpaceDescriptor& space, const Value& x,
                           const char* what) {
    if (!space.contains(x))
        throw DomainMismatch(std::string(what) + ": value " + x.to_string() +
                             " is not a point of " + space.to_string());
}

}  // namespace riesz
