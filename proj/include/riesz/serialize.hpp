#pragma once

#include <json.hpp>

#include "riesz/convergence.hpp"
#include "riesz/laws.hpp"

namespace riesz {

// ---------------------------------------------------------------------------
// Canonical JSON encodings. Object keys come out in lexicographic order
// (nlohmann's default map) and numbers use shortest round-trip formatting, so
// dump() is byte-deterministic for a given structure. Measure trees,
// observables and kernels round-trip; reports are emit-only.
// ---------------------------------------------------------------------------

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// -- Value ------------------------------------------------------------------

inline Json value_to_json(const Value& v) {
    if (v.is_real()) return Json{{"t", "real"}, {"v", v.as_real()}};
    if (v.is_int()) return Json{{"t", "int"}, {"v", v.as_int()}};
    if (v.is_bool()) return Json{{"t", "bool"}, {"v", v.as_bool()}};
    if (v.is_symbol()) return Json{{"t", "sym"}, {"v", v.as_symbol()}};
    return Json{{"t", "pair"},
                {"v", Json::array({value_to_json(v.first()), value_to_json(v.second())})}};
}

inline Value value_from_json(const Json& j) {
    const std::string& t = j.at("t").get_ref<const std::string&>();
    if (t == "real") return Value::real(j.at("v").get<double>());
    if (t == "int") return Value::integer(j.at("v").get<std::int64_t>());
    if (t == "bool") return Value::boolean(j.at("v").get<bool>());
    if (t == "sym") return Value::symbol(j.at("v").get<std::string>());
    if (t == "pair")
        return Value::pair(value_from_json(j.at("v").at(0)),
                           value_from_json(j.at("v").at(1)));
    throw DomainMismatch("unknown value tag '" + t + "'");
}

// -- SpaceDescriptor --------------------------------------------------------

inline Json space_to_json(const SpaceDescriptor& s) {
    if (s.is_finite_set()) {
        Json elems = Json::array();
        for (const auto& v : s.finite().elements) elems.push_back(value_to_json(v));
        return Json{{"kind", "finite"}, {"elements", std::move(elems)}};
    }
    if (s.is_int_range())
        return Json{{"kind", "ints"}, {"lo", s.ints().lo}, {"hi", s.ints().hi}};
    if (s.is_real_interval())
        return Json{{"kind", "interval"}, {"a", s.interval().a}, {"b", s.interval().b}};
    if (s.is_real_line()) return Json{{"kind", "line"}};
    return Json{{"kind", "product"},
                {"left", space_to_json(s.left())},
                {"right", space_to_json(s.right())}};
}

inline SpaceDescriptor space_from_json(const Json& j) {
    const std::string& k = j.at("kind").get_ref<const std::string&>();
    if (k == "finite") {
        std::vector<Value> elems;
        for (const auto& e : j.at("elements")) elems.push_back(value_from_json(e));
        return SpaceDescriptor::finite_set(std::move(elems));
    }
    if (k == "ints")
        return SpaceDescriptor::int_range(j.at("lo").get<std::int64_t>(),
                                          j.at("hi").get<std::int64_t>());
    if (k == "interval")
        return SpaceDescriptor::real_interval(j.at("a").get<double>(),
                                              j.at("b").get<double>());
    if (k == "line") return SpaceDescriptor::real_line();
    if (k == "product")
        return SpaceDescriptor::product(space_from_json(j.at("left")),
                                        space_from_json(j.at("right")));
    throw DomainMismatch("unknown space kind '" + k + "'");
}

// -- Observables and maps (expression bodies travel as s-expressions) -------

inline Json testfn_to_json(const TestFunction& f) {
    return Json{{"body", print_sexpr(f.body())},
                {"domain", space_to_json(f.domain())},
                {"param", f.param()}};
}

inline TestFunction testfn_from_json(const Json& j) {
    return TestFunction(j.at("param").get<std::string>(),
                        parse_sexpr(j.at("body").get<std::string>()),
                        space_from_json(j.at("domain")));
}

inline Json map_to_json(const ContinuousMap& g) {
    return Json{{"body", print_sexpr(g.body())},
                {"codomain", space_to_json(g.codomain())},
                {"domain", space_to_json(g.domain())},
                {"param", g.param()}};
}

inline ContinuousMap map_from_json(const Json& j) {
    return ContinuousMap(j.at("param").get<std::string>(),
                         parse_sexpr(j.at("body").get<std::string>()),
                         space_from_json(j.at("domain")),
                         space_from_json(j.at("codomain")));
}

// -- Measures, kernels, measure expressions (mutually recursive) ------------

inline Json measure_to_json(const Measure& mu);
inline Json mexpr_to_json(const MExprPtr& e);
inline Measure measure_from_json(const Json& j);
inline MExprPtr mexpr_from_json(const Json& j);

inline Json env_to_json(const Env& env) {
    Json values = Json::object();
    for (const auto& [name, v] : env.values()) values[name] = value_to_json(v);
    Json measures = Json::object();
    for (const auto& [name, m] : env.measures()) measures[name] = measure_to_json(m);
    return Json{{"measures", std::move(measures)}, {"values", std::move(values)}};
}

inline Env env_from_json(const Json& j) {
    Env env;
    for (const auto& [name, v] : j.at("values").items())
        env = env.with_value(name, value_from_json(v));
    for (const auto& [name, m] : j.at("measures").items())
        env = env.with_measure(name, measure_from_json(m));
    return env;
}

inline Json kernel_to_json(const Kernel& k) {
    return Json{{"body", mexpr_to_json(k.body())},
                {"captured", env_to_json(k.captured())},
                {"codomain", space_to_json(k.codomain())},
                {"domain", space_to_json(k.domain())},
                {"param", k.param()}};
}

inline Kernel kernel_from_json(const Json& j) {
    return Kernel(space_from_json(j.at("domain")), space_from_json(j.at("codomain")),
                  j.at("param").get<std::string>(), mexpr_from_json(j.at("body")),
                  env_from_json(j.at("captured")));
}

inline Json measure_to_json(const Measure& mu) {
    using M = Measure;
    Json j = std::visit(
        [&](const auto& n) -> Json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, M::Dirac>) {
                return Json{{"kind", "dirac"},
                            {"point", value_to_json(n.point)},
                            {"space", space_to_json(mu.space())}};
            } else if constexpr (std::is_same_v<T, M::FiniteWeighted>) {
                Json atoms = Json::array();
                for (const auto& [v, w] : n.atoms)
                    atoms.push_back(Json{{"at", value_to_json(v)}, {"w", w}});
                return Json{{"atoms", std::move(atoms)},
                            {"kind", "finite"},
                            {"space", space_to_json(mu.space())}};
            } else if constexpr (std::is_same_v<T, M::Density>) {
                return Json{{"a", n.a},
                            {"b", n.b},
                            {"density", testfn_to_json(n.density)},
                            {"kind", "density"},
                            {"normalization", n.normalization}};
            } else if constexpr (std::is_same_v<T, M::PushforwardNode>) {
                return Json{{"base", measure_to_json(*n.base)},
                            {"kind", "pushforward"},
                            {"map", map_to_json(n.map)}};
            } else if constexpr (std::is_same_v<T, M::ProductNode>) {
                return Json{{"kind", "product"},
                            {"left", measure_to_json(*n.left)},
                            {"right", measure_to_json(*n.right)}};
            } else if constexpr (std::is_same_v<T, M::JoinNode>) {
                Json comps = Json::array();
                for (const auto& [m, w] : n.outer->components())
                    comps.push_back(Json{{"m", measure_to_json(m)}, {"w", w}});
                return Json{{"components", std::move(comps)}, {"kind", "join"}};
            } else if constexpr (std::is_same_v<T, M::BindNode>) {
                return Json{{"base", measure_to_json(*n.base)},
                            {"kernel", kernel_to_json(*n.kernel)},
                            {"kind", "bind"}};
            } else if constexpr (std::is_same_v<T, M::ScaleNode>) {
                return Json{{"base", measure_to_json(*n.base)},
                            {"c", n.c},
                            {"kind", "scale"}};
            } else {
                static_assert(std::is_same_v<T, M::SumNode>);
                return Json{{"kind", "sum"},
                            {"left", measure_to_json(*n.left)},
                            {"right", measure_to_json(*n.right)}};
            }
        },
        mu.node());
    return j;
}

inline Measure measure_from_json(const Json& j) {
    const std::string& k = j.at("kind").get_ref<const std::string&>();
    if (k == "dirac")
        return Measure::dirac(space_from_json(j.at("space")),
                              value_from_json(j.at("point")));
    if (k == "finite") {
        std::vector<std::pair<Value, double>> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.emplace_back(value_from_json(a.at("at")), a.at("w").get<double>());
        return Measure::finite_weighted(space_from_json(j.at("space")), std::move(atoms));
    }
    if (k == "density")
        return Measure::density(j.at("a").get<double>(), j.at("b").get<double>(),
                                testfn_from_json(j.at("density")),
                                j.at("normalization").get<double>());
    if (k == "pushforward")
        return Measure::pushforward(map_from_json(j.at("map")),
                                    measure_from_json(j.at("base")));
    if (k == "product")
        return Measure::product(measure_from_json(j.at("left")),
                                measure_from_json(j.at("right")));
    if (k == "join") {
        std::vector<std::pair<Measure, double>> comps;
        for (const auto& c : j.at("components"))
            comps.emplace_back(measure_from_json(c.at("m")), c.at("w").get<double>());
        return Measure::join(MeasureOverMeasures(std::move(comps)));
    }
    if (k == "bind")
        return Measure::bind(measure_from_json(j.at("base")),
                             kernel_from_json(j.at("kernel")));
    if (k == "scale")
        return Measure::scale(j.at("c").get<double>(), measure_from_json(j.at("base")));
    if (k == "sum")
        return Measure::sum(measure_from_json(j.at("left")),
                            measure_from_json(j.at("right")));
    throw DomainMismatch("unknown measure kind '" + k + "'");
}

inline Json mexpr_to_json(const MExprPtr& e) {
    using ME = MeasureExpr;
    return std::visit(
        [&](const auto& n) -> Json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ME::MDirac>) {
                return Json{{"kind", "mdirac"},
                            {"point", print_sexpr(n.point)},
                            {"space", space_to_json(n.space)}};
            } else if constexpr (std::is_same_v<T, ME::MUniform>) {
                return Json{{"a", n.a}, {"b", n.b}, {"kind", "muniform"}};
            } else if constexpr (std::is_same_v<T, ME::MBernoulli>) {
                return Json{{"kind", "mbernoulli"}, {"p", n.p}};
            } else if constexpr (std::is_same_v<T, ME::MCategorical>) {
                Json atoms = Json::array();
                for (const auto& [v, w] : n.atoms)
                    atoms.push_back(Json{{"at", value_to_json(v)}, {"w", w}});
                return Json{{"atoms", std::move(atoms)},
                            {"kind", "mcategorical"},
                            {"space", space_to_json(n.space)}};
            } else if constexpr (std::is_same_v<T, ME::MBind>) {
                return Json{{"base", mexpr_to_json(n.base)},
                            {"base_space", space_to_json(n.base_space)},
                            {"body", mexpr_to_json(n.body)},
                            {"codomain", space_to_json(n.codomain)},
                            {"kind", "mbind"},
                            {"param", n.param}};
            } else if constexpr (std::is_same_v<T, ME::MMap>) {
                return Json{{"base", mexpr_to_json(n.base)},
                            {"kind", "mmap"},
                            {"map", map_to_json(n.map)}};
            } else if constexpr (std::is_same_v<T, ME::MProd>) {
                return Json{{"kind", "mprod"},
                            {"left", mexpr_to_json(n.left)},
                            {"right", mexpr_to_json(n.right)}};
            } else if constexpr (std::is_same_v<T, ME::MVar>) {
                return Json{{"kind", "mvar"}, {"name", n.name}};
            } else if constexpr (std::is_same_v<T, ME::MIf>) {
                return Json{{"cond", print_sexpr(n.cond)},
                            {"else", mexpr_to_json(n.else_branch)},
                            {"kind", "mif"},
                            {"then", mexpr_to_json(n.then_branch)}};
            } else {
                static_assert(std::is_same_v<T, ME::MLit>);
                return Json{{"kind", "mlit"}, {"measure", measure_to_json(*n.measure)}};
            }
        },
        e->node);
}

inline MExprPtr mexpr_from_json(const Json& j) {
    using ME = MeasureExpr;
    const std::string& k = j.at("kind").get_ref<const std::string&>();
    if (k == "mdirac")
        return ME::make(ME::MDirac{parse_sexpr(j.at("point").get<std::string>()),
                                   space_from_json(j.at("space"))});
    if (k == "muniform")
        return ME::make(ME::MUniform{j.at("a").get<double>(), j.at("b").get<double>()});
    if (k == "mbernoulli") return ME::make(ME::MBernoulli{j.at("p").get<double>()});
    if (k == "mcategorical") {
        std::vector<std::pair<Value, double>> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.emplace_back(value_from_json(a.at("at")), a.at("w").get<double>());
        return ME::make(ME::MCategorical{std::move(atoms), space_from_json(j.at("space"))});
    }
    if (k == "mbind")
        return ME::make(ME::MBind{j.at("param").get<std::string>(),
                                  mexpr_from_json(j.at("base")),
                                  mexpr_from_json(j.at("body")),
                                  space_from_json(j.at("base_space")),
                                  space_from_json(j.at("codomain"))});
    if (k == "mmap")
        return ME::make(ME::MMap{map_from_json(j.at("map")),
                                 mexpr_from_json(j.at("base"))});
    if (k == "mprod")
        return ME::make(ME::MProd{mexpr_from_json(j.at("left")),
                                  mexpr_from_json(j.at("right"))});
    if (k == "mvar") return ME::make(ME::MVar{j.at("name").get<std::string>()});
    if (k == "mif")
        return ME::make(ME::MIf{parse_sexpr(j.at("cond").get<std::string>()),
                                mexpr_from_json(j.at("then")),
                                mexpr_from_json(j.at("else"))});
    if (k == "mlit")
        return ME::make(ME::MLit{
            std::make_shared<const Measure>(measure_from_json(j.at("measure")))});
    throw DomainMismatch("unknown measure expression kind '" + k + "'");
}

// -- Reports (emit only) ----------------------------------------------------

inline Json report_to_json(const LawReport& r) {
    return Json{{"instances_checked", r.instances_checked},
                {"law", r.law_name},
                {"max_residual", r.max_residual},
                {"pass", r.pass},
                {"schema_version", kSchemaVersion},
                {"tolerance", r.tolerance},
                {"witness", r.witness}};
}

inline Json report_to_json(const ConvergenceReport& r) {
    const char* mode = r.mode == ConvergenceReport::Mode::CompactUniform
                           ? "compact_uniform"
                           : r.mode == ConvergenceReport::Mode::Weak ? "weak"
                                                                    : "strengthened_cmt";
    Json indices = Json::array();
    for (std::size_t n : r.indices) indices.push_back(n);
    Json residuals = Json::array();
    for (double x : r.sup_residuals) residuals.push_back(x);
    return Json{{"battery_lipschitz", r.battery_lipschitz},
                {"bound_certified", r.bound_certified},
                {"detail", r.detail},
                {"indices", std::move(indices)},
                {"mode", mode},
                {"monotone_window", r.decreasing},
                {"pass", r.pass},
                {"schema_version", kSchemaVersion},
                {"sup_residuals", std::move(residuals)},
                {"tolerance", r.tolerance}};
}

}  // namespace riesz
