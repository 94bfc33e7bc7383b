// rieszlab: command-line front door for the measure library.
//   rieszlab run <file>       evaluate a program (expectations, law checks)
//   rieszlab fmt <file>       canonical formatting of a program
//   rieszlab laws             randomized law sweeps
//   rieszlab converge         convergence harnesses for built-in families

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "riesz/dsl.hpp"
#include "riesz/serialize.hpp"

namespace {

using namespace riesz;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    out << text;
}

IntegrationConfig parse_backend(const std::string& spec, std::uint64_t seed,
                                double tol) {
    IntegrationConfig cfg;
    if (spec == "exact") {
        cfg = IntegrationConfig::exact(tol > 0 ? tol : 1e-12);
    } else if (spec == "quad") {
        cfg = IntegrationConfig::quadrature(64, tol > 0 ? tol : 1e-6);
    } else if (spec.rfind("quad:", 0) == 0) {
        cfg = IntegrationConfig::quadrature(std::stoi(spec.substr(5)),
                                            tol > 0 ? tol : 1e-6);
    } else if (spec.rfind("mc:", 0) == 0) {
        cfg = IntegrationConfig::monte_carlo(std::stoull(spec.substr(3)), seed,
                                             tol > 0 ? tol : 0.05);
    } else {
        throw CLI::ValidationError("--backend",
                                   "expected exact, quad, quad:<order> or mc:<samples>");
    }
    return cfg;
}

std::vector<std::size_t> parse_indices(const std::string& spec) {
    auto dots = spec.find("..");
    if (dots == std::string::npos)
        throw CLI::ValidationError("--indices", "expected <lo>..<hi>");
    std::size_t lo = std::stoull(spec.substr(0, dots));
    std::size_t hi = std::stoull(spec.substr(dots + 2));
    if (lo < 1 || hi < lo) throw CLI::ValidationError("--indices", "need 1 <= lo <= hi");
    return default_indices(lo, hi);
}

Json diagnostic_json(const dsl::Diagnostic& d) {
    return Json{{"code", d.code},
                {"column", d.pos.col},
                {"line", d.pos.line},
                {"message", d.message},
                {"schema_version", kSchemaVersion}};
}

std::string law_summary(const LawReport& r) {
    std::ostringstream ss;
    ss << (r.pass ? "PASS" : "FAIL") << " " << r.law_name << ": instances="
       << r.instances_checked << " max_residual=" << r.max_residual
       << " tol=" << r.tolerance;
    if (!r.witness.empty()) ss << "\n  witness: " << r.witness;
    ss << "\n";
    return ss.str();
}

// ---------------------------------------------------------------------------
// run / fmt
// ---------------------------------------------------------------------------

int cmd_run(const std::string& path, const std::string& backend_spec,
            std::uint64_t seed, double tol, int threads, bool json,
            const std::string& out_path) {
    std::string source;
    dsl::SourceProgram prog;
    try {
        source = read_input(path);
        prog = dsl::parse(source);
        dsl::infer_spaces(prog);
    } catch (const dsl::FrontendError& e) {
        if (json)
            std::cerr << diagnostic_json(e.diag).dump() << "\n";
        else
            std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    dsl::EvalConfig cfg;
    cfg.seed = seed;
    cfg.threads = threads;
    try {
        cfg.integration = parse_backend(backend_spec, seed, tol);
        dsl::EvalOutput out = dsl::evaluate(prog, cfg);
        bool checks_ok = true;
        for (const auto& r : out.checks) checks_ok = checks_ok && r.pass;
        std::string text;
        if (json) {
            Json lets = Json::array();
            for (const auto& [name, m] : out.lets)
                lets.push_back(Json{{"name", name}, {"space", space_to_json(m.space())}});
            Json expects = Json::array();
            for (const auto& e : out.expects)
                expects.push_back(Json{{"backend", e.backend},
                                       {"observable", e.observable},
                                       {"statement", e.statement_index},
                                       {"value", e.value}});
            Json checks = Json::array();
            for (const auto& r : out.checks) checks.push_back(report_to_json(r));
            Json doc{{"checks", std::move(checks)},
                     {"expects", std::move(expects)},
                     {"lets", std::move(lets)},
                     {"schema_version", kSchemaVersion},
                     {"seed", seed}};
            text = doc.dump() + "\n";
        } else {
            std::ostringstream ss;
            for (const auto& [name, m] : out.lets)
                ss << "let " << name << " : " << m.space().to_string() << "\n";
            for (const auto& e : out.expects)
                ss << "expect " << e.observable << " = " << e.value << " ["
                   << e.backend << "]\n";
            for (const auto& r : out.checks) ss << law_summary(r);
            text = ss.str();
        }
        emit(text, out_path);
        return checks_ok ? 0 : 1;
    } catch (const dsl::FrontendError& e) {
        if (json)
            std::cerr << diagnostic_json(e.diag).dump() << "\n";
        else
            std::cerr << e.what() << "\n";
        return 2;
    } catch (const BackendUnsupported& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 3;
    }
}

int cmd_fmt(const std::string& path, const std::string& out_path) {
    try {
        dsl::SourceProgram prog = dsl::parse(read_input(path));
        emit(dsl::print(prog), out_path);
        return 0;
    } catch (const dsl::FrontendError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

// ---------------------------------------------------------------------------
// laws
// ---------------------------------------------------------------------------

LawReport run_affine_sweep(std::uint64_t seed, std::size_t trials,
                           const IntegrationConfig& cfg) {
    // Factorized instances nu (x) delta_y must pass; the checker itself
    // rejects non-deterministic second marginals elsewhere (exercised in the
    // test suite).
    LawReport merged;
    merged.law_name = "strongly_affine";
    merged.tolerance = std::max(cfg.tol_abs, 1e-12);
    MeasureGenerator gen(MeasureGenerator::Mode::Finite, seed);
    for (std::size_t i = 0; i < trials; ++i) {
        SampleRng rng = gen.rng_for(i);
        SpaceDescriptor xs = gen.space(rng);
        Measure nu = gen.measure(rng, xs);
        SpaceDescriptor ys = gen.space(rng);
        Value y = gen.point(rng, ys);
        Measure joint = Measure::product(nu, Measure::dirac(ys, y));
        LawReport one = check_strongly_affine(joint, cfg);
        merged.instances_checked += one.instances_checked;
        if (one.max_residual > merged.max_residual) {
            merged.max_residual = one.max_residual;
            merged.witness = one.witness;
        }
        merged.pass = merged.pass && one.pass;
    }
    if (merged.pass) merged.witness.clear();
    return merged;
}

int cmd_laws(const std::string& law, const std::string& mode_name, std::size_t trials,
             std::uint64_t seed, int threads, bool json, const std::string& out_path) {
    MeasureGenerator::Mode mode = mode_name == "interval"
                                      ? MeasureGenerator::Mode::Interval
                                      : MeasureGenerator::Mode::Finite;
    IntegrationConfig cfg = mode == MeasureGenerator::Mode::Finite
                                ? IntegrationConfig::exact()
                                : IntegrationConfig::quadrature();
    MeasureGenerator gen(mode, seed);
    std::vector<LawReport> reports;
    auto want = [&](const char* name) { return law == "all" || law == name; };
    if (want("monad")) reports.push_back(check_monad_laws(gen, trials, cfg, threads));
    if (want("naturality")) {
        if (mode == MeasureGenerator::Mode::Finite) {
            SpaceDescriptor s = SpaceDescriptor::symbols({"a", "b", "c", "d", "e"});
            ExprPtr x = Expr::var("x");
            ExprPtr body = Expr::cond(
                Expr::binary(Expr::Kind::Eq, x, Expr::constant(Value::symbol("b"))),
                Expr::constant(Value::symbol("b")), Expr::constant(Value::symbol("a")));
            ContinuousMap g("x", body, s, s);
            MeasureGenerator fixed(mode, seed, 5);
            reports.push_back(check_naturality(g, fixed, trials, cfg, threads));
        } else {
            SpaceDescriptor s = SpaceDescriptor::real_interval(0.0, 1.0);
            ExprPtr x = Expr::var("x");
            ExprPtr body = Expr::binary(
                Expr::Kind::Mul, x,
                Expr::binary(Expr::Kind::Sub, Expr::real(2.0), x));  // x(2-x) in [0,1]
            ContinuousMap g("x", body, s, s);
            reports.push_back(check_naturality(g, gen, trials, cfg, threads));
        }
    }
    if (want("fubini")) reports.push_back(check_fubini_sweep(gen, trials, cfg, threads));
    if (want("hexagon"))
        reports.push_back(check_hexagon_sweep(gen, trials, cfg, threads));
    if (want("affine") && mode == MeasureGenerator::Mode::Finite) {
        reports.push_back(run_affine_sweep(seed, trials, cfg));
        reports.push_back(check_pullback_strength(gen, trials, cfg, threads));
    }
    if (reports.empty()) {
        std::cerr << "unknown law '" << law << "'\n";
        return 2;
    }
    bool ok = true;
    std::string text;
    if (json) {
        Json arr = Json::array();
        for (const auto& r : reports) arr.push_back(report_to_json(r));
        text = Json{{"reports", std::move(arr)}, {"schema_version", kSchemaVersion},
                    {"seed", seed}}
                   .dump() +
               "\n";
    } else {
        std::ostringstream ss;
        for (const auto& r : reports) ss << law_summary(r);
        text = ss.str();
    }
    for (const auto& r : reports) ok = ok && r.pass;
    emit(text, out_path);
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

ContinuousMap scale_map(const SpaceDescriptor& dom, const SpaceDescriptor& cod,
                        double factor, double shift) {
    ExprPtr body = Expr::binary(
        Expr::Kind::Add,
        Expr::binary(Expr::Kind::Mul, Expr::var("x"), Expr::real(factor)),
        Expr::real(shift));
    return ContinuousMap("x", body, dom, cod);
}

int cmd_converge(const std::string& family, const std::string& indices_spec,
                 const std::string& backend_spec, std::uint64_t seed, double tol,
                 bool json, const std::string& csv_path, const std::string& out_path) {
    std::vector<std::size_t> indices;
    IntegrationConfig cfg;
    try {
        indices = parse_indices(indices_spec);
        cfg = parse_backend(backend_spec, seed, tol);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    SpaceDescriptor unit = SpaceDescriptor::real_interval(0.0, 1.0);
    // Built-in families default their tolerance to the certified Lipschitz
    // rate bound at the top index: L/n for weak families, 2L/n when both the
    // maps and the measures move. An explicit --tol overrides.
    double top = double(indices.back());
    if (tol <= 0) {
        if (family == "constant")
            cfg.tol_abs = 1e-12;
        else if (family == "cmt_shift")
            cfg.tol_abs =
                2.0 * battery_lipschitz(SpaceDescriptor::real_interval(0.0, 2.0)) / top;
        else
            cfg.tol_abs = battery_lipschitz(unit) / top;
    }
    ConvergenceReport report;
    try {
        if (family == "dirac_shrink") {
            MeasureSequence ms{"dirac(1/n)", [&](std::size_t n) {
                                   return Measure::dirac(unit, Value::real(1.0 / double(n)));
                               }};
            report = weak_convergence_check(ms, Measure::dirac(unit, Value::real(0.0)),
                                            indices, cfg);
        } else if (family == "uniform_shrink") {
            Measure base = Measure::uniform(0.0, 1.0);
            MeasureSequence ms{"uniform(0,1/n)", [&](std::size_t n) {
                                   return Measure::pushforward(
                                       scale_map(unit, unit, 1.0 / double(n), 0.0), base);
                               }};
            report = weak_convergence_check(ms, Measure::dirac(unit, Value::real(0.0)),
                                            indices, cfg);
        } else if (family == "constant") {
            Measure fixed = Measure::dirac(unit, Value::real(0.5));
            MeasureSequence ms{"dirac(0.5)", [&](std::size_t) { return fixed; }};
            report = weak_convergence_check(ms, fixed, indices, cfg);
        } else if (family == "cmt_shift") {
            SpaceDescriptor wide = SpaceDescriptor::real_interval(0.0, 2.0);
            MapSequence gs{"x + 1/n", [&](std::size_t n) {
                               return scale_map(unit, wide, 1.0, 1.0 / double(n));
                           }};
            ContinuousMap limit_map = scale_map(unit, wide, 1.0, 0.0);
            MeasureSequence ms{"dirac(1/n)", [&](std::size_t n) {
                                   return Measure::dirac(unit, Value::real(1.0 / double(n)));
                               }};
            report = strengthened_cmt_check(gs, limit_map, ms,
                                            Measure::dirac(unit, Value::real(0.0)),
                                            indices, cfg);
        } else {
            std::cerr << "unknown family '" << family << "'\n";
            return 2;
        }
    } catch (const BackendUnsupported& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 2;
    }

    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "n,residual\n";
        for (std::size_t i = 0; i < report.indices.size(); ++i)
            csv << report.indices[i] << "," << riesz::detail::fmt_real(
                       report.sup_residuals[i])
                << "\n";
        emit(csv.str(), csv_path);
    }
    std::string text;
    if (json) {
        Json doc = report_to_json(report);
        doc["family"] = family;
        text = doc.dump() + "\n";
    } else {
        std::ostringstream ss;
        ss << (report.pass ? "PASS" : "FAIL") << " " << family
           << ": final_residual=" << report.sup_residuals.back()
           << " tol=" << report.tolerance
           << " battery_lipschitz=" << report.battery_lipschitz << "\n";
        if (!report.detail.empty()) ss << "  " << report.detail << "\n";
        text = ss.str();
    }
    emit(text, out_path);
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"measure-monad laboratory"};
    app.require_subcommand(1);

    std::string file, backend = "quad", out_path, csv_path;
    std::string law = "all", mode = "finite";
    std::string family = "dirac_shrink", indices = "1..64";
    std::uint64_t seed = 0;
    double tol = 0;
    std::size_t trials = 50;
    int threads = 1;
    bool json = false;

    CLI::App* run = app.add_subcommand("run", "evaluate a program");
    run->add_option("file", file, "program path or '-' for stdin")->required();
    run->add_option("--backend", backend, "exact | quad | quad:<order> | mc:<samples>");
    run->add_option("--seed", seed, "rng seed");
    run->add_option("--tol", tol, "absolute tolerance override");
    run->add_option("--threads", threads, "worker threads for law checks");
    run->add_flag("--json", json, "machine-readable output");
    run->add_option("--out", out_path, "write output to a file");

    CLI::App* fmt = app.add_subcommand("fmt", "canonical formatting");
    fmt->add_option("file", file, "program path or '-' for stdin")->required();
    fmt->add_option("--out", out_path, "write output to a file");

    CLI::App* laws = app.add_subcommand("laws", "randomized law sweeps");
    laws->add_option("--law", law,
                     "monad | naturality | fubini | hexagon | affine | all");
    laws->add_option("--mode", mode, "finite | interval");
    laws->add_option("--trials", trials, "instances per law");
    laws->add_option("--seed", seed, "rng seed");
    laws->add_option("--threads", threads, "worker threads");
    laws->add_flag("--json", json, "machine-readable output");
    laws->add_option("--out", out_path, "write output to a file");

    CLI::App* conv = app.add_subcommand("converge", "convergence harnesses");
    conv->add_option("--family", family,
                     "dirac_shrink | uniform_shrink | constant | cmt_shift");
    conv->add_option("--indices", indices, "index window <lo>..<hi>");
    conv->add_option("--backend", backend, "exact | quad | quad:<order> | mc:<samples>");
    conv->add_option("--seed", seed, "rng seed");
    conv->add_option("--tol", tol, "absolute tolerance override");
    conv->add_flag("--json", json, "machine-readable output");
    conv->add_option("--csv", csv_path, "write n,residual rows to a file");
    conv->add_option("--out", out_path, "write output to a file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(file, backend, seed, tol, threads, json, out_path);
        if (fmt->parsed()) return cmd_fmt(file, out_path);
        if (laws->parsed())
            return cmd_laws(law, mode, trials, seed, threads, json, out_path);
        return cmd_converge(family, indices, backend, seed, tol, json, csv_path,
                            out_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}
