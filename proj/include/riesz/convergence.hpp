#pragma once

#include "riesz/battery.hpp"
#include "riesz/monad.hpp"

namespace riesz {

// ---------------------------------------------------------------------------
// Numerical harnesses for the convergence theorems: C_b-sequence convergence
// on compacts, weak convergence of probability measures, and the
// strengthened continuous mapping theorem (both the maps and the measures
// move simultaneously).
// ---------------------------------------------------------------------------

struct FunctionSequence {
    std::string name;
    std::function<TestFunction(std::size_t)> generator;
    double uniform_bound = 0;
};

struct MeasureSequence {
    std::string name;
    std::function<Measure(std::size_t)> generator;
};

struct MapSequence {
    std::string name;
    std::function<ContinuousMap(std::size_t)> generator;
};

struct ConvergenceReport {
    enum class Mode { CompactUniform, Weak, StrengthenedCmt };

    Mode mode = Mode::Weak;
    std::vector<std::size_t> indices;
    std::vector<double> sup_residuals;
    bool decreasing = true;  // non-increasing over the monotonicity window
    bool bound_certified = true;
    double tolerance = 0;
    double battery_lipschitz = 0;  // certified L of the battery, when finite
    bool pass = false;
    std::string detail;

    // Pass iff the residual at the top index is below tolerance and residuals
    // are non-increasing over the last half of the tested indices. The window
    // distinguishes convergence from oscillation without asserting a rate.
    void finalize() {
        decreasing = true;
        if (!sup_residuals.empty()) {
            std::size_t start = sup_residuals.size() / 2;
            for (std::size_t i = start; i + 1 < sup_residuals.size(); ++i)
                if (sup_residuals[i + 1] > sup_residuals[i] + 1e-12) {
                    decreasing = false;
                    detail = "residual increased between indices " +
                             std::to_string(indices[i]) + " and " +
                             std::to_string(indices[i + 1]);
                }
        }
        pass = decreasing && bound_certified && !sup_residuals.empty() &&
               sup_residuals.back() <= tolerance;
        if (!bound_certified && detail.empty())
            detail = "uniform bound certificate failed";
        if (pass) detail.clear();
    }
};

inline std::vector<std::size_t> default_indices(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> out;
    for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
    return out;
}

// ---------------------------------------------------------------------------
// compact_uniform_check: convergence of (f_n) to f in C_b means uniform
// boundedness plus uniform convergence on each chosen compact, probed on a
// uniform grid.
// ---------------------------------------------------------------------------

inline ConvergenceReport compact_uniform_check(
    const FunctionSequence& fs, const TestFunction& limit,
    const std::vector<std::pair<double, double>>& compacts, std::size_t grid,
    const std::vector<std::size_t>& indices, double tol = 1e-6) {
    ConvergenceReport report;
    report.mode = ConvergenceReport::Mode::CompactUniform;
    report.indices = indices;
    report.tolerance = tol;
    for (std::size_t n : indices) {
        TestFunction fn = fs.generator(n);
        if (fn.domain() != limit.domain())
            throw DomainMismatch("sequence and limit live on different domains");
        if (bound_of(fn) > fs.uniform_bound + 1e-12) report.bound_certified = false;
        double sup = 0;
        for (const auto& [a, b] : compacts) {
            for (std::size_t i = 0; i < grid; ++i) {
                double t = grid == 1 ? a : a + (b - a) * double(i) / double(grid - 1);
                Value v = Value::real(t);
                sup = std::max(sup,
                               std::fabs(fn.eval_unchecked(v) - limit.eval_unchecked(v)));
            }
        }
        report.sup_residuals.push_back(sup);
    }
    report.finalize();
    return report;
}

// ---------------------------------------------------------------------------
// weak_convergence_check: residual at n is the battery distance between mu_n
// and the limit.
// ---------------------------------------------------------------------------

inline ConvergenceReport weak_convergence_check(const MeasureSequence& ms,
                                                const Measure& limit,
                                                const std::vector<std::size_t>& indices,
                                                const IntegrationConfig& cfg) {
    const SpaceDescriptor& s = limit.space();
    if (!s.is_real_interval() && !s.is_real_line())
        throw DomainMismatch("weak convergence harness expects an interval or line");
    ConvergenceReport report;
    report.mode = ConvergenceReport::Mode::Weak;
    report.indices = indices;
    report.tolerance = cfg.tol_abs;
    report.battery_lipschitz = battery_lipschitz(s);
    std::vector<TestFunction> battery = battery_for(s);
    for (std::size_t n : indices) {
        Measure mu_n = ms.generator(n);
        report.sup_residuals.push_back(
            battery_distance(mu_n, limit, cfg, nullptr, &battery));
    }
    report.finalize();
    return report;
}

// ---------------------------------------------------------------------------
// strengthened_cmt_check: (g_n)_* mu_n must converge to g_* mu when g_n -> g
// uniformly on compacts and mu_n -> mu weakly; both sequences move.
// ---------------------------------------------------------------------------

inline ConvergenceReport strengthened_cmt_check(
    const MapSequence& gs, const ContinuousMap& limit_map, const MeasureSequence& ms,
    const Measure& limit, const std::vector<std::size_t>& indices,
    const IntegrationConfig& cfg) {
    if (limit.space() != limit_map.domain())
        throw DomainMismatch("limit measure does not live on the map domain");
    ConvergenceReport report;
    report.mode = ConvergenceReport::Mode::StrengthenedCmt;
    report.indices = indices;
    report.tolerance = cfg.tol_abs;
    const SpaceDescriptor& target = limit_map.codomain();
    report.battery_lipschitz = battery_lipschitz(target);
    std::vector<TestFunction> battery = battery_for(target);
    Measure limit_push = pushforward(limit_map, limit);
    for (std::size_t n : indices) {
        ContinuousMap gn = gs.generator(n);
        if (gn.domain() != limit_map.domain() || gn.codomain() != target)
            throw DomainMismatch("map sequence domain/codomain drifted");
        Measure pushed = pushforward(gn, ms.generator(n));
        report.sup_residuals.push_back(
            battery_distance(pushed, limit_push, cfg, nullptr, &battery));
    }
    report.finalize();
    return report;
}

}  // namespace riesz
