#include "rssa/safe_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rssa {

namespace {

std::vector<double> axis_values(double lo, double hi, int resolution) {
    if (lo == hi) {
        return {lo};
    }
    std::vector<double> v(static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(resolution - 1);
        v[static_cast<std::size_t>(i)] = i == resolution - 1 ? hi : lo + f * (hi - lo);
    }
    return v;
}

}  // namespace

FamilyGrid build_family(const XiInterval& interval, int resolution) {
    if (resolution < 2) {
        throw std::invalid_argument("family grid needs at least 2 points per axis");
    }
    const auto a1 = axis_values(interval.lo.xi1, interval.hi.xi1, resolution);
    const auto a2 = axis_values(interval.lo.xi2, interval.hi.xi2, resolution);
    const auto a3 = axis_values(interval.lo.xi3, interval.hi.xi3, resolution);
    FamilyGrid grid;
    grid.samples.reserve(a1.size() * a2.size() * a3.size());
    for (double x1 : a1) {
        for (double x2 : a2) {
            for (double x3 : a3) {
                grid.samples.push_back({x1, x2, x3});
            }
        }
    }
    return grid;
}

FeasibilityCert feasibility(std::span<const LieSample> lie) {
    FeasibilityCert cert;
    if (lie.empty()) {
        return cert;
    }
    double beta = std::numeric_limits<double>::infinity();
    for (const auto& s : lie) {
        beta = std::min(beta, s.lg.norm());
    }
    cert.beta = beta;
    if (!(beta > 0.0)) {
        return cert;
    }
    double alpha = 1.0;
    for (std::size_t i = 0; i < lie.size(); ++i) {
        for (std::size_t j = i + 1; j < lie.size(); ++j) {
            const double c = lie[i].lg.dot(lie[j].lg) / (lie[i].lg.norm() * lie[j].lg.norm());
            alpha = std::min(alpha, c);
        }
    }
    cert.alpha = std::clamp(alpha, -1.0, 1.0);
    cert.feasible = cert.alpha > 0.0 && cert.beta > 0.0;
    return cert;
}

bool robust_set_contains(const Eigen::Vector2d& u, std::span<const LieSample> lie, double eta_t,
                         double tol) {
    if (!eta_active(eta_t)) {
        return true;
    }
    return std::all_of(lie.begin(), lie.end(), [&](const LieSample& s) {
        return s.lf + s.lg.dot(u) <= -eta_t + tol;
    });
}

GStar solve_g_star(std::span<const LieSample> lie) {
    std::optional<GStar> best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lie.size(); ++i) {
        const double norm = lie[i].lg.norm();
        if (!(norm > 0.0)) {
            continue;
        }
        double inner = std::numeric_limits<double>::infinity();
        for (const auto& other : lie) {
            inner = std::min(inner, lie[i].lg.dot(other.lg));
        }
        const double value = inner / norm;
        if (!best || value > best_value) {
            best_value = value;
            best = GStar{i, inner};
        }
    }
    if (!best) {
        throw InfeasibleError("solve_g_star: every control Lie derivative is zero");
    }
    return *best;
}

Torque rssa_control(std::span<const LieSample> lie, double eta_t, const GStar& g_star) {
    if (!eta_active(eta_t) || lie.empty()) {
        return Torque::Zero();
    }
    double lf_max = -std::numeric_limits<double>::infinity();
    for (const auto& s : lie) {
        lf_max = std::max(lf_max, s.lf);
    }
    const double need = lf_max + eta_t;
    if (need <= 0.0) {
        return Torque::Zero();
    }
    if (!(g_star.alpha_star > 0.0)) {
        throw InfeasibleError("rssa_control: alpha* is not positive");
    }
    return -(need / g_star.alpha_star) * lie[g_star.index].lg;
}

Torque rssa_control(std::span<const LieSample> lie, double eta_t) {
    if (!eta_active(eta_t) || lie.empty()) {
        return Torque::Zero();
    }
    return rssa_control(lie, eta_t, solve_g_star(lie));
}

BaselineResult baseline_safe_control(const Torque& u_r, double lf, const Eigen::Vector2d& lg,
                                     double eta_t, const Eigen::Matrix2d& q) {
    BaselineResult out;
    out.u = u_r;
    if (!eta_active(eta_t)) {
        return out;
    }
    const double excess = lf + lg.dot(u_r) + eta_t;
    if (excess <= 0.0) {
        return out;
    }
    const Eigen::Vector2d q_inv_lg = q.ldlt().solve(lg);
    const double denom = lg.dot(q_inv_lg);
    if (!(denom > 0.0)) {
        out.degenerate = true;
        return out;
    }
    out.u = u_r - (excess / denom) * q_inv_lg;
    out.overridden = true;
    return out;
}

std::string_view to_string(SafeMode mode) {
    switch (mode) {
        case SafeMode::kReferencePassed: return "reference-passed";
        case SafeMode::kRssaOverride: return "rssa-override";
        case SafeMode::kBaselineOverride: return "baseline-override";
        case SafeMode::kInfeasibleFallback: return "infeasible-fallback";
    }
    return "unknown";
}

namespace {

SafeDecision worst_case_fallback(const SafetyEval& eval, const Torque& u_r,
                                 std::optional<FeasibilityCert> cert) {
    SafeDecision out;
    out.u = u_r;
    out.mode = SafeMode::kInfeasibleFallback;
    out.cert = cert;
    if (eval.lie.empty()) {
        return out;
    }
    std::size_t worst = 0;
    double worst_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eval.lie.size(); ++i) {
        const double v = eval.lie[i].lf + eval.lie[i].lg.dot(u_r);
        if (v > worst_value) {
            worst_value = v;
            worst = i;
        }
    }
    out.u = baseline_safe_control(u_r, eval.lie[worst].lf, eval.lie[worst].lg, eval.eta_t).u;
    return out;
}

}  // namespace

SafeDecision rssa_step(const SafetyEval& eval, const Torque& u_r) {
    SafeDecision out;
    out.u = u_r;
    if (!(eval.phi_r() > 0.0)) {
        return out;
    }
    if (eval.lie.empty()) {
        // Contact: no gradient information.
        return worst_case_fallback(eval, u_r, std::nullopt);
    }
    std::optional<GStar> g_star;
    try {
        g_star = solve_g_star(eval.lie);
        out.g_star_index = g_star->index;
        out.alpha_star = g_star->alpha_star;
    } catch (const InfeasibleError&) {
        g_star.reset();
    }
    if (robust_set_contains(u_r, eval.lie, eval.eta_t)) {
        return out;
    }
    const FeasibilityCert cert = feasibility(eval.lie);
    if (!cert.feasible || !g_star || !(g_star->alpha_star > 0.0)) {
        SafeDecision fb = worst_case_fallback(eval, u_r, cert);
        fb.g_star_index = out.g_star_index;
        fb.alpha_star = out.alpha_star;
        return fb;
    }
    out.cert = cert;
    out.u = rssa_control(eval.lie, eval.eta_t, *g_star);
    out.mode = SafeMode::kRssaOverride;
    return out;
}

SafeDecision baseline_step(const SafetyEval& eval, const Torque& u_r, const Eigen::Matrix2d& q) {
    SafeDecision out;
    out.u = u_r;
    if (!(eval.phi_r() > 0.0)) {
        return out;
    }
    if (eval.lie.empty()) {
        out.mode = SafeMode::kInfeasibleFallback;
        return out;
    }
    const LieSample& s = eval.lie.front();
    const BaselineResult r = baseline_safe_control(u_r, s.lf, s.lg, eval.eta_t, q);
    out.u = r.u;
    if (r.degenerate) {
        out.mode = SafeMode::kInfeasibleFallback;
    } else if (r.overridden) {
        out.mode = SafeMode::kBaselineOverride;
    }
    return out;
}

}  // namespace rssa
