// Robust safe control under multiplicative parameter uncertainty.
//
// The uncertain control-effectiveness family is discretized into a tensor grid
// over the parameter box. For a constraint Lf_i + Lg_i u <= -eta(t) on every
// grid member, the minimum-effort control is
//
//   u = -((max_i Lf_i + eta(t)) / alpha*) Lg_*
//
// where Lg_* maximizes min_j (Lg_* . Lg_j) / |Lg_*| over the grid and
// alpha* = min_j Lg_* . Lg_j.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rssa/arm_dynamics.hpp"
#include "rssa/safety_index.hpp"

namespace rssa {

/// No control direction keeps every family member safe.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FamilyGrid {
    std::vector<XiVector> samples;
};

/// Tensor grid with `resolution` points per non-degenerate axis (degenerate
/// axes collapse to one value). Odd resolutions include the midpoint.
FamilyGrid build_family(const XiInterval& interval, int resolution);

struct FeasibilityCert {
    double alpha{-1.0};
    double beta{0.0};
    bool feasible{false};
};

/// alpha = min over pairs of the cosine between Lg rows, beta = min |Lg|.
/// Any zero row makes the certificate infeasible.
FeasibilityCert feasibility(std::span<const LieSample> lie);

/// True iff Lf_i + Lg_i u <= -eta_t + tol for every member (always true for an
/// inactive eta_t).
bool robust_set_contains(const Eigen::Vector2d& u, std::span<const LieSample> lie, double eta_t,
                         double tol = 0.0);

struct GStar {
    std::size_t index{0};
    double alpha_star{0.0};
};

/// Exhaustive maximin over the grid; ties go to the lowest index. Zero rows
/// are skipped as candidates. Throws InfeasibleError when every row is zero.
GStar solve_g_star(std::span<const LieSample> lie);

/// Minimum-effort robust control. Returns zero when max Lf + eta_t <= 0.
/// Throws InfeasibleError when alpha* <= 0.
Torque rssa_control(std::span<const LieSample> lie, double eta_t);
Torque rssa_control(std::span<const LieSample> lie, double eta_t, const GStar& g_star);

struct BaselineResult {
    Torque u{Torque::Zero()};
    bool overridden{false};
    /// Constraint violated but Lg is zero: nothing to project along.
    bool degenerate{false};
};

/// argmin (u - u_r)' Q (u - u_r) s.t. lf + lg . u <= -eta_t, in closed form.
BaselineResult baseline_safe_control(const Torque& u_r, double lf, const Eigen::Vector2d& lg,
                                     double eta_t,
                                     const Eigen::Matrix2d& q = Eigen::Matrix2d::Identity());

enum class SafeMode {
    kReferencePassed,
    kRssaOverride,
    kBaselineOverride,
    kInfeasibleFallback,
};

std::string_view to_string(SafeMode mode);

struct SafeDecision {
    Torque u{Torque::Zero()};
    SafeMode mode{SafeMode::kReferencePassed};
    std::optional<std::size_t> g_star_index;
    double alpha_star{0.0};
    std::optional<FeasibilityCert> cert;
};

/// One pass of the robust safe set algorithm given the evaluated safety
/// picture (whose `lie` holds one entry per grid member):
///   u = u_r; if phi + phi_a > 0: find g*; if u_r is not robustly safe,
///   override with the minimum-effort robust control.
/// An infeasible certificate projects u_r against the worst-violated member.
SafeDecision rssa_step(const SafetyEval& eval, const Torque& u_r);

/// Same guard structure with a single estimated model (lie.size() == 1) and
/// the Q-metric projection instead of the robust law.
SafeDecision baseline_step(const SafetyEval& eval, const Torque& u_r,
                           const Eigen::Matrix2d& q = Eigen::Matrix2d::Identity());

}  // namespace rssa
