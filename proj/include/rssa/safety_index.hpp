// Distance safety index, uncertainty penalty and their Lie derivatives.
//
//   phi      = d_min^2 - d^2 - k1 d_dot
//   phi_a    = k_xi dxi' W dxi,   dxi = xi_mid - xi_hat
//   phi_R    = phi + phi_a
//   eta(t)   = eta0 + d/dt phi_a   while phi + phi_a >= 0, otherwise inactive
//
// The constraint the safe controllers enforce is Lf + Lg u <= -eta(t).
#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rssa/arm_dynamics.hpp"
#include "rssa/proximity.hpp"

namespace rssa {

/// Sentinel for an inactive constraint. Any finite Lf + Lg u satisfies
/// `<= -kEtaInactive`.
inline constexpr double kEtaInactive = -std::numeric_limits<double>::infinity();

inline bool eta_active(double eta) { return eta != kEtaInactive; }

struct SafetyConfig {
    double d_min{0.15};
    double k1{0.01};
    double k_xi{20.0};
    Eigen::Matrix3d xi_weight{Eigen::Matrix3d::Identity()};
    double eta0{0.1};

    /// Throws std::invalid_argument on non-positive d_min / k1, negative k_xi,
    /// or a weight that is not symmetric positive definite.
    void validate() const;

    /// diag(1 / mid_i^2): each component normalized by its expected value.
    static Eigen::Matrix3d normalized_weight(const XiInterval& interval);
};

/// Drift and control Lie derivatives of phi for one parameter sample.
struct LieSample {
    double lf{0.0};
    Eigen::Vector2d lg{Eigen::Vector2d::Zero()};
};

struct SafetyEval {
    double phi0{0.0};
    double phi{0.0};
    double phi_alpha{0.0};
    double phi_alpha_dot{0.0};
    std::vector<LieSample> lie;
    double eta_t{kEtaInactive};

    double phi_r() const { return phi + phi_alpha; }
};

double phi0(const SafetyConfig& cfg, const ProximityReport& prox);
double phi(const SafetyConfig& cfg, const ProximityReport& prox);

double phi_alpha(const SafetyConfig& cfg, const XiVector& xi_hat, const XiInterval& interval);

/// -2 k_xi dxi' W xi_hat_dot (W symmetric).
double phi_alpha_dot(const SafetyConfig& cfg, const XiVector& xi_hat, const XiVector& xi_hat_dot,
                     const XiInterval& interval);

/// phi_dot = lf + lg . u along the model with parameters `xi`.
/// The obstacle is assumed unaccelerated and J_dot theta_dot comes from a
/// central difference of the point Jacobian along theta_dot.
/// Throws std::domain_error when the report is a contact (d == 0).
LieSample lie_derivatives(const SafetyConfig& cfg, const PhysicalParams& phys,
                          const ArmState& state, const ProximityReport& prox,
                          const Eigen::Vector2d& obstacle_vel, const XiVector& xi);

/// eta0 + phi_alpha_dot when phi + phi_alpha >= 0, else kEtaInactive.
double eta_t(const SafetyConfig& cfg, double phi_plus_alpha, double phi_alpha_dot);

/// Full per-tick safety picture. Lie derivatives are evaluated for every
/// entry of `samples`; they are left empty on contact. With
/// `use_uncertainty_penalty` false the penalty terms are zero (plain phi).
SafetyEval evaluate_safety(const SafetyConfig& cfg, const PhysicalParams& phys,
                           const ArmState& state, const ProximityReport& prox,
                           const Eigen::Vector2d& obstacle_vel, const XiVector& xi_hat,
                           const XiVector& xi_hat_dot, const XiInterval& interval,
                           std::span<const XiVector> samples, bool use_uncertainty_penalty);

}  // namespace rssa
