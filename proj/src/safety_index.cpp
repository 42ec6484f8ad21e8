#include "rssa/safety_index.hpp"

#include <cmath>
#include <stdexcept>

namespace rssa {

void SafetyConfig::validate() const {
    if (!(d_min > 0.0)) {
        throw std::invalid_argument("d_min must be positive");
    }
    if (!(k1 > 0.0)) {
        throw std::invalid_argument("k1 must be positive");
    }
    if (!(k_xi >= 0.0)) {
        throw std::invalid_argument("k_xi must be non-negative");
    }
    if (!xi_weight.allFinite() || !xi_weight.isApprox(xi_weight.transpose(), 1e-12)) {
        throw std::invalid_argument("xi weight must be symmetric");
    }
    Eigen::LLT<Eigen::Matrix3d> llt(xi_weight);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("xi weight must be positive definite");
    }
}

Eigen::Matrix3d SafetyConfig::normalized_weight(const XiInterval& interval) {
    const Eigen::Vector3d mid = interval.mid().vec();
    if ((mid.array() <= 0.0).any()) {
        throw std::invalid_argument("normalized weight needs a positive interval midpoint");
    }
    return mid.array().square().inverse().matrix().asDiagonal();
}

double phi0(const SafetyConfig& cfg, const ProximityReport& prox) {
    return cfg.d_min * cfg.d_min - prox.d * prox.d;
}

double phi(const SafetyConfig& cfg, const ProximityReport& prox) {
    return phi0(cfg, prox) - cfg.k1 * prox.d_dot;
}

double phi_alpha(const SafetyConfig& cfg, const XiVector& xi_hat, const XiInterval& interval) {
    const Eigen::Vector3d dxi = interval.mid().vec() - xi_hat.vec();
    return cfg.k_xi * dxi.dot(cfg.xi_weight * dxi);
}

double phi_alpha_dot(const SafetyConfig& cfg, const XiVector& xi_hat, const XiVector& xi_hat_dot,
                     const XiInterval& interval) {
    const Eigen::Vector3d dxi = interval.mid().vec() - xi_hat.vec();
    return -2.0 * cfg.k_xi * dxi.dot(cfg.xi_weight * xi_hat_dot.vec());
}

LieSample lie_derivatives(const SafetyConfig& cfg, const PhysicalParams& phys,
                          const ArmState& state, const ProximityReport& prox,
                          const Eigen::Vector2d& obstacle_vel, const XiVector& xi) {
    if (prox.collision || !(prox.d > 0.0)) {
        throw std::domain_error("lie_derivatives: undefined on contact");
    }
    const Eigen::Vector2d& w = state.theta_dot;
    const Eigen::Matrix2d& jac = prox.jac;

    constexpr double kStep = 1e-6;
    const Eigen::Matrix2d jac_plus =
        point_jacobian(phys, state.theta + kStep * w, prox.closest_link, prox.arclength);
    const Eigen::Matrix2d jac_minus =
        point_jacobian(phys, state.theta - kStep * w, prox.closest_link, prox.arclength);
    const Eigen::Vector2d jdot_w = (jac_plus - jac_minus) / (2.0 * kStep) * w;

    const Eigen::Matrix2d m_inv = mass_matrix(xi, state.theta(1)).inverse();
    const Eigen::Vector2d h = coriolis_vector(xi, state.theta(1), w);

    // r = p_obstacle - p_arm;  d_ddot = delta . r_ddot + (|r_dot|^2 - d_dot^2) / d
    // r_ddot = -(J M^-1 (u - h) + J_dot theta_dot)
    const Eigen::Vector2d r_dot = obstacle_vel - jac * w;
    const Eigen::RowVector2d a = prox.delta.transpose() * jac * m_inv;
    double curvature = (r_dot.squaredNorm() - prox.d_dot * prox.d_dot) / prox.d;
    const double link_len = prox.closest_link == 1 ? phys.l1 : phys.l2;
    if (prox.arclength > 0.0 && prox.arclength < link_len) {
        // The foot of the perpendicular slides along the link; its rate is
        // s_dot = e . (v_obs - a_dot) + omega e_perp . (p_obs - a).
        const Eigen::Vector2d base = link_point(phys, state.theta, prox.closest_link, 0.0);
        const Eigen::Vector2d e = (prox.point - base) / prox.arclength;
        const Eigen::Vector2d e_perp{-e(1), e(0)};
        const Eigen::Vector2d base_vel =
            point_jacobian(phys, state.theta, prox.closest_link, 0.0) * w;
        const double omega = prox.closest_link == 1 ? w(0) : w(0) + w(1);
        const Eigen::Vector2d rel = prox.point + prox.d * prox.delta - base;
        const double s_dot = e.dot(obstacle_vel - base_vel) + omega * e_perp.dot(rel);
        curvature -= s_dot * s_dot / prox.d;
    }
    const double d_ddot_drift = a.dot(h) - prox.delta.dot(jdot_w) + curvature;

    LieSample out;
    out.lf = -2.0 * prox.d * prox.d_dot - cfg.k1 * d_ddot_drift;
    out.lg = cfg.k1 * a.transpose();
    return out;
}

double eta_t(const SafetyConfig& cfg, double phi_plus_alpha, double phi_alpha_dot) {
    if (phi_plus_alpha < 0.0) {
        return kEtaInactive;
    }
    return cfg.eta0 + phi_alpha_dot;
}

SafetyEval evaluate_safety(const SafetyConfig& cfg, const PhysicalParams& phys,
                           const ArmState& state, const ProximityReport& prox,
                           const Eigen::Vector2d& obstacle_vel, const XiVector& xi_hat,
                           const XiVector& xi_hat_dot, const XiInterval& interval,
                           std::span<const XiVector> samples, bool use_uncertainty_penalty) {
    SafetyEval ev;
    ev.phi0 = phi0(cfg, prox);
    ev.phi = phi(cfg, prox);
    if (use_uncertainty_penalty) {
        ev.phi_alpha = phi_alpha(cfg, xi_hat, interval);
        ev.phi_alpha_dot = phi_alpha_dot(cfg, xi_hat, xi_hat_dot, interval);
    }
    ev.eta_t = eta_t(cfg, ev.phi_r(), ev.phi_alpha_dot);
    if (!prox.collision && prox.d > 0.0) {
        ev.lie.reserve(samples.size());
        for (const XiVector& xi : samples) {
            ev.lie.push_back(lie_derivatives(cfg, phys, state, prox, obstacle_vel, xi));
        }
    }
    return ev;
}

}  // namespace rssa
