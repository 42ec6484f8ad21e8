#include "rssa/arm_dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rssa {

void PhysicalParams::validate() const {
    if (!(l1 > 0.0) || !(l2 > 0.0)) {
        throw std::invalid_argument("link lengths must be positive");
    }
    if (!(m1.lo <= m1.hi) || !(m2.lo <= m2.hi)) {
        throw std::invalid_argument("mass interval lower bound exceeds upper bound");
    }
    if (m1.lo < 0.0 || m2.lo < 0.0) {
        throw std::invalid_argument("mass interval must be non-negative");
    }
    if (!m1.contains(m1_true) || !m2.contains(m2_true)) {
        throw std::invalid_argument("true mass lies outside its interval");
    }
}

bool XiVector::finite() const {
    return std::isfinite(xi1) && std::isfinite(xi2) && std::isfinite(xi3);
}

bool XiInterval::contains(const XiVector& xi, double tol) const {
    const Eigen::Vector3d v = xi.vec();
    return ((v.array() >= lo.vec().array() - tol) && (v.array() <= hi.vec().array() + tol)).all();
}

XiVector XiInterval::clamp(const XiVector& xi) const {
    return XiVector::from(xi.vec().cwiseMax(lo.vec()).cwiseMin(hi.vec()));
}

bool ArmState::finite() const {
    return theta.allFinite() && theta_dot.allFinite() && std::isfinite(t);
}

XiVector xi_from_masses(const PhysicalParams& phys, double m1, double m2) {
    if (!(phys.l1 > 0.0) || !(phys.l2 > 0.0)) {
        throw std::domain_error("link lengths must be positive");
    }
    if (m1 < 0.0 || m2 < 0.0 || !std::isfinite(m1) || !std::isfinite(m2)) {
        throw std::domain_error("link masses must be finite and non-negative");
    }
    const double l1 = phys.l1;
    const double l2 = phys.l2;
    const double lc1 = 0.5 * l1;
    const double lc2 = 0.5 * l2;
    const double i1 = m1 * l1 * l1 / 12.0;
    const double i2 = m2 * l2 * l2 / 12.0;

    XiVector xi;
    xi.xi2 = i2 + m2 * lc2 * lc2;
    xi.xi1 = i1 + m1 * lc1 * lc1 + xi.xi2 + m2 * l1 * l1;
    xi.xi3 = m2 * l1 * lc2;
    return xi;
}

XiInterval xi_interval(const PhysicalParams& phys) {
    phys.validate();
    return {xi_from_masses(phys, phys.m1.lo, phys.m2.lo),
            xi_from_masses(phys, phys.m1.hi, phys.m2.hi)};
}

XiVector xi_true(const PhysicalParams& phys) {
    return xi_from_masses(phys, phys.m1_true, phys.m2_true);
}

Eigen::Matrix2d mass_matrix(const XiVector& xi, double theta2) {
    const double c2 = std::cos(theta2);
    const double off = xi.xi2 + xi.xi3 * c2;
    Eigen::Matrix2d m;
    m << xi.xi1 + 2.0 * xi.xi3 * c2, off,
         off, xi.xi2;
    return m;
}

Eigen::Matrix2d coriolis_matrix(const XiVector& xi, double theta2,
                                const Eigen::Vector2d& theta_dot) {
    const double hs = xi.xi3 * std::sin(theta2);
    Eigen::Matrix2d c;
    c << -hs * theta_dot(1), -hs * (theta_dot(0) + theta_dot(1)),
          hs * theta_dot(0), 0.0;
    return c;
}

Eigen::Vector2d coriolis_vector(const XiVector& xi, double theta2,
                                const Eigen::Vector2d& theta_dot) {
    const double hs = xi.xi3 * std::sin(theta2);
    const double w1 = theta_dot(0);
    const double w2 = theta_dot(1);
    return {hs * (-2.0 * w1 * w2 - w2 * w2), hs * w1 * w1};
}

Eigen::Vector2d forward_dynamics(const XiVector& xi, const ArmState& s, const Torque& tau) {
    const Eigen::Matrix2d m = mass_matrix(xi, s.theta(1));
    const double det = m.determinant();
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
        throw std::runtime_error("singular mass matrix");
    }
    const Eigen::Vector2d rhs = tau - coriolis_vector(xi, s.theta(1), s.theta_dot);
    // Explicit 2x2 inverse keeps results bitwise reproducible.
    return Eigen::Vector2d{m(1, 1) * rhs(0) - m(0, 1) * rhs(1),
                           -m(1, 0) * rhs(0) + m(0, 0) * rhs(1)} / det;
}

ArmState step(const XiVector& xi_true, const ArmState& s, const Torque& tau, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step: dt must be positive");
    }
    const Eigen::Vector2d acc = forward_dynamics(xi_true, s, tau);
    ArmState next;
    next.theta_dot = s.theta_dot + dt * acc;
    next.theta = s.theta + dt * next.theta_dot;
    next.t = s.t + dt;
    if (!next.finite()) {
        throw std::runtime_error("step: integration produced a non-finite state at t=" +
                                 std::to_string(s.t));
    }
    return next;
}

double kinetic_energy(const XiVector& xi, const ArmState& s) {
    return 0.5 * s.theta_dot.dot(mass_matrix(xi, s.theta(1)) * s.theta_dot);
}

ArmPoints forward_kinematics(const PhysicalParams& phys, const Eigen::Vector2d& theta) {
    const double q12 = theta(0) + theta(1);
    ArmPoints p;
    p.elbow = phys.l1 * Eigen::Vector2d{std::cos(theta(0)), std::sin(theta(0))};
    p.tip = p.elbow + phys.l2 * Eigen::Vector2d{std::cos(q12), std::sin(q12)};
    return p;
}

}  // namespace rssa
