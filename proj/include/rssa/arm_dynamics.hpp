// Two-link planar manipulator with dynamics linear in three lumped
// inertial parameters. No gravity, no friction.
#pragma once

#include <Eigen/Dense>

namespace rssa {

/// Closed mass interval [lo, hi] in kg.
struct MassInterval {
    double lo{0.0};
    double hi{0.0};

    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double m) const { return lo <= m && m <= hi; }
};

struct PhysicalParams {
    double l1{0.25};
    double l2{0.27};
    MassInterval m1{26.75, 28.75};
    MassInterval m2{13.30, 14.30};
    double m1_true{27.75};
    double m2_true{13.80};

    /// Throws std::invalid_argument when lengths are non-positive, an interval
    /// is inverted, or a true mass lies outside its interval.
    void validate() const;
};

/// Lumped inertial parameters (kg m^2).
///   xi1 = I1 + m1 lc1^2 + I2 + m2 lc2^2 + m2 l1^2
///   xi2 = I2 + m2 lc2^2
///   xi3 = m2 l1 lc2
struct XiVector {
    double xi1{0.0};
    double xi2{0.0};
    double xi3{0.0};

    Eigen::Vector3d vec() const { return {xi1, xi2, xi3}; }
    static XiVector from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
    bool finite() const;

    friend bool operator==(const XiVector&, const XiVector&) = default;
};

/// Componentwise box of XiVector values; the uncertainty set of the model.
struct XiInterval {
    XiVector lo;
    XiVector hi;

    XiVector mid() const { return XiVector::from(0.5 * (lo.vec() + hi.vec())); }
    bool contains(const XiVector& xi, double tol = 0.0) const;
    XiVector clamp(const XiVector& xi) const;
};

struct ArmState {
    Eigen::Vector2d theta{Eigen::Vector2d::Zero()};
    Eigen::Vector2d theta_dot{Eigen::Vector2d::Zero()};
    double t{0.0};

    bool finite() const;
};

using Torque = Eigen::Vector2d;

/// Uniform-rod model: lc = l/2, I = m l^2 / 12 about the centroid.
/// Negative masses or non-positive lengths throw std::domain_error.
XiVector xi_from_masses(const PhysicalParams& phys, double m1, double m2);

/// Interval image of the mass box. xi is monotone increasing in each mass,
/// so the lower and upper corners bound it exactly.
XiInterval xi_interval(const PhysicalParams& phys);

XiVector xi_true(const PhysicalParams& phys);

/// M = [[xi1 + 2 xi3 c2, xi2 + xi3 c2], [xi2 + xi3 c2, xi2]]
Eigen::Matrix2d mass_matrix(const XiVector& xi, double theta2);

/// C(theta, theta_dot) with C theta_dot = h; used by the regressor.
Eigen::Matrix2d coriolis_matrix(const XiVector& xi, double theta2,
                                const Eigen::Vector2d& theta_dot);

/// h such that M theta_ddot + h = tau.
Eigen::Vector2d coriolis_vector(const XiVector& xi, double theta2,
                                const Eigen::Vector2d& theta_dot);

/// theta_ddot = M^-1 (tau - h). Throws std::runtime_error if M is singular.
Eigen::Vector2d forward_dynamics(const XiVector& xi, const ArmState& s, const Torque& tau);

/// Semi-implicit Euler: velocity first, then position with the new velocity.
/// Throws std::runtime_error on a non-finite result.
ArmState step(const XiVector& xi_true, const ArmState& s, const Torque& tau, double dt);

double kinetic_energy(const XiVector& xi, const ArmState& s);

struct ArmPoints {
    Eigen::Vector2d elbow;
    Eigen::Vector2d tip;
};

ArmPoints forward_kinematics(const PhysicalParams& phys, const Eigen::Vector2d& theta);

}  // namespace rssa
