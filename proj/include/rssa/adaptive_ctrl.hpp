// Slotine-Li adaptive tracking controller with interval projection of the
// parameter estimate, plus the joint-space trajectories it tracks.
#pragma once

#include <Eigen/Dense>

#include "rssa/arm_dynamics.hpp"

namespace rssa {

struct AdaptGains {
    Eigen::Matrix2d k_d{5.0 * Eigen::Matrix2d::Identity()};
    Eigen::Matrix2d lambda{Eigen::Matrix2d::Identity()};
    Eigen::Matrix3d gamma{Eigen::Vector3d(60.0, 100.0, 20.0).asDiagonal()};

    /// K_D and Lambda must be SPD, Gamma invertible. Throws std::invalid_argument.
    void validate() const;
};

enum class AdaptationLaw {
    kSlotineLi,    ///< xi_hat_dot = -Gamma^-1 Y' s
    kSignFlipped,  ///< xi_hat_dot = +Gamma^-1 Y' s, for comparison only
    kFrozen,       ///< estimate held constant
};

struct EstimatorState {
    XiVector xi_hat;
    XiVector xi_hat_dot;
    XiInterval interval;
};

struct DesiredSample {
    Eigen::Vector2d theta{Eigen::Vector2d::Zero()};
    Eigen::Vector2d theta_dot{Eigen::Vector2d::Zero()};
    Eigen::Vector2d theta_ddot{Eigen::Vector2d::Zero()};
};

/// Quintic rest-to-rest joint trajectory starting at `t0`.
class DesiredTrajectory {
public:
    DesiredTrajectory() = default;
    DesiredTrajectory(Eigen::Vector2d start, Eigen::Vector2d goal, double t0, double duration);

    DesiredSample at(double t) const;

    const Eigen::Vector2d& start() const { return start_; }
    const Eigen::Vector2d& goal() const { return goal_; }
    double t0() const { return t0_; }
    double duration() const { return duration_; }
    /// True when the requested Cartesian goal had to be pulled into the workspace.
    bool clipped{false};

private:
    Eigen::Vector2d start_{Eigen::Vector2d::Zero()};
    Eigen::Vector2d goal_{Eigen::Vector2d::Zero()};
    double t0_{0.0};
    double duration_{0.0};
};

/// Y with Y xi = M(xi) theta_r_ddot + C(xi, theta_dot) theta_r_dot.
Eigen::Matrix<double, 2, 3> regressor(const ArmState& state, const Eigen::Vector2d& theta_r_dot,
                                      const Eigen::Vector2d& theta_r_ddot);

struct ReferenceOutput {
    Torque u_r{Torque::Zero()};
    Eigen::Vector2d s{Eigen::Vector2d::Zero()};
    Eigen::Matrix<double, 2, 3> y{Eigen::Matrix<double, 2, 3>::Zero()};
};

/// tau_r = M_hat theta_r_ddot + C_hat theta_r_dot - K_D s, with
/// theta_r_dot = theta_d_dot - Lambda e, theta_r_ddot = theta_d_ddot - Lambda e_dot,
/// s = theta_dot - theta_r_dot, e = theta - theta_d.
ReferenceOutput reference_control(const AdaptGains& gains, const DesiredSample& desired,
                                  const ArmState& state, const EstimatorState& est);

/// Euler step of the adaptation law followed by a componentwise clamp to the
/// interval. Clamped components report a zero rate.
EstimatorState update_estimate(const AdaptGains& gains, const EstimatorState& est,
                               const Eigen::Matrix<double, 2, 3>& y, const Eigen::Vector2d& s,
                               double dt, AdaptationLaw law = AdaptationLaw::kSlotineLi);

struct IkResult {
    Eigen::Vector2d theta{Eigen::Vector2d::Zero()};
    bool clipped{false};
};

/// Planar two-link inverse kinematics. Goals outside the annulus
/// |l1 - l2| <= r <= l1 + l2 are pulled radially onto it. `elbow_sign`
/// selects the branch (+1: theta2 >= 0).
IkResult inverse_kinematics(const PhysicalParams& phys, const Eigen::Vector2d& goal,
                            double elbow_sign = 1.0);

/// Trajectory from the current joint angles to the IK solution of `goal`.
/// The branch matches the current elbow sign (positive when straight) and the
/// goal angles are unwrapped to the nearest representative of the current ones.
DesiredTrajectory make_trajectory(const PhysicalParams& phys, const ArmState& state,
                                  const Eigen::Vector2d& goal, double duration);

/// Duration that keeps the quintic's peak joint speed at `max_joint_speed`,
/// floored at `min_duration`.
double quintic_duration(const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                        double max_joint_speed, double min_duration);

}  // namespace rssa
