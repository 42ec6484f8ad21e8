#include "rssa/adaptive_ctrl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rssa {

namespace {

bool is_spd(const Eigen::Matrix2d& m) {
    if (!m.isApprox(m.transpose(), 1e-12)) {
        return false;
    }
    Eigen::LLT<Eigen::Matrix2d> llt(m);
    return llt.info() == Eigen::Success;
}

double wrap_near(double angle, double reference) {
    const double two_pi = 2.0 * std::numbers::pi;
    return angle + two_pi * std::round((reference - angle) / two_pi);
}

}  // namespace

void AdaptGains::validate() const {
    if (!is_spd(k_d)) {
        throw std::invalid_argument("K_D must be symmetric positive definite");
    }
    if (!is_spd(lambda)) {
        throw std::invalid_argument("Lambda must be symmetric positive definite");
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(gamma);
    if (!lu.isInvertible()) {
        throw std::invalid_argument("Gamma must be invertible");
    }
}

DesiredTrajectory::DesiredTrajectory(Eigen::Vector2d start, Eigen::Vector2d goal, double t0,
                                     double duration)
    : start_(std::move(start)), goal_(std::move(goal)), t0_(t0), duration_(duration) {
    if (!(duration >= 0.0)) {
        throw std::invalid_argument("trajectory duration must be non-negative");
    }
}

DesiredSample DesiredTrajectory::at(double t) const {
    DesiredSample out;
    const Eigen::Vector2d delta = goal_ - start_;
    if (duration_ <= 0.0 || t >= t0_ + duration_) {
        out.theta = goal_;
        return out;
    }
    if (t <= t0_) {
        out.theta = start_;
        return out;
    }
    const double tau = (t - t0_) / duration_;
    const double tau2 = tau * tau;
    const double tau3 = tau2 * tau;
    // s = 10 tau^3 - 15 tau^4 + 6 tau^5
    const double s = tau3 * (10.0 - 15.0 * tau + 6.0 * tau2);
    const double ds = 30.0 * tau2 * (1.0 - 2.0 * tau + tau2) / duration_;
    const double dds = 60.0 * tau * (1.0 - 3.0 * tau + 2.0 * tau2) / (duration_ * duration_);
    out.theta = start_ + s * delta;
    out.theta_dot = ds * delta;
    out.theta_ddot = dds * delta;
    return out;
}

Eigen::Matrix<double, 2, 3> regressor(const ArmState& state, const Eigen::Vector2d& theta_r_dot,
                                      const Eigen::Vector2d& theta_r_ddot) {
    const double c2 = std::cos(state.theta(1));
    const double s2 = std::sin(state.theta(1));
    const double w1 = state.theta_dot(0);
    const double w2 = state.theta_dot(1);
    const double v1 = theta_r_dot(0);
    const double v2 = theta_r_dot(1);
    const double a1 = theta_r_ddot(0);
    const double a2 = theta_r_ddot(1);

    Eigen::Matrix<double, 2, 3> y;
    y(0, 0) = a1;
    y(0, 1) = a2;
    y(0, 2) = c2 * (2.0 * a1 + a2) - s2 * (w2 * v1 + (w1 + w2) * v2);
    y(1, 0) = 0.0;
    y(1, 1) = a1 + a2;
    y(1, 2) = c2 * a1 + s2 * w1 * v1;
    return y;
}

ReferenceOutput reference_control(const AdaptGains& gains, const DesiredSample& desired,
                                  const ArmState& state, const EstimatorState& est) {
    const Eigen::Vector2d err = state.theta - desired.theta;
    const Eigen::Vector2d err_dot = state.theta_dot - desired.theta_dot;
    const Eigen::Vector2d theta_r_dot = desired.theta_dot - gains.lambda * err;
    const Eigen::Vector2d theta_r_ddot = desired.theta_ddot - gains.lambda * err_dot;

    ReferenceOutput out;
    out.s = state.theta_dot - theta_r_dot;
    out.y = regressor(state, theta_r_dot, theta_r_ddot);
    out.u_r = out.y * est.xi_hat.vec() - gains.k_d * out.s;
    return out;
}

EstimatorState update_estimate(const AdaptGains& gains, const EstimatorState& est,
                               const Eigen::Matrix<double, 2, 3>& y, const Eigen::Vector2d& s,
                               double dt, AdaptationLaw law) {
    EstimatorState next = est;
    if (law == AdaptationLaw::kFrozen) {
        next.xi_hat_dot = {};
        return next;
    }
    const double sign = law == AdaptationLaw::kSlotineLi ? -1.0 : 1.0;
    const Eigen::Vector3d rate = sign * gains.gamma.inverse() * (y.transpose() * s);
    const Eigen::Vector3d raw = est.xi_hat.vec() + dt * rate;
    const Eigen::Vector3d lo = est.interval.lo.vec();
    const Eigen::Vector3d hi = est.interval.hi.vec();

    Eigen::Vector3d clamped = raw;
    Eigen::Vector3d applied = rate;
    for (int i = 0; i < 3; ++i) {
        if (raw(i) < lo(i) || raw(i) > hi(i)) {
            clamped(i) = std::clamp(raw(i), lo(i), hi(i));
            applied(i) = 0.0;
        }
    }
    next.xi_hat = XiVector::from(clamped);
    next.xi_hat_dot = XiVector::from(applied);
    return next;
}

IkResult inverse_kinematics(const PhysicalParams& phys, const Eigen::Vector2d& goal,
                            double elbow_sign) {
    const double r_min = std::abs(phys.l1 - phys.l2);
    const double r_max = phys.l1 + phys.l2;
    IkResult out;
    Eigen::Vector2d target = goal;
    double r = target.norm();
    if (r > r_max || r < r_min) {
        out.clipped = true;
        const double r_clip = std::clamp(r, r_min, r_max);
        target = r > 0.0 ? Eigen::Vector2d(target * (r_clip / r)) : Eigen::Vector2d(r_clip, 0.0);
        r = r_clip;
    }
    const double c2 = std::clamp(
        (r * r - phys.l1 * phys.l1 - phys.l2 * phys.l2) / (2.0 * phys.l1 * phys.l2), -1.0, 1.0);
    const double q2 = (elbow_sign < 0.0 ? -1.0 : 1.0) * std::acos(c2);
    const double q1 = std::atan2(target(1), target(0)) -
                      std::atan2(phys.l2 * std::sin(q2), phys.l1 + phys.l2 * std::cos(q2));
    out.theta = {q1, q2};
    return out;
}

DesiredTrajectory make_trajectory(const PhysicalParams& phys, const ArmState& state,
                                  const Eigen::Vector2d& goal, double duration) {
    const double elbow_sign = std::sin(state.theta(1)) < 0.0 ? -1.0 : 1.0;
    const IkResult ik = inverse_kinematics(phys, goal, elbow_sign);
    Eigen::Vector2d target = ik.theta;
    target(0) = wrap_near(target(0), state.theta(0));
    target(1) = wrap_near(target(1), state.theta(1));
    // A goal at the current tip reproduces the current angles up to rounding;
    // snap so the trajectory is exactly constant.
    if ((target - state.theta).cwiseAbs().maxCoeff() < 1e-9) {
        target = state.theta;
    }
    DesiredTrajectory traj(state.theta, target, state.t, duration);
    traj.clipped = ik.clipped;
    return traj;
}

double quintic_duration(const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                        double max_joint_speed, double min_duration) {
    // Peak speed of the quintic blend is 15/8 of the mean speed.
    const double span = (to - from).cwiseAbs().maxCoeff();
    return std::max(min_duration, 1.875 * span / max_joint_speed);
}

}  // namespace rssa
