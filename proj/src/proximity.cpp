#include "rssa/proximity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rssa {

namespace {

struct SegmentHit {
    Eigen::Vector2d point;
    double arclength;
    double d;
};

SegmentHit closest_on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double length,
                              const Eigen::Vector2d& q) {
    const Eigen::Vector2d ab = b - a;
    const double frac = std::clamp((q - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    SegmentHit hit;
    hit.point = a + frac * ab;
    hit.arclength = frac * length;
    hit.d = (q - hit.point).norm();
    return hit;
}

}  // namespace

ClosestPoint closest_point(const PhysicalParams& phys, const Eigen::Vector2d& theta,
                           const Eigen::Vector2d& obstacle_pos) {
    const ArmPoints pts = forward_kinematics(phys, theta);
    const SegmentHit h1 = closest_on_segment(Eigen::Vector2d::Zero(), pts.elbow, phys.l1, obstacle_pos);
    const SegmentHit h2 = closest_on_segment(pts.elbow, pts.tip, phys.l2, obstacle_pos);
    if (h2.d <= h1.d) {
        return {h2.point, 2, h2.arclength, h2.d};
    }
    return {h1.point, 1, h1.arclength, h1.d};
}

Eigen::Vector2d link_point(const PhysicalParams& phys, const Eigen::Vector2d& theta, int link,
                           double arclength) {
    const Eigen::Vector2d dir1{std::cos(theta(0)), std::sin(theta(0))};
    if (link == 1) {
        return arclength * dir1;
    }
    const double q12 = theta(0) + theta(1);
    return phys.l1 * dir1 + arclength * Eigen::Vector2d{std::cos(q12), std::sin(q12)};
}

Eigen::Matrix2d point_jacobian(const PhysicalParams& phys, const Eigen::Vector2d& theta, int link,
                               double arclength) {
    const double s1 = std::sin(theta(0));
    const double c1 = std::cos(theta(0));
    Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
    if (link == 1) {
        j(0, 0) = -arclength * s1;
        j(1, 0) = arclength * c1;
        return j;
    }
    if (link != 2) {
        throw std::invalid_argument("point_jacobian: link must be 1 or 2");
    }
    const double s12 = std::sin(theta(0) + theta(1));
    const double c12 = std::cos(theta(0) + theta(1));
    j << -phys.l1 * s1 - arclength * s12, -arclength * s12,
          phys.l1 * c1 + arclength * c12,  arclength * c12;
    return j;
}

ProximityReport proximity_report(const PhysicalParams& phys, const ArmState& state,
                                 const ObstacleObservation& obstacle,
                                 const Eigen::Vector2d& last_delta) {
    const ClosestPoint cp = closest_point(phys, state.theta, obstacle.pos);
    ProximityReport r;
    r.d = cp.d;
    r.closest_link = cp.link;
    r.arclength = cp.arclength;
    r.point = cp.point;
    r.jac = point_jacobian(phys, state.theta, cp.link, cp.arclength);
    if (cp.d > 0.0) {
        r.delta = (obstacle.pos - cp.point) / cp.d;
    } else {
        r.collision = true;
        r.delta = last_delta;
    }
    r.d_dot = r.delta.dot(obstacle.vel - r.jac * state.theta_dot);
    return r;
}

ObstacleEstimator::ObstacleEstimator(double noise_bound, std::uint64_t seed, double dt,
                                     double smoothing)
    : noise_bound_(noise_bound), dt_(dt), smoothing_(smoothing), rng_(seed) {
    if (noise_bound < 0.0) {
        throw std::invalid_argument("noise bound must be non-negative");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive");
    }
    if (!(smoothing > 0.0 && smoothing <= 1.0)) {
        throw std::invalid_argument("smoothing must lie in (0, 1]");
    }
}

ObstacleObservation ObstacleEstimator::observe(const Eigen::Vector2d& pos_true) {
    ObstacleObservation obs;
    obs.pos_true = pos_true;
    obs.pos = pos_true;
    if (noise_bound_ > 0.0) {
        // Draw from the raw engine so the stream is identical across standard libraries.
        for (int i = 0; i < 2; ++i) {
            const double u = std::ldexp(static_cast<double>(rng_() >> 11), -53);
            obs.pos(i) += noise_bound_ * (2.0 * u - 1.0);
        }
    }
    if (last_pos_) {
        const Eigen::Vector2d raw = (obs.pos - *last_pos_) / dt_;
        vel_ = noise_bound_ > 0.0 ? Eigen::Vector2d(smoothing_ * raw + (1.0 - smoothing_) * vel_)
                                  : raw;
    }
    last_pos_ = obs.pos;
    obs.vel = vel_;
    return obs;
}

std::vector<ObstacleObservation> estimate_obstacle(std::span<const Eigen::Vector2d> true_pos,
                                                   double noise_bound, std::uint64_t seed,
                                                   double dt, double smoothing) {
    ObstacleEstimator est(noise_bound, seed, dt, smoothing);
    std::vector<ObstacleObservation> out;
    out.reserve(true_pos.size());
    for (const auto& p : true_pos) {
        out.push_back(est.observe(p));
    }
    return out;
}

}  // namespace rssa
