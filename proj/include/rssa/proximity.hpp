// Closest-point geometry between the two arm links and a point obstacle.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rssa/arm_dynamics.hpp"

namespace rssa {

struct ObstacleObservation {
    Eigen::Vector2d pos{Eigen::Vector2d::Zero()};
    Eigen::Vector2d vel{Eigen::Vector2d::Zero()};
    Eigen::Vector2d pos_true{Eigen::Vector2d::Zero()};
};

struct ClosestPoint {
    Eigen::Vector2d point{Eigen::Vector2d::Zero()};
    int link{1};
    double arclength{0.0};
    double d{0.0};
};

struct ProximityReport {
    double d{0.0};
    double d_dot{0.0};
    /// Unit vector from the arm point toward the obstacle.
    Eigen::Vector2d delta{1.0, 0.0};
    int closest_link{1};
    double arclength{0.0};
    Eigen::Vector2d point{Eigen::Vector2d::Zero()};
    Eigen::Matrix2d jac{Eigen::Matrix2d::Zero()};
    bool collision{false};
};

/// Minimum of the two point-to-segment distances. When both links are equally
/// close (the elbow), link 2 wins.
ClosestPoint closest_point(const PhysicalParams& phys, const Eigen::Vector2d& theta,
                           const Eigen::Vector2d& obstacle_pos);

/// Position of the point at `arclength` along `link` (1 or 2).
Eigen::Vector2d link_point(const PhysicalParams& phys, const Eigen::Vector2d& theta, int link,
                           double arclength);

/// d(point)/d(theta) for a point frozen at (link, arclength).
Eigen::Matrix2d point_jacobian(const PhysicalParams& phys, const Eigen::Vector2d& theta, int link,
                               double arclength);

/// d, d_dot = delta . (v_obstacle - J theta_dot), with the closest point
/// frozen at its (link, arclength) for the tick. On contact (d == 0) the
/// report is flagged and delta falls back to `last_delta`.
ProximityReport proximity_report(const PhysicalParams& phys, const ArmState& state,
                                 const ObstacleObservation& obstacle,
                                 const Eigen::Vector2d& last_delta = Eigen::Vector2d{1.0, 0.0});

/// Streaming noisy cursor sensor: uniform noise in [-b, b]^2 on the position,
/// velocity from an exponentially smoothed finite difference. With b = 0 the
/// smoothing is bypassed and the velocity is the exact finite difference.
class ObstacleEstimator {
public:
    ObstacleEstimator(double noise_bound, std::uint64_t seed, double dt, double smoothing = 0.5);

    ObstacleObservation observe(const Eigen::Vector2d& pos_true);

    double noise_bound() const { return noise_bound_; }

private:
    double noise_bound_;
    double dt_;
    double smoothing_;
    std::mt19937_64 rng_;
    std::optional<Eigen::Vector2d> last_pos_;
    Eigen::Vector2d vel_{Eigen::Vector2d::Zero()};
};

/// Batch form of ObstacleEstimator over a sampled true track.
std::vector<ObstacleObservation> estimate_obstacle(std::span<const Eigen::Vector2d> true_pos,
                                                   double noise_bound, std::uint64_t seed,
                                                   double dt, double smoothing = 0.5);

}  // namespace rssa
