// Closed-loop trial execution for the compared safe-control methods.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rssa/adaptive_ctrl.hpp"
#include "rssa/proximity.hpp"
#include "rssa/safe_control.hpp"
#include "rssa/scenario.hpp"

namespace rssa {

enum class MethodId { kNoObstacle, kM0, kM1, kM2, kM3, kM4 };

/// How the safety filter sees the control effectiveness.
enum class GModel {
    kNone,              ///< no filter (obstacle-free reference run)
    kFrozenEstimate,    ///< single model, estimate held at a random constant
    kAdaptiveEstimate,  ///< single model from the adaptive estimate
    kFamilyGrid,        ///< robust filter over the discretized family
};

enum class IndexKind { kPhi, kPhiR };

struct MethodSpec {
    MethodId id{MethodId::kM4};
    GModel g_model{GModel::kFamilyGrid};
    IndexKind index{IndexKind::kPhiR};

    static MethodSpec of(MethodId id);
};

std::string_view to_string(MethodId id);
/// Accepts "M0".."M4" and "NO_OBSTACLE". Throws std::invalid_argument.
MethodId parse_method(std::string_view text);
std::vector<MethodId> all_methods();

struct TickLog {
    int k{0};
    double t{0.0};
    Eigen::Vector2d theta{Eigen::Vector2d::Zero()};
    Eigen::Vector2d theta_dot{Eigen::Vector2d::Zero()};
    Eigen::Vector2d cursor_true{Eigen::Vector2d::Zero()};
    Eigen::Vector2d cursor_obs{Eigen::Vector2d::Zero()};
    Torque u_r{Torque::Zero()};
    Torque u{Torque::Zero()};
    SafeMode mode{SafeMode::kReferencePassed};
    /// Ground-truth distance at the start of the tick.
    double d{0.0};
    double phi{0.0};
    double phi_alpha{0.0};
    XiVector xi_hat;
    bool clipped{false};
    int goals_reached{0};
};

struct TrialMetrics {
    int goals_reached{0};
    int violations{0};
    double min_distance{0.0};
    double avg_distance{0.0};
    int clipped_ticks{0};
    int infeasible_ticks{0};

    friend bool operator==(const TrialMetrics&, const TrialMetrics&) = default;
};

struct TrialRecord {
    std::string trial;
    MethodId method{MethodId::kM4};
    std::vector<TickLog> log;
    TrialMetrics metrics;
    int clipped_goals{0};
    bool aborted{false};
    std::string diagnostic;
};

/// Down-crossings of d_min; a series that starts below counts once.
int violation_count(std::span<const double> d, double d_min);

TrialMetrics compute_metrics(std::span<const TickLog> log, double d_min);

/// One trial advanced tick by tick. The cursor's true position is supplied
/// by the caller, which lets scripted, recorded and live cursors share the
/// same loop.
class TrialRunner {
public:
    TrialRunner(Scenario scenario, MethodId method);

    /// Runs one control tick against the cursor position for this tick.
    /// Returns the tick's log entry; after an abort or max_steps it is a no-op
    /// returning the last entry.
    const TickLog& tick(const Eigen::Vector2d& cursor_true);

    bool done() const;
    int ticks() const { return static_cast<int>(record_.log.size()); }
    const ArmState& state() const { return state_; }
    const EstimatorState& estimator() const { return est_; }
    const Scenario& scenario() const { return scenario_; }
    MethodSpec method() const { return method_; }
    std::size_t goal_index() const { return goal_; }
    std::optional<Eigen::Vector2d> current_goal() const;

    /// Finalizes metrics and returns the record.
    TrialRecord finish() const;

private:
    void plan_segment();

    Scenario scenario_;
    MethodSpec method_;
    XiVector xi_true_;
    XiInterval interval_;
    FamilyGrid grid_;
    ObstacleEstimator obstacle_;
    ArmState state_;
    EstimatorState est_;
    AdaptationLaw law_;
    DesiredTrajectory traj_;
    bool planned_{false};
    std::size_t goal_{0};
    int goals_reached_{0};
    Eigen::Vector2d last_delta_{1.0, 0.0};
    TrialRecord record_;
};

/// The frozen estimate used by M0: uniform over the parameter box, drawn from
/// the scenario seed.
XiVector frozen_estimate(const Scenario& scenario);

/// Full trial with the scenario's scripted or recorded cursor. Trials with a
/// live cursor must go through LiveSession instead (std::invalid_argument).
TrialRecord run_trial(const Scenario& scenario, MethodId method);

/// Per-tick log as CSV.
std::string trial_log_csv(const TrialRecord& record);

}  // namespace rssa
