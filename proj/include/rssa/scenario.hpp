// Scenario description shared by batch trials and live sessions.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rssa/adaptive_ctrl.hpp"
#include "rssa/arm_dynamics.hpp"
#include "rssa/safety_index.hpp"

namespace rssa {

enum class HumanTrackKind { kScripted, kRecorded, kLive };

/// Cursor that chases its goals with critically damped pursuit:
///   a = w^2 (goal - p) - 2 w v, |v| <= max_speed.
/// A goal counts as reached inside `goal_radius`; after the last goal the
/// cursor settles on it.
struct ScriptedHuman {
    Eigen::Vector2d spawn{0.45, 0.45};
    std::vector<Eigen::Vector2d> goals;
    double omega{4.0};
    double max_speed{0.25};
    double goal_radius{0.03};
};

struct Scenario {
    std::string name{"scenario"};
    std::uint64_t seed{1};
    double dt{0.01};
    int max_steps{1000};

    std::vector<Eigen::Vector2d> robot_goals;
    double goal_radius{0.05};
    double max_joint_speed{1.5};
    double min_segment_duration{0.3};

    HumanTrackKind human_kind{HumanTrackKind::kScripted};
    ScriptedHuman human;
    std::vector<Eigen::Vector2d> recorded_track;
    double noise_bound{0.01};
    double velocity_smoothing{0.5};

    ArmState initial_state;
    PhysicalParams phys;
    SafetyConfig safety;
    AdaptGains gains;
    double tau_max{20.0};
    bool clip_torque{true};
    int family_resolution{3};
    Eigen::Matrix2d baseline_q{Eigen::Matrix2d::Identity()};

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

/// Paper-default arm, safety and gain settings with no goals.
Scenario default_scenario();

/// Parses the scenario JSON schema (see README). Missing fields take the
/// defaults of default_scenario(); the safety weight defaults to the
/// midpoint-normalized diagonal. Throws std::invalid_argument.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

std::string scenario_to_json(const Scenario& scenario);

/// All *.json scenarios in `dir`, ordered by file name.
std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir);

/// Stateful scripted cursor.
class HumanScript {
public:
    HumanScript(const ScriptedHuman& cfg, double dt);

    /// Current position, then advance one tick.
    Eigen::Vector2d next();

    std::size_t goal_index() const { return goal_; }

private:
    ScriptedHuman cfg_;
    double dt_;
    Eigen::Vector2d pos_;
    Eigen::Vector2d vel_{Eigen::Vector2d::Zero()};
    std::size_t goal_{0};
};

}  // namespace rssa
