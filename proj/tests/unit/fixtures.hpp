#pragma once

#include "rssa/scenario.hpp"

namespace rssa::testing {

// Short interactive scene: the cursor crosses the robot's path between goals.
inline Scenario small_scenario(int steps = 300) {
    Scenario s = default_scenario();
    s.name = "unit";
    s.seed = 5;
    s.max_steps = steps;
    s.initial_state.theta = {0.3, 1.2};
    s.robot_goals = {{0.35, 0.15}, {0.1, 0.4}, {-0.25, 0.3}, {0.3, 0.25}};
    s.human.spawn = {0.45, 0.45};
    s.human.goals = {{0.3, 0.3}, {0.05, 0.45}, {0.45, 0.45}};
    return s;
}

}  // namespace rssa::testing
