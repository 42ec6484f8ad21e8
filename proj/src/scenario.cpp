#include "rssa/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rssa {

using nlohmann::json;

namespace {

Eigen::Vector2d vec2(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument(std::string(what) + ": expected [x, y]");
    }
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

std::vector<Eigen::Vector2d> points(const json& j, const char* what) {
    if (!j.is_array()) {
        throw std::invalid_argument(std::string(what) + ": expected a list of [x, y]");
    }
    std::vector<Eigen::Vector2d> out;
    out.reserve(j.size());
    for (const auto& p : j) {
        out.push_back(vec2(p, what));
    }
    return out;
}

template <int N>
Eigen::Matrix<double, N, N> square(const json& j, const char* what) {
    Eigen::Matrix<double, N, N> m = Eigen::Matrix<double, N, N>::Zero();
    if (!j.is_array()) {
        throw std::invalid_argument(std::string(what) + ": expected a matrix or a diagonal");
    }
    if (j.size() == N && j.at(0).is_number()) {
        for (int i = 0; i < N; ++i) {
            m(i, i) = j.at(i).get<double>();
        }
        return m;
    }
    if (j.size() != N) {
        throw std::invalid_argument(std::string(what) + ": wrong dimension");
    }
    for (int r = 0; r < N; ++r) {
        if (!j.at(r).is_array() || j.at(r).size() != N) {
            throw std::invalid_argument(std::string(what) + ": wrong dimension");
        }
        for (int c = 0; c < N; ++c) {
            m(r, c) = j.at(r).at(c).get<double>();
        }
    }
    return m;
}

template <typename Derived>
json matrix_json(const Eigen::MatrixBase<Derived>& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(row);
    }
    return rows;
}

json points_json(const std::vector<Eigen::Vector2d>& pts) {
    json out = json::array();
    for (const auto& p : pts) {
        out.push_back({p(0), p(1)});
    }
    return out;
}

MassInterval mass_interval(const json& j, const char* what) {
    const Eigen::Vector2d v = vec2(j, what);
    return {v(0), v(1)};
}

HumanTrackKind track_kind(const std::string& s) {
    if (s == "scripted") return HumanTrackKind::kScripted;
    if (s == "recorded") return HumanTrackKind::kRecorded;
    if (s == "live") return HumanTrackKind::kLive;
    throw std::invalid_argument("human.track must be scripted, recorded or live");
}

const char* track_name(HumanTrackKind k) {
    switch (k) {
        case HumanTrackKind::kScripted: return "scripted";
        case HumanTrackKind::kRecorded: return "recorded";
        case HumanTrackKind::kLive: return "live";
    }
    return "scripted";
}

}  // namespace

void Scenario::validate() const {
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(goal_radius > 0.0)) throw std::invalid_argument("goal radius must be positive");
    if (!(tau_max > 0.0)) throw std::invalid_argument("tau_max must be positive");
    if (!(max_joint_speed > 0.0)) throw std::invalid_argument("max joint speed must be positive");
    if (noise_bound < 0.0) throw std::invalid_argument("noise bound must be non-negative");
    if (family_resolution < 2) throw std::invalid_argument("family resolution must be >= 2");
    if (human_kind == HumanTrackKind::kRecorded &&
        recorded_track.size() < static_cast<std::size_t>(max_steps)) {
        throw std::invalid_argument("recorded human track is shorter than max_steps");
    }
    if (!initial_state.finite()) throw std::invalid_argument("initial state must be finite");
    phys.validate();
    safety.validate();
    gains.validate();
    Eigen::LLT<Eigen::Matrix2d> llt(baseline_q);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("baseline Q must be positive definite");
    }
}

Scenario default_scenario() {
    Scenario s;
    s.safety.xi_weight = SafetyConfig::normalized_weight(xi_interval(s.phys));
    return s;
}

Scenario parse_scenario(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario JSON: ") + e.what());
    }
    Scenario s = default_scenario();
    try {
        s.name = j.value("name", s.name);
        s.seed = j.value("seed", s.seed);
        s.dt = j.value("dt_s", s.dt);
        s.max_steps = j.value("max_steps", s.max_steps);
        if (j.contains("robot_goals_m")) s.robot_goals = points(j["robot_goals_m"], "robot_goals_m");
        s.goal_radius = j.value("goal_radius_m", s.goal_radius);
        s.max_joint_speed = j.value("max_joint_speed_rad_s", s.max_joint_speed);
        s.min_segment_duration = j.value("min_segment_duration_s", s.min_segment_duration);
        s.noise_bound = j.value("noise_bound_m", s.noise_bound);
        s.velocity_smoothing = j.value("velocity_smoothing", s.velocity_smoothing);
        s.tau_max = j.value("tau_max_Nm", s.tau_max);
        s.clip_torque = j.value("clip_torque", s.clip_torque);
        s.family_resolution = j.value("family_resolution", s.family_resolution);
        if (j.contains("baseline_Q")) s.baseline_q = square<2>(j["baseline_Q"], "baseline_Q");

        if (j.contains("human")) {
            const json& h = j["human"];
            s.human_kind = track_kind(h.value("track", std::string("scripted")));
            if (h.contains("spawn_m")) s.human.spawn = vec2(h["spawn_m"], "human.spawn_m");
            if (h.contains("goals_m")) s.human.goals = points(h["goals_m"], "human.goals_m");
            s.human.omega = h.value("pursuit_omega_rad_s", s.human.omega);
            s.human.max_speed = h.value("max_speed_m_s", s.human.max_speed);
            s.human.goal_radius = h.value("goal_radius_m", s.human.goal_radius);
            if (h.contains("positions_m")) {
                s.recorded_track = points(h["positions_m"], "human.positions_m");
            }
        }
        if (j.contains("initial_state")) {
            const json& st = j["initial_state"];
            if (st.contains("theta_rad")) s.initial_state.theta = vec2(st["theta_rad"], "theta_rad");
            if (st.contains("theta_dot_rad_s")) {
                s.initial_state.theta_dot = vec2(st["theta_dot_rad_s"], "theta_dot_rad_s");
            }
        }
        if (j.contains("arm")) {
            const json& a = j["arm"];
            s.phys.l1 = a.value("l1_m", s.phys.l1);
            s.phys.l2 = a.value("l2_m", s.phys.l2);
            if (a.contains("m1_kg")) s.phys.m1 = mass_interval(a["m1_kg"], "arm.m1_kg");
            if (a.contains("m2_kg")) s.phys.m2 = mass_interval(a["m2_kg"], "arm.m2_kg");
            s.phys.m1_true = a.value("m1_true_kg", s.phys.m1.mid());
            s.phys.m2_true = a.value("m2_true_kg", s.phys.m2.mid());
        }
        s.phys.validate();
        s.safety.xi_weight = SafetyConfig::normalized_weight(xi_interval(s.phys));
        if (j.contains("safety")) {
            const json& c = j["safety"];
            s.safety.d_min = c.value("d_min_m", s.safety.d_min);
            s.safety.k1 = c.value("k1_s", s.safety.k1);
            s.safety.k_xi = c.value("k_xi", s.safety.k_xi);
            s.safety.eta0 = c.value("eta0", s.safety.eta0);
            if (c.contains("xi_weight")) s.safety.xi_weight = square<3>(c["xi_weight"], "xi_weight");
        }
        if (j.contains("gains")) {
            const json& g = j["gains"];
            if (g.contains("K_D")) s.gains.k_d = square<2>(g["K_D"], "K_D");
            if (g.contains("Lambda")) s.gains.lambda = square<2>(g["Lambda"], "Lambda");
            if (g.contains("Gamma")) s.gains.gamma = square<3>(g["Gamma"], "Gamma");
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario JSON: ") + e.what());
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open scenario file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    Scenario s = parse_scenario(buf.str());
    return s;
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["dt_s"] = s.dt;
    j["max_steps"] = s.max_steps;
    j["robot_goals_m"] = points_json(s.robot_goals);
    j["goal_radius_m"] = s.goal_radius;
    j["max_joint_speed_rad_s"] = s.max_joint_speed;
    j["min_segment_duration_s"] = s.min_segment_duration;
    j["noise_bound_m"] = s.noise_bound;
    j["velocity_smoothing"] = s.velocity_smoothing;
    j["tau_max_Nm"] = s.tau_max;
    j["clip_torque"] = s.clip_torque;
    j["family_resolution"] = s.family_resolution;
    j["baseline_Q"] = matrix_json(s.baseline_q);
    json h;
    h["track"] = track_name(s.human_kind);
    h["spawn_m"] = {s.human.spawn(0), s.human.spawn(1)};
    h["goals_m"] = points_json(s.human.goals);
    h["pursuit_omega_rad_s"] = s.human.omega;
    h["max_speed_m_s"] = s.human.max_speed;
    h["goal_radius_m"] = s.human.goal_radius;
    if (!s.recorded_track.empty()) h["positions_m"] = points_json(s.recorded_track);
    j["human"] = h;
    j["initial_state"] = {
        {"theta_rad", {s.initial_state.theta(0), s.initial_state.theta(1)}},
        {"theta_dot_rad_s", {s.initial_state.theta_dot(0), s.initial_state.theta_dot(1)}}};
    j["arm"] = {{"l1_m", s.phys.l1},
                {"l2_m", s.phys.l2},
                {"m1_kg", {s.phys.m1.lo, s.phys.m1.hi}},
                {"m2_kg", {s.phys.m2.lo, s.phys.m2.hi}},
                {"m1_true_kg", s.phys.m1_true},
                {"m2_true_kg", s.phys.m2_true}};
    j["safety"] = {{"d_min_m", s.safety.d_min},
                   {"k1_s", s.safety.k1},
                   {"k_xi", s.safety.k_xi},
                   {"eta0", s.safety.eta0},
                   {"xi_weight", matrix_json(s.safety.xi_weight)}};
    j["gains"] = {{"K_D", matrix_json(s.gains.k_d)},
                  {"Lambda", matrix_json(s.gains.lambda)},
                  {"Gamma", matrix_json(s.gains.gamma)}};
    return j.dump(2);
}

std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    out.reserve(files.size());
    for (const auto& f : files) {
        out.push_back(load_scenario(f));
    }
    return out;
}

HumanScript::HumanScript(const ScriptedHuman& cfg, double dt) : cfg_(cfg), dt_(dt), pos_(cfg.spawn) {}

Eigen::Vector2d HumanScript::next() {
    const Eigen::Vector2d out = pos_;
    if (goal_ < cfg_.goals.size()) {
        const Eigen::Vector2d& target = cfg_.goals[goal_];
        const Eigen::Vector2d acc =
            cfg_.omega * cfg_.omega * (target - pos_) - 2.0 * cfg_.omega * vel_;
        vel_ += dt_ * acc;
        const double speed = vel_.norm();
        if (speed > cfg_.max_speed) {
            vel_ *= cfg_.max_speed / speed;
        }
        pos_ += dt_ * vel_;
        if ((pos_ - target).norm() < cfg_.goal_radius && goal_ + 1 < cfg_.goals.size()) {
            ++goal_;
        }
    }
    return out;
}

}  // namespace rssa
