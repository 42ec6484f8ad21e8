#include "rssa/trial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rssa {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

MethodSpec MethodSpec::of(MethodId id) {
    switch (id) {
        case MethodId::kNoObstacle: return {id, GModel::kNone, IndexKind::kPhi};
        case MethodId::kM0: return {id, GModel::kFrozenEstimate, IndexKind::kPhi};
        case MethodId::kM1: return {id, GModel::kAdaptiveEstimate, IndexKind::kPhi};
        case MethodId::kM2: return {id, GModel::kAdaptiveEstimate, IndexKind::kPhiR};
        case MethodId::kM3: return {id, GModel::kFamilyGrid, IndexKind::kPhi};
        case MethodId::kM4: return {id, GModel::kFamilyGrid, IndexKind::kPhiR};
    }
    throw std::invalid_argument("unknown method");
}

std::string_view to_string(MethodId id) {
    switch (id) {
        case MethodId::kNoObstacle: return "NO_OBSTACLE";
        case MethodId::kM0: return "M0";
        case MethodId::kM1: return "M1";
        case MethodId::kM2: return "M2";
        case MethodId::kM3: return "M3";
        case MethodId::kM4: return "M4";
    }
    return "?";
}

MethodId parse_method(std::string_view text) {
    for (MethodId id : all_methods()) {
        if (text == to_string(id)) {
            return id;
        }
    }
    throw std::invalid_argument("unknown method '" + std::string(text) +
                                "' (expected NO_OBSTACLE or M0..M4)");
}

std::vector<MethodId> all_methods() {
    return {MethodId::kNoObstacle, MethodId::kM0, MethodId::kM1,
            MethodId::kM2,         MethodId::kM3, MethodId::kM4};
}

int violation_count(std::span<const double> d, double d_min) {
    int count = 0;
    bool inside = true;
    for (double v : d) {
        const bool now_inside = v >= d_min;
        if (inside && !now_inside) {
            ++count;
        }
        inside = now_inside;
    }
    return count;
}

TrialMetrics compute_metrics(std::span<const TickLog> log, double d_min) {
    TrialMetrics m;
    if (log.empty()) {
        return m;
    }
    std::vector<double> d;
    d.reserve(log.size());
    double sum = 0.0;
    double min_d = std::numeric_limits<double>::infinity();
    for (const auto& e : log) {
        d.push_back(e.d);
        sum += e.d;
        min_d = std::min(min_d, e.d);
        m.clipped_ticks += e.clipped ? 1 : 0;
        m.infeasible_ticks += e.mode == SafeMode::kInfeasibleFallback ? 1 : 0;
    }
    m.goals_reached = log.back().goals_reached;
    m.violations = violation_count(d, d_min);
    m.min_distance = min_d;
    m.avg_distance = sum / static_cast<double>(log.size());
    return m;
}

XiVector frozen_estimate(const Scenario& scenario) {
    const XiInterval box = xi_interval(scenario.phys);
    std::mt19937_64 rng(splitmix64(scenario.seed ^ 0x4d30ULL));
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) {
        const double u = std::ldexp(static_cast<double>(rng() >> 11), -53);
        v(i) = box.lo.vec()(i) + u * (box.hi.vec()(i) - box.lo.vec()(i));
    }
    return XiVector::from(v);
}

TrialRunner::TrialRunner(Scenario scenario, MethodId method)
    : scenario_(std::move(scenario)),
      method_(MethodSpec::of(method)),
      obstacle_(scenario_.noise_bound, scenario_.seed, scenario_.dt, scenario_.velocity_smoothing) {
    scenario_.validate();
    xi_true_ = xi_true(scenario_.phys);
    interval_ = xi_interval(scenario_.phys);
    grid_ = build_family(interval_, scenario_.family_resolution);
    state_ = scenario_.initial_state;
    state_.t = 0.0;
    est_.interval = interval_;
    est_.xi_hat = interval_.mid();
    law_ = AdaptationLaw::kSlotineLi;
    if (method_.g_model == GModel::kFrozenEstimate) {
        est_.xi_hat = frozen_estimate(scenario_);
        law_ = AdaptationLaw::kFrozen;
    }
    record_.trial = scenario_.name;
    record_.method = method;
    record_.log.reserve(static_cast<std::size_t>(scenario_.max_steps));
}

bool TrialRunner::done() const {
    return record_.aborted || ticks() >= scenario_.max_steps;
}

std::optional<Eigen::Vector2d> TrialRunner::current_goal() const {
    if (goal_ < scenario_.robot_goals.size()) {
        return scenario_.robot_goals[goal_];
    }
    return std::nullopt;
}

void TrialRunner::plan_segment() {
    if (const auto goal = current_goal()) {
        const DesiredTrajectory probe = make_trajectory(scenario_.phys, state_, *goal, 0.0);
        const double duration = quintic_duration(state_.theta, probe.goal(),
                                                 scenario_.max_joint_speed,
                                                 scenario_.min_segment_duration);
        traj_ = make_trajectory(scenario_.phys, state_, *goal, duration);
        record_.clipped_goals += traj_.clipped ? 1 : 0;
    } else if (!planned_) {
        traj_ = DesiredTrajectory(state_.theta, state_.theta, state_.t, 0.0);
    }
    planned_ = true;
}

const TickLog& TrialRunner::tick(const Eigen::Vector2d& cursor_true) {
    if (done()) {
        if (record_.log.empty()) {
            throw std::logic_error("tick on an empty aborted trial");
        }
        return record_.log.back();
    }
    const PhysicalParams& phys = scenario_.phys;
    const ObstacleObservation obs = obstacle_.observe(cursor_true);

    TickLog e;
    e.k = ticks();
    e.t = state_.t;
    e.theta = state_.theta;
    e.theta_dot = state_.theta_dot;
    e.cursor_true = cursor_true;
    e.cursor_obs = obs.pos;
    e.d = closest_point(phys, state_.theta, cursor_true).d;

    if (const auto goal = current_goal();
        goal && (forward_kinematics(phys, state_.theta).tip - *goal).norm() < scenario_.goal_radius) {
        ++goals_reached_;
        ++goal_;
        planned_ = planned_ && !current_goal();
    }
    if (!planned_) {
        plan_segment();
    }
    e.goals_reached = goals_reached_;

    try {
        const ReferenceOutput ref = reference_control(scenario_.gains, traj_.at(state_.t), state_, est_);
        est_ = update_estimate(scenario_.gains, est_, ref.y, ref.s, scenario_.dt, law_);
        e.u_r = ref.u_r;
        e.xi_hat = est_.xi_hat;

        const ProximityReport prox = proximity_report(phys, state_, obs, last_delta_);
        if (!prox.collision) {
            last_delta_ = prox.delta;
        }
        const bool penalty = method_.index == IndexKind::kPhiR;
        SafeDecision decision;
        decision.u = ref.u_r;
        if (method_.g_model == GModel::kFamilyGrid) {
            const SafetyEval ev = evaluate_safety(scenario_.safety, phys, state_, prox, obs.vel,
                                                  est_.xi_hat, est_.xi_hat_dot, interval_,
                                                  grid_.samples, penalty);
            e.phi = ev.phi;
            e.phi_alpha = ev.phi_alpha;
            decision = rssa_step(ev, ref.u_r);
        } else {
            const XiVector single[] = {est_.xi_hat};
            const SafetyEval ev = evaluate_safety(scenario_.safety, phys, state_, prox, obs.vel,
                                                  est_.xi_hat, est_.xi_hat_dot, interval_, single,
                                                  penalty);
            e.phi = ev.phi;
            e.phi_alpha = ev.phi_alpha;
            if (method_.g_model != GModel::kNone) {
                decision = baseline_step(ev, ref.u_r, scenario_.baseline_q);
            }
        }
        e.mode = decision.mode;
        e.u = decision.u;
        if (scenario_.clip_torque) {
            const Torque clipped = e.u.cwiseMax(-scenario_.tau_max).cwiseMin(scenario_.tau_max);
            e.clipped = clipped != e.u;
            e.u = clipped;
        }
        if (!e.u.allFinite()) {
            throw std::runtime_error("non-finite control at tick " + std::to_string(e.k));
        }
        state_ = step(xi_true_, state_, e.u, scenario_.dt);
    } catch (const std::exception& ex) {
        record_.aborted = true;
        record_.diagnostic = ex.what();
    }
    record_.log.push_back(e);
    return record_.log.back();
}

TrialRecord TrialRunner::finish() const {
    TrialRecord out = record_;
    out.metrics = compute_metrics(out.log, scenario_.safety.d_min);
    return out;
}

TrialRecord run_trial(const Scenario& scenario, MethodId method) {
    if (scenario.human_kind == HumanTrackKind::kLive) {
        throw std::invalid_argument("run_trial: live cursor tracks need a live session");
    }
    TrialRunner runner(scenario, method);
    const bool recorded = scenario.human_kind == HumanTrackKind::kRecorded;
    const Eigen::Vector2d parked = recorded ? scenario.recorded_track.front() : scenario.human.spawn;
    HumanScript script(scenario.human, scenario.dt);
    while (!runner.done()) {
        const auto k = static_cast<std::size_t>(runner.ticks());
        Eigen::Vector2d cursor = recorded ? scenario.recorded_track[k] : script.next();
        if (method == MethodId::kNoObstacle) {
            cursor = parked;
        }
        runner.tick(cursor);
    }
    return runner.finish();
}

std::string trial_log_csv(const TrialRecord& record) {
    std::ostringstream out;
    out << "k,t,theta1,theta2,theta_dot1,theta_dot2,cursor_x,cursor_y,cursor_obs_x,cursor_obs_y,"
           "u_r1,u_r2,u1,u2,mode,d,phi,phi_alpha,xi1_hat,xi2_hat,xi3_hat,clipped,goals\n";
    for (const auto& e : record.log) {
        out << e.k << ',' << fmt(e.t) << ',' << fmt(e.theta(0)) << ',' << fmt(e.theta(1)) << ','
            << fmt(e.theta_dot(0)) << ',' << fmt(e.theta_dot(1)) << ',' << fmt(e.cursor_true(0))
            << ',' << fmt(e.cursor_true(1)) << ',' << fmt(e.cursor_obs(0)) << ','
            << fmt(e.cursor_obs(1)) << ',' << fmt(e.u_r(0)) << ',' << fmt(e.u_r(1)) << ','
            << fmt(e.u(0)) << ',' << fmt(e.u(1)) << ',' << to_string(e.mode) << ',' << fmt(e.d)
            << ',' << fmt(e.phi) << ',' << fmt(e.phi_alpha) << ',' << fmt(e.xi_hat.xi1) << ','
            << fmt(e.xi_hat.xi2) << ',' << fmt(e.xi_hat.xi3) << ',' << (e.clipped ? 1 : 0) << ','
            << e.goals_reached << '\n';
    }
    return out.str();
}

}  // namespace rssa
