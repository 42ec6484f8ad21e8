#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "rssa/trial.hpp"
#include "unit/fixtures.hpp"

using namespace rssa;
using rssa::testing::small_scenario;

TEST(ViolationCount, Examples) {
    EXPECT_EQ(violation_count(std::vector<double>{0.2, 0.14, 0.16}, 0.15), 1);
    EXPECT_EQ(violation_count(std::vector<double>{0.2, 0.3, 0.15}, 0.15), 0);
    EXPECT_EQ(violation_count(std::vector<double>{0.14, 0.13, 0.12}, 0.15), 1);
    EXPECT_EQ(violation_count(std::vector<double>{0.2, 0.1, 0.2, 0.1, 0.1, 0.3}, 0.15), 2);
    EXPECT_EQ(violation_count(std::vector<double>{}, 0.15), 0);
}

TEST(Methods, MappingAndNames) {
    EXPECT_EQ(MethodSpec::of(MethodId::kM0).g_model, GModel::kFrozenEstimate);
    EXPECT_EQ(MethodSpec::of(MethodId::kM1).index, IndexKind::kPhi);
    EXPECT_EQ(MethodSpec::of(MethodId::kM2).index, IndexKind::kPhiR);
    EXPECT_EQ(MethodSpec::of(MethodId::kM2).g_model, GModel::kAdaptiveEstimate);
    EXPECT_EQ(MethodSpec::of(MethodId::kM3).g_model, GModel::kFamilyGrid);
    EXPECT_EQ(MethodSpec::of(MethodId::kM3).index, IndexKind::kPhi);
    EXPECT_EQ(MethodSpec::of(MethodId::kM4).index, IndexKind::kPhiR);
    EXPECT_EQ(MethodSpec::of(MethodId::kNoObstacle).g_model, GModel::kNone);
    for (MethodId id : all_methods()) EXPECT_EQ(parse_method(to_string(id)), id);
    EXPECT_THROW(parse_method("M5"), std::invalid_argument);
    EXPECT_EQ(all_methods().size(), 6u);
}

TEST(FrozenEstimate, InsideIntervalAndSeeded) {
    Scenario s = small_scenario();
    const XiInterval box = xi_interval(s.phys);
    const XiVector a = frozen_estimate(s);
    EXPECT_TRUE(box.contains(a));
    EXPECT_EQ(a, frozen_estimate(s));
    s.seed = 6;
    EXPECT_NE(a, frozen_estimate(s));
}

TEST(RunTrial, NoObstacleNeverOverrides) {
    const TrialRecord r = run_trial(small_scenario(600), MethodId::kNoObstacle);
    ASSERT_FALSE(r.aborted) << r.diagnostic;
    EXPECT_GT(r.metrics.goals_reached, 0);
    for (const auto& e : r.log) {
        ASSERT_EQ(e.mode, SafeMode::kReferencePassed);
        if (!e.clipped) ASSERT_EQ(e.u, e.u_r);
        ASSERT_EQ(e.cursor_true, small_scenario().human.spawn);
    }
}

TEST(RunTrial, BitwiseDeterministic) {
    for (MethodId id : all_methods()) {
        const TrialRecord a = run_trial(small_scenario(), id);
        const TrialRecord b = run_trial(small_scenario(), id);
        EXPECT_EQ(trial_log_csv(a), trial_log_csv(b)) << to_string(id);
        EXPECT_EQ(a.metrics, b.metrics);
    }
}

TEST(RunTrial, MetricsMatchTheLog) {
    const Scenario sc = small_scenario();
    for (MethodId id : all_methods()) {
        const TrialRecord r = run_trial(sc, id);
        ASSERT_EQ(r.log.size(), static_cast<std::size_t>(sc.max_steps));
        std::vector<double> d;
        int clipped = 0, infeasible = 0;
        for (const auto& e : r.log) {
            d.push_back(e.d);
            clipped += e.clipped;
            infeasible += e.mode == SafeMode::kInfeasibleFallback;
        }
        EXPECT_EQ(r.metrics.min_distance, *std::min_element(d.begin(), d.end()));
        EXPECT_EQ(r.metrics.avg_distance,
                  std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size()));
        EXPECT_EQ(r.metrics.violations, violation_count(d, sc.safety.d_min));
        EXPECT_EQ(r.metrics.goals_reached, r.log.back().goals_reached);
        EXPECT_EQ(r.metrics.clipped_ticks, clipped);
        EXPECT_EQ(r.metrics.infeasible_ticks, infeasible);
        EXPECT_EQ(compute_metrics(r.log, sc.safety.d_min), r.metrics);
    }
}

TEST(RunTrial, RobustMethodsOnlyUseRobustModes) {
    const TrialRecord r = run_trial(small_scenario(), MethodId::kM4);
    bool overrode = false;
    for (const auto& e : r.log) {
        ASSERT_NE(e.mode, SafeMode::kBaselineOverride);
        overrode = overrode || e.mode == SafeMode::kRssaOverride;
        ASSERT_LE(e.u.cwiseAbs().maxCoeff(), 20.0);
        ASSERT_TRUE(xi_interval(PhysicalParams{}).contains(e.xi_hat));
    }
    EXPECT_TRUE(overrode);
    const TrialRecord m1 = run_trial(small_scenario(), MethodId::kM1);
    for (const auto& e : m1.log) ASSERT_NE(e.mode, SafeMode::kRssaOverride);
}

TEST(RunTrial, PlainIndexMethodsHaveNoPenalty) {
    for (MethodId id : {MethodId::kM1, MethodId::kM3}) {
        for (const auto& e : run_trial(small_scenario(), id).log) ASSERT_EQ(e.phi_alpha, 0.0);
    }
}

TEST(RunTrial, FrozenMethodKeepsItsEstimate) {
    const Scenario sc = small_scenario();
    const XiVector frozen = frozen_estimate(sc);
    for (const auto& e : run_trial(sc, MethodId::kM0).log) ASSERT_EQ(e.xi_hat, frozen);
}

TEST(RunTrial, RecordedTrackIsFollowed) {
    Scenario sc = small_scenario(100);
    sc.human_kind = HumanTrackKind::kRecorded;
    for (int k = 0; k < 100; ++k) sc.recorded_track.emplace_back(0.4 - 0.002 * k, 0.3);
    const TrialRecord r = run_trial(sc, MethodId::kM3);
    for (int k = 0; k < 100; ++k) ASSERT_EQ(r.log[k].cursor_true, sc.recorded_track[k]);
}

TEST(RunTrial, LiveScenarioIsRejected) {
    Scenario sc = small_scenario();
    sc.human_kind = HumanTrackKind::kLive;
    EXPECT_THROW(run_trial(sc, MethodId::kM4), std::invalid_argument);
}

TEST(RunTrial, BlowUpAbortsWithDiagnostic) {
    Scenario sc = small_scenario(200);
    sc.clip_torque = false;
    sc.gains.k_d = 1e200 * Eigen::Matrix2d::Identity();
    const TrialRecord r = run_trial(sc, MethodId::kNoObstacle);
    EXPECT_TRUE(r.aborted);
    EXPECT_FALSE(r.diagnostic.empty());
    EXPECT_LT(r.log.size(), 200u);
}

TEST(TrialRunner, ExhaustedRunnerIsANoOp) {
    TrialRunner runner(small_scenario(3), MethodId::kM4);
    for (int i = 0; i < 3; ++i) runner.tick({0.45, 0.45});
    EXPECT_TRUE(runner.done());
    const int k = runner.tick({0.0, 0.0}).k;
    EXPECT_EQ(k, 2);
    EXPECT_EQ(runner.ticks(), 3);
}

TEST(TrialLogCsv, HeaderAndRows) {
    const TrialRecord r = run_trial(small_scenario(5), MethodId::kM2);
    const std::string csv = trial_log_csv(r);
    EXPECT_EQ(csv.rfind("k,t,theta1", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}
