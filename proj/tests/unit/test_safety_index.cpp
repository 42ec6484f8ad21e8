#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rssa/safe_control.hpp"
#include "rssa/safety_index.hpp"

using namespace rssa;

namespace {

ProximityReport report(double d, double d_dot) {
    ProximityReport r;
    r.d = d;
    r.d_dot = d_dot;
    return r;
}

struct FdCase {
    ArmState state;
    Eigen::Vector2d obs_pos;
    Eigen::Vector2d obs_vel;
    Torque tau;
};

double phi_at(const SafetyConfig& cfg, const PhysicalParams& p, const ArmState& s,
              const Eigen::Vector2d& pos, const Eigen::Vector2d& vel, ProximityReport* out = nullptr) {
    ObstacleObservation o;
    o.pos = o.pos_true = pos;
    o.vel = vel;
    const ProximityReport r = proximity_report(p, s, o);
    if (out) *out = r;
    return phi(cfg, r);
}

bool same_feature(const PhysicalParams& p, const ProximityReport& a, const ProximityReport& b) {
    const auto kind = [&](const ProximityReport& r) {
        const double len = r.closest_link == 1 ? p.l1 : p.l2;
        return r.arclength <= 0.0 ? 0 : (r.arclength >= len ? 2 : 1);
    };
    return a.closest_link == b.closest_link && kind(a) == kind(b);
}

// Returns |analytic - fd| / max(|fd|, floor), or a negative value when the
// sample straddles a closest-feature switch or sits too close to contact.
double fd_mismatch(const SafetyConfig& cfg, const PhysicalParams& p, const XiVector& xi,
                   const FdCase& c) {
    const double h = 1e-6;
    ProximityReport r0, r1;
    const double phi_now = phi_at(cfg, p, c.state, c.obs_pos, c.obs_vel, &r0);
    if (r0.d < 0.03) return -1.0;
    const ArmState next = step(xi, c.state, c.tau, h);
    const double phi_next = phi_at(cfg, p, next, c.obs_pos + h * c.obs_vel, c.obs_vel, &r1);
    ProximityReport r2;
    const ArmState next2 = step(xi, c.state, c.tau, 2 * h);
    const double phi_next2 = phi_at(cfg, p, next2, c.obs_pos + 2 * h * c.obs_vel, c.obs_vel, &r2);
    if (!same_feature(p, r0, r1) || !same_feature(p, r0, r2)) return -1.0;
    // second-order one-sided difference
    const double fd = (4 * phi_next - phi_next2 - 3 * phi_now) / (2 * h);
    const LieSample lie = lie_derivatives(cfg, p, c.state, r0, c.obs_vel, xi);
    const double analytic = lie.lf + lie.lg.dot(c.tau);
    return std::abs(analytic - fd) / std::max(std::abs(fd), 1e-2);
}

FdCase random_case(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(-M_PI, M_PI), pos(-0.6, 0.6), vel(-1.0, 1.0),
        torque(-20.0, 20.0);
    FdCase c;
    c.state.theta = {ang(rng), ang(rng)};
    c.state.theta_dot = {vel(rng), vel(rng)};
    c.obs_pos = {pos(rng), pos(rng)};
    c.obs_vel = {vel(rng), vel(rng)};
    c.tau = {torque(rng), torque(rng)};
    return c;
}

}  // namespace

TEST(Phi, Examples) {
    const SafetyConfig cfg;
    EXPECT_NEAR(phi(cfg, report(0.1, 0.0)), 0.0125, 1e-15);
    EXPECT_NEAR(phi(cfg, report(0.15, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(phi(cfg, report(0.3, 1.0)), -0.0775, 1e-15);
    EXPECT_NEAR(phi0(cfg, report(0.3, 1.0)), -0.0675, 1e-15);
}

TEST(PhiAlpha, Examples) {
    SafetyConfig cfg;
    const XiInterval box = xi_interval(PhysicalParams{});
    EXPECT_EQ(phi_alpha(cfg, box.mid(), box), 0.0);
    cfg.xi_weight = Eigen::Vector3d(3.0, 5.0, 7.0).asDiagonal();
    const XiVector off = XiVector::from(box.mid().vec() - Eigen::Vector3d(1, 0, 0));
    EXPECT_NEAR(phi_alpha(cfg, off, box), 20.0 * 3.0, 1e-12);
    cfg.k_xi = 0.0;
    EXPECT_EQ(phi_alpha(cfg, off, box), 0.0);
}

TEST(PhiAlpha, NonNegativeAndScalesWithGain) {
    SafetyConfig cfg;
    const XiInterval box = xi_interval(PhysicalParams{});
    cfg.xi_weight = SafetyConfig::normalized_weight(box);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const XiVector xi{n(rng), n(rng), n(rng)};
        const double base = phi_alpha(cfg, xi, box);
        ASSERT_GE(base, 0.0);
        SafetyConfig scaled = cfg;
        const double c = std::abs(n(rng)) * 3;
        scaled.k_xi = c * cfg.k_xi;
        ASSERT_NEAR(phi_alpha(scaled, xi, box), c * base, 1e-12 * (1 + c * base));
    }
}

TEST(PhiAlpha, NormalizedWeightIsInverseSquaredMidpoint) {
    const XiInterval box = xi_interval(PhysicalParams{});
    const Eigen::Matrix3d w = SafetyConfig::normalized_weight(box);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(w(i, i) * box.mid().vec()(i) * box.mid().vec()(i), 1.0, 1e-14);
    }
    EXPECT_EQ(w(0, 1), 0.0);
}

TEST(PhiAlphaDot, Examples) {
    const SafetyConfig cfg;
    const XiInterval box = xi_interval(PhysicalParams{});
    EXPECT_EQ(phi_alpha_dot(cfg, XiVector{1.7, 0.3, 0.4}, XiVector{}, box), 0.0);
    EXPECT_EQ(phi_alpha_dot(cfg, box.mid(), XiVector{1, 2, 3}, box), 0.0);
}

TEST(PhiAlphaDot, MatchesFiniteDifferenceAlongEstimatorPath) {
    SafetyConfig cfg;
    const XiInterval box = xi_interval(PhysicalParams{});
    cfg.xi_weight = SafetyConfig::normalized_weight(box);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector3d x0 = box.lo.vec() + (box.hi.vec() - box.lo.vec()).cwiseProduct(
                                                      Eigen::Vector3d(u(rng), u(rng), u(rng)).cwiseAbs());
        const Eigen::Vector3d rate(u(rng), u(rng), u(rng));
        const double h = 1e-7;
        const double fd = (phi_alpha(cfg, XiVector::from(x0 + h * rate), box) -
                           phi_alpha(cfg, XiVector::from(x0 - h * rate), box)) /
                          (2 * h);
        const double an = phi_alpha_dot(cfg, XiVector::from(x0), XiVector::from(rate), box);
        EXPECT_NEAR(an, fd, 1e-6 * std::max(std::abs(fd), 1e-3));
    }
}

TEST(EtaT, Examples) {
    const SafetyConfig cfg;
    EXPECT_EQ(eta_t(cfg, -0.01, 0.5), kEtaInactive);
    EXPECT_FALSE(eta_active(eta_t(cfg, -0.01, 0.5)));
    EXPECT_DOUBLE_EQ(eta_t(cfg, 0.0, 0.0), 0.1);
    EXPECT_NEAR(eta_t(cfg, 0.2, 0.3), 0.4, 1e-15);
}

TEST(LieDerivatives, ZeroRateGainRemovesControl) {
    SafetyConfig cfg;
    cfg.k1 = 0.0;  // validate() would reject this; the formula still applies
    const PhysicalParams p;
    ArmState s;
    s.theta = {0.2, 0.5};
    s.theta_dot = {0.3, -0.2};
    ObstacleObservation o;
    o.pos = o.pos_true = {0.2, 0.35};
    const ProximityReport r = proximity_report(p, s, o);
    EXPECT_EQ(lie_derivatives(cfg, p, s, r, o.vel, xi_true(p)).lg, Eigen::Vector2d::Zero());
}

TEST(LieDerivatives, StaticSceneHasZeroDrift) {
    const SafetyConfig cfg;
    const PhysicalParams p;
    ArmState s;
    s.theta = {0.2, 0.5};
    ObstacleObservation o;
    o.pos = o.pos_true = {0.2, 0.35};
    const ProximityReport r = proximity_report(p, s, o);
    const LieSample lie = lie_derivatives(cfg, p, s, r, o.vel, xi_true(p));
    EXPECT_EQ(lie.lf, 0.0);
    EXPECT_GT(lie.lg.norm(), 0.0);
}

TEST(LieDerivatives, ContactThrows) {
    const PhysicalParams p;
    ObstacleObservation o;
    o.pos = o.pos_true = {0.1, 0.0};
    const ProximityReport r = proximity_report(p, ArmState{}, o);
    EXPECT_THROW(lie_derivatives(SafetyConfig{}, p, ArmState{}, r, o.vel, xi_true(p)),
                 std::domain_error);
}

// Obstacle gliding parallel to a resting link keeps d constant.
TEST(LieDerivatives, ParallelGlideHasNoCurvature) {
    const SafetyConfig cfg;
    const PhysicalParams p;
    ObstacleObservation o;
    o.pos = o.pos_true = {0.1, 0.2};
    o.vel = {0.5, 0.0};
    const ProximityReport r = proximity_report(p, ArmState{}, o);
    ASSERT_EQ(r.closest_link, 1);
    EXPECT_NEAR(lie_derivatives(cfg, p, ArmState{}, r, o.vel, xi_true(p)).lf, 0.0, 1e-9);
}

TEST(LieDerivatives, MatchesFiniteDifferenceOfSimulatedPhi) {
    const SafetyConfig cfg;
    const PhysicalParams p;
    const XiVector xi = xi_true(p);
    std::mt19937_64 rng(12);
    int checked = 0;
    double worst = 0.0;
    while (checked < 2000) {
        const double m = fd_mismatch(cfg, p, xi, random_case(rng));
        if (m < 0) continue;
        worst = std::max(worst, m);
        ++checked;
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(LieDerivatives, MatchesFiniteDifferenceOnEveryGridMember) {
    const SafetyConfig cfg;
    const PhysicalParams p;
    const FamilyGrid grid = build_family(xi_interval(p), 3);
    ASSERT_EQ(grid.samples.size(), 27u);
    std::mt19937_64 rng(13);
    for (const XiVector& xi : grid.samples) {
        int checked = 0;
        while (checked < 100) {
            const double m = fd_mismatch(cfg, p, xi, random_case(rng));
            if (m < 0) continue;
            ASSERT_LT(m, 1e-3);
            ++checked;
        }
    }
}

TEST(EvaluateSafety, PlainIndexIgnoresPenalty) {
    SafetyConfig cfg;
    const PhysicalParams p;
    const XiInterval box = xi_interval(p);
    cfg.xi_weight = SafetyConfig::normalized_weight(box);
    ArmState s;
    s.theta = {0.2, 0.5};
    ObstacleObservation o;
    o.pos = o.pos_true = {0.2, 0.35};
    const ProximityReport r = proximity_report(p, s, o);
    const FamilyGrid grid = build_family(box, 3);
    const XiVector xi_hat = box.lo;
    const SafetyEval plain = evaluate_safety(cfg, p, s, r, o.vel, xi_hat, XiVector{1, 1, 1}, box,
                                             grid.samples, false);
    const SafetyEval robust = evaluate_safety(cfg, p, s, r, o.vel, xi_hat, XiVector{1, 1, 1}, box,
                                              grid.samples, true);
    EXPECT_EQ(plain.phi_alpha, 0.0);
    EXPECT_EQ(plain.phi_r(), plain.phi);
    EXPECT_GT(robust.phi_alpha, 0.0);
    EXPECT_EQ(robust.phi_r(), robust.phi + robust.phi_alpha);
    EXPECT_EQ(robust.phi, plain.phi);
    EXPECT_EQ(robust.lie.size(), 27u);
    EXPECT_EQ(robust.eta_t, eta_t(cfg, robust.phi_r(), robust.phi_alpha_dot));
}

TEST(EvaluateSafety, InactiveExactlyWhenRobustIndexNegative) {
    const SafetyConfig cfg;
    const PhysicalParams p;
    const XiInterval box = xi_interval(p);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(-0.6, 0.6);
    for (int i = 0; i < 500; ++i) {
        ObstacleObservation o;
        o.pos = o.pos_true = {pos(rng), pos(rng)};
        const ProximityReport r = proximity_report(p, ArmState{}, o);
        const SafetyEval ev = evaluate_safety(cfg, p, ArmState{}, r, o.vel, box.lo, XiVector{}, box,
                                              {}, true);
        ASSERT_EQ(ev.eta_t == kEtaInactive, ev.phi_r() < 0.0);
    }
}

TEST(SafetyConfig, Validation) {
    SafetyConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.xi_weight(0, 1) = 5.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = SafetyConfig{};
    cfg.xi_weight(2, 2) = -1.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = SafetyConfig{};
    cfg.d_min = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
