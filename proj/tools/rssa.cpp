#include <algorithm>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "rssa/batch.hpp"
#include "rssa/safe_control.hpp"
#include "rssa/scenario.hpp"
#include "rssa/trial.hpp"
#include "rssa/ws_server.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<int> steps;

    void apply(rssa::Scenario& sc) const {
        if (seed) sc.seed = *seed;
        if (dt) sc.dt = *dt;
        if (steps) sc.max_steps = *steps;
        sc.validate();
    }
};

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

int cmd_run(const std::string& scenario_path, const std::string& method, const std::string& out,
            const std::string& log_out, const Overrides& ov) {
    rssa::Scenario sc = rssa::load_scenario(scenario_path);
    ov.apply(sc);
    const rssa::TrialRecord rec = rssa::run_trial(sc, rssa::parse_method(method));
    const rssa::BatchRow rows[] = {rssa::batch_row(rec)};
    write_text(out, rssa::metrics_csv(rows));
    if (!log_out.empty()) {
        write_text(log_out, rssa::trial_log_csv(rec));
    }
    if (rec.aborted) {
        std::cerr << "trial aborted: " << rec.diagnostic << '\n';
        return 2;
    }
    return 0;
}

int cmd_batch(const std::string& dir, const std::string& out, std::vector<std::string> methods,
              unsigned threads, const Overrides& ov) {
    std::vector<rssa::Scenario> scenarios = rssa::load_scenario_dir(dir);
    for (auto& sc : scenarios) {
        ov.apply(sc);
    }
    std::vector<rssa::MethodId> ids;
    if (methods.empty()) {
        ids = rssa::all_methods();
    } else {
        for (const auto& m : methods) ids.push_back(rssa::parse_method(m));
    }
    const auto rows = rssa::run_batch(scenarios, ids, threads);
    write_text(out, rssa::metrics_csv(rows));
    int failures = 0;
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            std::cerr << r.trial << ' ' << rssa::to_string(r.method) << ": " << r.error << '\n';
            ++failures;
        }
    }
    return failures == 0 ? 0 : 2;
}

// Sweeps joint angles and obstacle positions over the reachable workspace at
// rest and reports the alpha/beta certificates of the parameter family.
int cmd_check_feasibility(const std::string& scenario_path, int angle_steps, int obstacle_steps,
                          const Overrides& ov) {
    rssa::Scenario sc = rssa::load_scenario(scenario_path);
    ov.apply(sc);
    const rssa::PhysicalParams& phys = sc.phys;
    const rssa::XiInterval box = rssa::xi_interval(phys);
    const rssa::FamilyGrid grid = rssa::build_family(box, sc.family_resolution);
    const double reach = phys.l1 + phys.l2;
    const double pi = std::numbers::pi;

    long total = 0;
    long feasible = 0;
    long near_total = 0;
    long near_feasible = 0;
    long base_contacts = 0;
    double min_alpha = std::numeric_limits<double>::infinity();
    double min_beta = std::numeric_limits<double>::infinity();
    Eigen::Vector2d worst_theta{0, 0};
    Eigen::Vector2d worst_obs{0, 0};
    for (int i = 0; i < angle_steps; ++i) {
        for (int j = 0; j < angle_steps; ++j) {
            rssa::ArmState st;
            st.theta = {-pi + 2 * pi * i / angle_steps, -pi + 2 * pi * j / angle_steps};
            for (int a = 0; a < obstacle_steps; ++a) {
                for (int b = 0; b < obstacle_steps; ++b) {
                    const Eigen::Vector2d p{-reach + 2 * reach * (a + 0.5) / obstacle_steps,
                                                  -reach + 2 * reach * (b + 0.5) / obstacle_steps};
                    rssa::ObstacleObservation obs;
                    obs.pos = obs.pos_true = p;
                    const rssa::ProximityReport prox = rssa::proximity_report(phys, st, obs);
                    if (prox.collision) continue;
                    std::vector<rssa::LieSample> lie;
                    lie.reserve(grid.samples.size());
                    for (const auto& xi : grid.samples) {
                        lie.push_back(rssa::lie_derivatives(sc.safety, phys, st, prox, obs.vel, xi));
                    }
                    const rssa::FeasibilityCert cert = rssa::feasibility(lie);
                    ++total;
                    feasible += cert.feasible ? 1 : 0;
                    base_contacts += cert.beta == 0.0 ? 1 : 0;
                    if (prox.d <= 2.0 * sc.safety.d_min) {
                        ++near_total;
                        near_feasible += cert.feasible ? 1 : 0;
                    }
                    if (cert.alpha < min_alpha) {
                        min_alpha = cert.alpha;
                        worst_theta = st.theta;
                        worst_obs = p;
                    }
                    min_beta = std::min(min_beta, cert.beta);
                }
            }
        }
    }
    std::printf("samples: %ld (family size %zu)\n", total, grid.samples.size());
    std::printf("feasible fraction: %.6f\n", total ? static_cast<double>(feasible) / total : 0.0);
    std::printf("feasible fraction with d <= 2 d_min: %.6f (%ld samples)\n",
                near_total ? static_cast<double>(near_feasible) / near_total : 0.0, near_total);
    std::printf("samples with a zero control gradient: %ld\n", base_contacts);
    std::printf("min alpha: %.9g at theta=(%.4f, %.4f) obstacle=(%.4f, %.4f)\n", min_alpha,
                worst_theta(0), worst_theta(1), worst_obs(0), worst_obs(1));
    std::printf("min beta: %.9g\n", min_beta);
    return feasible == total ? 0 : 1;
}

rssa::WsServer* g_server = nullptr;

int cmd_serve(const std::string& scenario_path, unsigned short port, const std::string& address,
              const std::string& record_dir, const Overrides& ov) {
    rssa::Scenario sc = rssa::load_scenario(scenario_path);
    ov.apply(sc);
    rssa::ServeOptions opts;
    opts.address = address;
    opts.port = port;
    if (!record_dir.empty()) opts.record_dir = record_dir;
    rssa::WsServer server(sc, opts);
    g_server = &server;
    std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
    std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
    std::cerr << "serving ws://" << address << ':' << server.port() << '\n';
    server.run();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust safe control simulation harness"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides ov;
    std::uint64_t seed = 0;
    double dt = 0.0;
    int steps = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Override the scenario seed");
    auto* dt_opt = app.add_option("--dt", dt, "Override the control period [s]")->check(CLI::PositiveNumber);
    auto* steps_opt = app.add_option("--steps", steps, "Override the number of ticks")->check(CLI::PositiveNumber);
    for (auto* opt : {seed_opt, dt_opt, steps_opt}) opt->configurable(false);

    std::string scenario, method = "M4", out = "-", log_out, dir, address = "127.0.0.1", record_dir;
    std::vector<std::string> methods;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    int angle_steps = 24, obstacle_steps = 12;
    unsigned short port = 8765;

    auto* run = app.add_subcommand("run", "Run one trial and write its metrics row");
    run->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    run->add_option("--method", method, "NO_OBSTACLE or M0..M4");
    run->add_option("--out", out, "Metrics CSV ('-' for stdout)");
    run->add_option("--log", log_out, "Per-tick log CSV");

    auto* batch = app.add_subcommand("batch", "Run every scenario in a directory against every method");
    batch->add_option("--dir", dir)->required()->check(CLI::ExistingDirectory);
    batch->add_option("--out", out, "Metrics CSV ('-' for stdout)");
    batch->add_option("--methods", methods, "Subset of methods (default: all)");
    batch->add_option("--threads", threads)->check(CLI::PositiveNumber);

    auto* feas = app.add_subcommand("check-feasibility", "Report alpha/beta certificates over the workspace");
    feas->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    feas->add_option("--angle-steps", angle_steps)->check(CLI::PositiveNumber);
    feas->add_option("--obstacle-steps", obstacle_steps)->check(CLI::PositiveNumber);

    auto* serve = app.add_subcommand("serve", "Serve live sessions over websocket");
    serve->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    serve->add_option("--port", port);
    serve->add_option("--address", address);
    serve->add_option("--record-dir", record_dir, "Persist finished sessions here");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) ov.seed = seed;
    if (*dt_opt) ov.dt = dt;
    if (*steps_opt) ov.steps = steps;

    try {
        if (*run) return cmd_run(scenario, method, out, log_out, ov);
        if (*batch) return cmd_batch(dir, out, methods, threads, ov);
        if (*feas) return cmd_check_feasibility(scenario, angle_steps, obstacle_steps, ov);
        if (*serve) return cmd_serve(scenario, port, address, record_dir, ov);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
