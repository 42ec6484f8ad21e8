#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rssa/arm_dynamics.hpp"
#include "rssa/batch.hpp"
#include "rssa/proximity.hpp"
#include "rssa/safe_control.hpp"
#include "rssa/safety_index.hpp"
#include "rssa/scenario.hpp"
#include "rssa/trial.hpp"

namespace py = pybind11;
using namespace rssa;

namespace {

std::vector<LieSample> to_lie(const std::vector<std::pair<double, Eigen::Vector2d>>& rows) {
    std::vector<LieSample> out;
    out.reserve(rows.size());
    for (const auto& [lf, lg] : rows) out.push_back({lf, lg});
    return out;
}

py::dict metrics_dict(const TrialRecord& rec) {
    py::dict d;
    d["trial"] = rec.trial;
    d["method"] = std::string(to_string(rec.method));
    d["GOAL"] = rec.metrics.goals_reached;
    d["VIOL"] = rec.metrics.violations;
    d["DIST"] = rec.metrics.min_distance;
    d["AVG_DIST"] = rec.metrics.avg_distance;
    d["clipped_ticks"] = rec.metrics.clipped_ticks;
    d["infeasible_ticks"] = rec.metrics.infeasible_ticks;
    d["ticks"] = rec.log.size();
    d["aborted"] = rec.aborted;
    d["diagnostic"] = rec.diagnostic;
    std::vector<double> dist;
    dist.reserve(rec.log.size());
    for (const auto& e : rec.log) dist.push_back(e.d);
    d["d"] = dist;
    return d;
}

PhysicalParams default_phys() { return PhysicalParams{}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Robust safe control for a two-link arm";

    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

    m.def(
        "xi_from_masses",
        [](double m1, double m2, double l1, double l2) {
            PhysicalParams p;
            p.l1 = l1;
            p.l2 = l2;
            const XiVector xi = xi_from_masses(p, m1, m2);
            return py::make_tuple(xi.xi1, xi.xi2, xi.xi3);
        },
        py::arg("m1"), py::arg("m2"), py::arg("l1") = 0.25, py::arg("l2") = 0.27);

    m.def(
        "xi_interval",
        [] {
            const XiInterval box = xi_interval(default_phys());
            return py::make_tuple(box.lo.vec(), box.hi.vec());
        },
        "Parameter box of the default arm as (lo, hi).");

    m.def(
        "mass_matrix",
        [](const Eigen::Vector3d& xi, double theta2) { return mass_matrix(XiVector::from(xi), theta2); },
        py::arg("xi"), py::arg("theta2"));

    m.def(
        "closest_point",
        [](const Eigen::Vector2d& theta, const Eigen::Vector2d& obstacle) {
            const ClosestPoint cp = closest_point(default_phys(), theta, obstacle);
            py::dict d;
            d["point"] = cp.point;
            d["link"] = cp.link;
            d["arclength"] = cp.arclength;
            d["d"] = cp.d;
            return d;
        },
        py::arg("theta"), py::arg("obstacle"));

    m.def(
        "phi",
        [](double d, double d_dot, double d_min, double k1) {
            return d_min * d_min - d * d - k1 * d_dot;
        },
        py::arg("d"), py::arg("d_dot"), py::arg("d_min") = 0.15, py::arg("k1") = 0.01,
        "d_min^2 - d^2 - k1 d_dot");

    m.def(
        "feasibility",
        [](const std::vector<std::pair<double, Eigen::Vector2d>>& lie) {
            const auto rows = to_lie(lie);
            const FeasibilityCert c = feasibility(rows);
            return py::make_tuple(c.alpha, c.beta, c.feasible);
        },
        py::arg("lie"), "(alpha, beta, feasible) for a list of (lf, lg) pairs.");

    m.def(
        "solve_g_star",
        [](const std::vector<std::pair<double, Eigen::Vector2d>>& lie) {
            const auto rows = to_lie(lie);
            const GStar g = solve_g_star(rows);
            return py::make_tuple(g.index, g.alpha_star);
        },
        py::arg("lie"));

    m.def(
        "rssa_control",
        [](const std::vector<std::pair<double, Eigen::Vector2d>>& lie, double eta) {
            const auto rows = to_lie(lie);
            return Eigen::Vector2d(rssa_control(rows, eta));
        },
        py::arg("lie"), py::arg("eta"));

    m.def(
        "baseline_safe_control",
        [](const Eigen::Vector2d& u_r, double lf, const Eigen::Vector2d& lg, double eta,
           const Eigen::Matrix2d& q) {
            return Eigen::Vector2d(baseline_safe_control(u_r, lf, lg, eta, q).u);
        },
        py::arg("u_r"), py::arg("lf"), py::arg("lg"), py::arg("eta"),
        py::arg("Q") = Eigen::Matrix2d::Identity().eval());

    m.def("methods", [] {
        std::vector<std::string> out;
        for (MethodId id : all_methods()) out.emplace_back(to_string(id));
        return out;
    });

    m.def(
        "default_scenario_json", [] { return scenario_to_json(default_scenario()); },
        "Scenario JSON with every field at its default.");

    m.def(
        "run_trial",
        [](const std::string& scenario_json, const std::string& method) {
            const Scenario sc = parse_scenario(scenario_json);
            const MethodId id = parse_method(method);
            TrialRecord rec;
            {
                py::gil_scoped_release release;
                rec = run_trial(sc, id);
            }
            return metrics_dict(rec);
        },
        py::arg("scenario_json"), py::arg("method"),
        "Runs one trial; returns its metrics and the true distance series.");

    m.def(
        "batch_csv",
        [](const std::vector<std::string>& scenario_jsons, const std::vector<std::string>& methods) {
            std::vector<Scenario> scs;
            for (const auto& s : scenario_jsons) scs.push_back(parse_scenario(s));
            std::vector<MethodId> ids;
            for (const auto& s : methods) ids.push_back(parse_method(s));
            py::gil_scoped_release release;
            return metrics_csv(run_batch(scs, ids));
        },
        py::arg("scenario_jsons"), py::arg("methods"));
}
