#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spgp/harness.hpp"
#include "spgp/log.hpp"
#include "spgp/metrics.hpp"
#include "spgp/qp.hpp"
#include "spgp/scenario.hpp"
#include "spgp/simulator.hpp"

namespace py = pybind11;
using namespace spgp;

namespace {

Vec2 to_vec(const std::pair<double, double>& p) { return {p.first, p.second}; }
std::pair<double, double> from_vec(const Vec2& v) { return {v.x, v.y}; }

std::vector<Vec2> to_vecs(const std::vector<std::pair<double, double>>& ps) {
    std::vector<Vec2> out;
    out.reserve(ps.size());
    for (const auto& p : ps) out.push_back(to_vec(p));
    return out;
}

}  // namespace

PYBIND11_MODULE(spgp_sim, m) {
    m.doc() = "Safety-barrier multi-agent navigation with strategic pseudo-goal perturbation";

    py::class_<AgentState>(m, "AgentState")
        .def(py::init<>())
        .def_readwrite("id", &AgentState::id)
        .def_property(
            "position", [](const AgentState& a) { return from_vec(a.position); },
            [](AgentState& a, std::pair<double, double> p) { a.position = to_vec(p); })
        .def_property(
            "velocity", [](const AgentState& a) { return from_vec(a.velocity); },
            [](AgentState& a, std::pair<double, double> p) { a.velocity = to_vec(p); })
        .def_property(
            "goal", [](const AgentState& a) { return from_vec(a.goal); },
            [](AgentState& a, std::pair<double, double> p) { a.goal = to_vec(p); })
        .def_readwrite("safety_radius", &AgentState::safety_radius)
        .def_readwrite("accel_limit", &AgentState::accel_limit);

    py::class_<ControllerGains>(m, "ControllerGains")
        .def(py::init<>())
        .def_readwrite("kp", &ControllerGains::kp)
        .def_readwrite("kd", &ControllerGains::kd);

    py::class_<SpgpParams>(m, "SpgpParams")
        .def(py::init<>())
        .def_readwrite("delta", &SpgpParams::delta)
        .def_readwrite("u_t", &SpgpParams::u_t)
        .def_readwrite("window", &SpgpParams::window)
        .def_readwrite("candidates", &SpgpParams::candidates)
        .def_readwrite("eps_pg", &SpgpParams::eps_pg)
        .def_readwrite("independent_xy", &SpgpParams::independent_xy)
        .def_readwrite("perturb_timeout_steps", &SpgpParams::perturb_timeout_steps);

    py::class_<SafetyParams>(m, "SafetyParams")
        .def(py::init<>())
        .def_readwrite("gamma", &SafetyParams::gamma)
        .def_readwrite("margin", &SafetyParams::margin)
        .def_readwrite("obstacle_activation_dist", &SafetyParams::obstacle_activation_dist);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readwrite("name", &ScenarioConfig::name)
        .def_readwrite("agents", &ScenarioConfig::agents)
        .def_readwrite("safety", &ScenarioConfig::safety)
        .def_readwrite("spgp", &ScenarioConfig::spgp)
        .def_readwrite("gains", &ScenarioConfig::gains)
        .def_readwrite("dt", &ScenarioConfig::dt)
        .def_readwrite("t_max", &ScenarioConfig::t_max)
        .def_readwrite("eps_goal", &ScenarioConfig::eps_goal);

    py::class_<TrialResult>(m, "TrialResult")
        .def_readonly("success", &TrialResult::success)
        .def_readonly("collision", &TrialResult::collision)
        .def_readonly("makespan", &TrialResult::makespan)
        .def_readonly("avg_delta_v", &TrialResult::avg_delta_v)
        .def_readonly("path_deviation", &TrialResult::path_deviation)
        .def_readonly("deadlock_count", &TrialResult::deadlock_count)
        .def_readonly("qp_infeasible_count", &TrialResult::qp_infeasible_count)
        .def_readonly("min_pairwise_h", &TrialResult::min_pairwise_h);

    py::class_<MeanStd>(m, "MeanStd")
        .def_readonly("mean", &MeanStd::mean)
        .def_readonly("std", &MeanStd::stddev);

    py::class_<ExperimentSummary>(m, "ExperimentSummary")
        .def_readonly("scenario", &ExperimentSummary::scenario)
        .def_readonly("n_agents", &ExperimentSummary::n_agents)
        .def_readonly("trials", &ExperimentSummary::trials)
        .def_readonly("sr", &ExperimentSummary::sr)
        .def_readonly("avg_delta_v", &ExperimentSummary::delta_v)
        .def_readonly("path_deviation", &ExperimentSummary::path_deviation)
        .def_readonly("makespan", &ExperimentSummary::makespan)
        .def_readonly("min_pairwise_h", &ExperimentSummary::min_pairwise_h);

    m.def("clamp_to_ball",
          [](std::pair<double, double> u, double alpha) {
              return from_vec(clamp_to_ball(to_vec(u), alpha));
          },
          py::arg("u"), py::arg("alpha"));

    m.def("step_agent",
          [](const AgentState& s, std::pair<double, double> u, double dt) {
              return step_agent(s, to_vec(u), dt);
          },
          py::arg("state"), py::arg("u"), py::arg("dt"));
    m.def("nominal_control",
          [](const AgentState& s, const ControllerGains& g) {
              return from_vec(nominal_control(s, g));
          },
          py::arg("state"), py::arg("gains") = ControllerGains{});

    m.def("pairwise_h", &pairwise_h, py::arg("a"), py::arg("b"));

    m.def("hausdorff",
          [](const std::vector<std::pair<double, double>>& a,
             const std::vector<std::pair<double, double>>& b) {
              const auto va = to_vecs(a);
              const auto vb = to_vecs(b);
              return hausdorff(va, vb);
          },
          py::arg("a"), py::arg("b"));

    m.def("select_pseudo_goal",
          [](std::pair<double, double> p, const std::vector<std::pair<double, double>>& others,
             const SpgpParams& params, std::uint64_t seed) {
              Rng rng(seed);
              const auto vo = to_vecs(others);
              return from_vec(select_pseudo_goal(to_vec(p), vo, params, rng));
          },
          py::arg("p"), py::arg("others"), py::arg("params"), py::arg("seed"));

    m.def("build_scenario", &build_scenario, py::arg("name"), py::arg("n_agents"),
          py::arg("overrides") = std::map<std::string, double>{});
    m.def("save_scenario", &save_scenario, py::arg("config"));
    m.def("load_scenario", &load_scenario, py::arg("text"));

    m.def("run_trial",
          [](const ScenarioConfig& config, std::uint64_t seed, bool perturbation_enabled) {
              SimOptions options;
              options.perturbation_enabled = perturbation_enabled;
              auto [log, result] = run(config, seed, options);
              return std::make_pair(save_log(log), result);
          },
          py::arg("config"), py::arg("seed"), py::arg("perturbation_enabled") = true,
          py::call_guard<py::gil_scoped_release>(),
          "Runs one seeded trial; returns (log_json, TrialResult).");

    m.def("run_experiment",
          [](const ScenarioConfig& config, const std::string& method, int trials,
             std::uint64_t base_seed, int workers) {
              return run_experiment(config, method_from_string(method), trials, base_seed,
                                    workers);
          },
          py::arg("config"), py::arg("method"), py::arg("trials"), py::arg("base_seed"),
          py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());

    m.def("sweep_radius",
          [](const ScenarioConfig& config, const std::vector<double>& deltas, int trials,
             std::uint64_t base_seed, int workers) {
              const auto sweep = sweep_radius(config, deltas, trials, base_seed, workers);
              std::vector<std::pair<double, double>> out;
              for (const auto& p : sweep.points) out.emplace_back(p.delta, p.mean_makespan);
              return out;
          },
          py::arg("config"), py::arg("deltas"), py::arg("trials"), py::arg("base_seed"),
          py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>(),
          "Returns [(delta, mean_makespan), ...].");
}
