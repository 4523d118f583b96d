#pragma once

#include <map>
#include <string>
#include <vector>

#include "spgp/dynamics.hpp"
#include "spgp/safety.hpp"
#include "spgp/spgp.hpp"

namespace spgp {

struct ScenarioLoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::string name;
    std::vector<AgentState> agents;
    std::vector<Obstacle> obstacles;
    SafetyParams safety{};
    SpgpParams spgp{};
    ControllerGains gains{};
    double dt = 0.05;
    int t_max = 2000;
    double eps_goal = 0.6;        // m, arrival tolerance
    bool resolve_same_step = false;  // re-solve the QP in the same step after a goal swap

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws std::invalid_argument on any invariant violation (overlapping agents or
/// agent/obstacle pairs at t=0, goals inside obstacles, bad parameters).
void validate(const ScenarioConfig& config);

/// Max agent count per built-in scenario.
int scenario_capacity(const std::string& name);

/// Deterministic construction of the built-in geometries. `overrides` replaces
/// named defaults (see docs/scenario_format.md); unknown keys are an error.
ScenarioConfig build_scenario(const std::string& name, int n_agents,
                              const std::map<std::string, double>& overrides = {});

/// Versioned JSON document; load(save(c)) == c exactly. Load is strict: every
/// field is required, unknown fields and unknown versions are errors, and the
/// result is validated.
std::string save_scenario(const ScenarioConfig& config);
ScenarioConfig load_scenario(const std::string& text);

}  // namespace spgp
