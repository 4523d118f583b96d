#pragma once

#include <cstdint>
#include <utility>

#include "spgp/metrics.hpp"
#include "spgp/qp.hpp"
#include "spgp/rng.hpp"
#include "spgp/scenario.hpp"

namespace spgp {

struct SimOptions {
    bool perturbation_enabled = true;  // false: plain safety-barrier baseline
    int qp_facets = 16;
};

/// The per-step closed loop: nominal controls -> constraint assembly -> QP filter ->
/// perturbation update -> integration -> logging. One instance per trial; strictly
/// sequential; owns its rng and solver.
class Simulation {
public:
    Simulation(ScenarioConfig config, std::uint64_t seed, SimOptions options = {});

    bool done() const;
    void tick();
    void run_to_completion();

    int step() const { return step_; }
    const TrajectoryLog& log() const { return log_; }
    const ScenarioConfig& config() const { return config_; }
    const std::vector<AgentState>& agents() const { return agents_; }
    const std::vector<AgentMode>& modes() const { return modes_; }

private:
    void append_record(const std::vector<Vec2>& controls, const std::vector<Vec2>& nominals);
    bool all_arrived() const;

    ScenarioConfig config_;
    SimOptions options_;
    std::vector<AgentState> agents_;
    std::vector<AgentMode> modes_;
    Rng rng_;
    QpSolver solver_;
    TrajectoryLog log_;
    int step_ = 0;
};

/// Run one seeded trial to completion. Deterministic for fixed (config, seed, options).
std::pair<TrajectoryLog, TrialResult> run(const ScenarioConfig& config, std::uint64_t seed,
                                          const SimOptions& options = {});

}  // namespace spgp
