#pragma once

#include <span>
#include <vector>

#include "spgp/log.hpp"
#include "spgp/scenario.hpp"

namespace spgp {

struct TrialResult {
    bool success = false;
    bool collision = false;
    std::vector<int> makespan;           // per agent, steps; t_max+1 when never arrived
    std::vector<double> avg_delta_v;     // per agent, m/s
    std::vector<double> path_deviation;  // per agent, m (Hausdorff vs nominal)
    int deadlock_count = 0;
    int qp_infeasible_count = 0;
    double min_pairwise_h = 0.0;  // over all steps and pairs
};

/// True iff every agent ends within eps_goal of its original goal and no step shows
/// a pairwise separation violation (or a degenerate-geometry abort).
bool success(const TrajectoryLog& log, double eps_goal);

/// Mean over consecutive records of |v(t+1) - v(t)| for one agent. Needs >= 2 records.
double avg_delta_v(const TrajectoryLog& log, std::size_t agent_index);

/// Exact double-loop Hausdorff distance between two non-empty point sequences.
double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b);

/// Positions of the agent simulated alone (no other agents, no obstacles, no safety
/// filter) under nominal_control, until within eps_goal of the goal or t_max steps.
std::vector<Vec2> nominal_trajectory(const AgentState& initial, const ControllerGains& gains,
                                     double dt, int t_max, double eps_goal);

/// First record index at which the agent is within eps_goal of its original goal,
/// or log.t_max + 1 when that never happens.
int makespan(const TrajectoryLog& log, std::size_t agent_index, double eps_goal);

/// Full per-trial metrics; config supplies the initial states and gains for the
/// nominal baselines.
TrialResult trial_result(const TrajectoryLog& log, const ScenarioConfig& config);

}  // namespace spgp
