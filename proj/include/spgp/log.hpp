#pragma once

#include <string>
#include <vector>

#include "spgp/safety.hpp"
#include "spgp/spgp.hpp"
#include "spgp/vec2.hpp"

namespace spgp {

struct SimEvent {
    enum class Type {
        DeadlockDetected,
        PerturbStarted,
        PerturbArrived,
        PerturbTimeout,
        PerturbSkipped,
        QpInfeasible,
        Collision,
        DegenerateGeometry,
    };
    int step = 0;
    Type type = Type::DeadlockDetected;
    int agent = -1;  // agent index, -1 for whole-system events
    Vec2 point{};
};

std::string to_string(SimEvent::Type type);

struct StepRecord {
    double time = 0.0;
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;
    std::vector<Vec2> controls;  // u applied over the step ending at this record
    std::vector<Vec2> nominals;  // u_hat used for that step
    std::vector<AgentMode::Mode> modes;
    double min_pairwise_h = 0.0;
    double min_obstacle_h = 0.0;
};

/// Per-trial record of everything the metrics need. steps[0] is the initial state
/// (zero controls); one record is appended per tick.
struct TrajectoryLog {
    double dt = 0.05;
    int t_max = 0;
    double eps_goal = 0.0;
    std::vector<int> agent_ids;
    std::vector<Vec2> original_goals;
    std::vector<Obstacle> obstacles;  // copy, so a dumped log renders standalone
    std::vector<StepRecord> steps;
    std::vector<SimEvent> events;
    bool aborted_degenerate = false;

    std::size_t agent_count() const { return agent_ids.size(); }
    /// Position sequence of one agent across all records.
    std::vector<Vec2> positions_of(std::size_t agent_index) const;
};

/// Versioned JSON document for dumping/rendering logs.
std::string save_log(const TrajectoryLog& log);
TrajectoryLog load_log(const std::string& text);

}  // namespace spgp
