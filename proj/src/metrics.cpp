#include "spgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spgp {

bool success(const TrajectoryLog& log, double eps_goal) {
    if (log.steps.empty()) {
        throw std::invalid_argument("success: empty log");
    }
    if (log.aborted_degenerate) return false;
    for (const StepRecord& r : log.steps) {
        if (r.min_pairwise_h < 0.0) return false;
    }
    const StepRecord& last = log.steps.back();
    for (std::size_t i = 0; i < log.agent_count(); ++i) {
        if (dist(last.positions[i], log.original_goals[i]) > eps_goal) return false;
    }
    return true;
}

double avg_delta_v(const TrajectoryLog& log, std::size_t agent_index) {
    if (log.steps.size() < 2) {
        throw std::invalid_argument("avg_delta_v: log needs at least two records");
    }
    double sum = 0.0;
    for (std::size_t t = 0; t + 1 < log.steps.size(); ++t) {
        sum += dist(log.steps[t + 1].velocities.at(agent_index),
                    log.steps[t].velocities.at(agent_index));
    }
    return sum / static_cast<double>(log.steps.size() - 1);
}

double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("hausdorff: sequences must be non-empty");
    }
    double worst = 0.0;
    for (const Vec2& p : a) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const Vec2& q : b) nearest = std::min(nearest, dist_sq(p, q));
        worst = std::max(worst, nearest);
    }
    for (const Vec2& q : b) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const Vec2& p : a) nearest = std::min(nearest, dist_sq(p, q));
        worst = std::max(worst, nearest);
    }
    return std::sqrt(worst);
}

std::vector<Vec2> nominal_trajectory(const AgentState& initial, const ControllerGains& gains,
                                     double dt, int t_max, double eps_goal) {
    validate(initial);
    AgentState state = initial;
    std::vector<Vec2> points{state.position};
    for (int t = 0; t < t_max; ++t) {
        if (dist(state.position, state.goal) <= eps_goal) break;
        state = step_agent(state, nominal_control(state, gains), dt);
        points.push_back(state.position);
    }
    return points;
}

int makespan(const TrajectoryLog& log, std::size_t agent_index, double eps_goal) {
    for (std::size_t t = 0; t < log.steps.size(); ++t) {
        if (dist(log.steps[t].positions.at(agent_index), log.original_goals.at(agent_index)) <=
            eps_goal) {
            return static_cast<int>(t);
        }
    }
    return log.t_max + 1;
}

TrialResult trial_result(const TrajectoryLog& log, const ScenarioConfig& config) {
    TrialResult r;
    r.success = success(log, log.eps_goal);
    r.min_pairwise_h = std::numeric_limits<double>::infinity();
    for (const StepRecord& rec : log.steps) {
        r.min_pairwise_h = std::min(r.min_pairwise_h, rec.min_pairwise_h);
    }
    r.collision = log.aborted_degenerate || r.min_pairwise_h < 0.0;
    for (const SimEvent& e : log.events) {
        if (e.type == SimEvent::Type::DeadlockDetected) ++r.deadlock_count;
        if (e.type == SimEvent::Type::QpInfeasible) ++r.qp_infeasible_count;
    }

    std::vector<AgentState> initial = config.agents;
    std::sort(initial.begin(), initial.end(),
              [](const AgentState& a, const AgentState& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < log.agent_count(); ++i) {
        r.makespan.push_back(makespan(log, i, log.eps_goal));
        r.avg_delta_v.push_back(log.steps.size() >= 2 ? avg_delta_v(log, i) : 0.0);
        const auto actual = log.positions_of(i);
        const auto nominal = nominal_trajectory(initial.at(i), config.gains, log.dt,
                                                log.t_max, log.eps_goal);
        r.path_deviation.push_back(hausdorff(actual, nominal));
    }
    return r;
}

}  // namespace spgp
