#include "spgp/simulator.hpp"

#include <algorithm>
#include <limits>

namespace spgp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Simulation::Simulation(ScenarioConfig config, std::uint64_t seed, SimOptions options)
    : config_(std::move(config)), options_(options), rng_(seed) {
    validate(config_);
    agents_ = config_.agents;
    std::sort(agents_.begin(), agents_.end(),
              [](const AgentState& a, const AgentState& b) { return a.id < b.id; });
    modes_.resize(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        modes_[i].original_goal = agents_[i].goal;
    }

    log_.dt = config_.dt;
    log_.t_max = config_.t_max;
    log_.eps_goal = config_.eps_goal;
    log_.obstacles = config_.obstacles;
    for (const auto& a : agents_) {
        log_.agent_ids.push_back(a.id);
        log_.original_goals.push_back(a.goal);
    }
    append_record(std::vector<Vec2>(agents_.size()), std::vector<Vec2>(agents_.size()));
}

bool Simulation::all_arrived() const {
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        if (dist(agents_[i].position, log_.original_goals[i]) > config_.eps_goal) return false;
    }
    return true;
}

bool Simulation::done() const {
    return step_ >= config_.t_max || log_.aborted_degenerate || all_arrived();
}

void Simulation::append_record(const std::vector<Vec2>& controls,
                               const std::vector<Vec2>& nominals) {
    StepRecord rec;
    rec.time = step_ * config_.dt;
    rec.controls = controls;
    rec.nominals = nominals;
    rec.min_pairwise_h = kInf;
    rec.min_obstacle_h = kInf;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        rec.positions.push_back(agents_[i].position);
        rec.velocities.push_back(agents_[i].velocity);
        rec.modes.push_back(modes_[i].mode);
        for (std::size_t j = i + 1; j < agents_.size(); ++j) {
            rec.min_pairwise_h = std::min(rec.min_pairwise_h, pairwise_h(agents_[i], agents_[j]));
        }
        for (const Obstacle& o : config_.obstacles) {
            rec.min_obstacle_h = std::min(rec.min_obstacle_h, obstacle_h(agents_[i], o));
        }
    }
    const bool was_safe =
        log_.steps.empty() || log_.steps.back().min_pairwise_h >= 0.0;
    if (rec.min_pairwise_h < 0.0 && was_safe) {
        log_.events.push_back({step_, SimEvent::Type::Collision, -1, {}});
    }
    log_.steps.push_back(std::move(rec));
}

void Simulation::tick() {
    if (done()) return;

    const std::size_t n = agents_.size();
    std::vector<Vec2> nominals(n);
    for (std::size_t i = 0; i < n; ++i) {
        nominals[i] = nominal_control(agents_[i], config_.gains);
    }

    QpProblem problem;
    problem.facet_count = options_.qp_facets;
    for (std::size_t i = 0; i < n; ++i) {
        problem.agents.push_back({agents_[i].id, nominals[i], agents_[i].accel_limit,
                                  -1.0 * clamp_to_ball(config_.gains.kd * agents_[i].velocity,
                                                       agents_[i].accel_limit)});
    }
    try {
        problem.rows = assemble_constraints(agents_, config_.obstacles, config_.safety);
    } catch (const DegenerateGeometryError&) {
        log_.aborted_degenerate = true;
        log_.events.push_back({step_, SimEvent::Type::DegenerateGeometry, -1, {}});
        ++step_;
        append_record(std::vector<Vec2>(n), nominals);
        return;
    }

    QpSolution sol = solver_.solve(problem);
    if (sol.status == QpSolution::Status::Infeasible) {
        log_.events.push_back({step_, SimEvent::Type::QpInfeasible, -1, {}});
    }
    std::vector<Vec2> controls(n);
    for (std::size_t i = 0; i < n; ++i) {
        controls[i] = sol.control_for(agents_[i].id);
    }

    bool goals_changed = false;
    if (options_.perturbation_enabled) {
        const auto events = spgp_update(agents_, controls, nominals, modes_, config_.spgp,
                                        rng_, config_.obstacles);
        for (const SpgpEvent& e : events) {
            SimEvent::Type type = SimEvent::Type::DeadlockDetected;
            switch (e.type) {
                case SpgpEvent::Type::DeadlockDetected:
                    type = SimEvent::Type::DeadlockDetected;
                    break;
                case SpgpEvent::Type::PerturbStarted:
                    type = SimEvent::Type::PerturbStarted;
                    goals_changed = true;
                    break;
                case SpgpEvent::Type::PerturbArrived:
                    type = SimEvent::Type::PerturbArrived;
                    goals_changed = true;
                    break;
                case SpgpEvent::Type::PerturbTimeout:
                    type = SimEvent::Type::PerturbTimeout;
                    goals_changed = true;
                    break;
                case SpgpEvent::Type::PerturbSkipped:
                    type = SimEvent::Type::PerturbSkipped;
                    break;
            }
            log_.events.push_back({step_, type, e.agent_index, e.point});
        }
    } else {
        // Baseline: the detector still runs so deadlocks are observable, but modes
        // never leave NORMAL and goals are never touched.
        for (std::size_t i = 0; i < n; ++i) {
            auto [fired, next] = detect_deadlock(controls[i], nominals[i], modes_[i],
                                                 config_.spgp);
            modes_[i] = next;
            if (fired) {
                log_.events.push_back(
                    {step_, SimEvent::Type::DeadlockDetected, static_cast<int>(i), {}});
            }
        }
    }

    if (config_.resolve_same_step && goals_changed) {
        // "Run SBC again": goal swaps feed back into this step's controls.
        for (std::size_t i = 0; i < n; ++i) {
            nominals[i] = nominal_control(agents_[i], config_.gains);
            problem.agents[i].nominal = nominals[i];
        }
        sol = solver_.solve(problem);
        if (sol.status == QpSolution::Status::Infeasible) {
            log_.events.push_back({step_, SimEvent::Type::QpInfeasible, -1, {}});
        }
        for (std::size_t i = 0; i < n; ++i) {
            controls[i] = sol.control_for(agents_[i].id);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        agents_[i] = step_agent(agents_[i], controls[i], config_.dt);
    }
    ++step_;
    append_record(controls, nominals);
}

void Simulation::run_to_completion() {
    while (!done()) tick();
}

std::pair<TrajectoryLog, TrialResult> run(const ScenarioConfig& config, std::uint64_t seed,
                                          const SimOptions& options) {
    Simulation sim(config, seed, options);
    sim.run_to_completion();
    return {sim.log(), trial_result(sim.log(), config)};
}

}  // namespace spgp
