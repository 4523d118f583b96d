#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spgp/dynamics.hpp"
#include "spgp/rng.hpp"
#include "spgp/safety.hpp"
#include "spgp/vec2.hpp"

namespace spgp {

struct SpgpParams {
    double delta = 1.0;    // m, perturbation radius
    double u_t = 0.05;     // m/s^2, deadlock control threshold
    int window = 10;       // steps the deadlock condition must hold
    int candidates = 8;    // pseudo-goal candidates per selection
    double eps_pg = 0.1;   // m, pseudo-goal arrival tolerance
    double neighbor_radius = 3.0;    // m, only agents this close count as "surrounding"
    bool independent_xy = false;  // draw cos and sin arguments independently (off the circle)
    int perturb_timeout_steps = 600; // 0 disables; see spgp_update

    friend bool operator==(const SpgpParams&, const SpgpParams&) = default;
};

void validate(const SpgpParams& p);

struct AgentMode {
    enum class Mode { Normal, Perturb };
    Mode mode = Mode::Normal;
    Vec2 original_goal{};
    std::optional<Vec2> pseudo_goal{};
    int consecutive_deadlock_steps = 0;
    Vec2 perturb_anchor{};     // agent position when the pseudo-goal was adopted
    int steps_in_perturb = 0;
};

/// Instantaneous deadlock condition: |u| <= u_t while |u_hat| > u_t. The counter in
/// `mode` increments while the condition holds and resets otherwise; the detection
/// fires only on the step the counter reaches params.window. PERTURB agents are not
/// re-tested. Returns (fired, updated mode).
std::pair<bool, AgentMode> detect_deadlock(const ControlInput& u, const ControlInput& u_hat,
                                           const AgentMode& mode, const SpgpParams& params);

/// Draws params.candidates angles theta_k = 2*pi*x_k, candidate c_k = p + delta*(cos, sin),
/// and returns the candidate maximizing the min distance to `others` (ties: lowest k).
/// With independent_xy the cos and sin arguments use independent draws and the result is
/// generally off the delta-circle.
Vec2 select_pseudo_goal(const Vec2& p, std::span<const Vec2> others, const SpgpParams& params,
                        Rng& rng);

/// Obstacle-aware variant used by the simulator: candidates whose straight line from p
/// (inflated by agent_radius + clearance) crosses an obstacle, or whose endpoint sits
/// unreachably close to one, are rejected; nullopt when every candidate is infeasible.
/// Draws exactly the same random sequence as the plain overload.
std::optional<Vec2> select_pseudo_goal(const Vec2& p, std::span<const Vec2> others,
                                       std::span<const Obstacle> obstacles,
                                       double agent_radius, const SpgpParams& params,
                                       Rng& rng);

struct SpgpEvent {
    enum class Type { DeadlockDetected, PerturbStarted, PerturbArrived, PerturbTimeout,
                      PerturbSkipped };
    Type type;
    int agent_index;
    Vec2 point{};  // pseudo-goal for PerturbStarted, restored goal otherwise
};

/// One pass of the perturbation mode machine over all agents, in index order:
///   - NORMAL agents flagged by detect_deadlock store their goal, adopt a fresh
///     pseudo-goal and enter PERTURB (goal swap affects the next control step);
///     when no feasible pseudo-goal exists the agent stays NORMAL and retries
///     after the next full detection window.
///   - PERTURB agents within eps_pg of their pseudo-goal (or past
///     perturb_timeout_steps, when nonzero) restore the original goal and
///     re-enter NORMAL.
/// Mutates agents' goals and modes; returns the transitions that happened.
std::vector<SpgpEvent> spgp_update(std::span<AgentState> agents,
                                   std::span<const ControlInput> controls,
                                   std::span<const ControlInput> nominals,
                                   std::span<AgentMode> modes, const SpgpParams& params,
                                   Rng& rng, std::span<const Obstacle> obstacles = {});

}  // namespace spgp
