#include "spgp/spgp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spgp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Extra clearance, beyond the summed radii, required between a pseudo-goal
// candidate (and its line of sight) and any obstacle. Large enough that the
// barrier-filtered agent can still close to within eps_pg of the candidate.
constexpr double kFeasibilityClearance = 0.05;

double point_segment_dist(const Vec2& q, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = norm_sq(ab);
    if (len2 == 0.0) return dist(q, a);
    double t = dot(q - a, ab) / len2;
    t = std::min(1.0, std::max(0.0, t));
    return dist(q, a + t * ab);
}

bool candidate_feasible(const Vec2& p, const Vec2& c, std::span<const Obstacle> obstacles,
                        double agent_radius) {
    for (const Obstacle& o : obstacles) {
        const double clearance = o.radius + agent_radius + kFeasibilityClearance;
        if (point_segment_dist(o.center, p, c) < clearance) return false;
    }
    return true;
}

struct Candidate {
    Vec2 point{};
    double score = 0.0;
};

std::vector<Candidate> draw_candidates(const Vec2& p, std::span<const Vec2> others,
                                       const SpgpParams& params, Rng& rng) {
    std::vector<Candidate> out;
    out.reserve(params.candidates);
    for (int k = 0; k < params.candidates; ++k) {
        const double x = rng.uniform();
        const double y = params.independent_xy ? rng.uniform() : x;
        const Vec2 c = p + params.delta * Vec2{std::cos(kTwoPi * x), std::sin(kTwoPi * y)};
        double score = std::numeric_limits<double>::infinity();
        for (const Vec2& q : others) {
            score = std::min(score, dist(c, q));
        }
        out.push_back({c, score});
    }
    return out;
}

}  // namespace

void validate(const SpgpParams& p) {
    if (!(p.delta > 0.0) || !std::isfinite(p.delta)) {
        throw std::invalid_argument("spgp: delta must be finite and > 0");
    }
    if (!(p.u_t > 0.0) || !std::isfinite(p.u_t)) {
        throw std::invalid_argument("spgp: u_t must be finite and > 0");
    }
    if (p.window < 1) throw std::invalid_argument("spgp: window must be >= 1");
    if (p.candidates < 1) throw std::invalid_argument("spgp: candidates must be >= 1");
    if (!(p.eps_pg > 0.0)) throw std::invalid_argument("spgp: eps_pg must be > 0");
    if (!(p.neighbor_radius > 0.0)) {
        throw std::invalid_argument("spgp: neighbor_radius must be > 0");
    }
    if (p.perturb_timeout_steps < 0) {
        throw std::invalid_argument("spgp: perturb_timeout_steps must be >= 0");
    }
}

std::pair<bool, AgentMode> detect_deadlock(const ControlInput& u, const ControlInput& u_hat,
                                           const AgentMode& mode, const SpgpParams& params) {
    validate(params);
    if (mode.mode == AgentMode::Mode::Perturb) {
        return {false, mode};
    }
    AgentMode next = mode;
    const bool condition = norm(u) <= params.u_t && norm(u_hat) > params.u_t;
    if (condition) {
        next.consecutive_deadlock_steps += 1;
    } else {
        next.consecutive_deadlock_steps = 0;
    }
    return {next.consecutive_deadlock_steps == params.window, next};
}

Vec2 select_pseudo_goal(const Vec2& p, std::span<const Vec2> others, const SpgpParams& params,
                        Rng& rng) {
    validate(params);
    const auto cands = draw_candidates(p, others, params, rng);
    std::size_t best = 0;
    for (std::size_t k = 1; k < cands.size(); ++k) {
        if (cands[k].score > cands[best].score) best = k;
    }
    return cands[best].point;
}

std::optional<Vec2> select_pseudo_goal(const Vec2& p, std::span<const Vec2> others,
                                       std::span<const Obstacle> obstacles,
                                       double agent_radius, const SpgpParams& params,
                                       Rng& rng) {
    validate(params);
    const auto cands = draw_candidates(p, others, params, rng);
    int best = -1;
    for (std::size_t k = 0; k < cands.size(); ++k) {
        if (!candidate_feasible(p, cands[k].point, obstacles, agent_radius)) continue;
        if (best < 0 || cands[k].score > cands[best].score) best = static_cast<int>(k);
    }
    if (best < 0) return std::nullopt;
    return cands[best].point;
}

std::vector<SpgpEvent> spgp_update(std::span<AgentState> agents,
                                   std::span<const ControlInput> controls,
                                   std::span<const ControlInput> nominals,
                                   std::span<AgentMode> modes, const SpgpParams& params,
                                   Rng& rng, std::span<const Obstacle> obstacles) {
    validate(params);
    if (agents.size() != controls.size() || agents.size() != nominals.size() ||
        agents.size() != modes.size()) {
        throw std::invalid_argument("spgp_update: span sizes must match");
    }

    std::vector<SpgpEvent> events;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        AgentMode& mode = modes[i];
        AgentState& agent = agents[i];

        if (mode.mode == AgentMode::Mode::Normal) {
            mode.original_goal = agent.goal;
            auto [fired, next] = detect_deadlock(controls[i], nominals[i], mode, params);
            mode = next;
            if (!fired) continue;
            events.push_back({SpgpEvent::Type::DeadlockDetected, static_cast<int>(i), {}});

            std::vector<Vec2> others;
            others.reserve(agents.size() - 1);
            for (std::size_t j = 0; j < agents.size(); ++j) {
                if (j != i && dist(agents[j].position, agent.position) <=
                                  params.neighbor_radius) {
                    others.push_back(agents[j].position);
                }
            }
            const auto pg = select_pseudo_goal(agent.position, others, obstacles,
                                               agent.safety_radius, params, rng);
            if (pg) {
                mode.mode = AgentMode::Mode::Perturb;
                mode.original_goal = agent.goal;
                mode.pseudo_goal = *pg;
                mode.perturb_anchor = agent.position;
                mode.steps_in_perturb = 0;
                mode.consecutive_deadlock_steps = 0;
                agent.goal = *pg;
                events.push_back({SpgpEvent::Type::PerturbStarted, static_cast<int>(i), *pg});
            } else {
                mode.consecutive_deadlock_steps = 0;
                events.push_back({SpgpEvent::Type::PerturbSkipped, static_cast<int>(i), {}});
            }
        } else {
            mode.steps_in_perturb += 1;
            const bool arrived = dist(agent.position, *mode.pseudo_goal) <= params.eps_pg;
            const bool timed_out = params.perturb_timeout_steps > 0 &&
                                   mode.steps_in_perturb >= params.perturb_timeout_steps;
            if (arrived || timed_out) {
                agent.goal = mode.original_goal;
                mode.mode = AgentMode::Mode::Normal;
                mode.pseudo_goal.reset();
                mode.steps_in_perturb = 0;
                mode.consecutive_deadlock_steps = 0;
                events.push_back({arrived ? SpgpEvent::Type::PerturbArrived
                                          : SpgpEvent::Type::PerturbTimeout,
                                  static_cast<int>(i), agent.goal});
            }
        }
    }
    return events;
}

}  // namespace spgp
