#include "spgp/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spgp {

void validate(const AgentState& s) {
    if (!is_finite(s.position) || !is_finite(s.velocity) || !is_finite(s.goal)) {
        throw std::invalid_argument("agent " + std::to_string(s.id) +
                                    ": non-finite state component");
    }
    if (!(s.safety_radius > 0.0) || !std::isfinite(s.safety_radius)) {
        throw std::invalid_argument("agent " + std::to_string(s.id) +
                                    ": safety_radius must be > 0");
    }
    if (!(s.accel_limit > 0.0) || !std::isfinite(s.accel_limit)) {
        throw std::invalid_argument("agent " + std::to_string(s.id) +
                                    ": accel_limit must be > 0");
    }
}

void validate(const ControllerGains& g) {
    if (!(g.kp > 0.0) || !(g.kd > 0.0) || !std::isfinite(g.kp) || !std::isfinite(g.kd)) {
        throw std::invalid_argument("controller gains must be finite and > 0");
    }
}

Vec2 clamp_to_ball(const Vec2& u, double alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("clamp_to_ball: alpha must be > 0");
    }
    const double n2 = norm_sq(u);
    if (n2 <= alpha * alpha) {
        return u;
    }
    Vec2 r = u * (alpha / std::sqrt(n2));
    // One rescale can land an ulp outside the ball; shave until the bound holds exactly.
    while (norm_sq(r) > alpha * alpha) {
        r *= 1.0 - 4.0 * 2.220446049250313e-16;
    }
    return r;
}

AgentState step_agent(const AgentState& state, const ControlInput& u, double dt) {
    validate(state);
    if (!is_finite(u)) {
        throw std::invalid_argument("step_agent: non-finite control input");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("step_agent: dt must be finite and > 0");
    }
    AgentState next = state;
    next.velocity = state.velocity + u * dt;
    next.position = state.position + next.velocity * dt;
    return next;
}

ControlInput nominal_control(const AgentState& state, const ControllerGains& gains) {
    validate(state);
    validate(gains);
    const Vec2 raw = gains.kp * (state.goal - state.position) - gains.kd * state.velocity;
    return clamp_to_ball(raw, state.accel_limit);
}

}  // namespace spgp
