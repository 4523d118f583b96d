#pragma once

#include "spgp/vec2.hpp"

namespace spgp {

/// Acceleration command for one agent, m/s^2.
using ControlInput = Vec2;

/// Full state of one double-integrator agent.
struct AgentState {
    int id = 0;
    Vec2 position{};        // m
    Vec2 velocity{};        // m/s
    double safety_radius = 0.2;  // m, > 0
    double accel_limit = 1.0;    // m/s^2, > 0
    Vec2 goal{};            // m

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// Saturated PD goal controller gains.
struct ControllerGains {
    double kp = 1.0;  // 1/s^2
    double kd = 2.0;  // 1/s

    friend bool operator==(const ControllerGains&, const ControllerGains&) = default;
};

/// Throws std::invalid_argument when a field is non-finite or a bound is violated.
void validate(const AgentState& s);
void validate(const ControllerGains& g);

/// Radial projection onto the closed ball of radius alpha. Identity inside the ball.
Vec2 clamp_to_ball(const Vec2& u, double alpha);

/// Semi-implicit Euler step: v' = v + u*dt, then p' = p + v'*dt.
AgentState step_agent(const AgentState& state, const ControlInput& u, double dt);

/// u_hat = clamp_to_ball(kp*(goal - p) - kd*v, accel_limit).
ControlInput nominal_control(const AgentState& state, const ControllerGains& gains);

}  // namespace spgp
