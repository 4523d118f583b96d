#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "spgp/dynamics.hpp"
#include "spgp/vec2.hpp"

namespace spgp {

/// Coincident positions make the pairwise constraint direction undefined.
struct DegenerateGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SafetyParams {
    double gamma = 10.0;   // class-K coefficient, > 0
    double margin = 0.0;   // m, slack subtracted from the separation before the barrier term
    double obstacle_activation_dist = 3.0;  // m, obstacles farther than this emit no row

    // Brake-to-stop backstop. The cubic bound alone only damps the closing rate
    // (demanded deceleration is proportional to it), so a sustained approach can
    // creep through the safety boundary. With brake_dt > 0 the row bound becomes
    // min(cubic bound, bound keeping next-step closing speed within the braking
    // envelope sqrt(2 * brake_reserve * alpha_sum * h)). Zero disables it.
    double brake_dt = 0.0;        // s, the simulation step when enabled
    double brake_reserve = 0.5;   // fraction of the joint accel budget for braking

    friend bool operator==(const SafetyParams&, const SafetyParams&) = default;
};

struct Obstacle {
    Vec2 center{};
    double radius = 0.1;  // m, > 0

    friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

/// Identifies where a constraint row came from.
struct RowSource {
    enum class Kind { AgentPair, AgentObstacle };
    Kind kind = Kind::AgentPair;
    int a = 0;  // agent id
    int b = 0;  // second agent id, or obstacle index
    friend bool operator==(const RowSource&, const RowSource&) = default;
};

/// One linear inequality over the stacked control vector: sum_i coeffs[i] . u_i <= bound.
/// Agents absent from coeffs contribute zero columns.
struct ConstraintRow {
    std::vector<std::pair<int, Vec2>> coeffs;  // sorted by agent id, 1 or 2 entries
    double bound = 0.0;
    RowSource source{};

    const Vec2* coeff_for(int agent_id) const {
        for (const auto& [id, c] : coeffs) {
            if (id == agent_id) return &c;
        }
        return nullptr;
    }
};

void validate(const SafetyParams& p);
void validate(const Obstacle& o);

/// h_ab = ||p_a - p_b|| - (r_a + r_b). Symmetric.
double pairwise_h(const AgentState& a, const AgentState& b);

/// Agent-obstacle separation: ||p - center|| - (r + obstacle radius).
double obstacle_h(const AgentState& a, const Obstacle& obs);

/// Pairwise safety-barrier row:
///   coeffs[a] = -dp, coeffs[b] = +dp with dp = p_a - p_b, and
///   bound = gamma*h^3 + (dv.dp)/(2(alpha_a+alpha_b)) - (dv.dp)^2/(2|dp|^2) + |dv|^2/2
/// with dv = v_a - v_b and h = pairwise_h(a,b) - margin.
ConstraintRow build_pair_constraint(const AgentState& a, const AgentState& b,
                                    const SafetyParams& params);

/// Same construction against a static body: v_b = 0, alpha_b = 0, r_b = obs.radius,
/// and only agent a's coefficient block is present.
ConstraintRow build_obstacle_constraint(const AgentState& a, const Obstacle& obs,
                                        const SafetyParams& params, int obstacle_index = 0);

/// One row per unordered agent pair plus one row per (agent, obstacle) pair whose
/// center distance is within params.obstacle_activation_dist. Rows are ordered:
/// pair rows sorted by (id_i, id_j), then obstacle rows by (id, obstacle index).
std::vector<ConstraintRow> assemble_constraints(std::span<const AgentState> agents,
                                                std::span<const Obstacle> obstacles,
                                                const SafetyParams& params);

}  // namespace spgp
