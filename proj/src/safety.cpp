#include "spgp/safety.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace spgp {

void validate(const SafetyParams& p) {
    if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) {
        throw std::invalid_argument("safety: gamma must be finite and > 0");
    }
    if (!(p.margin >= 0.0) || !std::isfinite(p.margin)) {
        throw std::invalid_argument("safety: margin must be finite and >= 0");
    }
    if (!(p.obstacle_activation_dist > 0.0)) {
        throw std::invalid_argument("safety: obstacle_activation_dist must be > 0");
    }
    if (!(p.brake_dt >= 0.0) || !std::isfinite(p.brake_dt)) {
        throw std::invalid_argument("safety: brake_dt must be finite and >= 0");
    }
    if (p.brake_dt > 0.0 && (!(p.brake_reserve > 0.0) || p.brake_reserve > 1.0)) {
        throw std::invalid_argument("safety: brake_reserve must be in (0, 1]");
    }
}

void validate(const Obstacle& o) {
    if (!is_finite(o.center) || !(o.radius > 0.0) || !std::isfinite(o.radius)) {
        throw std::invalid_argument("obstacle: center must be finite and radius > 0");
    }
}

double pairwise_h(const AgentState& a, const AgentState& b) {
    if (a.id == b.id) {
        throw std::invalid_argument("pairwise_h: agents must be distinct");
    }
    return dist(a.position, b.position) - (a.safety_radius + b.safety_radius);
}

double obstacle_h(const AgentState& a, const Obstacle& obs) {
    return dist(a.position, obs.center) - (a.safety_radius + obs.radius);
}

namespace {

// Shared certificate bound; dp = p_self - p_other, dv = v_self - v_other,
// h_raw = separation before the margin is applied.
double barrier_bound(const Vec2& dp, const Vec2& dv, double h_raw, double gamma,
                     double alpha_sum, const SafetyParams& params) {
    const double h = h_raw - params.margin;
    const double dp2 = norm_sq(dp);
    const double dvdp = dot(dv, dp);
    double b = gamma * h * h * h + dvdp / (2.0 * alpha_sum) - (dvdp * dvdp) / (2.0 * dp2) +
               norm_sq(dv) / 2.0;
    if (params.brake_dt > 0.0) {
        // Keep the next-step closing speed inside the braking envelope so the pair
        // can always stop at the margin boundary using brake_reserve of the budget.
        // The envelope vanishes exactly where the cubic term vanishes (h = margin),
        // so a pressed pair stalls there instead of limit-cycling.
        const double d = std::sqrt(dp2);
        const double closing = -dvdp / d;
        const double h_pred = h - std::max(closing, 0.0) * params.brake_dt;
        const double envelope =
            std::sqrt(2.0 * params.brake_reserve * alpha_sum * std::max(h_pred, 0.0));
        // Demanded deceleration is capped below the joint budget so this row alone
        // can never make the problem infeasible.
        const double demanded = std::max((envelope - closing) / params.brake_dt,
                                         -0.9 * alpha_sum);
        b = std::min(b, d * demanded);
    }
    return b;
}

}  // namespace

ConstraintRow build_pair_constraint(const AgentState& a, const AgentState& b,
                                    const SafetyParams& params) {
    validate(params);
    const Vec2 dp = a.position - b.position;
    if (norm_sq(dp) == 0.0) {
        throw DegenerateGeometryError("coincident agents " + std::to_string(a.id) + " and " +
                                      std::to_string(b.id));
    }
    const Vec2 dv = a.velocity - b.velocity;

    ConstraintRow row;
    row.bound = barrier_bound(dp, dv, pairwise_h(a, b), params.gamma,
                              a.accel_limit + b.accel_limit, params);
    row.source = RowSource{RowSource::Kind::AgentPair, std::min(a.id, b.id),
                           std::max(a.id, b.id)};
    if (a.id < b.id) {
        row.coeffs = {{a.id, -dp}, {b.id, dp}};
    } else {
        row.coeffs = {{b.id, dp}, {a.id, -dp}};
    }
    return row;
}

ConstraintRow build_obstacle_constraint(const AgentState& a, const Obstacle& obs,
                                        const SafetyParams& params, int obstacle_index) {
    validate(params);
    validate(obs);
    const Vec2 dp = a.position - obs.center;
    if (norm_sq(dp) == 0.0) {
        throw DegenerateGeometryError("agent " + std::to_string(a.id) +
                                      " coincident with obstacle " +
                                      std::to_string(obstacle_index));
    }
    ConstraintRow row;
    row.bound = barrier_bound(dp, a.velocity, obstacle_h(a, obs), params.gamma,
                              a.accel_limit, params);
    row.coeffs = {{a.id, -dp}};
    row.source = RowSource{RowSource::Kind::AgentObstacle, a.id, obstacle_index};
    return row;
}

std::vector<ConstraintRow> assemble_constraints(std::span<const AgentState> agents,
                                                std::span<const Obstacle> obstacles,
                                                const SafetyParams& params) {
    validate(params);
    std::set<int> ids;
    for (const auto& a : agents) {
        if (!ids.insert(a.id).second) {
            throw std::invalid_argument("assemble_constraints: duplicate agent id " +
                                        std::to_string(a.id));
        }
    }

    std::vector<const AgentState*> ordered;
    ordered.reserve(agents.size());
    for (const auto& a : agents) ordered.push_back(&a);
    std::sort(ordered.begin(), ordered.end(),
              [](const AgentState* x, const AgentState* y) { return x->id < y->id; });

    std::vector<ConstraintRow> rows;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        for (std::size_t j = i + 1; j < ordered.size(); ++j) {
            rows.push_back(build_pair_constraint(*ordered[i], *ordered[j], params));
        }
    }
    const double act2 = params.obstacle_activation_dist * params.obstacle_activation_dist;
    for (const AgentState* a : ordered) {
        for (std::size_t k = 0; k < obstacles.size(); ++k) {
            if (dist_sq(a->position, obstacles[k].center) <= act2) {
                rows.push_back(
                    build_obstacle_constraint(*a, obstacles[k], params, static_cast<int>(k)));
            }
        }
    }
    return rows;
}

}  // namespace spgp
