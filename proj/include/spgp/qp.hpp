#pragma once

#include <vector>

#include "spgp/safety.hpp"
#include "spgp/vec2.hpp"

namespace spgp {

/// normal . u <= offset
struct HalfPlane {
    Vec2 normal{};
    double offset = 0.0;
};

/// m half-planes tangent to the circle of radius alpha at angles 2*pi*k/m.
/// The resulting polygon circumscribes the ball (contains it).
std::vector<HalfPlane> norm_ball_facets(double alpha, int m);

struct QpAgent {
    int id = 0;
    Vec2 nominal{};     // u_hat
    double alpha = 1.0; // norm bound
    Vec2 fallback{};    // control returned when the problem is infeasible
};

struct QpProblem {
    std::vector<QpAgent> agents;      // sorted by id, unique
    std::vector<ConstraintRow> rows;  // safety-barrier rows
    int facet_count = 16;             // norm-ball linearization
};

struct QpSolution {
    enum class Status { Solved, Infeasible };
    Status status = Status::Solved;
    std::vector<std::pair<int, Vec2>> controls;   // post radial clamp, |u_i| <= alpha_i
    std::vector<std::pair<int, Vec2>> unclamped;  // optimum over the linearized polyhedron
    double objective = 0.0;                       // sum |controls_i - nominal_i|^2
    int iterations = 0;

    const Vec2& control_for(int agent_id) const;
};

/// Dense dual active-set solver for min sum |u_i - u_hat_i|^2 over the SBC rows plus
/// the norm-ball facets. A solver instance remembers its last active set and prefers
/// those rows when choosing the next constraint to activate (warm start across the
/// per-step problems of one simulation). Stateless use: the free solve() below.
class QpSolver {
public:
    QpSolution solve(const QpProblem& problem);
    void reset();

private:
    struct RowKey {
        int kind = 0;  // 0 pair, 1 obstacle, 2 facet
        int a = 0;
        int b = 0;
        friend bool operator==(const RowKey&, const RowKey&) = default;
        friend auto operator<=>(const RowKey&, const RowKey&) = default;
    };
    std::vector<RowKey> warm_;
};

/// One-shot solve with a fresh solver.
QpSolution solve(const QpProblem& problem);

/// Independent check of solve(): Dykstra's alternating projections onto the same
/// polyhedron, run to tolerance 1e-9. `relaxation` scales each projection step
/// (1.0 = exact projection). Throws std::runtime_error when the sweep budget is
/// exhausted before convergence. Test use only; never called by the simulator.
QpSolution oracle_solve(const QpProblem& problem, int max_sweeps = 200000,
                        double relaxation = 1.0);

}  // namespace spgp
