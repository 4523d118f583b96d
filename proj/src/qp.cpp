#include "spgp/qp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "spgp/dynamics.hpp"

namespace spgp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct DenseRow {
    Eigen::VectorXd a;  // unit normal over the stacked controls
    double b = 0.0;
    double scale = 1.0;  // original row norm, for reporting
    int kind = 0;        // 0 pair, 1 obstacle, 2 facet
    int key_a = 0;
    int key_b = 0;
};

struct DenseProblem {
    int n = 0;
    Eigen::VectorXd x0;
    std::vector<DenseRow> rows;
    std::vector<int> ids;     // sorted agent ids
    std::vector<double> alpha;
};

int agent_index(const std::vector<int>& ids, int id) {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
        throw std::invalid_argument("qp: constraint row references unknown agent id " +
                                    std::to_string(id));
    }
    return static_cast<int>(it - ids.begin());
}

void validate_problem(const QpProblem& p) {
    if (p.agents.empty()) {
        throw std::invalid_argument("qp: problem has no agents");
    }
    if (p.facet_count < 4) {
        throw std::invalid_argument("qp: facet_count must be >= 4");
    }
    for (std::size_t i = 0; i < p.agents.size(); ++i) {
        const auto& a = p.agents[i];
        if (!(a.alpha > 0.0) || !std::isfinite(a.alpha) || !is_finite(a.nominal)) {
            throw std::invalid_argument("qp: agent " + std::to_string(a.id) +
                                        " has invalid nominal/alpha");
        }
        if (i > 0 && p.agents[i - 1].id >= a.id) {
            throw std::invalid_argument("qp: agents must be sorted by id and unique");
        }
    }
}

// Flattens the problem: SBC rows first (given order), then per-agent norm facets.
// Rows are normalized to unit normals; zero rows are resolved immediately.
DenseProblem flatten(const QpProblem& p, bool& trivially_infeasible) {
    trivially_infeasible = false;
    DenseProblem d;
    d.n = 2 * static_cast<int>(p.agents.size());
    d.x0.resize(d.n);
    d.ids.reserve(p.agents.size());
    d.alpha.reserve(p.agents.size());
    for (std::size_t i = 0; i < p.agents.size(); ++i) {
        d.ids.push_back(p.agents[i].id);
        d.alpha.push_back(p.agents[i].alpha);
        d.x0[2 * i] = p.agents[i].nominal.x;
        d.x0[2 * i + 1] = p.agents[i].nominal.y;
    }

    for (const ConstraintRow& row : p.rows) {
        DenseRow r;
        r.a = Eigen::VectorXd::Zero(d.n);
        for (const auto& [id, c] : row.coeffs) {
            const int idx = agent_index(d.ids, id);
            r.a[2 * idx] += c.x;
            r.a[2 * idx + 1] += c.y;
        }
        r.b = row.bound;
        r.kind = row.source.kind == RowSource::Kind::AgentPair ? 0 : 1;
        r.key_a = row.source.a;
        r.key_b = row.source.b;
        const double nrm = r.a.norm();
        if (nrm < 1e-14) {
            if (r.b < -1e-12) trivially_infeasible = true;
            continue;  // 0 <= b: vacuous
        }
        r.a /= nrm;
        r.b /= nrm;
        r.scale = nrm;
        d.rows.push_back(std::move(r));
    }

    for (std::size_t i = 0; i < p.agents.size(); ++i) {
        const auto facets = norm_ball_facets(p.agents[i].alpha, p.facet_count);
        for (std::size_t k = 0; k < facets.size(); ++k) {
            DenseRow r;
            r.a = Eigen::VectorXd::Zero(d.n);
            r.a[2 * i] = facets[k].normal.x;
            r.a[2 * i + 1] = facets[k].normal.y;
            r.b = facets[k].offset;
            r.scale = 1.0;
            r.kind = 2;
            r.key_a = p.agents[i].id;
            r.key_b = static_cast<int>(k);
            d.rows.push_back(std::move(r));
        }
    }
    return d;
}

QpSolution finish(const QpProblem& p, const Eigen::VectorXd& x, QpSolution::Status status,
                  int iterations) {
    QpSolution sol;
    sol.status = status;
    sol.iterations = iterations;
    sol.objective = 0.0;
    for (std::size_t i = 0; i < p.agents.size(); ++i) {
        const Vec2 raw{x[2 * i], x[2 * i + 1]};
        const Vec2 u = clamp_to_ball(raw, p.agents[i].alpha);
        sol.unclamped.emplace_back(p.agents[i].id, raw);
        sol.controls.emplace_back(p.agents[i].id, u);
        sol.objective += norm_sq(u - p.agents[i].nominal);
    }
    return sol;
}

QpSolution infeasible_solution(const QpProblem& p, int iterations) {
    QpSolution sol;
    sol.status = QpSolution::Status::Infeasible;
    sol.iterations = iterations;
    sol.objective = 0.0;
    for (const QpAgent& a : p.agents) {
        const Vec2 u = clamp_to_ball(a.fallback, a.alpha);
        sol.controls.emplace_back(a.id, u);
        sol.unclamped.emplace_back(a.id, u);
        sol.objective += norm_sq(u - a.nominal);
    }
    return sol;
}

}  // namespace

std::vector<HalfPlane> norm_ball_facets(double alpha, int m) {
    if (m < 4) {
        throw std::invalid_argument("norm_ball_facets: m must be >= 4");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("norm_ball_facets: alpha must be > 0");
    }
    std::vector<HalfPlane> facets;
    facets.reserve(m);
    for (int k = 0; k < m; ++k) {
        const double theta = 2.0 * kPi * k / m;
        facets.push_back({Vec2{std::cos(theta), std::sin(theta)}, alpha});
    }
    return facets;
}

const Vec2& QpSolution::control_for(int agent_id) const {
    for (const auto& [id, u] : controls) {
        if (id == agent_id) return u;
    }
    throw std::invalid_argument("QpSolution: unknown agent id " + std::to_string(agent_id));
}

void QpSolver::reset() { warm_.clear(); }

QpSolution QpSolver::solve(const QpProblem& problem) {
    validate_problem(problem);
    bool trivially_infeasible = false;
    DenseProblem d = flatten(problem, trivially_infeasible);
    if (trivially_infeasible) {
        warm_.clear();
        return infeasible_solution(problem, 0);
    }

    const int m = static_cast<int>(d.rows.size());
    const int n = d.n;
    Eigen::VectorXd x = d.x0;

    std::vector<int> active;      // row indices
    std::vector<double> lambda;   // multipliers, aligned with `active`
    std::vector<char> is_active(m, 0);

    const double viol_tol = 1e-11;
    const int max_outer = 60 * (m + n) + 200;
    int iterations = 0;

    auto key_of = [&](int row) {
        return RowKey{d.rows[row].kind, d.rows[row].key_a, d.rows[row].key_b};
    };
    auto is_warm = [&](int row) {
        const RowKey k = key_of(row);
        return std::find(warm_.begin(), warm_.end(), k) != warm_.end();
    };
    auto drop_at = [&](std::size_t j) {
        is_active[active[j]] = 0;
        active.erase(active.begin() + j);
        lambda.erase(lambda.begin() + j);
    };
    // Rank-tolerant solve of N r = a_p in the least-squares sense; adjacent wall
    // disks make active normals nearly parallel, so plain normal equations are
    // not enough here.
    auto decompose = [&](Eigen::MatrixXd& N) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(N);
        cod.setThreshold(1e-10);
        return cod;
    };

    for (int restart = 0; restart < 8; ++restart) {
        for (int outer = 0; outer < max_outer; ++outer) {
            // Pick the next violated row; rows active in the previous solve go first.
            int pick = -1;
            double pick_v = viol_tol;
            bool pick_warm = false;
            for (int k = 0; k < m; ++k) {
                if (is_active[k]) continue;
                const double v = d.rows[k].a.dot(x) - d.rows[k].b;
                if (v <= viol_tol) continue;
                const bool w = !warm_.empty() && is_warm(k);
                if (pick < 0 || (w && !pick_warm) || (w == pick_warm && v > pick_v)) {
                    pick = k;
                    pick_v = v;
                    pick_warm = w;
                }
            }
            if (pick < 0) break;  // all rows satisfied

            ++iterations;
            const Eigen::VectorXd& np = d.rows[pick].a;
            double lam_p = 0.0;

            for (int inner = 0; inner < m + n + 4; ++inner) {
                const double v_cur = np.dot(x) - d.rows[pick].b;
                if (v_cur <= viol_tol) {
                    if (lam_p > 0.0) {
                        active.push_back(pick);
                        lambda.push_back(lam_p);
                        is_active[pick] = 1;
                    }
                    break;
                }

                const int q = static_cast<int>(active.size());
                Eigen::VectorXd r(q);
                Eigen::VectorXd z = np;
                if (q > 0) {
                    Eigen::MatrixXd N(n, q);
                    for (int j = 0; j < q; ++j) N.col(j) = d.rows[active[j]].a;
                    r = decompose(N).solve(np);
                    z = np - N * r;
                }
                const double z2 = z.squaredNorm();

                const double t2 = z2 > 1e-13 ? v_cur / z2 : kInf;
                double t1 = kInf;
                int blocking = -1;
                for (int j = 0; j < q; ++j) {
                    if (r[j] > 1e-12) {
                        const double cand = lambda[j] / r[j];
                        if (cand < t1) {
                            t1 = cand;
                            blocking = j;
                        }
                    }
                }

                const double t = std::min(t1, t2);
                if (t == kInf) {
                    warm_.clear();
                    return infeasible_solution(problem, iterations);
                }

                x -= t * z;
                for (int j = 0; j < q; ++j) lambda[j] = std::max(0.0, lambda[j] - t * r[j]);
                lam_p += t;

                if (t2 <= t1) {
                    active.push_back(pick);
                    lambda.push_back(lam_p);
                    is_active[pick] = 1;
                    break;
                }
                drop_at(blocking);
            }
        }

        // Termination polish: exact projection onto the final active set; drop any
        // rows whose multiplier comes out negative and re-enter the sweep.
        std::sort(active.begin(), active.end());
        {
            const int q = static_cast<int>(active.size());
            if (q == 0) {
                x = d.x0;
            } else {
                Eigen::MatrixXd N(n, q);
                Eigen::VectorXd bq(q);
                for (int j = 0; j < q; ++j) {
                    N.col(j) = d.rows[active[j]].a;
                    bq[j] = d.rows[active[j]].b;
                }
                Eigen::MatrixXd K = N.transpose() * N;
                Eigen::VectorXd rhs = N.transpose() * d.x0 - bq;
                Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
                cod.setThreshold(1e-12);
                Eigen::VectorXd lam = cod.solve(rhs);
                Eigen::VectorXd x_new = d.x0 - N * lam;
                // Only adopt the polished point if it is at least as feasible.
                double before = 0.0, after = 0.0;
                for (const DenseRow& row : d.rows) {
                    before = std::max(before, row.a.dot(x) - row.b);
                    after = std::max(after, row.a.dot(x_new) - row.b);
                }
                if (after <= std::max(before, 1e-10)) {
                    x = x_new;
                    for (int j = 0; j < q; ++j) lambda[j] = lam[j];
                }
                // Drop rows whose multiplier went negative and re-enter the sweep.
                for (std::size_t j = active.size(); j-- > 0;) {
                    if (lambda[j] < -1e-9) drop_at(j);
                }
            }
        }

        double max_viol = 0.0;
        for (const DenseRow& row : d.rows) {
            max_viol = std::max(max_viol, row.a.dot(x) - row.b);
        }
        if (max_viol <= 1e-9) {
            warm_.clear();
            for (int k : active) warm_.push_back(key_of(k));
            return finish(problem, x, QpSolution::Status::Solved, iterations);
        }
    }

    double max_viol = 0.0;
    for (const DenseRow& row : d.rows) {
        max_viol = std::max(max_viol, row.a.dot(x) - row.b);
    }
    throw std::runtime_error("qp: active-set solver failed to converge (residual " +
                             std::to_string(max_viol) + ")");
}

QpSolution solve(const QpProblem& problem) {
    QpSolver solver;
    return solver.solve(problem);
}

QpSolution oracle_solve(const QpProblem& problem, int max_sweeps, double relaxation) {
    validate_problem(problem);
    if (!(relaxation > 0.0) || relaxation > 1.0) {
        throw std::invalid_argument("oracle_solve: relaxation must be in (0, 1]");
    }
    bool trivially_infeasible = false;
    DenseProblem d = flatten(problem, trivially_infeasible);
    if (trivially_infeasible) {
        throw std::runtime_error("oracle_solve: problem is trivially infeasible");
    }

    const int m = static_cast<int>(d.rows.size());
    Eigen::VectorXd x = d.x0;
    Eigen::VectorXd corr = Eigen::VectorXd::Zero(m);  // Dykstra corrections, along row normals

    int sweep = 0;
    if (m > 0) {
        for (; sweep < max_sweeps; ++sweep) {
            double sweep_change = 0.0;
            for (int k = 0; k < m; ++k) {
                const Eigen::VectorXd w = x + corr[k] * d.rows[k].a;
                const double viol = d.rows[k].a.dot(w) - d.rows[k].b;
                if (viol > 0.0) {
                    const Eigen::VectorXd x_new = w - relaxation * viol * d.rows[k].a;
                    sweep_change = std::max(sweep_change, (x_new - x).lpNorm<Eigen::Infinity>());
                    corr[k] = relaxation * viol;
                    x = x_new;
                } else {
                    sweep_change = std::max(sweep_change, (w - x).lpNorm<Eigen::Infinity>());
                    corr[k] = 0.0;
                    x = w;
                }
            }
            double max_viol = 0.0;
            for (const DenseRow& r : d.rows) {
                max_viol = std::max(max_viol, r.a.dot(x) - r.b);
            }
            if (sweep_change <= 1e-12 && max_viol <= 1e-10) break;
        }
        if (sweep >= max_sweeps) {
            throw std::runtime_error("oracle_solve: no convergence after " +
                                     std::to_string(max_sweeps) + " sweeps");
        }
    }
    return finish(problem, x, QpSolution::Status::Solved, sweep + 1);
}

}  // namespace spgp
