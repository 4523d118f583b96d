// Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "spgp/harness.hpp"
#include "spgp/metrics.hpp"
#include "spgp/qp.hpp"
#include "spgp/rng.hpp"
#include "spgp/scenario.hpp"
#include "spgp/simulator.hpp"

using namespace spgp;

namespace {

constexpr std::uint64_t kBaseSeed = 1;
const std::vector<std::string> kScenarios = {"doorway", "intersection", "hallway", "lcorner"};

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Criterion1Data {
    std::vector<ExperimentSummary> summaries;  // per scenario, SPGP, 2 agents
    double elapsed = 0.0;
};

Criterion1Data criterion1() {
    Criterion1Data data;
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::ostringstream detail;
    detail << "SPGP success rates, 2 agents, 10 trials:";
    for (const auto& name : kScenarios) {
        const auto cfg = build_scenario(name, 2);
        const auto s = run_experiment(cfg, Method::Spgp, 10, kBaseSeed);
        detail << " " << name << " SR=" << s.sr.mean << "+-" << s.sr.stddev;
        if (s.sr.mean != 100.0 || s.sr.stddev != 0.0) pass = false;
        data.summaries.push_back(s);
    }
    data.elapsed = seconds_since(t0);
    detail << " (" << data.elapsed << " s)";
    if (data.elapsed >= 60.0) pass = false;
    report(1, pass, detail.str());
    return data;
}

std::vector<ExperimentSummary> criterion2() {
    std::vector<ExperimentSummary> out;
    bool pass = true;
    std::ostringstream detail;
    detail << "baseline (SBC) failure rates, 2 agents, 10 trials:";
    for (const auto& name : {std::string("doorway"), std::string("intersection")}) {
        const auto cfg = build_scenario(name, 2);
        const auto s = run_experiment(cfg, Method::Sbc, 10, kBaseSeed);
        int trials_with_deadlock = 0;
        for (const auto& t : s.trial_records) {
            if (t.result.deadlock_count >= 1) ++trials_with_deadlock;
        }
        detail << " " << name << " SR=" << s.sr.mean << " deadlocked_trials="
               << trials_with_deadlock << "/" << s.trials;
        if (s.sr.mean != 0.0 || trials_with_deadlock != s.trials) pass = false;
        out.push_back(s);
    }
    // Reported, not asserted (geometry-dependent).
    for (const auto& name : {std::string("hallway"), std::string("lcorner")}) {
        const auto cfg = build_scenario(name, 2);
        const auto s = run_experiment(cfg, Method::Sbc, 10, kBaseSeed);
        detail << " [" << name << " SR=" << s.sr.mean << ", reported only]";
        out.push_back(s);
    }
    report(2, pass, detail.str());
    return out;
}

void criterion3(const Criterion1Data& c1) {
    bool pass = true;
    std::ostringstream detail;

    bool dv_ok = true;
    for (const auto& s : c1.summaries) {
        for (const auto& t : s.trial_records) {
            for (double dv : t.result.avg_delta_v) {
                if (!(dv >= 0.0) || !std::isfinite(dv)) dv_ok = false;
            }
        }
    }
    if (!dv_ok) pass = false;

    // Unobstructed solo agent: path deviation vanishes.
    ScenarioConfig solo = build_scenario("doorway", 1);
    solo.obstacles.clear();
    validate(solo);
    const auto [solo_log, solo_result] = run(solo, kBaseSeed);
    const double solo_dev = solo_result.path_deviation.at(0);
    if (!(solo_dev <= 1e-6) || !solo_result.success) pass = false;

    const double doorway_dev = c1.summaries.at(0).path_deviation.mean;
    if (!(doorway_dev > solo_dev)) pass = false;

    detail << "dV finite/nonneg=" << (dv_ok ? "yes" : "no") << ", solo path dev=" << solo_dev
           << ", SPGP doorway path dev=" << doorway_dev;
    report(3, pass, detail.str());
}

SweepResult criterion4() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = build_scenario("doorway", 2);
    const auto sweep = sweep_radius(cfg, {0.5, 1.0, 1.5, 2.0}, 10, kBaseSeed);
    const double elapsed = seconds_since(t0);

    bool pass = true;
    std::ostringstream detail;
    detail << "makespan vs delta:";
    for (const auto& p : sweep.points) {
        detail << " " << p.delta << "->" << p.mean_makespan;
        if (p.summary.sr.mean != 100.0) pass = false;
    }
    const auto& pts = sweep.points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].mean_makespan < pts[i - 1].mean_makespan) pass = false;
    }
    const double early_rise = pts[1].mean_makespan - pts[0].mean_makespan;
    const double late_rise = pts[3].mean_makespan - pts[2].mean_makespan;
    if (!(late_rise < early_rise)) pass = false;
    detail << "; rise 0.5->1.0 = " << early_rise << ", rise 1.5->2.0 = " << late_rise << " ("
           << elapsed << " s)";
    if (elapsed >= 180.0) pass = false;
    report(4, pass, detail.str());
    return sweep;
}

void criterion5(const Criterion1Data& c1, const std::vector<ExperimentSummary>& c2,
                const SweepResult& sweep) {
    double min_h = std::numeric_limits<double>::infinity();
    for (const auto& s : c1.summaries) min_h = std::min(min_h, s.min_pairwise_h);
    for (const auto& s : c2) min_h = std::min(min_h, s.min_pairwise_h);
    for (const auto& p : sweep.points) min_h = std::min(min_h, p.summary.min_pairwise_h);
    std::ostringstream detail;
    detail << "min pairwise h over criteria 1-4 trials = " << min_h;
    report(5, min_h >= -1e-3, detail.str());
}

void criterion6() {
    Rng rng(20240601);
    constexpr double kPi = 3.14159265358979323846;
    bool pass = true;
    double worst_obj = 0.0, worst_viol = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        QpProblem p;
        const int n = 1 + static_cast<int>(rng.uniform() * 3) % 3;
        std::vector<Vec2> witness;
        for (int i = 0; i < n; ++i) {
            const double alpha = 0.5 + rng.uniform() * 1.5;
            p.agents.push_back({i,
                                {(rng.uniform() - 0.5) * 4.0 * alpha,
                                 (rng.uniform() - 0.5) * 4.0 * alpha},
                                alpha,
                                {}});
            const double r = rng.uniform() * 0.9 * alpha;
            const double th = rng.uniform() * 2.0 * kPi;
            witness.push_back({r * std::cos(th), r * std::sin(th)});
        }
        const int rows = static_cast<int>(rng.uniform() * 7) % 7;
        for (int k = 0; k < rows; ++k) {
            ConstraintRow row;
            if (n >= 2 && rng.uniform() < 0.6) {
                int i = static_cast<int>(rng.uniform() * n) % n;
                int j = (i + 1 + static_cast<int>(rng.uniform() * (n - 1)) % (n - 1)) % n;
                if (i > j) std::swap(i, j);
                const Vec2 dp{(rng.uniform() - 0.5) * 4.0, (rng.uniform() - 0.5) * 4.0};
                row.coeffs = {{i, -1.0 * dp}, {j, dp}};
                row.source = {RowSource::Kind::AgentPair, i, j};
            } else {
                const int i = static_cast<int>(rng.uniform() * n) % n;
                row.coeffs = {{i, {(rng.uniform() - 0.5) * 4.0, (rng.uniform() - 0.5) * 4.0}}};
                row.source = {RowSource::Kind::AgentObstacle, i, k};
            }
            double lhs = 0.0;
            for (const auto& [id, c] : row.coeffs) lhs += dot(c, witness[id]);
            row.bound = lhs + rng.uniform() * 1.5;
            p.rows.push_back(row);
        }

        const auto sol = solve(p);
        const auto oracle = oracle_solve(p);
        if (sol.status != QpSolution::Status::Solved) {
            pass = false;
            continue;
        }
        worst_obj = std::max(worst_obj, std::abs(sol.objective - oracle.objective));
        for (const auto& row : p.rows) {
            double lhs = 0.0;
            for (const auto& [id, c] : row.coeffs) {
                for (const auto& [uid, u] : sol.unclamped) {
                    if (uid == id) lhs += dot(c, u);
                }
            }
            worst_viol = std::max(worst_viol, lhs - row.bound);
        }
    }
    if (worst_obj > 1e-6 || worst_viol > 1e-8) pass = false;
    std::ostringstream detail;
    detail << "100 randomized QPs: max |objective - oracle| = " << worst_obj
           << ", max row violation = " << worst_viol;
    report(6, pass, detail.str());
}

void criterion7() {
    Rng rng(777);
    bool pass = true;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec2> a, b;
        const int na = 1 + static_cast<int>(rng.uniform() * 200) % 200;
        const int nb = 1 + static_cast<int>(rng.uniform() * 200) % 200;
        for (int i = 0; i < na; ++i) {
            a.push_back({rng.uniform() * 20 - 10, rng.uniform() * 20 - 10});
        }
        for (int i = 0; i < nb; ++i) {
            b.push_back({rng.uniform() * 20 - 10, rng.uniform() * 20 - 10});
        }
        // Exhaustive double loop, max of pointwise nearest distances.
        double direct = 0.0;
        for (const Vec2& p : a) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const Vec2& q : b) nearest = std::min(nearest, dist(p, q));
            direct = std::max(direct, nearest);
        }
        for (const Vec2& q : b) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const Vec2& p : a) nearest = std::min(nearest, dist(q, p));
            direct = std::max(direct, nearest);
        }
        if (hausdorff(a, b) != direct) pass = false;
    }
    report(7, pass, "50 randomized sequence pairs: production == exhaustive double loop");
}

void criterion8(const Criterion1Data& c1) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::pair<std::string, int>> scales = {
        {"doorway", 8}, {"intersection", 10}, {"hallway", 10}, {"lcorner", 5}};
    bool pass = true;
    std::ostringstream detail;
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const auto& [name, n] = scales[k];
        const auto cfg = build_scenario(name, n);
        const auto s = run_experiment(cfg, Method::Spgp, 3, kBaseSeed);
        const double two_agent_makespan = c1.summaries.at(k).makespan.mean;
        detail << " " << name << "[" << n << "] SR=" << s.sr.mean
               << " makespan=" << s.makespan.mean << " (2-agent " << two_agent_makespan << ")";
        if (s.sr.mean != 100.0 || !(s.makespan.mean > two_agent_makespan)) pass = false;
    }
    const double elapsed = seconds_since(t0);
    detail << " (" << elapsed << " s)";
    if (elapsed >= 300.0) pass = false;
    report(8, pass, "scalability:" + detail.str());
}

void criterion9() {
    const auto cfg = build_scenario("doorway", 2);
    const std::string p1 = "/tmp/spgp_acceptance_det1.csv";
    const std::string p2 = "/tmp/spgp_acceptance_det2.csv";
    emit_results(run_experiment(cfg, Method::Spgp, 10, kBaseSeed), EmitFormat::Csv, p1);
    emit_results(run_experiment(cfg, Method::Spgp, 10, kBaseSeed), EmitFormat::Csv, p2);
    const auto read = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const bool same = read(p1) == read(p2) &&
                      read(trials_sidecar_path(p1)) == read(trials_sidecar_path(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
    std::remove(trials_sidecar_path(p1).c_str());
    std::remove(trials_sidecar_path(p2).c_str());
    report(9, same, "repeated doorway experiment emits byte-identical CSV");
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c1 = criterion1();
    const auto c2 = criterion2();
    criterion3(c1);
    const auto sweep = criterion4();
    criterion5(c1, c2, sweep);
    criterion6();
    criterion7();
    criterion8(c1);
    criterion9();
    std::printf("%d/9 criteria passed (total %.1f s)\n", 9 - g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}
