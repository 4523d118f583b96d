#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "spgp/spgp.hpp"

using namespace spgp;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

SpgpParams params(double u_t = 0.01, int window = 1) {
    SpgpParams p;
    p.u_t = u_t;
    p.window = window;
    p.perturb_timeout_steps = 0;
    return p;
}

AgentState agent(int id, Vec2 p, Vec2 goal) {
    AgentState a;
    a.id = id;
    a.position = p;
    a.goal = goal;
    return a;
}

}  // namespace

TEST_CASE("detect_deadlock: the instantaneous condition with W=1") {
    const AgentMode normal{};
    auto [fired, next] = detect_deadlock({0, 0}, {0.5, 0}, normal, params(0.01, 1));
    CHECK(fired);
    CHECK(next.consecutive_deadlock_steps == 1);

    auto [moving, m2] = detect_deadlock({0.5, 0}, {0.5, 0}, next, params(0.01, 1));
    CHECK_FALSE(moving);
    CHECK(m2.consecutive_deadlock_steps == 0);

    auto [idle, m3] = detect_deadlock({0, 0}, {0, 0}, normal, params(0.01, 1));
    CHECK_FALSE(idle);  // u_hat = 0 is goal-reached, not deadlock
}

TEST_CASE("detect_deadlock: sustained window") {
    const SpgpParams p = params(0.05, 3);
    AgentMode mode{};
    for (int step = 0; step < 2; ++step) {
        auto [fired, next] = detect_deadlock({0.01, 0}, {0.5, 0}, mode, p);
        CHECK_FALSE(fired);
        mode = next;
    }
    auto [fired3, m3] = detect_deadlock({0.01, 0}, {0.5, 0}, mode, p);
    CHECK(fired3);
    // Past the window the counter keeps rising but the detection fires once.
    auto [fired4, m4] = detect_deadlock({0.01, 0}, {0.5, 0}, m3, p);
    CHECK_FALSE(fired4);
    CHECK(m4.consecutive_deadlock_steps == 4);

    // A single good step resets the window.
    auto [fired5, m5] = detect_deadlock({0.5, 0}, {0.5, 0}, m4, p);
    CHECK_FALSE(fired5);
    CHECK(m5.consecutive_deadlock_steps == 0);
}

TEST_CASE("detect_deadlock: PERTURB agents are not re-tested") {
    AgentMode mode{};
    mode.mode = AgentMode::Mode::Perturb;
    mode.pseudo_goal = Vec2{1, 0};
    auto [fired, next] = detect_deadlock({0, 0}, {0.5, 0}, mode, params());
    CHECK_FALSE(fired);
    CHECK(next.mode == AgentMode::Mode::Perturb);
}

TEST_CASE("select_pseudo_goal: single candidate evaluates Eq-10 directly") {
    // One candidate, so the draw itself decides the angle.
    SpgpParams p = params();
    p.candidates = 1;
    p.delta = 1.0;
    // Find a seed whose first uniform is close to 0.25 to pin the (0, 1) direction;
    // instead, verify against the same draw replayed by hand.
    Rng rng(4242);
    Rng replay(4242);
    const Vec2 pg = select_pseudo_goal({0, 0}, {}, p, rng);
    const double x = replay.uniform();
    CHECK(pg.x == doctest::Approx(std::cos(kTwoPi * x)).epsilon(1e-15));
    CHECK(pg.y == doctest::Approx(std::sin(kTwoPi * x)).epsilon(1e-15));
}

TEST_CASE("select_pseudo_goal: always on the delta circle, any seed") {
    SpgpParams p = params();
    p.delta = 0.75;
    p.candidates = 8;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        const std::vector<Vec2> others = {{1, 0}, {-0.3, 0.4}};
        const Vec2 pg = select_pseudo_goal({0.2, -0.1}, others, p, rng);
        CHECK(std::abs(dist(pg, {0.2, -0.1}) - 0.75) < 1e-12);
    }
}

TEST_CASE("select_pseudo_goal: max-min distance and tie-break") {
    SpgpParams p = params();
    p.candidates = 64;
    p.delta = 1.0;
    Rng rng(7);
    const std::vector<Vec2> others = {{1, 0}};
    const Vec2 pg = select_pseudo_goal({0, 0}, others, p, rng);
    // With 64 samples the winner must sit in the half-plane away from the neighbor.
    CHECK(pg.x < 0.0);

    // Empty others: every candidate ties at +inf, so the first is returned.
    Rng rng_a(123), rng_b(123);
    SpgpParams one = p;
    const Vec2 first_all = select_pseudo_goal({0, 0}, {}, one, rng_a);
    one.candidates = 1;
    const Vec2 first_only = select_pseudo_goal({0, 0}, {}, one, rng_b);
    CHECK(first_all == first_only);
}

TEST_CASE("select_pseudo_goal: deterministic for a fixed seed") {
    SpgpParams p = params();
    const std::vector<Vec2> others = {{0.5, 0.5}};
    Rng a(55), b(55);
    CHECK(select_pseudo_goal({0, 0}, others, p, a) ==
          select_pseudo_goal({0, 0}, others, p, b));
}

TEST_CASE("select_pseudo_goal: verbatim two-random form leaves the circle") {
    SpgpParams p = params();
    p.independent_xy = true;
    p.candidates = 1;
    int off_circle = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const Vec2 pg = select_pseudo_goal({0, 0}, {}, p, rng);
        if (std::abs(norm(pg) - p.delta) > 1e-6) ++off_circle;
    }
    CHECK(off_circle > 25);
}

TEST_CASE("select_pseudo_goal: obstacle-aware overload filters blocked candidates") {
    SpgpParams p = params();
    p.candidates = 32;
    p.delta = 1.0;
    // Wall of obstacles along x = 0.5 blocks every candidate with pg.x > 0.
    std::vector<Obstacle> wall;
    for (int i = -30; i <= 30; ++i) {
        wall.push_back({{0.5, 0.1 * i}, 0.1});
    }
    Rng rng(3);
    const auto pg = select_pseudo_goal({0, 0}, {}, wall, 0.2, p, rng);
    REQUIRE(pg.has_value());
    CHECK(pg->x < 0.5);

    // Fully enclosed: no candidate is feasible.
    std::vector<Obstacle> box = wall;
    for (int i = -30; i <= 30; ++i) {
        box.push_back({{-0.5, 0.1 * i}, 0.1});
        box.push_back({{0.1 * i, 0.5}, 0.1});
        box.push_back({{0.1 * i, -0.5}, 0.1});
    }
    Rng rng2(3);
    CHECK_FALSE(select_pseudo_goal({0, 0}, {}, box, 0.2, p, rng2).has_value());
}

TEST_CASE("select_pseudo_goal: obstacle overload consumes the same draws") {
    SpgpParams p = params();
    p.candidates = 8;
    Rng a(91), b(91);
    const std::vector<Vec2> others = {{2, 0}};
    const Vec2 plain = select_pseudo_goal({0, 0}, others, p, a);
    const auto filtered = select_pseudo_goal({0, 0}, others, {}, 0.2, p, b);
    REQUIRE(filtered.has_value());
    CHECK(plain == *filtered);  // no obstacles: identical choice, identical rng use
    CHECK(a.state() == b.state());
}

TEST_CASE("spgp_update: agents beyond neighbor_radius do not bias the selection") {
    SpgpParams p = params(0.01, 1);
    p.neighbor_radius = 3.0;
    // The far agent (10 m away) must not count as "surrounding"; with no nearby
    // agents every candidate ties and the first draw wins.
    std::vector<AgentState> agents = {agent(0, {0, 0}, {5, 0}), agent(1, {10, 0}, {-5, 0})};
    std::vector<ControlInput> u = {{0, 0}, {0.5, 0}};
    std::vector<ControlInput> uh = {{0.5, 0}, {0.5, 0}};
    std::vector<AgentMode> modes(2);
    modes[0].original_goal = agents[0].goal;
    modes[1].original_goal = agents[1].goal;
    Rng rng(3), replay(3);
    spgp_update(agents, u, uh, modes, p, rng);
    REQUIRE(modes[0].mode == AgentMode::Mode::Perturb);
    SpgpParams one = p;
    one.candidates = 1;
    const Vec2 first = select_pseudo_goal({0, 0}, {}, one, replay);
    CHECK(*modes[0].pseudo_goal == first);
}

TEST_CASE("spgp_update: quiet agents stay put") {
    std::vector<AgentState> agents = {agent(0, {0, 0}, {5, 0})};
    std::vector<ControlInput> u = {{0.5, 0}};
    std::vector<ControlInput> uh = {{0.5, 0}};
    std::vector<AgentMode> modes(1);
    modes[0].original_goal = agents[0].goal;
    Rng rng(1);
    const auto events = spgp_update(agents, u, uh, modes, params(), rng);
    CHECK(events.empty());
    CHECK(modes[0].mode == AgentMode::Mode::Normal);
    CHECK(agents[0].goal == Vec2{5, 0});
}

TEST_CASE("spgp_update: deadlocked agent enters PERTURB on the delta circle") {
    SpgpParams p = params(0.01, 1);
    p.delta = 1.0;
    std::vector<AgentState> agents = {agent(0, {0, 0}, {5, 0}), agent(1, {0.5, 0}, {-5, 0})};
    std::vector<ControlInput> u = {{0, 0}, {0.5, 0}};
    std::vector<ControlInput> uh = {{0.5, 0}, {0.5, 0}};
    std::vector<AgentMode> modes(2);
    modes[0].original_goal = agents[0].goal;
    modes[1].original_goal = agents[1].goal;
    Rng rng(17);
    const auto events = spgp_update(agents, u, uh, modes, p, rng);
    REQUIRE(events.size() == 2);  // detection + perturb start
    CHECK(events[0].type == SpgpEvent::Type::DeadlockDetected);
    CHECK(events[1].type == SpgpEvent::Type::PerturbStarted);
    CHECK(modes[0].mode == AgentMode::Mode::Perturb);
    CHECK(modes[1].mode == AgentMode::Mode::Normal);
    CHECK(std::abs(dist(agents[0].goal, modes[0].perturb_anchor) - p.delta) < 1e-12);
    CHECK(agents[0].goal == *modes[0].pseudo_goal);
    CHECK(modes[0].original_goal == Vec2{5, 0});
}

TEST_CASE("spgp_update: arrival restores the original goal exactly") {
    SpgpParams p = params();
    p.eps_pg = 0.1;
    std::vector<AgentState> agents = {agent(0, {1.95, 0}, {2, 0})};
    std::vector<AgentMode> modes(1);
    modes[0].mode = AgentMode::Mode::Perturb;
    modes[0].original_goal = {5, 5};
    modes[0].pseudo_goal = Vec2{2, 0};
    agents[0].goal = {2, 0};
    std::vector<ControlInput> u = {{0.2, 0}};
    std::vector<ControlInput> uh = {{0.2, 0}};
    Rng rng(1);
    const auto events = spgp_update(agents, u, uh, modes, p, rng);
    REQUIRE(events.size() == 1);
    CHECK(events[0].type == SpgpEvent::Type::PerturbArrived);
    CHECK(modes[0].mode == AgentMode::Mode::Normal);
    CHECK(agents[0].goal == Vec2{5, 5});
    CHECK_FALSE(modes[0].pseudo_goal.has_value());
}

TEST_CASE("spgp_update: timeout reverts to the original goal") {
    SpgpParams p = params();
    p.perturb_timeout_steps = 3;
    std::vector<AgentState> agents = {agent(0, {0, 0}, {9, 9})};
    std::vector<AgentMode> modes(1);
    modes[0].mode = AgentMode::Mode::Perturb;
    modes[0].original_goal = {5, 5};
    modes[0].pseudo_goal = Vec2{9, 9};
    std::vector<ControlInput> u = {{0, 0}};
    std::vector<ControlInput> uh = {{0.3, 0}};
    Rng rng(1);
    for (int i = 0; i < 2; ++i) {
        CHECK(spgp_update(agents, u, uh, modes, p, rng).empty());
    }
    const auto events = spgp_update(agents, u, uh, modes, p, rng);
    REQUIRE(events.size() == 1);
    CHECK(events[0].type == SpgpEvent::Type::PerturbTimeout);
    CHECK(agents[0].goal == Vec2{5, 5});
    CHECK(modes[0].mode == AgentMode::Mode::Normal);
}

TEST_CASE("spgp params validation") {
    SpgpParams bad;
    bad.delta = 0.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = {};
    bad.window = 0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = {};
    bad.candidates = 0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}
